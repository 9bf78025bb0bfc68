#include "charax/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "charax/error.hpp"

namespace charax {

namespace {

// Copies q into a buffer with one ghost cell on each side.
std::vector<double> with_ghosts(std::span<const double> q, const Grid1D& grid,
                                const Boundary& boundary) {
  const std::size_t n = q.size();
  std::vector<double> ext(n + 2);
  std::copy(q.begin(), q.end(), ext.begin() + 1);
  if (grid.periodic()) {
    const double jump =
        boundary.kind() == Boundary::Kind::shift ? boundary.jump() : 0.0;
    ext[0] = q[n - 1] - jump;
    ext[n + 1] = q[0] + jump;
  } else if (boundary.kind() == Boundary::Kind::hold) {
    ext[0] = boundary.left();
    ext[n + 1] = boundary.right();
  } else {
    ext[0] = 2.0 * q[0] - q[1];
    ext[n + 1] = 2.0 * q[n - 1] - q[n - 2];
  }
  return ext;
}

// Speeds get zero-gradient ghosts on line grids.
std::vector<double> speed_with_ghosts(std::span<const double> a,
                                      const Grid1D& grid) {
  const std::size_t n = a.size();
  std::vector<double> ext(n + 2);
  std::copy(a.begin(), a.end(), ext.begin() + 1);
  ext[0] = grid.periodic() ? a[n - 1] : a[0];
  ext[n + 1] = grid.periodic() ? a[0] : a[n - 1];
  return ext;
}

void require_positive_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw DomainError("viscosity eps must be positive and finite");
  }
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("grid mismatch");
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void throw_if_cfl_violated(double dt, double limit, std::string_view context) {
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << context << ": time step " << dt << " violates the stability limit "
        << limit;
    throw CflError(msg.str());
  }
}

GridFunction ddx(const GridFunction& f, double wrap_jump) {
  const Grid1D& g = f.grid();
  const std::size_t n = g.size();
  const double dx = g.dx();
  auto q = f.values();
  std::vector<double> out(n);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    out[j] = (q[j + 1] - q[j - 1]) / (2.0 * dx);
  }
  if (g.periodic()) {
    out[0] = (q[1] - (q[n - 1] - wrap_jump)) / (2.0 * dx);
    out[n - 1] = ((q[0] + wrap_jump) - q[n - 2]) / (2.0 * dx);
  } else {
    out[0] = (-3.0 * q[0] + 4.0 * q[1] - q[2]) / (2.0 * dx);
    out[n - 1] = (3.0 * q[n - 1] - 4.0 * q[n - 2] + q[n - 3]) / (2.0 * dx);
  }
  return GridFunction(g, std::move(out));
}

double stable_dt(const Grid1D& grid, double max_speed, double eps,
                 double safety) {
  const double dx = grid.dx();
  double limit = dx * dx / (2.0 * eps);
  if (max_speed > 0.0) limit = std::min(limit, dx / max_speed);
  return safety * limit;
}

double linear_face_flux(double a_left, double q_left, double a_right,
                        double q_right, double dx, double eps) {
  const double a_max = std::max(std::abs(a_left), std::abs(a_right));
  if (a_max * dx <= 2.0 * eps) {
    return 0.5 * (a_left * q_left + a_right * q_right);
  }
  return std::max(a_left, 0.0) * q_left + std::min(a_right, 0.0) * q_right;
}

double nonlinear_face_flux(double u_left, double f_left, double a_left,
                           double u_right, double f_right, double a_right,
                           double dx, double eps) {
  const double du = u_right - u_left;
  const double a_hat =
      std::abs(du) > 1e-14 * (1.0 + std::abs(u_left) + std::abs(u_right))
          ? (f_right - f_left) / du
          : 0.5 * (a_left + a_right);
  const double a_max =
      std::max({std::abs(a_left), std::abs(a_right), std::abs(a_hat)});
  if (a_max * dx <= 2.0 * eps) return 0.5 * (f_left + f_right);
  if (a_left >= 0.0 && a_right >= 0.0) return f_left;
  if (a_left <= 0.0 && a_right <= 0.0) return f_right;
  // Sonic point inside the face: local Lax-Friedrichs.
  return 0.5 * (f_left + f_right) - 0.5 * a_max * du;
}

GridFunction advect_diffuse_step(const GridFunction& q,
                                 const GridFunction& speed, double eps,
                                 double dt, Form form, const Boundary& boundary,
                                 CflCheck check) {
  require_positive_eps(eps);
  require_same_grid(q, speed);
  const Grid1D& grid = q.grid();
  const double dx = grid.dx();
  if (check == CflCheck::enforce) {
    throw_if_cfl_violated(dt, stable_dt(grid, max_abs(speed.values()), eps, 1.0),
                          "advect_diffuse_step");
  }
  const std::size_t n = grid.size();
  const auto qe = with_ghosts(q.values(), grid, boundary);
  const auto ae = speed_with_ghosts(speed.values(), grid);
  std::vector<double> out(n);

  if (form == Form::advective) {
    for (std::size_t j = 0; j < n; ++j) {
      const double qm = qe[j], qc = qe[j + 1], qp = qe[j + 2];
      const double a = ae[j + 1];
      double adv;
      if (std::abs(a) * dx <= 2.0 * eps) {
        adv = a * (qp - qm) / (2.0 * dx);
      } else if (a > 0.0) {
        adv = a * (qc - qm) / dx;
      } else {
        adv = a * (qp - qc) / dx;
      }
      out[j] = qc - dt * adv + dt * eps * ((qp - 2.0 * qc + qm) / (dx * dx));
    }
  } else {
    std::vector<double> face(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      face[k] = linear_face_flux(ae[k], qe[k], ae[k + 1], qe[k + 1], dx, eps);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double qm = qe[j], qc = qe[j + 1], qp = qe[j + 2];
      out[j] = qc - dt / dx * (face[j + 1] - face[j]) +
               dt * eps * ((qp - 2.0 * qc + qm) / (dx * dx));
    }
  }
  return GridFunction(grid, std::move(out));
}

GridFunction conservation_step(const GridFunction& u, const ScalarFlux& flux,
                               double eps, double dt, const Boundary& boundary,
                               CflCheck check) {
  require_positive_eps(eps);
  const Grid1D& grid = u.grid();
  const double dx = grid.dx();
  const std::size_t n = grid.size();
  const auto ue = with_ghosts(u.values(), grid, boundary);
  std::vector<double> fe(n + 2), ae(n + 2);
  double a_max = 0.0;
  for (std::size_t k = 0; k < n + 2; ++k) {
    fe[k] = flux.f(ue[k]);
    ae[k] = flux.df(ue[k]);
    a_max = std::max(a_max, std::abs(ae[k]));
  }
  if (check == CflCheck::enforce) {
    throw_if_cfl_violated(dt, stable_dt(grid, a_max, eps, 1.0),
                          "conservation_step");
  }
  std::vector<double> face(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    face[k] = nonlinear_face_flux(ue[k], fe[k], ae[k], ue[k + 1], fe[k + 1],
                                  ae[k + 1], dx, eps);
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double qm = ue[j], qc = ue[j + 1], qp = ue[j + 2];
    out[j] = qc - dt / dx * (face[j + 1] - face[j]) +
             dt * eps * ((qp - 2.0 * qc + qm) / (dx * dx));
  }
  return GridFunction(grid, std::move(out));
}

bool resolves_viscous_layer(double dx, double eps) { return dx <= eps / 4.0; }

void check_resolution(double dx, double eps, ResolutionPolicy policy,
                      std::string_view context) {
  if (resolves_viscous_layer(dx, eps) || policy == ResolutionPolicy::ignore) {
    return;
  }
  std::ostringstream msg;
  msg << context << ": dx=" << dx << " does not resolve the viscous layer (eps/4="
      << eps / 4.0 << ")";
  if (policy == ResolutionPolicy::refuse) throw ConfigError(msg.str());
  std::clog << "warning: " << msg.str() << '\n';
}

// ---- torus ---------------------------------------------------------------

GridFunction2D ddx(const GridFunction2D& f, int axis) {
  const TorusGrid2D& g = f.grid();
  const std::size_t n1 = g.n1(), n2 = g.n2();
  const double h = g.dx(axis);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      double qp, qm;
      if (axis == 0) {
        qp = f((i + 1) % n1, j);
        qm = f((i + n1 - 1) % n1, j);
      } else {
        qp = f(i, (j + 1) % n2);
        qm = f(i, (j + n2 - 1) % n2);
      }
      out[g.index(i, j)] = (qp - qm) / (2.0 * h);
    }
  }
  return GridFunction2D(g, std::move(out));
}

double stable_dt_2d(const TorusGrid2D& grid, double max_speed1,
                    double max_speed2, double eps, double safety) {
  const double dx1 = grid.dx1(), dx2 = grid.dx2();
  double limit = 1.0 / (2.0 * eps * (1.0 / (dx1 * dx1) + 1.0 / (dx2 * dx2)));
  const double rate = max_speed1 / dx1 + max_speed2 / dx2;
  if (rate > 0.0) limit = std::min(limit, 1.0 / rate);
  return safety * limit;
}

namespace {

// Shared driver for the two torus steps. `face_flux(axis, left, right)`
// returns the numerical flux through the face between two flat indices.
template <class FaceFlux>
GridFunction2D torus_step(const GridFunction2D& q, double eps, double dt,
                          FaceFlux&& face_flux) {
  const TorusGrid2D& g = q.grid();
  const std::size_t n1 = g.n1(), n2 = g.n2();
  const double dx1 = g.dx1(), dx2 = g.dx2();
  auto v = q.values();
  // Face fluxes: F1[i][j] sits between (i-1, j) and (i, j).
  std::vector<double> f1(g.size()), f2(g.size());
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t im = (i + n1 - 1) % n1;
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t jm = (j + n2 - 1) % n2;
      f1[g.index(i, j)] = face_flux(0, g.index(im, j), g.index(i, j));
      f2[g.index(i, j)] = face_flux(1, g.index(i, jm), g.index(i, j));
    }
  }
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t ip = (i + 1) % n1, im = (i + n1 - 1) % n1;
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t jp = (j + 1) % n2, jm = (j + n2 - 1) % n2;
      const std::size_t c = g.index(i, j);
      const double qc = v[c];
      const double lap1 =
          (v[g.index(ip, j)] - 2.0 * qc + v[g.index(im, j)]) / (dx1 * dx1);
      const double lap2 =
          (v[g.index(i, jp)] - 2.0 * qc + v[g.index(i, jm)]) / (dx2 * dx2);
      out[c] = qc - dt / dx1 * (f1[g.index(ip, j)] - f1[c]) -
               dt / dx2 * (f2[g.index(i, jp)] - f2[c]) +
               dt * eps * (lap1 + lap2);
    }
  }
  return GridFunction2D(g, std::move(out));
}

}  // namespace

GridFunction2D advect_diffuse_step_2d(const GridFunction2D& q,
                                      const GridFunction2D& speed1,
                                      const GridFunction2D& speed2, double eps,
                                      double dt, CflCheck check) {
  require_positive_eps(eps);
  if (!(q.grid() == speed1.grid()) || !(q.grid() == speed2.grid())) {
    throw ConfigError("grid mismatch");
  }
  const TorusGrid2D& g = q.grid();
  if (check == CflCheck::enforce) {
    throw_if_cfl_violated(dt,
                          stable_dt_2d(g, speed1.max_abs(), speed2.max_abs(),
                                       eps, 1.0),
                          "advect_diffuse_step_2d");
  }
  auto v = q.values();
  auto a1 = speed1.values();
  auto a2 = speed2.values();
  const double dx1 = g.dx1(), dx2 = g.dx2();
  return torus_step(q, eps, dt, [&](int axis, std::size_t l, std::size_t r) {
    const auto& a = axis == 0 ? a1 : a2;
    return linear_face_flux(a[l], v[l], a[r], v[r], axis == 0 ? dx1 : dx2, eps);
  });
}

GridFunction2D conservation_step_2d(const GridFunction2D& u,
                                    const ScalarFlux& flux1,
                                    const ScalarFlux& flux2, double eps,
                                    double dt, CflCheck check) {
  require_positive_eps(eps);
  const TorusGrid2D& g = u.grid();
  auto v = u.values();
  std::vector<double> f1(g.size()), f2(g.size()), a1(g.size()), a2(g.size());
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    f1[k] = flux1.f(v[k]);
    f2[k] = flux2.f(v[k]);
    a1[k] = flux1.df(v[k]);
    a2[k] = flux2.df(v[k]);
    m1 = std::max(m1, std::abs(a1[k]));
    m2 = std::max(m2, std::abs(a2[k]));
  }
  if (check == CflCheck::enforce) {
    throw_if_cfl_violated(dt, stable_dt_2d(g, m1, m2, eps, 1.0),
                          "conservation_step_2d");
  }
  const double dx1 = g.dx1(), dx2 = g.dx2();
  return torus_step(u, eps, dt, [&](int axis, std::size_t l, std::size_t r) {
    if (axis == 0) {
      return nonlinear_face_flux(v[l], f1[l], a1[l], v[r], f1[r], a1[r], dx1,
                                 eps);
    }
    return nonlinear_face_flux(v[l], f2[l], a2[l], v[r], f2[r], a2[r], dx2,
                               eps);
  });
}

}  // namespace charax
