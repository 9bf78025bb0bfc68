#include "charax/temple.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "charax/error.hpp"
#include "charax/integrate.hpp"

namespace charax {

namespace {

Vec2 at(const std::array<GridFunction, 2>& q, std::size_t j) {
  return Vec2(q[0][j], q[1][j]);
}

std::array<GridFunction, 2> split(const Grid1D& g, std::vector<Vec2> v) {
  std::vector<double> a(v.size()), b(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    a[j] = v[j](0);
    b[j] = v[j](1);
  }
  return {GridFunction(g, std::move(a)), GridFunction(g, std::move(b))};
}

double wrap_into(double x, const Grid1D& g) {
  if (!g.periodic()) return x;
  const double L = g.length();
  double r = std::fmod(x - g.x_min(), L);
  if (r < 0.0) r += L;
  return g.x_min() + r;
}

// Cross product magnitude over the norms: |sin| of the angle between a, b.
double sine_between(const Vec2& a, const Vec2& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::abs(a(0) * b(1) - a(1) * b(0)) / (na * nb);
}

Vec2 far_field(const TempleProblem& p, bool left) {
  const Grid1D& g = p.grid;
  const double x = left ? g.x_min() - 0.5 * g.dx() : g.x_max() + 0.5 * g.dx();
  const Vec2 u = p.initial_data()(x);
  if (!u.allFinite()) throw NonFiniteError("far-field initial data is not finite");
  return u;
}

Boundary component_boundary(const TempleProblem& p, int i) {
  if (p.grid.periodic()) return Boundary();
  return Boundary::hold(far_field(p, true)(i), far_field(p, false)(i));
}

Boundary alpha_boundary(const Grid1D& g) {
  return g.periodic() ? Boundary::shift(g.length()) : Boundary::extrapolate();
}

// u with one ghost on each side.
std::vector<Vec2> u_with_ghosts(const TempleState& s, const TempleProblem& p) {
  const std::size_t n = p.grid.size();
  std::vector<Vec2> ue(n + 2);
  for (std::size_t j = 0; j < n; ++j) ue[j + 1] = at(s.u, j);
  if (p.grid.periodic()) {
    ue[0] = ue[n];
    ue[n + 1] = ue[1];
  } else {
    ue[0] = far_field(p, true);
    ue[n + 1] = far_field(p, false);
  }
  return ue;
}

Mat2 abs_matrix(const TempleSystem& sys, const Vec2& u, int sign) {
  const Vec2 lam = sys.eigenvalues(u);
  Vec2 d;
  for (int i = 0; i < 2; ++i) {
    d(i) = sign == 0 ? std::abs(lam(i))
                     : (sign > 0 ? std::max(lam(i), 0.0) : std::min(lam(i), 0.0));
  }
  return sys.right(u) * d.asDiagonal() * sys.left(u);
}

std::array<GridFunction, 2> step_u(const TempleState& s, const TempleProblem& p,
                                   double dt) {
  const TempleSystem& sys = p.system;
  const Grid1D& g = p.grid;
  const double eps = p.eps;
  if (sys.component_fluxes) {
    return {conservation_step(s.u[0], (*sys.component_fluxes)[0], eps, dt,
                              component_boundary(p, 0)),
            conservation_step(s.u[1], (*sys.component_fluxes)[1], eps, dt,
                              component_boundary(p, 1))};
  }
  const std::size_t n = g.size();
  const double dx = g.dx();
  const auto ue = u_with_ghosts(s, p);
  std::vector<Vec2> lam(n + 2);
  double a_max = 0.0;
  for (std::size_t k = 0; k < n + 2; ++k) {
    lam[k] = sys.eigenvalues(ue[k]);
    a_max = std::max(a_max, lam[k].cwiseAbs().maxCoeff());
  }
  throw_if_cfl_violated(dt, stable_dt(g, a_max, eps, 1.0), "advance_temple");

  std::vector<Vec2> out(n);
  if (sys.flux) {
    std::vector<Vec2> fe(n + 2);
    for (std::size_t k = 0; k < n + 2; ++k) fe[k] = sys.flux(ue[k]);
    std::vector<Vec2> face(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      const double a = std::max(lam[k].cwiseAbs().maxCoeff(),
                                lam[k + 1].cwiseAbs().maxCoeff());
      face[k] = 0.5 * (fe[k] + fe[k + 1]);
      if (a * dx > 2.0 * eps) {
        const Vec2 um = 0.5 * (ue[k] + ue[k + 1]);
        face[k] -= 0.5 * abs_matrix(sys, um, 0) * (ue[k + 1] - ue[k]);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2& qm = ue[j];
      const Vec2& qc = ue[j + 1];
      const Vec2& qp = ue[j + 2];
      out[j] = qc - dt / dx * (face[j + 1] - face[j]) +
               dt * eps * ((qp - 2.0 * qc + qm) / (dx * dx));
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2& qm = ue[j];
      const Vec2& qc = ue[j + 1];
      const Vec2& qp = ue[j + 2];
      Vec2 adv;
      if (lam[j + 1].cwiseAbs().maxCoeff() * dx <= 2.0 * eps) {
        adv = sys.jacobian_at(qc) * (qp - qm) / (2.0 * dx);
      } else {
        adv = abs_matrix(sys, qc, 1) * (qc - qm) / dx +
              abs_matrix(sys, qc, -1) * (qp - qc) / dx;
      }
      out[j] = qc - dt * adv + dt * eps * ((qp - 2.0 * qc + qm) / (dx * dx));
    }
  }
  for (const Vec2& v : out) {
    if (!v.allFinite()) throw NonFiniteError("advance_temple produced non-finite u");
  }
  return split(g, std::move(out));
}

std::array<GridFunction, 2> invariants_of(const TempleSystem& sys,
                                          const std::array<GridFunction, 2>& u) {
  const std::size_t n = u[0].size();
  std::vector<Vec2> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = sys.invariants(at(u, j));
  return split(u[0].grid(), std::move(r));
}

double max_gradient(const std::array<GridFunction, 2>& u) {
  return std::max(ddx(u[0]).max_abs(), ddx(u[1]).max_abs());
}

void require_positive(const GridFunction& theta, int i, double t) {
  const double m = theta.min();
  if (!(m > 0.0)) {
    std::ostringstream msg;
    msg << "theta_" << i + 1 << " lost positivity at t=" << t << " (min " << m
        << ")";
    throw SolverAbort(msg.str());
  }
}

}  // namespace

// ---- eigenstructure --------------------------------------------------------

Mat2 TempleSystem::jacobian_at(const Vec2& u) const {
  if (jacobian) return jacobian(u);
  if (component_fluxes) {
    Mat2 a = Mat2::Zero();
    a(0, 0) = (*component_fluxes)[0].df(u(0));
    a(1, 1) = (*component_fluxes)[1].df(u(1));
    return a;
  }
  if (!flux) throw ConfigError(name + ": neither a Jacobian nor a flux given");
  Mat2 a;
  for (int k = 0; k < 2; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(u(k)));
    Vec2 e = Vec2::Zero();
    e(k) = h;
    a.col(k) = (flux(u + e) - flux(u - e)) / (2.0 * h);
  }
  return a;
}

Vec2 TempleSystem::right_directional(const Vec2& u, int j, const Vec2& v,
                                     double step, bool differenced) const {
  if (right_derivative && !differenced) return right_derivative(u, j) * v;
  const double nv = v.norm();
  if (nv == 0.0) return Vec2::Zero();
  const Vec2 d = v / nv * step;
  return (right(u + d).col(j) - right(u - d).col(j)) / (2.0 * step) * nv;
}

TempleSystem TempleSystem::diagonal(std::function<Vec2(const Vec2&)> speeds) {
  TempleSystem s;
  s.name = "diagonal";
  s.eigenvalues = speeds;
  s.right = [](const Vec2&) -> Mat2 { return Mat2::Identity(); };
  s.left = [](const Vec2&) -> Mat2 { return Mat2::Identity(); };
  s.invariants = [](const Vec2& u) { return u; };
  s.umap = [](const Vec2& r) { return r; };
  s.jacobian = [speeds](const Vec2& u) -> Mat2 {
    Mat2 a = Mat2::Zero();
    const Vec2 lam = speeds(u);
    a(0, 0) = lam(0);
    a(1, 1) = lam(1);
    return a;
  };
  s.right_derivative = [](const Vec2&, int) -> Mat2 { return Mat2::Zero(); };
  return s;
}

TempleSystem TempleSystem::diagonal_decoupled(ScalarFlux f1, ScalarFlux f2) {
  auto speeds = [f1, f2](const Vec2& u) { return Vec2(f1.df(u(0)), f2.df(u(1))); };
  TempleSystem s = diagonal(speeds);
  s.name = "diagonal-decoupled(" + f1.name + "," + f2.name + ")";
  s.flux = [f1, f2](const Vec2& u) { return Vec2(f1.f(u(0)), f2.f(u(1))); };
  s.component_fluxes = std::array<ScalarFlux, 2>{f1, f2};
  return s;
}

TempleSystem TempleSystem::chromatography() {
  TempleSystem s;
  s.name = "chromatography";
  s.flux = [](const Vec2& u) {
    const double d = 1.0 + u(0) + u(1);
    return Vec2(u(0) / d, u(1) / d);
  };
  s.jacobian = [](const Vec2& u) -> Mat2 {
    const double d = 1.0 + u(0) + u(1);
    Mat2 a;
    a << 1.0 + u(1), -u(0), -u(1), 1.0 + u(0);
    return a / (d * d);
  };
  s.eigenvalues = [](const Vec2& u) {
    const double d = 1.0 + u(0) + u(1);
    return Vec2(1.0 / (d * d), 1.0 / d);
  };
  s.right = [](const Vec2& u) -> Mat2 {
    const double m = u(0) + u(1);
    Mat2 r;
    r << u(0) / m, -m, u(1) / m, m;
    return r;
  };
  s.left = [](const Vec2& u) -> Mat2 {
    const double m = u(0) + u(1);
    Mat2 l;
    l << 1.0, 1.0, -u(1) / (m * m), u(0) / (m * m);
    return l;
  };
  s.invariants = [](const Vec2& u) {
    const double m = u(0) + u(1);
    return Vec2(m, u(1) / m);
  };
  s.umap = [](const Vec2& r) { return Vec2(r(0) * (1.0 - r(1)), r(0) * r(1)); };
  s.right_derivative = [](const Vec2& u, int j) -> Mat2 {
    Mat2 d;
    if (j == 0) {
      const double m = u(0) + u(1);
      d << u(1), -u(0), -u(1), u(0);
      return d / (m * m);
    }
    d << -1.0, -1.0, 1.0, 1.0;
    return d;
  };
  return s;
}

bool StateBox::contains(const Vec2& u, double slack) const {
  return (u.array() >= lo.array() - slack).all() &&
         (u.array() <= hi.array() + slack).all();
}

double StateBox::size() const { return (hi - lo).cwiseAbs().maxCoeff(); }

bool CertificationReport::pass() const { return failures().empty(); }

std::string CertificationReport::failures() const {
  std::string out;
  const auto add = [&](bool bad, const char* what) {
    if (!bad) return;
    if (!out.empty()) out += ", ";
    out += what;
  };
  add(!(biorthogonality <= tol), "biorthogonality");
  add(!(eigen_equation <= tol), "eigen-equation");
  add(!(alignment <= tol), "invariant alignment");
  add(!(temple <= tol), "Temple condition");
  add(!(umap_roundtrip <= 1e-8), "Umap roundtrip");
  add(!(coupling <= tol), "coupling validation");
  return out;
}

CertificationReport certify_eigenstructure(const TempleSystem& system,
                                           const StateBox& box, int samples,
                                           double tol) {
  if (samples < 2) throw ConfigError("certification needs >= 2 samples per axis");
  if (!(box.hi.array() > box.lo.array()).all()) {
    throw ConfigError("state box is empty");
  }
  CertificationReport rep;
  rep.system = system.name;
  rep.tol = tol;
  const double h = 1e-5 * box.size();
  for (int a = 0; a < samples; ++a) {
    for (int b = 0; b < samples; ++b) {
      const Vec2 u(box.lo(0) + (box.hi(0) - box.lo(0)) * a / (samples - 1),
                   box.lo(1) + (box.hi(1) - box.lo(1)) * b / (samples - 1));
      const Mat2 r = system.right(u);
      const Mat2 l = system.left(u);
      const Vec2 lam = system.eigenvalues(u);
      const Mat2 A = system.jacobian_at(u);
      rep.biorthogonality = std::max(
          rep.biorthogonality, (l * r - Mat2::Identity()).cwiseAbs().maxCoeff());
      for (int i = 0; i < 2; ++i) {
        rep.eigen_equation = std::max(
            rep.eigen_equation,
            (A * r.col(i) - lam(i) * r.col(i)).cwiseAbs().maxCoeff());
        Vec2 grad;
        for (int k = 0; k < 2; ++k) {
          Vec2 e = Vec2::Zero();
          e(k) = h;
          grad(k) = (system.invariants(u + e)(i) - system.invariants(u - e)(i)) /
                    (2.0 * h);
        }
        rep.alignment =
            std::max(rep.alignment, sine_between(grad, l.row(i).transpose()));
        const int j = 1 - i;
        const Vec2 rjr = system.right_directional(u, j, r.col(j), h, true);
        rep.temple = std::max(rep.temple, std::abs(l.row(i).dot(rjr)));
        if (system.right_derivative) {
          // A supplied exact derivative must agree with the differences.
          for (int k = 0; k < 2; ++k) {
            const Vec2 exact = system.right_derivative(u, j) * r.col(k);
            const Vec2 diff = system.right_directional(u, j, r.col(k), h, true);
            rep.coupling = std::max(rep.coupling, (exact - diff).cwiseAbs().maxCoeff());
          }
        }
      }
      rep.umap_roundtrip =
          std::max(rep.umap_roundtrip,
                   (system.umap(system.invariants(u)) - u).cwiseAbs().maxCoeff());
      ++rep.points;
    }
  }
  rep.coupling = std::max(rep.coupling, validate_coupling(system, box));
  return rep;
}

Mat2 derive_coupling(const TempleSystem& system, const Vec2& u, double step) {
  const Mat2 r = system.right(u);
  const Mat2 l = system.left(u);
  Mat2 d;
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    d(i, i) = l.row(i).dot(system.right_directional(u, i, r.col(i), step));
    d(i, j) = l.row(i).dot(system.right_directional(u, i, r.col(j), step)) +
              l.row(i).dot(system.right_directional(u, j, r.col(i), step));
  }
  return d;
}

double validate_coupling(const TempleSystem& system, const StateBox& box,
                         int curves, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const double sigma = 1e-3;
  const double step = 1e-5 * box.size();
  double worst = 0.0;
  for (int c = 0; c < curves; ++c) {
    const Vec2 u(box.lo(0) + (box.hi(0) - box.lo(0)) * (0.05 + 0.9 * unit(rng)),
                 box.lo(1) + (box.hi(1) - box.lo(1)) * (0.05 + 0.9 * unit(rng)));
    const Vec2 r0 = system.invariants(u);
    const Vec2 g(sym(rng), sym(rng));
    const Vec2 hh(sym(rng), sym(rng));
    const auto curve = [&](double s) {
      return system.umap(r0 + g * s + 0.5 * hh * s * s);
    };
    const auto second = [&](double s) {
      return (curve(s) - 2.0 * curve(0.0) + curve(-s)) / (s * s);
    };
    const Vec2 upp = (4.0 * second(0.5 * sigma) - second(sigma)) / 3.0;
    const Vec2 uc = curve(0.0);
    const Mat2 r = system.right(uc);
    const Mat2 l = system.left(uc);
    const Mat2 d = derive_coupling(system, uc, step);
    const Vec2 rest = upp - hh(0) * r.col(0) - hh(1) * r.col(1);
    for (int i = 0; i < 2; ++i) {
      const double lhs = l.row(i).dot(rest);
      const double rhs = g(i) * d.row(i).dot(g);
      const double scale =
          std::max({1.0, std::abs(l.row(i).dot(upp)), std::abs(rhs)});
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
  }
  return worst;
}

// ---- problem and state -----------------------------------------------------

std::function<Vec2(double)> mollify(std::function<Vec2(double)> u0,
                                    double width, const Grid1D& grid) {
  if (!(width > 0.0)) return u0;
  constexpr int kPoints = 64;
  std::vector<double> offsets(kPoints), weights(kPoints);
  double total = 0.0;
  for (int k = 0; k < kPoints; ++k) {
    const double s = -1.0 + (k + 0.5) * 2.0 / kPoints;
    offsets[k] = width * s;
    weights[k] = std::exp(-1.0 / (1.0 - s * s));
    total += weights[k];
  }
  for (double& w : weights) w /= total;
  return [u0 = std::move(u0), offsets, weights, grid](double x) {
    Vec2 acc = Vec2::Zero();
    for (int k = 0; k < kPoints; ++k) {
      acc += weights[k] * u0(wrap_into(x - offsets[k], grid));
    }
    return acc;
  };
}

std::function<Vec2(double)> TempleProblem::initial_data() const {
  return mollify(u0, mollify_width.value_or(eps), grid);
}

TempleState init_temple(const TempleProblem& p) {
  if (!(p.eps > 0.0) || !std::isfinite(p.eps)) throw ConfigError("eps must be positive");
  if (!p.u0) throw ConfigError("initial data missing");
  const TempleSystem& sys = p.system;
  if (!sys.eigenvalues || !sys.right || !sys.left || !sys.invariants || !sys.umap) {
    throw ConfigError(sys.name + ": incomplete eigenstructure");
  }
  if (p.mollify_width && *p.mollify_width < 0.0) {
    throw ConfigError("mollify_width must be >= 0");
  }
  check_resolution(p.grid.dx(), p.eps, p.resolution, "temple");
  const CertificationReport rep =
      certify_eigenstructure(sys, p.box, 41, p.certify_tol);
  if (!rep.pass()) {
    throw ConfigError(sys.name + " rejected: " + rep.failures());
  }

  const Grid1D& g = p.grid;
  const auto data = p.initial_data();
  std::vector<Vec2> u(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    u[j] = data(g.x(j));
    if (!u[j].allFinite()) throw NonFiniteError("initial data is not finite");
    if (!p.box.contains(u[j], 1e-12)) {
      std::ostringstream msg;
      msg << "initial data leaves the state box at x=" << g.x(j);
      throw ConfigError(msg.str());
    }
  }
  auto uf = split(g, std::move(u));
  auto R = invariants_of(sys, uf);
  const GridFunction x = GridFunction::sample(g, [](double s) { return s; });
  const GridFunction one = GridFunction::constant(g, 1.0);
  TempleState s{0.0, uf, R, {x, x}, {one, one}, std::nullopt};
  if (p.evolve_invariants) s.R_direct = R;
  const auto lt = modified_speeds(s, p);
  s.max_modified_speed = std::max(lt[0].max_abs(), lt[1].max_abs());
  s.sup_gradient = max_gradient(s.u);
  return s;
}

std::array<GridFunction, 2> modified_speeds(const TempleState& s,
                                            const TempleProblem& p) {
  const Grid1D& g = p.grid;
  const std::size_t n = g.size();
  const GridFunction r0x = ddx(s.R[0]);
  const GridFunction r1x = ddx(s.R[1]);
  const double step = 1e-5 * p.box.size();
  std::vector<Vec2> lt(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 u = at(s.u, j);
    const Vec2 lam = p.system.eigenvalues(u);
    const Mat2 d = derive_coupling(p.system, u, step);
    for (int i = 0; i < 2; ++i) {
      lt[j](i) = lam(i) - p.eps * (d(i, 0) * r0x[j] + d(i, 1) * r1x[j]);
    }
  }
  return split(g, std::move(lt));
}

double stable_step(const TempleState& s, const TempleProblem& p, double safety) {
  const auto lt = modified_speeds(s, p);
  double a = std::max(lt[0].max_abs(), lt[1].max_abs());
  for (std::size_t j = 0; j < p.grid.size(); ++j) {
    a = std::max(a, p.system.eigenvalues(at(s.u, j)).cwiseAbs().maxCoeff());
  }
  return stable_dt(p.grid, a, p.eps, safety);
}

TempleState advance_temple(const TempleState& s, const TempleProblem& p,
                           double dt) {
  const auto lt = modified_speeds(s, p);
  auto u_next = step_u(s, p, dt);
  auto R_next = invariants_of(p.system, u_next);
  const Boundary ab = alpha_boundary(p.grid);
  const Boundary tb = Boundary::hold(1.0, 1.0);
  std::array<GridFunction, 2> alpha_next{
      advect_diffuse_step(s.alpha[0], lt[0], p.eps, dt, Form::advective, ab),
      advect_diffuse_step(s.alpha[1], lt[1], p.eps, dt, Form::advective, ab)};
  std::array<GridFunction, 2> theta_next{
      advect_diffuse_step(s.theta[0], lt[0], p.eps, dt, Form::conservative, tb),
      advect_diffuse_step(s.theta[1], lt[1], p.eps, dt, Form::conservative, tb)};
  const double t = s.t + dt;
  require_positive(theta_next[0], 0, t);
  require_positive(theta_next[1], 1, t);

  TempleState next{t, std::move(u_next), std::move(R_next), std::move(alpha_next),
                   std::move(theta_next), std::nullopt};
  next.max_drift = s.max_drift;
  if (s.R_direct) {
    Boundary rb[2];
    if (!p.grid.periodic()) {
      const Vec2 lo = p.system.invariants(far_field(p, true));
      const Vec2 hi = p.system.invariants(far_field(p, false));
      for (int i = 0; i < 2; ++i) rb[i] = Boundary::hold(lo(i), hi(i));
    }
    // Checked per step: R_i(u^n) pushed through the invariant equation must
    // land on R_i(u^{n+1}). The long-run gap only accumulates truncation error.
    double drift = 0.0, gap = 0.0;
    std::array<GridFunction, 2> direct = *s.R_direct;
    for (int i = 0; i < 2; ++i) {
      const GridFunction one =
          advect_diffuse_step(s.R[i], lt[i], p.eps, dt, Form::advective, rb[i]);
      direct[i] = advect_diffuse_step(direct[i], lt[i], p.eps, dt, Form::advective, rb[i]);
      for (std::size_t j = 0; j < p.grid.size(); ++j) {
        drift = std::max(drift, std::abs(one[j] - next.R[i][j]));
        gap = std::max(gap, std::abs(direct[i][j] - next.R[i][j]));
      }
    }
    next.max_drift = std::max(next.max_drift, drift);
    next.max_direct_gap = std::max(s.max_direct_gap, gap);
    if (drift > p.drift_tol) {
      std::ostringstream msg;
      msg << "directly evolved invariants drifted by " << drift << " in one step at t=" << t;
      throw SolverAbort(msg.str());
    }
    next.R_direct = std::move(direct);
  }
  next.max_modified_speed = std::max(
      {s.max_modified_speed, lt[0].max_abs(), lt[1].max_abs()});
  next.sup_gradient = std::max(s.sup_gradient, max_gradient(next.u));
  return next;
}

TempleState run_temple(const TempleProblem& problem, TempleState state,
                       double t_end,
                       const std::function<void(const TempleState&, bool)>& observe,
                       std::span<const double> stops, double safety) {
  return integrate(
      std::move(state), t_end,
      [&](const TempleState& s) { return stable_step(s, problem, safety); },
      [&](const TempleState& s, double dt) { return advance_temple(s, problem, dt); },
      [&](const TempleState& s, bool at_stop) {
        if (observe) observe(s, at_stop);
      },
      stops);
}

// ---- transformed profiles --------------------------------------------------

TransformedProfile reconstruct_W(const TempleState& s, int i) {
  require_positive(s.theta[i], i, s.t);
  const GridFunction& a = s.alpha[i];
  for (std::size_t j = 1; j < a.size(); ++j) {
    if (!(a[j] > a[j - 1])) {
      std::ostringstream msg;
      msg << "alpha_" << i + 1 << " is not strictly increasing at node " << j
          << " (t=" << s.t << ")";
      throw SolverAbort(msg.str());
    }
  }
  const GridFunction rx = ddx(s.R[i]);
  TransformedProfile prof;
  prof.alphas.assign(a.values().begin(), a.values().end());
  prof.values.assign(s.R[i].values().begin(), s.R[i].values().end());
  prof.derivs.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) prof.derivs[j] = rx[j] / s.theta[i][j];
  return prof;
}

double w_derivative_norm(const TempleState& s, int i, double p) {
  if (!(p >= 1.0)) throw DomainError("w_derivative_norm needs p >= 1");
  require_positive(s.theta[i], i, s.t);
  const GridFunction rx = ddx(s.R[i]);
  const GridFunction& th = s.theta[i];
  const std::size_t n = rx.size();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(rx[j]) / th[j]);
    return m;
  }
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) {
    terms[j] = p == 2.0 ? rx[j] * rx[j] / th[j]
                        : std::pow(std::abs(rx[j]), p) * std::pow(th[j], 1.0 - p);
  }
  return std::pow(compensated_sum(terms) * rx.grid().dx(), 1.0 / p);
}

double alpha_bound_violation(const TempleState& s, int i, double tol) {
  const Grid1D& g = s.alpha[i].grid();
  const double c = s.max_modified_speed;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.x(j);
    const double a = s.alpha[i][j];
    worst = std::max({worst, (x - c * s.t - tol) - a, a - (x + c * s.t + tol)});
  }
  return worst;
}

double holder_quotient(const TransformedProfile& prof, double p,
                       std::size_t random_pairs, std::uint64_t seed) {
  const auto& a = prof.alphas;
  const auto& w = prof.values;
  const std::size_t n = a.size();
  if (n < 2) throw DomainError("holder_quotient needs >= 2 samples");
  const double expo = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
  double best = 0.0;
  const auto pair = [&](std::size_t j, std::size_t k) {
    const double da = std::abs(a[k] - a[j]);
    if (da > 0.0) best = std::max(best, std::abs(w[k] - w[j]) / std::pow(da, expo));
  };
  for (std::size_t gap = 1; gap < n; gap *= 2) {
    for (std::size_t j = 0; j + gap < n; ++j) pair(j, j + gap);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t k = 0; k < random_pairs; ++k) pair(pick(rng), pick(rng));
  return best;
}

// ---- eps sweeps ------------------------------------------------------------

ScalingTable gradient_scaling_study(const ScalingFamily& family,
                                    std::span<const double> eps_list,
                                    unsigned jobs) {
  if (eps_list.size() < 3) throw ConfigError("scaling study needs >= 3 eps values");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw ConfigError("scaling study: eps must be positive");
  }
  const double ratio = eps_list[1] / eps_list[0];
  if (std::abs(ratio - 1.0) < 1e-12) throw ConfigError("scaling study: eps values repeat");
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    const double r = eps_list[k] / eps_list[k - 1];
    if (std::abs(r - ratio) > 1e-9 * std::abs(ratio)) {
      throw ConfigError("scaling study: eps values are not in geometric progression");
    }
  }
  for (double e : eps_list) {
    const double dx = family.dx_for(e);
    if (!resolves_viscous_layer(dx, e)) {
      std::ostringstream msg;
      msg << "scaling study: dx=" << dx << " does not resolve eps=" << e;
      throw ConfigError(msg.str());
    }
  }
  jobs = std::max(1u, jobs);
  std::vector<double> sup(eps_list.size());
  for (std::size_t start = 0; start < eps_list.size(); start += jobs) {
    const std::size_t stop = std::min(eps_list.size(), start + jobs);
    std::vector<std::future<double>> running;
    for (std::size_t k = start; k < stop; ++k) {
      running.push_back(std::async(std::launch::async, family.sup_gradient_for,
                                   eps_list[k]));
    }
    for (std::size_t k = start; k < stop; ++k) sup[k] = running[k - start].get();
  }
  ScalingTable table;
  table.name = family.name;
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    table.rows.push_back({eps_list[k], sup[k], eps_list[k] * sup[k]});
  }
  return table;
}

}  // namespace charax
