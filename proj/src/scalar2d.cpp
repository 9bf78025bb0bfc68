#include "charax/scalar2d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "charax/error.hpp"
#include "charax/integrate.hpp"

namespace charax {

namespace {

void require_positive_theta(const GridFunction2D& theta, double t) {
  const double m = theta.min();
  if (!(m > 0.0)) {
    std::ostringstream msg;
    msg << "theta lost positivity at t=" << t << " (min " << m << ")";
    throw SolverAbort(msg.str());
  }
}

void require_axis(int axis) {
  if (axis != 0 && axis != 1) throw DomainError("axis must be 0 or 1");
}

GridFunction2D speed_field(const GridFunction2D& u, const ScalarFlux& flux) {
  std::vector<double> a(u.size());
  auto v = u.values();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = flux.df(v[k]);
  return GridFunction2D(u.grid(), std::move(a));
}

}  // namespace

void ScalarProblem2D::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be positive");
  if (!u0) throw ConfigError("initial data missing");
  const GridFunction2D samples = GridFunction2D::sample(grid, u0);
  check_flux_derivative(flux1, samples.min(), samples.max());
  check_flux_derivative(flux2, samples.min(), samples.max());
}

CoupledState2D init_state(const ScalarProblem2D& problem) {
  problem.validate();
  return CoupledState2D{0.0, GridFunction2D::sample(problem.grid, problem.u0),
                        GridFunction2D::constant(problem.grid, 1.0)};
}

double stable_step(const CoupledState2D& state, const ScalarProblem2D& problem,
                   double safety) {
  return stable_dt_2d(problem.grid,
                      max_abs_speed(problem.flux1, state.u.values()),
                      max_abs_speed(problem.flux2, state.u.values()),
                      problem.eps, safety);
}

CoupledState2D advance2d(const CoupledState2D& state,
                         const ScalarProblem2D& problem, double dt) {
  const GridFunction2D a1 = speed_field(state.u, problem.flux1);
  const GridFunction2D a2 = speed_field(state.u, problem.flux2);
  GridFunction2D u_next = conservation_step_2d(state.u, problem.flux1,
                                               problem.flux2, problem.eps, dt);
  GridFunction2D theta_next =
      advect_diffuse_step_2d(state.theta, a1, a2, problem.eps, dt);
  const double t = state.t + dt;
  require_positive_theta(theta_next, t);
  return CoupledState2D{t, std::move(u_next), std::move(theta_next)};
}

CoupledState2D run_scalar2d(
    const ScalarProblem2D& problem, CoupledState2D state, double t_end,
    const std::function<void(const CoupledState2D&, const CoupledState2D&,
                             bool)>& observe,
    std::span<const double> stops, double safety) {
  CoupledState2D prev = state;
  return integrate(
      std::move(state), t_end,
      [&](const CoupledState2D& s) { return stable_step(s, problem, safety); },
      [&](const CoupledState2D& s, double dt) {
        prev = s;
        return advance2d(s, problem, dt);
      },
      [&](const CoupledState2D& s, bool at_stop) {
        if (observe) observe(prev, s, at_stop);
      },
      stops);
}

RatioReport ratio_max_principle_check(const CoupledState2D& state,
                                      const ScalarProblem2D& problem, int axis,
                                      double tol_ratio) {
  require_axis(axis);
  require_positive_theta(state.theta, state.t);
  RatioReport report;
  report.tol_ratio = tol_ratio;
  report.bound =
      ddx(GridFunction2D::sample(problem.grid, problem.u0), axis).max_abs();
  const GridFunction2D d = ddx(state.u, axis);
  for (std::size_t k = 0; k < d.size(); ++k) {
    report.max_ratio =
        std::max(report.max_ratio, std::abs(d.values()[k]) / state.theta.values()[k]);
  }
  report.pass = report.max_ratio <= report.bound * (1.0 + tol_ratio);
  return report;
}

double weighted_lp(const CoupledState2D& state, double p, int axis) {
  require_axis(axis);
  if (!(p >= 1.0) || std::isinf(p)) {
    throw DomainError("weighted_lp needs 1 <= p < infinity");
  }
  require_positive_theta(state.theta, state.t);
  const GridFunction2D d = ddx(state.u, axis);
  std::vector<double> terms(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    terms[k] = std::pow(std::abs(d.values()[k]), p) *
               std::pow(state.theta.values()[k], 1.0 - p);
  }
  return compensated_sum(terms) * state.u.grid().cell_area();
}

double dissipation_rate(const CoupledState2D& state, double eps, double p,
                        int axis) {
  require_axis(axis);
  const TorusGrid2D& g = state.u.grid();
  const GridFunction2D d = ddx(state.u, axis);
  auto th = state.theta.values();
  std::vector<double> h(g.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    h[k] = std::pow(std::abs(d.values()[k]), 0.5 * p) / std::pow(th[k], 0.5 * p);
  }
  std::vector<double> terms(g.size());
  const double dx1 = g.dx1(), dx2 = g.dx2();
  for (std::size_t i = 0; i < g.n1(); ++i) {
    const std::size_t ip = (i + 1) % g.n1();
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const std::size_t jp = (j + 1) % g.n2();
      const std::size_t c = g.index(i, j), e = g.index(ip, j), n = g.index(i, jp);
      const double g1 = (h[e] - h[c]) / dx1;
      const double g2 = (h[n] - h[c]) / dx2;
      terms[c] = std::sqrt(th[c] * th[e]) * g1 * g1 + std::sqrt(th[c] * th[n]) * g2 * g2;
    }
  }
  return eps * (4.0 * (p - 1.0) / p) * compensated_sum(terms) * g.cell_area();
}

EnergyTrajectory start_energy_trajectory(const CoupledState2D& initial,
                                         double eps, double p, int axis) {
  EnergyTrajectory tr{p, axis, eps, {}};
  tr.samples.push_back({initial.t, weighted_lp(initial, p, axis), 0.0});
  return tr;
}

void record_energy(EnergyTrajectory& trajectory, const CoupledState2D& prev,
                   const CoupledState2D& next) {
  std::vector<double> um(prev.u.size()), tm(prev.u.size());
  for (std::size_t k = 0; k < um.size(); ++k) {
    um[k] = 0.5 * (prev.u.values()[k] + next.u.values()[k]);
    tm[k] = 0.5 * (prev.theta.values()[k] + next.theta.values()[k]);
  }
  const TorusGrid2D& g = prev.u.grid();
  const CoupledState2D mid{0.5 * (prev.t + next.t), GridFunction2D(g, std::move(um)),
                           GridFunction2D(g, std::move(tm))};
  const double rate = dissipation_rate(mid, trajectory.eps, trajectory.p,
                                       trajectory.axis);
  const double before =
      trajectory.samples.empty() ? 0.0 : trajectory.samples.back().dissipated;
  trajectory.samples.push_back({next.t,
                                weighted_lp(next, trajectory.p, trajectory.axis),
                                before + (next.t - prev.t) * rate});
}

EnergyResidual energy_balance_residual(const EnergyTrajectory& trajectory) {
  if (trajectory.samples.empty()) throw DomainError("empty energy trajectory");
  const EnergySample& first = trajectory.samples.front();
  const EnergySample& last = trajectory.samples.back();
  const double gap = std::abs(last.weighted + last.dissipated - first.weighted);
  if (first.weighted == 0.0) return {gap, true};
  return {gap / first.weighted, false};
}

}  // namespace charax
