#include "charax/scalar1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "charax/error.hpp"
#include "charax/integrate.hpp"

namespace charax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_theta(const GridFunction& theta, double t) {
  const double m = theta.min();
  if (!(m > 0.0)) {
    std::ostringstream msg;
    msg << "theta lost positivity at t=" << t << " (min " << m << ")";
    throw SolverAbort(msg.str());
  }
}

}  // namespace

void ScalarProblem1D::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ConfigError("eps must be positive");
  }
  if (!u0) throw ConfigError("initial data missing");
  const GridFunction samples = GridFunction::sample(grid, u0);
  check_flux_derivative(flux, samples.min(), samples.max());
  check_resolution(grid.dx(), eps, resolution, "scalar1d");
}

Boundary ScalarProblem1D::u_boundary() const {
  if (grid.periodic()) return Boundary();
  const double left = u0(grid.x_min() - 0.5 * grid.dx());
  const double right = u0(grid.x_max() + 0.5 * grid.dx());
  if (!std::isfinite(left) || !std::isfinite(right)) {
    throw NonFiniteError("far-field initial data is not finite");
  }
  return Boundary::hold(left, right);
}

Boundary ScalarProblem1D::alpha_boundary() const {
  return grid.periodic() ? Boundary::shift(grid.length())
                         : Boundary::extrapolate();
}

Boundary ScalarProblem1D::theta_boundary() const {
  return Boundary::hold(1.0, 1.0);
}

double alpha_wrap_jump(const Grid1D& grid) {
  return grid.periodic() ? grid.length() : 0.0;
}

CoupledState1D init_state(const ScalarProblem1D& problem) {
  problem.validate();
  const Grid1D& g = problem.grid;
  return CoupledState1D{0.0, GridFunction::sample(g, problem.u0),
                        GridFunction::sample(g, [](double x) { return x; }),
                        GridFunction::constant(g, 1.0)};
}

double stable_step(const CoupledState1D& state, const ScalarProblem1D& problem,
                   double safety) {
  return stable_dt(problem.grid, max_abs_speed(problem.flux, state.u.values()),
                   problem.eps, safety);
}

CoupledState1D advance(const CoupledState1D& state,
                       const ScalarProblem1D& problem, double dt) {
  const Grid1D& g = problem.grid;
  std::vector<double> speed(g.size());
  auto u = state.u.values();
  for (std::size_t j = 0; j < speed.size(); ++j) speed[j] = problem.flux.df(u[j]);
  const GridFunction a(g, std::move(speed));

  GridFunction u_next = conservation_step(state.u, problem.flux, problem.eps, dt,
                                          problem.u_boundary());
  GridFunction alpha_next =
      advect_diffuse_step(state.alpha, a, problem.eps, dt, Form::advective,
                          problem.alpha_boundary());
  GridFunction theta_next =
      advect_diffuse_step(state.theta, a, problem.eps, dt, Form::conservative,
                          problem.theta_boundary());
  const double t = state.t + dt;
  require_positive_theta(theta_next, t);
  return CoupledState1D{t, std::move(u_next), std::move(alpha_next),
                        std::move(theta_next)};
}

CoupledState1D run_scalar1d(
    const ScalarProblem1D& problem, CoupledState1D state, double t_end,
    const std::function<void(const CoupledState1D&, bool)>& observe,
    std::span<const double> stops, double safety) {
  return integrate(
      std::move(state), t_end,
      [&](const CoupledState1D& s) { return stable_step(s, problem, safety); },
      [&](const CoupledState1D& s, double dt) { return advance(s, problem, dt); },
      [&](const CoupledState1D& s, bool at_stop) {
        if (observe) observe(s, at_stop);
      },
      stops);
}

std::pair<double, double> alpha_speed_range(const ScalarProblem1D& problem) {
  const double bound = GridFunction::sample(problem.grid, problem.u0).max_abs();
  double m1 = kInf, m2 = -kInf;
  constexpr int kSamples = 4001;
  for (int k = 0; k < kSamples; ++k) {
    const double u = -bound + 2.0 * bound * k / (kSamples - 1);
    const double s = -problem.flux.df(u);
    m1 = std::min(m1, s);
    m2 = std::max(m2, s);
  }
  return {m1, m2};
}

AlphaBoundReport check_alpha_bounds(const CoupledState1D& state,
                                    const ScalarProblem1D& problem,
                                    double tol) {
  return check_alpha_bounds(state, alpha_speed_range(problem), tol);
}

AlphaBoundReport check_alpha_bounds(const CoupledState1D& state,
                                    std::pair<double, double> range,
                                    double tol) {
  const Grid1D& g = state.alpha.grid();
  const auto [m1, m2] = range;
  const auto margins = [&](double lo_rate, double hi_rate) {
    double lo = kInf, hi = kInf;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double x = g.x(j);
      lo = std::min(lo, state.alpha[j] - (x + lo_rate * state.t));
      hi = std::min(hi, (x + hi_rate * state.t) - state.alpha[j]);
    }
    return std::pair{lo, hi};
  };
  AlphaBoundReport report;
  report.m1 = m1;
  report.m2 = m2;
  report.tol = tol;
  std::tie(report.margin_lo, report.margin_hi) = margins(m1, m2);
  report.pass = report.margin_lo >= -tol && report.margin_hi >= -tol;
  if (!report.pass) {
    auto [lo, hi] = margins(-m2, -m1);
    report.flipped_margin_lo = lo;
    report.flipped_margin_hi = hi;
  }
  return report;
}

TransformedProfile reconstruct_profile(const CoupledState1D& state) {
  require_positive_theta(state.theta, state.t);
  const std::size_t n = state.u.size();
  for (std::size_t j = 1; j < n; ++j) {
    if (!(state.alpha[j] > state.alpha[j - 1])) {
      std::ostringstream msg;
      msg << "alpha is not strictly increasing at node " << j << " (t="
          << state.t << ")";
      throw SolverAbort(msg.str());
    }
  }
  const GridFunction ux = ddx(state.u);
  TransformedProfile profile;
  profile.alphas.assign(state.alpha.values().begin(), state.alpha.values().end());
  profile.values.assign(state.u.values().begin(), state.u.values().end());
  profile.derivs.resize(n);
  for (std::size_t j = 0; j < n; ++j) profile.derivs[j] = ux[j] / state.theta[j];
  return profile;
}

TransformedProfile resample_uniform(const TransformedProfile& profile,
                                    std::size_t m) {
  const auto& a = profile.alphas;
  if (a.size() < 2 || m < 2) throw DomainError("resample needs >= 2 points");
  TransformedProfile out;
  out.alphas.resize(m);
  out.values.resize(m);
  out.derivs.resize(m);
  std::size_t k = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = a.front() + (a.back() - a.front()) * i / (m - 1);
    while (k + 2 < a.size() && a[k + 1] < s) ++k;
    const double w = std::clamp((s - a[k]) / (a[k + 1] - a[k]), 0.0, 1.0);
    out.alphas[i] = s;
    out.values[i] = (1.0 - w) * profile.values[k] + w * profile.values[k + 1];
    out.derivs[i] = (1.0 - w) * profile.derivs[k] + w * profile.derivs[k + 1];
  }
  return out;
}

double transformed_lp_norm(const CoupledState1D& state, double p) {
  if (!(p >= 1.0)) throw DomainError("transformed_lp_norm needs p >= 1");
  require_positive_theta(state.theta, state.t);
  const GridFunction ux = ddx(state.u);
  const std::size_t n = ux.size();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      m = std::max(m, std::abs(ux[j]) / state.theta[j]);
    }
    return m;
  }
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) {
    terms[j] = std::pow(std::abs(ux[j]), p) * std::pow(state.theta[j], 1.0 - p);
  }
  return std::pow(compensated_sum(terms) * state.u.grid().dx(), 1.0 / p);
}

double transformed_bv_of_deriv(const CoupledState1D& state) {
  require_positive_theta(state.theta, state.t);
  const GridFunction ux = ddx(state.u);
  const std::size_t n = ux.size();
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = ux[j] / state.theta[j];
  std::vector<double> jumps;
  jumps.reserve(n);
  for (std::size_t j = 0; j + 1 < n; ++j) jumps.push_back(std::abs(d[j + 1] - d[j]));
  if (state.u.grid().periodic()) jumps.push_back(std::abs(d[0] - d[n - 1]));
  return compensated_sum(jumps);
}

double alpha_theta_consistency(const CoupledState1D& state) {
  const GridFunction da = ddx(state.alpha, alpha_wrap_jump(state.alpha.grid()));
  double m = 0.0;
  for (std::size_t j = 0; j < da.size(); ++j) {
    m = std::max(m, std::abs(da[j] - state.theta[j]));
  }
  return m;
}

}  // namespace charax
