#include "charax/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>

#include "charax/error.hpp"
#include "charax/oracle.hpp"
#include "charax/scalar1d.hpp"
#include "charax/scalar2d.hpp"

namespace charax {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// Running extreme of one monitored quantity against a limit.
struct Tracker {
  std::string name;
  std::string quantity;
  double limit;
  bool upper = true;  // pass iff worst <= limit, else iff worst >= limit
  bool strict = false;
  double worst = std::numeric_limits<double>::quiet_NaN();
  double worst_t = 0.0;

  void see(double v, double t) {
    if (std::isnan(worst) || std::isnan(v) || (upper ? v > worst : v < worst)) {
      worst = v;
      worst_t = t;
    }
  }

  CheckResult result() const {
    bool ok;
    if (std::isnan(worst)) {
      ok = !std::isnan(limit);
    } else if (upper) {
      ok = strict ? worst < limit : worst <= limit;
    } else {
      ok = strict ? worst > limit : worst >= limit;
    }
    std::string detail = quantity + " " + (upper ? "max " : "min ") + fmt(worst) +
                         " at t=" + fmt(worst_t) + " (limit " +
                         (upper ? (strict ? "< " : "<= ") : (strict ? "> " : ">= ")) +
                         fmt(limit) + ")";
    return {name, ok, detail};
  }
};

std::optional<double>* lp_slot(DiagnosticsRow& row, double p) {
  if (p == 1.0) return &row.lp1;
  if (p == 2.0) return &row.lp2;
  if (p == 4.0) return &row.lp4;
  if (std::isinf(p)) return &row.lpinf;
  return nullptr;
}

double min_gap(const GridFunction& a) {
  double m = kInf;
  for (std::size_t j = 1; j < a.size(); ++j) m = std::min(m, a[j] - a[j - 1]);
  return m;
}

// Total variation of derivative samples, wrapped on periodic grids.
double total_variation(const std::vector<double>& d, bool periodic) {
  std::vector<double> jumps;
  for (std::size_t j = 1; j < d.size(); ++j) jumps.push_back(std::abs(d[j] - d[j - 1]));
  if (periodic && d.size() > 1) jumps.push_back(std::abs(d.front() - d.back()));
  return compensated_sum(jumps);
}

// Decides when to emit a row / profile.
struct Schedule {
  const ExperimentConfig& cfg;
  std::size_t step = 0;

  bool is_final(double t) const { return t >= cfg.t_end; }
  bool row_due(double t, bool at_stop) const {
    return at_stop || is_final(t) || (cfg.output.every > 0 && step % cfg.output.every == 0);
  }
  bool profile_due(double t, bool at_stop) const { return at_stop || is_final(t); }
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error("write failed for " + path.string());
}

// Monotone decay of the row norms, relative to the previous row.
void track_decay(Tracker& tr, const std::vector<DiagnosticsRow>& rows) {
  if (rows.size() < 2) return;
  const DiagnosticsRow& a = rows[rows.size() - 2];
  const DiagnosticsRow& b = rows.back();
  for (auto field : {&DiagnosticsRow::lp1, &DiagnosticsRow::lp2, &DiagnosticsRow::lp4,
                     &DiagnosticsRow::lpinf}) {
    if (!(a.*field) || !(b.*field)) continue;
    const double prev = *(a.*field);
    const double growth = prev > 0.0 ? (*(b.*field) - prev) / prev : *(b.*field);
    tr.see(growth, b.t);
  }
}

// ---- scalar1d --------------------------------------------------------------

// The run and its profile CSV text.
std::pair<RunResult, std::string> run_1d(const ExperimentConfig& cfg) {
  const ScalarProblem1D problem = make_scalar1d_problem(cfg);
  CoupledState1D state = init_state(problem);
  const Grid1D& g = problem.grid;
  const auto range = alpha_speed_range(problem);
  const double u0_bound = state.u.max_abs();
  const double mass_u0 = state.u.integral();
  std::vector<double> abs_u0(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) abs_u0[j] = std::abs(state.u[j]);
  const double mass_scale = std::max(1.0, compensated_sum(abs_u0) * g.dx());

  RunResult res;
  res.config = cfg;
  res.report.run_id = cfg.run_id();
  res.report.config = cfg.to_json();

  Tracker max_principle{"max principle", "|u|_inf - |u0|_inf", cfg.tol.max_principle};
  Tracker theta_pos{"theta positive", "min theta", 0.0, false, true};
  Tracker alpha_mono{"alpha increasing", "min alpha gap", 0.0, false, true};
  Tracker alpha_bounds{"alpha bounds", "min bound margin",
                       -cfg.tol.alpha_bound_dx * g.dx(), false};
  Tracker mass_u{"mass conservation", "|mass(u) - mass(u0)|", cfg.tol.mass * mass_scale};
  Tracker mass_theta{"theta mass", "|mass(theta) - L|", cfg.tol.mass * g.length()};
  Tracker decay{"transformed norms non-increasing", "relative growth between rows",
                cfg.tol.lp_decay};
  Tracker consistency{"alpha-theta consistency", "|d_x alpha - theta|_inf", 10.0 * g.dx()};

  std::string profile = "t,x,u,alpha,theta,u_alpha\n";
  Schedule sched{cfg};

  const auto observe = [&](const CoupledState1D& s, bool at_stop) {
    max_principle.see(s.u.max_abs() - u0_bound, s.t);
    theta_pos.see(s.theta.min(), s.t);
    alpha_mono.see(min_gap(s.alpha), s.t);
    const AlphaBoundReport ab = check_alpha_bounds(s, range, 0.0);
    alpha_bounds.see(std::min(ab.margin_lo, ab.margin_hi), s.t);
    if (g.periodic()) {
      mass_u.see(std::abs(s.u.integral() - mass_u0), s.t);
      mass_theta.see(std::abs(s.theta.integral() - g.length()), s.t);
    }
    res.sup_gradient = std::max(res.sup_gradient, ddx(s.u).max_abs());
    if (!sched.row_due(s.t, at_stop)) return;

    DiagnosticsRow row;
    row.t = s.t;
    row.linf_u = s.u.max_abs();
    row.min_theta = s.theta.min();
    row.mass_u = s.u.integral();
    row.mass_theta = s.theta.integral();
    for (double p : cfg.p_list) {
      if (auto* slot = lp_slot(row, p)) *slot = transformed_lp_norm(s, p);
    }
    row.bv_deriv = transformed_bv_of_deriv(s);
    row.alpha_margin_lo = ab.margin_lo;
    row.alpha_margin_hi = ab.margin_hi;
    res.report.rows.push_back(row);
    track_decay(decay, res.report.rows);
    consistency.see(alpha_theta_consistency(s), s.t);

    if (sched.profile_due(s.t, at_stop) || s.t == 0.0) {
      const GridFunction ux = ddx(s.u);
      res.stops.push_back({s.t, ux.max_abs()});
      for (std::size_t j = 0; j < g.size(); ++j) {
        profile += format_number(s.t) + ',' + format_number(g.x(j)) + ',' +
                   format_number(s.u[j]) + ',' + format_number(s.alpha[j]) + ',' +
                   format_number(s.theta[j]) + ',' +
                   format_number(ux[j] / s.theta[j]) + '\n';
      }
    }
  };

  observe(state, true);
  state = run_scalar1d(
      problem, std::move(state), cfg.t_end,
      [&](const CoupledState1D& s, bool at_stop) {
        ++sched.step;
        observe(s, at_stop);
      },
      cfg.output.times, cfg.safety);
  res.steps = sched.step;

  for (const Tracker* t : {&max_principle, &theta_pos, &alpha_mono, &alpha_bounds, &decay}) {
    res.checks.push_back(t->result());
  }
  if (g.periodic()) {
    res.checks.push_back(mass_u.result());
    res.checks.push_back(mass_theta.result());
    res.checks.push_back(consistency.result());
  }
  return {std::move(res), std::move(profile)};
}

// ---- scalar2d --------------------------------------------------------------

std::pair<RunResult, std::string> run_2d(const ExperimentConfig& cfg) {
  const ScalarProblem2D problem = make_scalar2d_problem(cfg);
  CoupledState2D state = init_state(problem);
  const double u0_bound = state.u.max_abs();
  const double mass_u0 = state.u.integral();

  RunResult res;
  res.config = cfg;
  res.report.run_id = cfg.run_id();
  res.report.config = cfg.to_json();

  Tracker max_principle{"max principle", "|u|_inf - |u0|_inf", cfg.tol.max_principle};
  Tracker theta_pos{"theta positive", "min theta", 0.0, false, true};
  Tracker theta_mass{"theta unit mass", "|int theta - 1|", cfg.tol.mass};
  Tracker mass_u{"mass conservation", "|mass(u) - mass(u0)|",
                 cfg.tol.mass * std::max(1.0, std::abs(mass_u0))};
  Tracker ratio[2] = {
      {"ratio maximum principle x1", "max |u_x1|/theta / |d_x1 u0|_inf - 1", cfg.tol.ratio},
      {"ratio maximum principle x2", "max |u_x2|/theta / |d_x2 u0|_inf - 1", cfg.tol.ratio}};
  Tracker holder12{"Hoelder ordering (1,2)", "relative excess of N_1 over N_2", cfg.tol.holder};
  Tracker holder24{"Hoelder ordering (2,4)", "relative excess of N_2 over N_4", cfg.tol.holder};
  Tracker decay{"weighted norms non-increasing", "relative growth per step", cfg.tol.lp_decay};

  EnergyTrajectory energy = start_energy_trajectory(state, problem.eps, 2.0, 0);
  std::array<std::array<double, 3>, 2> prev_w{};
  Schedule sched{cfg};

  const auto observe = [&](const CoupledState2D& s, bool at_stop) {
    max_principle.see(s.u.max_abs() - u0_bound, s.t);
    theta_pos.see(s.theta.min(), s.t);
    theta_mass.see(std::abs(s.theta.integral() - 1.0), s.t);
    mass_u.see(std::abs(s.u.integral() - mass_u0), s.t);
    double max_grad = 0.0;
    RatioReport r0{};
    for (int axis = 0; axis < 2; ++axis) {
      const RatioReport rr = ratio_max_principle_check(s, problem, axis, cfg.tol.ratio);
      if (axis == 0) r0 = rr;
      ratio[axis].see(rr.bound > 0.0 ? rr.max_ratio / rr.bound - 1.0 : rr.max_ratio, s.t);
      const std::array<double, 3> w{weighted_lp(s, 1.0, axis), weighted_lp(s, 2.0, axis),
                                    weighted_lp(s, 4.0, axis)};
      const double n1 = w[0], n2 = std::sqrt(w[1]), n4 = std::pow(w[2], 0.25);
      holder12.see(n2 > 0.0 ? (n1 - n2) / n2 : n1, s.t);
      holder24.see(n4 > 0.0 ? (n2 - n4) / n4 : n2, s.t);
      if (s.t > 0.0) {
        for (int k = 0; k < 3; ++k) {
          const double pv = prev_w[axis][k];
          decay.see(pv > 0.0 ? (w[k] - pv) / pv : w[k], s.t);
        }
      }
      prev_w[axis] = w;
      max_grad = std::max(max_grad, ddx(s.u, axis).max_abs());
    }
    res.sup_gradient = std::max(res.sup_gradient, max_grad);
    if (!sched.row_due(s.t, at_stop)) return;

    DiagnosticsRow row;
    row.t = s.t;
    row.linf_u = s.u.max_abs();
    row.min_theta = s.theta.min();
    row.mass_u = s.u.integral();
    row.mass_theta = s.theta.integral();
    for (double p : cfg.p_list) {
      auto* slot = lp_slot(row, p);
      if (!slot) continue;
      *slot = std::isinf(p) ? r0.max_ratio : std::pow(weighted_lp(s, p, 0), 1.0 / p);
    }
    if (!energy.samples.empty() && energy.samples.back().t == s.t) {
      row.energy_residual = energy_balance_residual(energy).value;
    }
    res.report.rows.push_back(row);
    if (sched.profile_due(s.t, at_stop) || s.t == 0.0) res.stops.push_back({s.t, max_grad});
  };

  observe(state, true);
  state = run_scalar2d(
      problem, std::move(state), cfg.t_end,
      [&](const CoupledState2D& prev, const CoupledState2D& next, bool at_stop) {
        ++sched.step;
        record_energy(energy, prev, next);
        observe(next, at_stop);
      },
      cfg.output.times, cfg.safety);
  res.steps = sched.step;

  Tracker energy_check{"energy balance (p=2, x1)", "relative residual", cfg.tol.energy};
  const EnergyResidual er = energy_balance_residual(energy);
  energy_check.see(er.value, state.t);
  if (er.absolute) energy_check.quantity = "absolute residual (degenerate start)";
  for (const Tracker* t : {&max_principle, &theta_pos, &theta_mass, &mass_u, &ratio[0],
                           &ratio[1], &holder12, &holder24, &decay, &energy_check}) {
    res.checks.push_back(t->result());
  }
  return {std::move(res), std::string()};
}

// ---- temple ----------------------------------------------------------------

std::pair<RunResult, std::string> run_temple_cfg(const ExperimentConfig& cfg) {
  const TempleProblem problem = make_temple_problem(cfg);
  TempleState state = init_temple(problem);
  const Grid1D& g = problem.grid;
  std::array<double, 2> r_lo{}, r_hi{}, w0{};
  for (int i = 0; i < 2; ++i) {
    r_lo[i] = state.R[i].min();
    r_hi[i] = state.R[i].max();
    w0[i] = w_derivative_norm(state, i, 2.0);
  }
  const double mass0 = state.u[0].integral() + state.u[1].integral();
  const bool conservative =
      static_cast<bool>(problem.system.flux) || problem.system.component_fluxes.has_value();

  RunResult res;
  res.config = cfg;
  res.report.run_id = cfg.run_id();
  res.report.config = cfg.to_json();

  Tracker range[2] = {
      {"R1 maximum principle", "excursion outside initial range", cfg.tol.invariant_range},
      {"R2 maximum principle", "excursion outside initial range", cfg.tol.invariant_range}};
  Tracker persist[2] = {
      {"W1 persistence", "|dW1/dalpha|_2 / initial", cfg.tol.persistence},
      {"W2 persistence", "|dW2/dalpha|_2 / initial", cfg.tol.persistence}};
  Tracker w_decay{"W norms non-increasing", "relative growth of |dW_i/dalpha|_2 per step",
                  cfg.tol.lp_decay};
  std::array<double, 2> w_prev = w0;
  Tracker theta_pos{"theta positive", "min theta_i", 0.0, false, true};
  Tracker alpha_mono{"alpha increasing", "min alpha_i gap", 0.0, false, true};
  Tracker alpha_bounds{"alpha bounds", "bound violation", cfg.tol.alpha_bound_dx * g.dx()};
  Tracker mass{"mass conservation", "|mass(u) - mass(u0)|",
               cfg.tol.mass * std::max(1.0, std::abs(mass0))};

  std::string profile = "t,x,u1,u2,R1,R2,alpha1,alpha2,theta1,theta2,w1_alpha,w2_alpha\n";
  Schedule sched{cfg};

  const auto observe = [&](const TempleState& s, bool at_stop) {
    double lo_margin = kInf, hi_margin = kInf;
    for (int i = 0; i < 2; ++i) {
      range[i].see(std::max(s.R[i].max() - r_hi[i], r_lo[i] - s.R[i].min()), s.t);
      const double w = w_derivative_norm(s, i, 2.0);
      persist[i].see(w0[i] > 0.0 ? w / w0[i] : (w > 1e-12 ? kInf : 0.0), s.t);
      w_decay.see(w_prev[i] > 0.0 ? (w - w_prev[i]) / w_prev[i] : w, s.t);
      w_prev[i] = w;
      theta_pos.see(s.theta[i].min(), s.t);
      alpha_mono.see(min_gap(s.alpha[i]), s.t);
      const double c = s.max_modified_speed;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.x(j);
        lo_margin = std::min(lo_margin, s.alpha[i][j] - (x - c * s.t));
        hi_margin = std::min(hi_margin, (x + c * s.t) - s.alpha[i][j]);
      }
    }
    alpha_bounds.see(-std::min(lo_margin, hi_margin), s.t);
    if (conservative && g.periodic()) {
      mass.see(std::abs(s.u[0].integral() + s.u[1].integral() - mass0), s.t);
    }
    res.sup_gradient = std::max(res.sup_gradient, s.sup_gradient);
    if (!sched.row_due(s.t, at_stop)) return;

    DiagnosticsRow row;
    row.t = s.t;
    row.linf_u = std::max(s.u[0].max_abs(), s.u[1].max_abs());
    row.min_theta = std::min(s.theta[0].min(), s.theta[1].min());
    row.mass_u = s.u[0].integral() + s.u[1].integral();
    row.mass_theta = s.theta[0].integral() + s.theta[1].integral();
    for (double p : cfg.p_list) {
      if (auto* slot = lp_slot(row, p)) {
        *slot = w_derivative_norm(s, 0, p) + w_derivative_norm(s, 1, p);
      }
    }
    const TransformedProfile w1 = reconstruct_W(s, 0);
    const TransformedProfile w2 = reconstruct_W(s, 1);
    row.bv_deriv = total_variation(w1.derivs, g.periodic()) +
                   total_variation(w2.derivs, g.periodic());
    row.alpha_margin_lo = lo_margin;
    row.alpha_margin_hi = hi_margin;
    res.report.rows.push_back(row);

    if (sched.profile_due(s.t, at_stop) || s.t == 0.0) {
      res.stops.push_back({s.t, std::max(ddx(s.u[0]).max_abs(), ddx(s.u[1]).max_abs())});
      for (std::size_t j = 0; j < g.size(); ++j) {
        profile += format_number(s.t) + ',' + format_number(g.x(j));
        for (const auto* f : {&s.u, &s.R, &s.alpha, &s.theta}) {
          profile += ',' + format_number((*f)[0][j]) + ',' + format_number((*f)[1][j]);
        }
        profile += ',' + format_number(w1.derivs[j]) + ',' + format_number(w2.derivs[j]) + '\n';
      }
    }
  };

  observe(state, true);
  state = run_temple(
      problem, std::move(state), cfg.t_end,
      [&](const TempleState& s, bool at_stop) {
        ++sched.step;
        observe(s, at_stop);
      },
      cfg.output.times, cfg.safety);
  res.steps = sched.step;

  for (const Tracker* t : {&range[0], &range[1], &persist[0], &persist[1], &w_decay,
                           &theta_pos, &alpha_mono, &alpha_bounds}) {
    res.checks.push_back(t->result());
  }
  if (conservative && g.periodic()) res.checks.push_back(mass.result());
  return {std::move(res), std::move(profile)};
}

}  // namespace

bool RunResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

RunResult run(const ExperimentConfig& cfg, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto [res, profile] = cfg.solver == SolverKind::scalar1d   ? run_1d(cfg)
                        : cfg.solver == SolverKind::scalar2d ? run_2d(cfg)
                                                             : run_temple_cfg(cfg);
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json checks = json::array();
  for (const CheckResult& c : res.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  res.report.config["checks"] = checks;
  res.report.config["steps"] = res.steps;
  res.report.config["sup_gradient"] = res.sup_gradient;
  if (options.write) {
    const std::filesystem::path dir(cfg.out_dir);
    const std::string id = res.report.run_id;
    write_csv(res.report, dir / (id + ".csv"));
    write_json(res.report, dir / (id + ".json"));
    res.artifacts.push_back(dir / (id + ".csv"));
    res.artifacts.push_back(dir / (id + ".json"));
    if (!profile.empty()) {
      write_text(dir / (id + "_profile.csv"), profile);
      res.artifacts.push_back(dir / (id + "_profile.csv"));
    }
  }
  return res;
}

// ---- sweeps ----------------------------------------------------------------

bool SweepResult::pass() const {
  return table.bounded(0.5, 2.0) &&
         std::all_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.pass(); });
}

SweepResult sweep(const ExperimentConfig& cfg, unsigned jobs, const RunOptions& options) {
  const std::vector<double>& list = cfg.eps_list;
  if (list.size() < 3) throw ConfigError("config.eps_list: a sweep needs at least three values");
  std::vector<std::optional<RunResult>> runs(list.size());
  ScalingFamily family;
  family.name = cfg.problem;
  family.dx_for = [&](double e) { return cfg.at_eps(e).dx(); };
  family.sup_gradient_for = [&](double e) {
    const std::size_t k = static_cast<std::size_t>(
        std::find(list.begin(), list.end(), e) - list.begin());
    runs[k] = run(cfg.at_eps(e), options);
    return runs[k]->sup_gradient;
  };
  SweepResult out;
  out.table = gradient_scaling_study(family, list, jobs);
  for (auto& r : runs) {
    for (const auto& a : r->artifacts) out.artifacts.push_back(a);
    out.runs.push_back(std::move(*r));
  }
  if (options.write) {
    const std::filesystem::path dir(cfg.out_dir);
    write_text(dir / (cfg.problem + "_scaling.csv"), scaling_to_csv(out.table));
    DiagnosticsReport summary;
    summary.run_id = cfg.problem + "_sweep";
    summary.config = cfg.to_json();
    summary.scaling.push_back(out.table);
    write_json(summary, dir / (cfg.problem + "_sweep.json"));
    out.artifacts.push_back(dir / (cfg.problem + "_scaling.csv"));
    out.artifacts.push_back(dir / (cfg.problem + "_sweep.json"));
  }
  return out;
}

// ---- oracle comparison -----------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    if (x[k] > 0.0 && y[k] > 0.0) {
      lx.push_back(std::log(x[k]));
      ly.push_back(std::log(y[k]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

json OracleTable::to_json() const {
  json rows_j = json::array();
  for (const OracleRow& r : rows) {
    rows_j.push_back({{"eps", r.eps}, {"n", r.n}, {"dx", r.dx},
                      {"l1_error", r.l1_error}, {"linf_error", r.linf_error}});
  }
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(); };
  return {{"problem", problem}, {"oracle", oracle}, {"t", t}, {"rows", rows_j},
          {"l1_rate", num(l1_rate)}, {"linf_rate", num(linf_rate)}};
}

std::string OracleTable::to_csv() const {
  std::string out = "eps,n,dx,l1_error,linf_error\n";
  for (const OracleRow& r : rows) {
    out += format_number(r.eps) + ',' + std::to_string(r.n) + ',' + format_number(r.dx) +
           ',' + format_number(r.l1_error) + ',' + format_number(r.linf_error) + '\n';
  }
  return out;
}

OracleTable compare_oracle(const ExperimentConfig& cfg, unsigned jobs, bool write) {
  if (cfg.solver != SolverKind::scalar1d) {
    throw ConfigError("compare-oracle: oracle inapplicable to solver other than scalar1d");
  }
  const std::string kind = cfg.data.value("kind", "");
  const ScalarFlux flux = make_flux(cfg.flux);
  const double t = cfg.t_end;
  OracleTable table;
  table.problem = cfg.problem;
  table.t = t;

  std::function<double(double)> exact;
  if (kind == "riemann") {
    const double ul = cfg.data.at("u_left").get<double>();
    const double ur = cfg.data.at("u_right").get<double>();
    const double x0 = cfg.data.value("x0", 0.0);
    if (cfg.topology != Topology::line) {
      throw ConfigError("compare-oracle: Riemann data need a line grid");
    }
    auto sol = std::make_shared<RiemannSolution>(RiemannDatum{ul, ur, flux});
    table.oracle = "riemann";
    exact = [sol, t, x0](double x) { return sol->at(t, x, x0); };
  } else if (kind == "constant") {
    const double c = cfg.data.at("value").get<double>();
    table.oracle = "constant";
    exact = [c](double) { return c; };
  } else if (kind == "sine" || kind == "tanh") {
    const auto u0 = make_data_1d(cfg.data);
    const auto du0 = make_data_derivative_1d(cfg.data);
    const double tb = breaking_time(u0, du0, flux, cfg.x_min, cfg.x_max);
    if (!(t < tb)) {
      throw ConfigError("compare-oracle: t=" + fmt(t) + " is not before the breaking time " +
                        fmt(tb) + "; characteristics do not apply");
    }
    table.oracle = "characteristics";
    exact = [u0, du0, flux, t](double x) {
      return characteristics_solution(u0, du0, flux, t, x);
    };
  } else {
    throw ConfigError("compare-oracle: no oracle for data kind '" + kind + "'");
  }

  std::vector<double> list = cfg.eps_list.empty() ? std::vector<double>{cfg.eps} : cfg.eps_list;
  const auto one = [&](double e) {
    const ExperimentConfig c = cfg.at_eps(e);
    const ScalarProblem1D problem = make_scalar1d_problem(c);
    const CoupledState1D end =
        run_scalar1d(problem, init_state(problem), t, {}, {}, c.safety);
    const GridFunction ref = GridFunction::sample(problem.grid, exact);
    return OracleRow{e, c.n, problem.grid.dx(), l1_distance(end.u, ref),
                     linf_distance(end.u, ref)};
  };
  jobs = std::max(1u, jobs);
  for (std::size_t start = 0; start < list.size(); start += jobs) {
    std::vector<std::future<OracleRow>> running;
    for (std::size_t k = start; k < std::min(list.size(), start + jobs); ++k) {
      running.push_back(std::async(std::launch::async, one, list[k]));
    }
    for (auto& f : running) table.rows.push_back(f.get());
  }
  std::vector<double> es, l1, linf;
  for (const OracleRow& r : table.rows) {
    es.push_back(r.eps);
    l1.push_back(r.l1_error);
    linf.push_back(r.linf_error);
  }
  table.l1_rate = loglog_slope(es, l1);
  table.linf_rate = loglog_slope(es, linf);
  if (write) {
    const std::filesystem::path dir(cfg.out_dir);
    const std::string id = cfg.problem + "_t" + format_number(t) + "_oracle";
    write_text(dir / (id + ".csv"), table.to_csv());
    write_text(dir / (id + ".json"), table.to_json().dump(2) + "\n");
  }
  return table;
}

// ---- certification ---------------------------------------------------------

CertifyResult certify(const ExperimentConfig& cfg, bool write) {
  if (cfg.solver != SolverKind::temple) {
    throw ConfigError("certify: only temple configurations carry an eigenstructure");
  }
  const TempleSystem sys = make_temple_system(cfg);
  const StateBox box{cfg.box.first, cfg.box.second};
  CertifyResult out{certify_eigenstructure(sys, box), 0.5 * (box.lo + box.hi), Mat2::Zero()};
  out.coupling = derive_coupling(sys, out.probe, 1e-5 * box.size());
  if (write) {
    const CertificationReport& r = out.report;
    json j = {{"system", r.system},
              {"points", r.points},
              {"tol", r.tol},
              {"pass", r.pass()},
              {"residuals",
               {{"biorthogonality", r.biorthogonality},
                {"eigen_equation", r.eigen_equation},
                {"alignment", r.alignment},
                {"temple", r.temple},
                {"umap_roundtrip", r.umap_roundtrip},
                {"coupling", r.coupling}}},
              {"probe", {out.probe(0), out.probe(1)}},
              {"coupling_at_probe",
               {{out.coupling(0, 0), out.coupling(0, 1)},
                {out.coupling(1, 0), out.coupling(1, 1)}}}};
    write_text(std::filesystem::path(cfg.out_dir) / (cfg.problem + "_certify.json"),
               j.dump(2) + "\n");
  }
  return out;
}

}  // namespace charax
