#include "charax/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "charax/error.hpp"
#include "charax/experiment.hpp"
#include "charax/scalar1d.hpp"
#include "charax/temple.hpp"

namespace charax::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

ExperimentConfig preset_config(const std::string& name, const std::filesystem::path& out,
                               std::vector<std::string> overrides = {}) {
  overrides.push_back("out=\"" + out.string() + "\"");
  return resolve_config(preset(name), overrides);
}

const CheckResult& check(const RunResult& r, const std::string& name) {
  for (const CheckResult& c : r.checks) {
    if (c.name == name) return c;
  }
  throw Error("run " + r.report.run_id + " has no check '" + name + "'");
}

const DiagnosticsRow& row_at(const RunResult& r, double t) {
  for (const DiagnosticsRow& row : r.report.rows) {
    if (row.t == t) return row;
  }
  throw Error("run " + r.report.run_id + " has no row at t=" + fmt(t));
}

const StopSample& stop_at(const RunResult& r, double t) {
  for (const StopSample& s : r.stops) {
    if (s.t == t) return s;
  }
  throw Error("run " + r.report.run_id + " has no output at t=" + fmt(t));
}

const RunResult& run_at(const SweepResult& s, double eps) {
  for (const RunResult& r : s.runs) {
    if (r.config.eps == eps) return r;
  }
  throw Error("sweep has no run at eps=" + fmt(eps));
}

// Appends the failing checks of `r` among `names` to `why`.
bool checks_pass(const RunResult& r, std::initializer_list<const char*> names,
                 std::string& why) {
  bool ok = true;
  for (const char* n : names) {
    const CheckResult& c = check(r, n);
    if (!c.pass) {
      ok = false;
      why += " [" + r.report.run_id + "] " + c.name + ": " + c.detail + ";";
    }
  }
  return ok;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

std::string format(const Criterion& c) {
  return std::string(c.pass ? "PASS " : "FAIL ") + c.name + ": " + c.detail + " (" +
         fmt(c.seconds) + " s)";
}

double diagonal_reduction_error(const ExperimentConfig& cfg) {
  const TempleProblem tp = make_temple_problem(cfg);
  if (!tp.system.component_fluxes) {
    throw ConfigError("diagonal reduction needs a diagonal-decoupled system");
  }
  TempleState ts = init_temple(tp);
  const auto data = tp.initial_data();
  std::array<ScalarProblem1D, 2> sp{
      ScalarProblem1D{(*tp.system.component_fluxes)[0],
                      [data](double x) { return data(x)(0); }, tp.grid, tp.eps,
                      tp.resolution},
      ScalarProblem1D{(*tp.system.component_fluxes)[1],
                      [data](double x) { return data(x)(1); }, tp.grid, tp.eps,
                      tp.resolution}};
  std::array<CoupledState1D, 2> ss{init_state(sp[0]), init_state(sp[1])};
  const auto diff = [&] {
    double d = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < tp.grid.size(); ++j) {
        d = std::max({d, std::abs(ts.u[i][j] - ss[i].u[j]),
                      std::abs(ts.alpha[i][j] - ss[i].alpha[j]),
                      std::abs(ts.theta[i][j] - ss[i].theta[j])});
      }
    }
    return d;
  };
  double worst = diff();
  while (ts.t < cfg.t_end) {
    const double dt = std::min(stable_step(ts, tp, cfg.safety), cfg.t_end - ts.t);
    ts = advance_temple(ts, tp, dt);
    for (int i = 0; i < 2; ++i) ss[i] = advance(ss[i], sp[i], dt);
    worst = std::max(worst, diff());
  }
  return worst;
}

std::vector<Criterion> run_all(const Options& opt) {
  std::vector<Criterion> out;
  const auto emit = [&](Criterion c) {
    if (opt.on_result) opt.on_result(c);
    out.push_back(std::move(c));
  };
  // Any exception inside one criterion fails that criterion only.
  const auto guarded = [&](const std::string& name, auto&& body) {
    const auto t0 = Clock::now();
    try {
      body(t0);
    } catch (const std::exception& e) {
      emit({name, false, std::string("aborted: ") + e.what(), since(t0)});
    }
  };
  const std::filesystem::path root = opt.out;

  // Scalar headline: one burgers-sine sweep feeds three criteria.
  guarded("scalar burgers-sine", [&](Clock::time_point t0) {
    const ExperimentConfig cfg = preset_config("burgers-sine", root / "burgers-sine");
    const SweepResult sw = sweep(cfg, opt.jobs);
    const RunResult& main = run_at(sw, 1e-3);
    {
      std::string why;
      bool ok = checks_pass(main, {"max principle"}, why);
      if (main.seconds >= 60.0) {
        ok = false;
        why += " runtime " + fmt(main.seconds) + " s >= 60 s;";
      }
      emit({"maximum principle", ok,
            check(main, "max principle").detail + "; single run " + fmt(main.seconds) + " s" +
                why,
            main.seconds});
    }
    {
      std::string why;
      const bool ok =
          checks_pass(main, {"theta positive", "alpha increasing", "alpha bounds"}, why);
      emit({"coordinate structure", ok,
            check(main, "theta positive").detail + "; " + check(main, "alpha bounds").detail +
                why,
            main.seconds});
    }
    {
      const double t = 0.4;
      const double cap = 1.05 * 2.0 * std::numbers::pi / std::sqrt(2.0);
      const double bv_cap = 1.1 * 8.0 * std::numbers::pi;
      std::string why;
      bool ok = true;
      const DiagnosticsRow& r = row_at(main, t);
      const double grad = stop_at(main, t).max_gradient;
      if (!(r.lp2 && *r.lp2 <= cap)) {
        ok = false;
        why += " |U_alpha|_2=" + fmt(r.lp2.value_or(NAN)) + " > " + fmt(cap) + ";";
      }
      if (!(grad >= 50.0)) {
        ok = false;
        why += " |u_x|_inf=" + fmt(grad) + " < 50;";
      }
      std::ostringstream table;
      std::vector<double> products;
      double spread = 0.0;
      for (auto field : {&DiagnosticsRow::lp1, &DiagnosticsRow::lp2, &DiagnosticsRow::lp4,
                         &DiagnosticsRow::lpinf}) {
        double lo = INFINITY, hi = -INFINITY;
        for (const RunResult& run : sw.runs) {
          const auto v = row_at(run, t).*field;
          if (!v) continue;
          lo = std::min(lo, *v);
          hi = std::max(hi, *v);
        }
        if (lo <= hi) spread = std::max(spread, (hi - lo) / lo);
      }
      if (!(spread < 0.05)) {
        ok = false;
        why += " transformed norms vary by " + fmt(100.0 * spread) + "%;";
      }
      double bv_max = 0.0;
      for (const RunResult& run : sw.runs) {
        products.push_back(run.config.eps * stop_at(run, t).max_gradient);
        for (const DiagnosticsRow& row : run.report.rows) {
          bv_max = std::max(bv_max, row.bv_deriv.value_or(0.0));
        }
      }
      for (std::size_t k = 0; k + 1 < products.size(); ++k) {
        const double ratio = products[k + 1] / products[k];
        table << (k ? ", " : "") << fmt(ratio);
        if (!(ratio >= 0.5 && ratio <= 2.0)) {
          ok = false;
          why += " eps*|u_x|_inf ratio " + fmt(ratio) + " outside [0.5, 2];";
        }
      }
      if (!(bv_max <= bv_cap)) {
        ok = false;
        why += " BV surrogate " + fmt(bv_max) + " > " + fmt(bv_cap) + ";";
      }
      emit({"generalized persistence", ok,
            "t=0.4: |U_alpha|_2=" + fmt(r.lp2.value_or(NAN)) + " (cap " + fmt(cap) +
                "), |u_x|_inf=" + fmt(grad) + ", norm spread across eps " +
                fmt(100.0 * spread) + "%, eps*|u_x|_inf ratios " + table.str() +
                ", max BV surrogate " + fmt(bv_max) + " (cap " + fmt(bv_cap) + ")" + why,
            since(t0)});
    }
  });

  guarded("Kruzkov limit", [&](Clock::time_point t0) {
    std::string why;
    bool ok = true;
    const OracleTable shock =
        compare_oracle(preset_config("burgers-riemann", root / "kruzkov"), opt.jobs);
    for (std::size_t k = 0; k + 1 < shock.rows.size(); ++k) {
      if (!(shock.rows[k + 1].l1_error < shock.rows[k].l1_error)) {
        ok = false;
        why += " shock L1 errors not strictly decreasing;";
      }
    }
    if (!(shock.l1_rate >= 0.7)) {
      ok = false;
      why += " shock rate " + fmt(shock.l1_rate) + " < 0.7;";
    }
    const OracleTable fan =
        compare_oracle(preset_config("burgers-rarefaction", root / "kruzkov"), opt.jobs);
    if (!(fan.l1_rate >= 0.5)) {
      ok = false;
      why += " rarefaction rate " + fmt(fan.l1_rate) + " < 0.5;";
    }
    const OracleTable smooth = compare_oracle(
        preset_config("burgers-sine", root / "kruzkov", {"t_end=0.1", "output.times=[0.1]"}),
        opt.jobs);
    std::ostringstream pre;
    for (const OracleRow& r : smooth.rows) {
      const double cap = 10.0 * r.eps + 5.0 * r.dx * r.dx;
      pre << " eps=" << fmt(r.eps) << ": " << fmt(r.linf_error) << "<=" << fmt(cap);
      if (!(r.linf_error <= cap)) {
        ok = false;
        why += " pre-shock error " + fmt(r.linf_error) + " > " + fmt(cap) + ";";
      }
    }
    const double secs = since(t0);
    if (secs >= 300.0) {
      ok = false;
      why += " runtime >= 300 s;";
    }
    std::ostringstream l1;
    for (const OracleRow& r : shock.rows) l1 << (&r == &shock.rows[0] ? "" : ", ") << fmt(r.l1_error);
    emit({"Kruzkov limit", ok,
          "shock L1 " + l1.str() + " rate " + fmt(shock.l1_rate) + "; rarefaction rate " +
              fmt(fan.l1_rate) + "; pre-shock |u-oracle|_inf" + pre.str() + why,
          secs});
  });

  guarded("multi-D identities", [&](Clock::time_point) {
    const RunResult r = run(preset_config("torus-diagonal", root / "torus-diagonal"));
    std::string why;
    bool ok = checks_pass(r,
                          {"theta unit mass", "theta positive", "ratio maximum principle x1",
                           "ratio maximum principle x2", "energy balance (p=2, x1)",
                           "Hoelder ordering (1,2)", "Hoelder ordering (2,4)"},
                          why);
    if (r.seconds >= 300.0) {
      ok = false;
      why += " runtime >= 300 s;";
    }
    emit({"multi-D identities", ok,
          check(r, "theta unit mass").detail + "; " +
              check(r, "ratio maximum principle x1").detail + "; " +
              check(r, "energy balance (p=2, x1)").detail + why,
          r.seconds});
  });

  guarded("Temple certification", [&](Clock::time_point t0) {
    std::string why;
    bool ok = true;
    std::ostringstream detail;
    for (const char* name : {"diag-temple", "diag-decoupled"}) {
      const ExperimentConfig cfg = preset_config(name, root / "certify");
      const CertifyResult c = certify(cfg);
      const CertificationReport& r = c.report;
      const double worst = std::max({r.biorthogonality, r.eigen_equation, r.alignment,
                                     r.temple, r.umap_roundtrip});
      detail << name << " max residual " << fmt(worst) << ", coupling " << fmt(r.coupling)
             << "; ";
      if (worst != 0.0) {
        ok = false;
        why += std::string(" ") + name + " residuals not exactly zero;";
      }
      if (!(r.coupling < 1e-6)) {
        ok = false;
        why += std::string(" ") + name + " coupling validation " + fmt(r.coupling) + ";";
      }
    }
    const CertifyResult c = certify(preset_config("chromatography", root / "certify"));
    const CertificationReport& r = c.report;
    const double worst = std::max({r.biorthogonality, r.eigen_equation, r.alignment,
                                   r.temple, r.umap_roundtrip, r.coupling});
    detail << "chromatography on [" << fmt(r.points) << " points] max residual " << fmt(worst)
           << " (Temple " << fmt(r.temple) << ", coupling " << fmt(r.coupling) << ")";
    if (!(worst < 1e-6)) {
      ok = false;
      why += " chromatography residual " + fmt(worst) + ";";
    }
    emit({"Temple certification", ok, detail.str() + why, since(t0)});
  });

  guarded("Temple persistence", [&](Clock::time_point t0) {
    std::string why;
    bool ok = true;
    const SweepResult sw =
        sweep(preset_config("chromatography", root / "chromatography"), opt.jobs);
    std::ostringstream detail;
    for (const RunResult& r : sw.runs) {
      ok &= checks_pass(r, {"W1 persistence", "W2 persistence", "R1 maximum principle",
                            "R2 maximum principle", "theta positive"},
                        why);
      detail << "eps=" << fmt(r.config.eps) << ": W ratios "
             << check(r, "W1 persistence").detail.substr(
                    check(r, "W1 persistence").detail.find("max "))
             << " / "
             << check(r, "W2 persistence").detail.substr(
                    check(r, "W2 persistence").detail.find("max "))
             << "; ";
    }
    const double sweep_secs = since(t0);
    const double red = diagonal_reduction_error(
        preset_config("diag-decoupled", root / "diag-decoupled"));
    detail << "diagonal reduction max diff " << fmt(red);
    if (!(red <= 1e-8)) {
      ok = false;
      why += " diagonal reduction differs by " + fmt(red) + ";";
    }
    if (sweep_secs >= 600.0) {
      ok = false;
      why += " sweep runtime " + fmt(sweep_secs) + " s >= 600 s;";
    }
    emit({"Temple persistence", ok, detail.str() + "; sweep " + fmt(sweep_secs) + " s" + why,
          since(t0)});

    std::ostringstream rows;
    for (const ScalingRow& row : sw.table.rows) {
      rows << "eps=" << fmt(row.eps) << " eps*sup|u_x|=" << fmt(row.product) << "; ";
    }
    emit({"Temple gradient scaling", sw.table.bounded(0.5, 2.0),
          rows.str() + "successive ratios must lie in [0.5, 2]", 0.0});
  });

  guarded("determinism", [&](Clock::time_point t0) {
    std::string why;
    bool ok = true;
    std::size_t compared = 0;
    for (const std::string& name : preset_names()) {
      const std::filesystem::path a = root / "determinism" / "a";
      const std::filesystem::path b = root / "determinism" / "b";
      const RunResult ra = run(preset_config(name, a));
      const RunResult rb = run(preset_config(name, b));
      const std::string id = ra.report.run_id;
      const std::string ba = read_bytes(a / (id + ".csv"));
      const std::string bb = read_bytes(b / (id + ".csv"));
      ++compared;
      if (ba.empty() || ba != bb) {
        ok = false;
        why += " " + name + " CSV differs;";
      }
    }
    emit({"determinism", ok,
          std::to_string(compared) + " presets run twice, CSV bytes compared" + why,
          since(t0)});
  });

  return out;
}

}  // namespace charax::acceptance
