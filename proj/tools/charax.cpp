// charax: runs configured experiments, sweeps, oracle comparisons,
// eigenstructure certification and the acceptance suite.
//
// Exit codes: 0 pass, 1 invariant failure, 2 configuration error, 3 solver
// abort.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "charax/acceptance.hpp"
#include "charax/config.hpp"
#include "charax/error.hpp"
#include "charax/experiment.hpp"

namespace {

enum Exit { kPass = 0, kInvariant = 1, kConfig = 2, kAbort = 3 };

struct ConfigFlags {
  std::string config_file;
  std::string preset;
  std::vector<std::string> sets;
  std::optional<double> eps;
  std::optional<std::size_t> n;
  std::optional<double> t_end;
  std::optional<std::string> out;
  unsigned jobs = 1;

  void attach(CLI::App* app, bool with_jobs) {
    app->add_option("-c,--config", config_file, "JSON experiment config");
    app->add_option("-p,--preset", preset, "start from a built-in preset");
    app->add_option("--eps", eps, "viscosity");
    app->add_option("--n", n, "grid cells (per axis)");
    app->add_option("--t-end", t_end, "final time");
    app->add_option("--out", out, "output directory");
    app->add_option("--set", sets, "override key=value (dotted keys, JSON values)");
    if (with_jobs) app->add_option("-j,--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  }

  charax::ExperimentConfig resolve() const {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw charax::ConfigError("cannot open config " + config_file);
      doc = nlohmann::json::parse(in, nullptr, false);
      if (doc.is_discarded()) throw charax::ConfigError(config_file + ": not valid JSON");
    }
    if (!preset.empty()) {
      nlohmann::json base = charax::preset(preset);
      base.merge_patch(doc);
      doc = std::move(base);
    }
    std::vector<std::string> o;
    if (eps) o.push_back("eps=" + nlohmann::json(*eps).dump());
    if (n) o.push_back("grid.n=" + std::to_string(*n));
    if (t_end) o.push_back("t_end=" + nlohmann::json(*t_end).dump());
    if (const char* env = std::getenv("CHARAX_OUT"); env && *env) {
      o.push_back("out=" + nlohmann::json(std::string(env)).dump());
    }
    if (out) o.push_back("out=" + nlohmann::json(*out).dump());
    o.insert(o.end(), sets.begin(), sets.end());
    return charax::resolve_config(doc, o);
  }
};

int print_checks(const charax::RunResult& r) {
  std::cout << r.report.run_id << ": " << r.steps << " steps, " << r.seconds << " s\n";
  for (const auto& c : r.checks) {
    std::cout << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  for (const auto& a : r.artifacts) std::cout << "  wrote " << a.string() << '\n';
  return r.pass() ? kPass : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vanishing-viscosity experiments with generalized characteristics"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list-presets", list, "print the built-in preset names");

  ConfigFlags run_flags, sweep_flags, oracle_flags, cert_flags;
  auto* run_cmd = app.add_subcommand("run", "single run with invariant checks");
  run_flags.attach(run_cmd, false);
  auto* sweep_cmd = app.add_subcommand("sweep", "eps sweep with a gradient scaling table");
  sweep_flags.attach(sweep_cmd, true);
  auto* oracle_cmd = app.add_subcommand("compare-oracle", "errors against exact solutions");
  oracle_flags.attach(oracle_cmd, true);
  auto* cert_cmd = app.add_subcommand("certify", "check a Temple eigenstructure");
  cert_flags.attach(cert_cmd, false);
  auto* accept_cmd = app.add_subcommand("accept", "run the full acceptance suite");
  std::string accept_out = "acceptance_out";
  unsigned accept_jobs = 1;
  accept_cmd->add_option("--out", accept_out, "artifact directory");
  accept_cmd->add_option("-j,--jobs", accept_jobs, "parallel runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    if (list) {
      for (const auto& n : charax::preset_names()) std::cout << n << '\n';
      return kPass;
    }
    if (*run_cmd) return print_checks(charax::run(run_flags.resolve()));
    if (*sweep_cmd) {
      const auto res = charax::sweep(sweep_flags.resolve(), sweep_flags.jobs);
      int code = kPass;
      for (const auto& r : res.runs) code = std::max(code, print_checks(r));
      std::cout << "scaling table (" << res.table.name << ")\n"
                << charax::scaling_to_csv(res.table);
      if (!res.table.bounded(0.5, 2.0)) {
        std::cout << "FAIL eps*sup|u_x| ratios outside [0.5, 2]\n";
        code = kInvariant;
      }
      return code;
    }
    if (*oracle_cmd) {
      const auto t = charax::compare_oracle(oracle_flags.resolve(), oracle_flags.jobs);
      std::cout << t.oracle << " oracle at t=" << t.t << '\n' << t.to_csv()
                << "l1 rate " << t.l1_rate << ", linf rate " << t.linf_rate << '\n';
      return kPass;
    }
    if (*cert_cmd) {
      const auto c = charax::certify(cert_flags.resolve());
      const auto& r = c.report;
      std::cout << r.system << " on " << r.points << " points\n"
                << "  biorthogonality " << r.biorthogonality << "\n  eigen equation "
                << r.eigen_equation << "\n  invariant alignment " << r.alignment
                << "\n  Temple condition " << r.temple << "\n  Umap roundtrip "
                << r.umap_roundtrip << "\n  coupling validation " << r.coupling
                << "\n  D at (" << c.probe(0) << ", " << c.probe(1) << ") = [[" << c.coupling(0, 0)
                << ", " << c.coupling(0, 1) << "], [" << c.coupling(1, 0) << ", "
                << c.coupling(1, 1) << "]]\n";
      if (!r.pass()) {
        std::cout << "FAIL " << r.failures() << '\n';
        return kInvariant;
      }
      std::cout << "PASS\n";
      return kPass;
    }
    if (*accept_cmd) {
      charax::acceptance::Options opt;
      opt.out = accept_out;
      opt.jobs = accept_jobs;
      opt.on_result = [](const charax::acceptance::Criterion& c) {
        std::cout << charax::acceptance::format(c) << std::endl;
      };
      const auto all = charax::acceptance::run_all(opt);
      const bool ok = std::all_of(all.begin(), all.end(), [](const auto& c) { return c.pass; });
      return ok ? kPass : kInvariant;
    }
    std::cout << app.help();
    return kPass;
  } catch (const charax::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver abort: " << e.what() << '\n';
    return kAbort;
  }
}
