#include "charax/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "charax/diagnostics.hpp"
#include "charax/error.hpp"

namespace charax {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

double number_at(const json& j, const std::string& key, const std::string& path,
                 std::optional<double> fallback = std::nullopt) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (fallback) return *fallback;
    bad(path + "." + key, "missing");
  }
  if (it->is_string()) {
    const std::string s = it->get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    bad(path + "." + key, "expected a number, got \"" + s + "\"");
  }
  if (!it->is_number()) bad(path + "." + key, "expected a number");
  return it->get<double>();
}

double as_number(const json& v, const std::string& path) {
  if (v.is_string() && v.get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) bad(path, "expected a number");
  return v.get<double>();
}

std::string string_at(const json& j, const std::string& key,
                      const std::string& path,
                      std::optional<std::string> fallback = std::nullopt) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (fallback) return *fallback;
    bad(path + "." + key, "missing");
  }
  if (!it->is_string()) bad(path + "." + key, "expected a string");
  return it->get<std::string>();
}

std::size_t count_at(const json& j, const std::string& key,
                     const std::string& path, std::size_t fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    bad(path + "." + key, "expected a non-negative integer");
  }
  return it->get<std::size_t>();
}

json number_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

const std::vector<std::pair<std::string, json>>& presets() {
  static const std::vector<std::pair<std::string, json>> table = [] {
    std::vector<std::pair<std::string, json>> t;
    t.emplace_back("burgers-sine", json{
        {"solver", "scalar1d"},
        {"flux", "burgers"},
        {"data", {{"kind", "sine"}, {"amplitude", 1.0}}},
        {"grid", {{"n", 4096}, {"x_min", 0.0}, {"x_max", 1.0}, {"topology", "periodic"}}},
        {"eps", 1e-3},
        {"eps_list", {4e-3, 2e-3, 1e-3}},
        {"t_end", 0.5},
        {"output", {{"times", {0.1, 0.2, 0.3, 0.4, 0.5}}, {"every", 500}}},
    });
    t.emplace_back("burgers-riemann", json{
        {"solver", "scalar1d"},
        {"flux", "burgers"},
        {"data", {{"kind", "riemann"}, {"u_left", 1.0}, {"u_right", 0.0}, {"x0", 0.0}}},
        {"grid", {{"n", 6000}, {"x_min", -0.5}, {"x_max", 1.0}, {"topology", "line"}}},
        {"eps", 1e-3},
        {"eps_list", {4e-3, 2e-3, 1e-3}},
        {"t_end", 0.5},
        {"output", {{"times", {0.25, 0.5}}, {"every", 500}}},
    });
    t.emplace_back("burgers-rarefaction", json{
        {"solver", "scalar1d"},
        {"flux", "burgers"},
        {"data", {{"kind", "riemann"}, {"u_left", 0.0}, {"u_right", 1.0}, {"x0", 0.0}}},
        {"grid", {{"n", 6000}, {"x_min", -0.5}, {"x_max", 1.0}, {"topology", "line"}}},
        {"eps", 1e-3},
        {"eps_list", {4e-3, 2e-3, 1e-3}},
        {"t_end", 0.5},
        {"output", {{"times", {0.25, 0.5}}, {"every", 500}}},
    });
    t.emplace_back("torus-diagonal", json{
        {"solver", "scalar2d"},
        {"flux", {"burgers", "burgers"}},
        {"data", {{"kind", "sine"}, {"amplitude", 1.0}, {"wavevector", {1, 1}}}},
        {"grid", {{"n", 128}}},
        {"eps", 5e-3},
        {"t_end", 0.3},
        {"output", {{"times", {0.1, 0.2, 0.3}}, {"every", 25}}},
    });
    t.emplace_back("chromatography", json{
        {"solver", "temple"},
        {"system", "chromatography"},
        {"box", {{0.1, 0.1}, {1.0, 1.0}}},
        {"data", {{{"kind", "sine"}, {"offset", 0.55}, {"amplitude", 0.44}},
                  {{"kind", "sine"}, {"offset", 0.55}, {"amplitude", 0.44}, {"phase", 0.3}}}},
        {"grid", {{"n", 2000}, {"x_min", 0.0}, {"x_max", 1.0}, {"topology", "periodic"}}},
        {"eps", 2e-3},
        {"eps_list", {4e-3, 2e-3, 1e-3}},
        {"t_end", 2.0},
        {"output", {{"times", {0.5, 1.0, 1.5, 2.0}}, {"every", 1000}}},
    });
    t.emplace_back("diag-temple", json{
        {"solver", "temple"},
        {"system", "diagonal-coupled"},
        {"coupling", 0.25},
        {"box", {{-1.0, -1.0}, {1.0, 1.0}}},
        {"data", {{{"kind", "sine"}, {"amplitude", 0.5}},
                  {{"kind", "sine"}, {"amplitude", 0.5}, {"phase", 1.0}}}},
        {"grid", {{"n", 1024}, {"x_min", 0.0}, {"x_max", 1.0}, {"topology", "periodic"}}},
        {"eps", 4e-3},
        {"eps_list", {1.6e-2, 8e-3, 4e-3}},
        {"t_end", 0.5},
        {"output", {{"times", {0.25, 0.5}}, {"every", 500}}},
    });
    t.emplace_back("diag-decoupled", json{
        {"solver", "temple"},
        {"system", "diagonal-decoupled"},
        {"fluxes", {"burgers", "quartic"}},
        {"box", {{-1.0, -1.0}, {1.0, 1.0}}},
        {"data", {{{"kind", "sine"}, {"amplitude", 1.0}},
                  {{"kind", "sine"}, {"amplitude", 0.8}, {"phase", 1.0}}}},
        {"grid", {{"n", 1024}, {"x_min", 0.0}, {"x_max", 1.0}, {"topology", "periodic"}}},
        {"eps", 4e-3},
        {"eps_list", {1.6e-2, 8e-3, 4e-3}},
        {"t_end", 0.5},
        {"output", {{"times", {0.25, 0.5}}, {"every", 500}}},
    });
    for (auto& [name, doc] : t) doc["problem"] = name;
    return t;
  }();
  return table;
}

Vec2 vec2_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) bad(path, "expected a pair of numbers");
  return Vec2(as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]"));
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, doc] : presets()) names.push_back(name);
  return names;
}

json preset(const std::string& name) {
  for (const auto& [n, doc] : presets()) {
    if (n == name) return doc;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    if (!node->is_object()) *node = json::object();
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

ExperimentConfig resolve_config(const json& user,
                                const std::vector<std::string>& overrides) {
  if (!user.is_object()) throw ConfigError("config: expected a JSON object");
  json doc = json::object();
  const auto problem = user.find("problem");
  if (problem != user.end() && problem->is_string()) {
    const std::string name = problem->get<std::string>();
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), name) != names.end()) doc = preset(name);
  }
  doc.merge_patch(user);
  for (const auto& o : overrides) apply_override(doc, o);
  return ExperimentConfig::from_json(doc);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) bad("config", "expected a JSON object");
  ExperimentConfig c;
  const std::string solver = string_at(j, "solver", "config");
  if (solver == "scalar1d") {
    c.solver = SolverKind::scalar1d;
  } else if (solver == "scalar2d") {
    c.solver = SolverKind::scalar2d;
  } else if (solver == "temple") {
    c.solver = SolverKind::temple;
  } else {
    bad("config.solver", "expected scalar1d, scalar2d or temple");
  }
  c.problem = string_at(j, "problem", "config", std::string("custom"));
  if (c.problem.empty() ||
      c.problem.find_first_of("/\\ ") != std::string::npos) {
    bad("config.problem", "must be a non-empty name without spaces or slashes");
  }
  c.flux = j.value("flux", json());
  c.data = j.value("data", json());
  if (c.data.is_null()) bad("config.data", "missing");

  if (c.solver == SolverKind::scalar1d) {
    if (c.flux.is_null()) bad("config.flux", "missing");
    make_flux(c.flux);
    make_data_1d(c.data);
  } else if (c.solver == SolverKind::scalar2d) {
    if (!c.flux.is_array() || c.flux.size() != 2) {
      bad("config.flux", "expected two flux specs");
    }
    make_flux(c.flux[0]);
    make_flux(c.flux[1]);
    make_data_2d(c.data);
  } else {
    c.system = string_at(j, "system", "config");
    c.fluxes = j.value("fluxes", json());
    c.coupling = number_at(j, "coupling", "config", 0.25);
    const json box = j.value("box", json());
    if (box.is_null()) bad("config.box", "missing");
    if (!box.is_array() || box.size() != 2) bad("config.box", "expected [[lo1,lo2],[hi1,hi2]]");
    c.box = {vec2_at(box[0], "config.box[0]"), vec2_at(box[1], "config.box[1]")};
    if (!(c.box.second.array() > c.box.first.array()).all()) {
      bad("config.box", "lower corner must be below the upper corner");
    }
    if (!c.data.is_array() || c.data.size() != 2) {
      bad("config.data", "expected two component specs");
    }
    make_data_1d(c.data[0]);
    make_data_1d(c.data[1]);
    if (j.contains("mollify_width") && !j["mollify_width"].is_null()) {
      c.mollify_width = number_at(j, "mollify_width", "config");
      if (!(*c.mollify_width >= 0.0)) bad("config.mollify_width", "must be >= 0");
    }
    c.evolve_invariants = j.value("evolve_invariants", false);
  }

  const json grid = j.value("grid", json::object());
  if (!grid.is_object()) bad("config.grid", "expected an object");
  c.n = count_at(grid, "n", "config.grid", c.n);
  c.n2 = count_at(grid, "n2", "config.grid", 0);
  c.x_min = number_at(grid, "x_min", "config.grid", 0.0);
  c.x_max = number_at(grid, "x_max", "config.grid", 1.0);
  const std::string topo = string_at(grid, "topology", "config.grid", std::string("periodic"));
  if (topo == "periodic") {
    c.topology = Topology::periodic;
  } else if (topo == "line") {
    c.topology = Topology::line;
  } else {
    bad("config.grid.topology", "expected periodic or line");
  }
  if (c.n < Grid1D::kMinCells) bad("config.grid.n", "needs at least 8 cells");
  if (c.n2 != 0 && c.n2 < Grid1D::kMinCells) bad("config.grid.n2", "needs at least 8 cells");
  if (!(c.x_max > c.x_min) || !std::isfinite(c.x_max - c.x_min)) {
    bad("config.grid", "x_max must exceed x_min");
  }
  if (c.solver == SolverKind::scalar2d &&
      (c.x_min != 0.0 || c.x_max != 1.0 || c.topology != Topology::periodic)) {
    bad("config.grid", "scalar2d runs on the periodic unit square");
  }

  c.eps = number_at(j, "eps", "config");
  if (!(c.eps > 0.0) || !std::isfinite(c.eps)) bad("config.eps", "must be positive");
  if (j.contains("eps_list") && !j["eps_list"].is_null()) {
    if (!j["eps_list"].is_array()) bad("config.eps_list", "expected an array");
    for (std::size_t k = 0; k < j["eps_list"].size(); ++k) {
      const double e = as_number(j["eps_list"][k], "config.eps_list[" + std::to_string(k) + "]");
      if (!(e > 0.0) || !std::isfinite(e)) {
        bad("config.eps_list[" + std::to_string(k) + "]", "must be positive");
      }
      c.eps_list.push_back(e);
    }
  }
  c.t_end = number_at(j, "t_end", "config");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) bad("config.t_end", "must be positive");
  c.safety = number_at(j, "safety", "config", kDefaultSafety);
  if (!(c.safety > 0.0 && c.safety <= 1.0)) bad("config.safety", "must lie in (0, 1]");

  const json out = j.value("output", json::object());
  if (!out.is_object()) bad("config.output", "expected an object");
  if (out.contains("times")) {
    if (!out["times"].is_array()) bad("config.output.times", "expected an array");
    for (std::size_t k = 0; k < out["times"].size(); ++k) {
      const std::string path = "config.output.times[" + std::to_string(k) + "]";
      const double t = as_number(out["times"][k], path);
      if (!(t > 0.0 && t <= c.t_end)) bad(path, "must lie in (0, t_end]");
      if (!c.output.times.empty() && !(t > c.output.times.back())) {
        bad(path, "times must be strictly increasing");
      }
      c.output.times.push_back(t);
    }
  }
  c.output.every = count_at(out, "every", "config.output", 0);

  if (j.contains("p_list")) {
    if (!j["p_list"].is_array() || j["p_list"].empty()) {
      bad("config.p_list", "expected a non-empty array");
    }
    c.p_list.clear();
    for (std::size_t k = 0; k < j["p_list"].size(); ++k) {
      const std::string path = "config.p_list[" + std::to_string(k) + "]";
      const double p = as_number(j["p_list"][k], path);
      if (!(p == 1.0 || p == 2.0 || p == 4.0 || std::isinf(p))) {
        bad(path, "supported exponents are 1, 2, 4 and inf");
      }
      c.p_list.push_back(p);
    }
  }

  const json tol = j.value("tolerances", json::object());
  if (!tol.is_object()) bad("config.tolerances", "expected an object");
  const std::string tp = "config.tolerances";
  Tolerances& t = c.tol;
  t.max_principle = number_at(tol, "max_principle", tp, t.max_principle);
  t.alpha_bound_dx = number_at(tol, "alpha_bound_dx", tp, t.alpha_bound_dx);
  t.mass = number_at(tol, "mass", tp, t.mass);
  t.ratio = number_at(tol, "ratio", tp, t.ratio);
  t.energy = number_at(tol, "energy", tp, t.energy);
  t.invariant_range = number_at(tol, "invariant_range", tp, t.invariant_range);
  t.persistence = number_at(tol, "persistence", tp, t.persistence);
  t.holder = number_at(tol, "holder", tp, t.holder);
  t.lp_decay = number_at(tol, "lp_decay", tp, t.lp_decay);
  for (const auto& [k, v] : tol.items()) {
    static const char* known[] = {"max_principle", "alpha_bound_dx", "mass",
                                  "ratio", "energy", "invariant_range",
                                  "persistence", "holder", "lp_decay"};
    if (std::none_of(std::begin(known), std::end(known),
                     [&](const char* s) { return k == s; })) {
      bad(tp + "." + k, "unknown tolerance");
    }
    if (!(as_number(v, tp + "." + k) >= 0.0)) bad(tp + "." + k, "must be >= 0");
  }

  const std::string res = string_at(j, "resolution", "config", std::string("warn"));
  if (res == "ignore") {
    c.resolution = ResolutionPolicy::ignore;
  } else if (res == "warn") {
    c.resolution = ResolutionPolicy::warn;
  } else if (res == "refuse") {
    c.resolution = ResolutionPolicy::refuse;
  } else {
    bad("config.resolution", "expected ignore, warn or refuse");
  }
  c.out_dir = string_at(j, "out", "config", std::string("out"));
  c.seed = count_at(j, "seed", "config", 0);
  if (c.solver == SolverKind::temple) make_temple_system(c);
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["solver"] = solver == SolverKind::scalar1d   ? "scalar1d"
                : solver == SolverKind::scalar2d ? "scalar2d"
                                                 : "temple";
  j["problem"] = problem;
  if (!flux.is_null()) j["flux"] = flux;
  j["data"] = data;
  if (solver == SolverKind::temple) {
    j["system"] = system;
    if (!fluxes.is_null()) j["fluxes"] = fluxes;
    j["coupling"] = coupling;
    j["box"] = {{box.first(0), box.first(1)}, {box.second(0), box.second(1)}};
    j["mollify_width"] = mollify_width ? json(*mollify_width) : json();
    j["evolve_invariants"] = evolve_invariants;
  }
  j["grid"] = {{"n", n}, {"x_min", x_min}, {"x_max", x_max},
               {"topology", topology == Topology::periodic ? "periodic" : "line"}};
  if (n2 != 0) j["grid"]["n2"] = n2;
  j["eps"] = eps;
  j["eps_list"] = eps_list;
  j["t_end"] = t_end;
  j["safety"] = safety;
  j["output"] = {{"times", output.times}, {"every", output.every}};
  json ps = json::array();
  for (double p : p_list) ps.push_back(number_json(p));
  j["p_list"] = ps;
  j["tolerances"] = {{"max_principle", tol.max_principle},
                     {"alpha_bound_dx", tol.alpha_bound_dx},
                     {"mass", tol.mass},
                     {"ratio", tol.ratio},
                     {"energy", tol.energy},
                     {"invariant_range", tol.invariant_range},
                     {"persistence", tol.persistence},
                     {"holder", tol.holder},
                     {"lp_decay", tol.lp_decay}};
  j["resolution"] = resolution == ResolutionPolicy::ignore ? "ignore"
                    : resolution == ResolutionPolicy::warn ? "warn"
                                                           : "refuse";
  j["out"] = out_dir;
  j["seed"] = seed;
  return j;
}

ExperimentConfig ExperimentConfig::at_eps(double e) const {
  if (!(e > 0.0)) throw ConfigError("eps must be positive");
  ExperimentConfig c = *this;
  const auto refine = [&](std::size_t m) {
    return std::max<std::size_t>(
        Grid1D::kMinCells,
        static_cast<std::size_t>(std::llround(static_cast<double>(m) * eps / e)));
  };
  c.n = refine(n);
  if (n2 != 0) c.n2 = refine(n2);
  c.eps = e;
  return c;
}

double ExperimentConfig::dx() const {
  if (solver == SolverKind::scalar2d) {
    return 1.0 / static_cast<double>(std::min(n, n2 == 0 ? n : n2));
  }
  return (x_max - x_min) / static_cast<double>(n);
}

std::string ExperimentConfig::run_id() const {
  std::string id = problem + "_eps" + format_number(eps) + "_n" + std::to_string(n);
  if (solver == SolverKind::scalar2d) id += "x" + std::to_string(n2 == 0 ? n : n2);
  return id;
}

// ---- builders ---------------------------------------------------------------

ScalarFlux make_flux(const json& desc) {
  std::string kind;
  json opts = json::object();
  if (desc.is_string()) {
    kind = desc.get<std::string>();
  } else if (desc.is_object()) {
    kind = string_at(desc, "kind", "flux");
    opts = desc;
  } else {
    bad("flux", "expected a name or an object");
  }
  ScalarFlux f;
  if (kind == "burgers") {
    f = ScalarFlux::burgers();
  } else if (kind == "quartic") {
    f = ScalarFlux::quartic();
  } else if (kind == "zero") {
    f = ScalarFlux::zero();
  } else if (kind == "linear") {
    f = ScalarFlux::linear(number_at(opts, "speed", "flux", 1.0));
  } else {
    bad("flux.kind", "unknown flux '" + kind + "'");
  }
  if (opts.contains("scale")) f = ScalarFlux::scaled(f, number_at(opts, "scale", "flux"));
  return f;
}

std::function<double(double)> make_data_1d(const json& desc) {
  if (!desc.is_object()) bad("data", "expected an object");
  const std::string kind = string_at(desc, "kind", "data");
  if (kind == "sine") {
    const double a = number_at(desc, "amplitude", "data", 1.0);
    const double b = number_at(desc, "offset", "data", 0.0);
    const double k = number_at(desc, "wavenumber", "data", 1.0);
    const double ph = number_at(desc, "phase", "data", 0.0);
    return [=](double x) { return b + a * std::sin(kTwoPi * k * x + ph); };
  }
  if (kind == "constant") {
    const double c = number_at(desc, "value", "data");
    return [c](double) { return c; };
  }
  if (kind == "riemann") {
    const double ul = number_at(desc, "u_left", "data");
    const double ur = number_at(desc, "u_right", "data");
    const double x0 = number_at(desc, "x0", "data", 0.0);
    return [=](double x) { return x < x0 ? ul : ur; };
  }
  if (kind == "tanh") {
    const double a = number_at(desc, "amplitude", "data", 1.0);
    const double w = number_at(desc, "width", "data");
    const double x0 = number_at(desc, "x0", "data", 0.0);
    if (!(w > 0.0)) bad("data.width", "must be positive");
    return [=](double x) { return -a * std::tanh((x - x0) / w); };
  }
  bad("data.kind", "unknown data kind '" + kind + "'");
}

std::function<double(double)> make_data_derivative_1d(const json& desc) {
  const std::string kind = string_at(desc, "kind", "data");
  if (kind == "sine") {
    const double a = number_at(desc, "amplitude", "data", 1.0);
    const double k = number_at(desc, "wavenumber", "data", 1.0);
    const double ph = number_at(desc, "phase", "data", 0.0);
    return [=](double x) { return a * kTwoPi * k * std::cos(kTwoPi * k * x + ph); };
  }
  if (kind == "constant") return [](double) { return 0.0; };
  if (kind == "tanh") {
    const double a = number_at(desc, "amplitude", "data", 1.0);
    const double w = number_at(desc, "width", "data");
    const double x0 = number_at(desc, "x0", "data", 0.0);
    return [=](double x) {
      const double c = std::cosh((x - x0) / w);
      return -a / (w * c * c);
    };
  }
  throw ConfigError("data." + kind + ": not differentiable");
}

std::function<double(double, double)> make_data_2d(const json& desc) {
  if (!desc.is_object()) bad("data", "expected an object");
  const std::string kind = string_at(desc, "kind", "data");
  if (kind == "sine") {
    const double a = number_at(desc, "amplitude", "data", 1.0);
    const double b = number_at(desc, "offset", "data", 0.0);
    const double ph = number_at(desc, "phase", "data", 0.0);
    Vec2 k(1.0, 1.0);
    if (desc.contains("wavevector")) k = vec2_at(desc["wavevector"], "data.wavevector");
    return [=](double x1, double x2) {
      return b + a * std::sin(kTwoPi * (k(0) * x1 + k(1) * x2) + ph);
    };
  }
  if (kind == "constant") {
    const double c = number_at(desc, "value", "data");
    return [c](double, double) { return c; };
  }
  bad("data.kind", "unknown data kind '" + kind + "'");
}

Grid1D make_grid(const ExperimentConfig& cfg) {
  return Grid1D(cfg.n, cfg.x_min, cfg.x_max, cfg.topology);
}

ScalarProblem1D make_scalar1d_problem(const ExperimentConfig& cfg) {
  if (cfg.solver != SolverKind::scalar1d) throw ConfigError("not a scalar1d config");
  return ScalarProblem1D{make_flux(cfg.flux), make_data_1d(cfg.data), make_grid(cfg),
                         cfg.eps, cfg.resolution};
}

ScalarProblem2D make_scalar2d_problem(const ExperimentConfig& cfg) {
  if (cfg.solver != SolverKind::scalar2d) throw ConfigError("not a scalar2d config");
  return ScalarProblem2D{make_flux(cfg.flux[0]), make_flux(cfg.flux[1]),
                         make_data_2d(cfg.data),
                         TorusGrid2D(cfg.n, cfg.n2 == 0 ? cfg.n : cfg.n2), cfg.eps};
}

TempleSystem make_temple_system(const ExperimentConfig& cfg) {
  if (cfg.system == "chromatography") return TempleSystem::chromatography();
  if (cfg.system == "diagonal-coupled") {
    const double c = cfg.coupling;
    TempleSystem s = TempleSystem::diagonal([c](const Vec2& u) {
      return Vec2(u(0) + c * u(1), 0.5 + u(1) - c * u(0));
    });
    s.name = "diagonal-coupled";
    return s;
  }
  if (cfg.system == "diagonal-decoupled") {
    if (!cfg.fluxes.is_array() || cfg.fluxes.size() != 2) {
      bad("config.fluxes", "diagonal-decoupled needs two flux specs");
    }
    return TempleSystem::diagonal_decoupled(make_flux(cfg.fluxes[0]),
                                            make_flux(cfg.fluxes[1]));
  }
  bad("config.system",
      "expected chromatography, diagonal-coupled or diagonal-decoupled");
}

TempleProblem make_temple_problem(const ExperimentConfig& cfg) {
  if (cfg.solver != SolverKind::temple) throw ConfigError("not a temple config");
  const auto d1 = make_data_1d(cfg.data[0]);
  const auto d2 = make_data_1d(cfg.data[1]);
  TempleProblem p{.system = make_temple_system(cfg),
                  .u0 = [d1, d2](double x) { return Vec2(d1(x), d2(x)); },
                  .grid = make_grid(cfg),
                  .eps = cfg.eps,
                  .box = StateBox{cfg.box.first, cfg.box.second},
                  .mollify_width = cfg.mollify_width,
                  .evolve_invariants = cfg.evolve_invariants,
                  .resolution = cfg.resolution};
  return p;
}

}  // namespace charax
