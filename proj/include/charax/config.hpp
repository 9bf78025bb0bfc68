#pragma once

// Experiment configuration: a JSON document, optionally layered over a named
// preset, plus flat dotted-key overrides.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "charax/flux.hpp"
#include "charax/grid.hpp"
#include "charax/numerics.hpp"
#include "charax/scalar1d.hpp"
#include "charax/scalar2d.hpp"
#include "charax/temple.hpp"

namespace charax {

enum class SolverKind { scalar1d, scalar2d, temple };

struct Tolerances {
  double max_principle = 1e-8;   // |u|_inf <= |u0|_inf + this
  double alpha_bound_dx = 2.0;   // alpha-bound slack in units of dx
  double mass = 1e-10;           // relative drift of conserved sums
  double ratio = 0.05;           // torus ratio maximum principle
  double energy = 0.02;          // torus energy-balance residual
  double invariant_range = 1e-8; // Riemann-invariant maximum principle
  double persistence = 1.1;      // |dW_i/dalpha|_2 <= this * initial
  double holder = 1e-9;          // relative slack of the Hoelder ordering
  double lp_decay = 1e-3;        // relative growth allowed for decaying norms
};

struct OutputSchedule {
  std::vector<double> times;  // rows and profiles are written here
  std::size_t every = 0;      // plus a row every this many steps (0: never)
};

struct ExperimentConfig {
  SolverKind solver = SolverKind::scalar1d;
  std::string problem = "custom";
  nlohmann::json flux;      // scalar1d: one flux; scalar2d: two
  nlohmann::json data;      // temple: two component specs
  std::string system;       // temple
  nlohmann::json fluxes;    // temple diagonal-decoupled
  double coupling = 0.25;   // temple diagonal-coupled
  std::pair<Vec2, Vec2> box{Vec2(0.0, 0.0), Vec2(1.0, 1.0)};
  std::optional<double> mollify_width;
  bool evolve_invariants = false;

  std::size_t n = 256;
  std::size_t n2 = 0;  // scalar2d; 0 means n
  double x_min = 0.0;
  double x_max = 1.0;
  Topology topology = Topology::periodic;

  double eps = 1e-3;
  std::vector<double> eps_list;
  double t_end = 0.5;
  double safety = kDefaultSafety;
  OutputSchedule output;
  std::vector<double> p_list{1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()};
  Tolerances tol;
  ResolutionPolicy resolution = ResolutionPolicy::warn;
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  /// Parses and validates. ConfigError messages name the offending field.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Copy at another eps with the grid refined so that dx stays proportional
  /// to eps: n' = round(n eps / eps').
  ExperimentConfig at_eps(double e) const;

  double dx() const;
  std::string run_id() const;
};

/// Names of the compiled-in presets.
std::vector<std::string> preset_names();
/// Preset document; throws ConfigError for an unknown name.
nlohmann::json preset(const std::string& name);

/// Applies "a.b.c=value" (value parsed as JSON when possible, else a string).
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Layers `user` over the preset it names (if any) and the overrides over
/// both, then parses.
ExperimentConfig resolve_config(const nlohmann::json& user,
                                const std::vector<std::string>& overrides = {});

ScalarFlux make_flux(const nlohmann::json& desc);
std::function<double(double)> make_data_1d(const nlohmann::json& desc);
/// Derivative of 1D data, for the characteristics oracle.
std::function<double(double)> make_data_derivative_1d(const nlohmann::json& desc);
std::function<double(double, double)> make_data_2d(const nlohmann::json& desc);

Grid1D make_grid(const ExperimentConfig& cfg);
ScalarProblem1D make_scalar1d_problem(const ExperimentConfig& cfg);
ScalarProblem2D make_scalar2d_problem(const ExperimentConfig& cfg);
TempleSystem make_temple_system(const ExperimentConfig& cfg);
TempleProblem make_temple_problem(const ExperimentConfig& cfg);

}  // namespace charax
