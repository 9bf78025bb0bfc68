#pragma once

// The acceptance suite: every headline property, run at its pinned size.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "charax/config.hpp"

namespace charax::acceptance {

struct Criterion {
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

struct Options {
  std::filesystem::path out = "acceptance_out";
  unsigned jobs = 1;
  /// Called as soon as each criterion is decided.
  std::function<void(const Criterion&)> on_result;
};

/// Max over all steps of the componentwise difference (u, alpha, theta)
/// between a diagonal-decoupled Temple run and two scalar1d runs driven
/// with the same time steps.
double diagonal_reduction_error(const ExperimentConfig& config);

std::vector<Criterion> run_all(const Options& options);

/// "PASS name: detail (1.2 s)".
std::string format(const Criterion& c);

}  // namespace charax::acceptance
