#pragma once

#include <functional>
#include <span>
#include <string>

namespace charax {

/// A smooth scalar flux with its derivative(s). `d2f` may be empty.
struct ScalarFlux {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;

  static ScalarFlux burgers();          // u^2 / 2
  static ScalarFlux quartic();          // u^4 / 4
  static ScalarFlux linear(double c);   // c u
  static ScalarFlux zero();             // 0
  /// `scale` times `base`, e.g. scaled(burgers(), 2) = u^2.
  static ScalarFlux scaled(const ScalarFlux& base, double scale);

  double second_derivative(double u) const;
};

/// max_j |f'(u_j)|.
double max_abs_speed(const ScalarFlux& flux, std::span<const double> u);

/// Verifies that df is the derivative of f on [lo, hi] at `samples` points
/// using central differences. Throws ConfigError when the scaled residual
/// exceeds `tol`.
void check_flux_derivative(const ScalarFlux& flux, double lo, double hi,
                           int samples = 100, double tol = 1e-6);

}  // namespace charax
