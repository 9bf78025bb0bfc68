#pragma once

// Reference solutions of the inviscid problem: classical characteristics
// before the first shock, and the entropy solution of the Riemann problem for
// convex fluxes.

#include <functional>

#include "charax/flux.hpp"
#include "charax/grid.hpp"

namespace charax {

/// u(t, x) = u0(y) where x = y + f'(u0(y)) t. Safeguarded Newton iteration
/// on a bracket around x, converged to `tol` in y. Throws DomainError when the
/// foot map is not monotone on the bracket (t at or past the shock time).
double characteristics_solution(const std::function<double(double)>& u0,
                                const std::function<double(double)>& du0,
                                const ScalarFlux& flux, double t, double x,
                                double tol = 1e-12);

/// Breaking time -1 / min_y d/dy f'(u0(y)), sampled on [lo, hi]. Infinite
/// when the data never steepen.
double breaking_time(const std::function<double(double)>& u0,
                     const std::function<double(double)>& du0,
                     const ScalarFlux& flux, double lo, double hi,
                     int samples = 20001);

struct RiemannDatum {
  double u_left;
  double u_right;
  ScalarFlux flux;
};

/// Self-similar entropy solution u(x/t) of a Riemann problem with a convex
/// flux. Construction throws DomainError if f'' <= 0 on the data range.
class RiemannSolution {
 public:
  explicit RiemannSolution(RiemannDatum datum);

  /// u_left == u_right: the solution is constant.
  bool degenerate() const { return datum_.u_left == datum_.u_right; }
  bool is_shock() const { return datum_.u_left > datum_.u_right; }
  /// Rankine-Hugoniot speed (shocks only).
  double shock_speed() const;

  double operator()(double xi) const;
  double at(double t, double x, double x0 = 0.0) const;

 private:
  double inverse_speed(double xi) const;

  RiemannDatum datum_;
};

/// Convenience wrapper for a single evaluation.
double riemann_solution(const RiemannDatum& datum, double xi);

/// sum |a - b| dx. Throws ConfigError on grid mismatch.
double l1_distance(const GridFunction& a, const GridFunction& b);

/// max |a - b|.
double linf_distance(const GridFunction& a, const GridFunction& b);

}  // namespace charax
