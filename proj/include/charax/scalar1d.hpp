#pragma once

// Viscous scalar conservation law on a line or circle, together with the
// generalized-characteristic coordinate alpha and its Jacobian theta:
//
//   u_t     + f(u)_x          = eps u_xx,       u(0)     = u0
//   alpha_t + f'(u) alpha_x   = eps alpha_xx,   alpha(0) = x
//   theta_t + (f'(u) theta)_x = eps theta_xx,   theta(0) = 1
//
// In the coordinate alpha the solution u(t,x) = U(t, alpha(t,x)) obeys a pure
// diffusion, so U keeps the W^{1,p} and BV bounds of u0 after shocks form.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "charax/flux.hpp"
#include "charax/grid.hpp"
#include "charax/numerics.hpp"

namespace charax {

struct ScalarProblem1D {
  ScalarFlux flux;
  std::function<double(double)> u0;
  Grid1D grid;
  double eps;
  ResolutionPolicy resolution = ResolutionPolicy::warn;

  /// Throws ConfigError / NonFiniteError on a malformed problem: eps <= 0,
  /// non-finite u0 samples, f' inconsistent with f.
  void validate() const;

  /// Far-field states for line grids: u0 just outside each end.
  Boundary u_boundary() const;
  Boundary alpha_boundary() const;
  Boundary theta_boundary() const;
};

struct CoupledState1D {
  double t;
  GridFunction u;
  GridFunction alpha;
  GridFunction theta;
};

/// Monotone sample set (alpha_j, U_j, U_alpha_j) of the transformed profile.
struct TransformedProfile {
  std::vector<double> alphas;
  std::vector<double> values;
  std::vector<double> derivs;
};

struct AlphaBoundReport {
  bool pass = false;
  double m1 = 0.0;  // inf over |u| <= |u0|_inf of -f'(u)
  double m2 = 0.0;  // sup of the same
  double tol = 0.0;
  double margin_lo = 0.0;  // min_j alpha_j - (x_j + m1 t)
  double margin_hi = 0.0;  // min_j (x_j + m2 t) - alpha_j
  // Sign-flipped reading (x + inf f' t <= alpha <= x + sup f' t), evaluated
  // only when the bounds above fail.
  std::optional<double> flipped_margin_lo;
  std::optional<double> flipped_margin_hi;
};

CoupledState1D init_state(const ScalarProblem1D& problem);

/// stable_dt for the current speed field max |f'(u)|.
double stable_step(const CoupledState1D& state, const ScalarProblem1D& problem,
                   double safety = kDefaultSafety);

/// One step of the coupled system. The speed f'(u) is frozen at the start of
/// the step for all three fields. Throws CflError, or SolverAbort when theta
/// loses positivity.
CoupledState1D advance(const CoupledState1D& state,
                       const ScalarProblem1D& problem, double dt);

/// Marches to t_end; `observe(state, at_stop)` runs after every step.
CoupledState1D run_scalar1d(
    const ScalarProblem1D& problem, CoupledState1D state, double t_end,
    const std::function<void(const CoupledState1D&, bool)>& observe = {},
    std::span<const double> stops = {}, double safety = kDefaultSafety);

/// (m1, m2): inf and sup of -f'(u) over |u| <= |u0|_inf.
std::pair<double, double> alpha_speed_range(const ScalarProblem1D& problem);

AlphaBoundReport check_alpha_bounds(const CoupledState1D& state,
                                    const ScalarProblem1D& problem,
                                    double tol);
/// Same, with the speed range computed once by alpha_speed_range.
AlphaBoundReport check_alpha_bounds(const CoupledState1D& state,
                                    std::pair<double, double> range,
                                    double tol);

/// Throws SolverAbort if theta <= 0 or alpha is not strictly increasing.
TransformedProfile reconstruct_profile(const CoupledState1D& state);

/// Piecewise-linear resampling of the profile onto m uniform alpha nodes
/// spanning the sampled range. Meant for plotting only.
TransformedProfile resample_uniform(const TransformedProfile& profile,
                                    std::size_t m);

/// |U_alpha|_{L^p} in the alpha variable, evaluated in x through
/// d alpha = theta dx: (sum |u_x|^p theta^(1-p) dx)^(1/p); max |u_x|/theta for
/// p = infinity. Throws DomainError for p < 1.
double transformed_lp_norm(const CoupledState1D& state, double p);

/// Discrete total variation of the profile derivatives, a surrogate for
/// |U_alpha alpha|_{L^1}.
double transformed_bv_of_deriv(const CoupledState1D& state);

/// |ddx(alpha) - theta|_inf.
double alpha_theta_consistency(const CoupledState1D& state);

/// Period shift of alpha on periodic grids (zero on line grids).
double alpha_wrap_jump(const Grid1D& grid);

}  // namespace charax
