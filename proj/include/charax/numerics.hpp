#pragma once

// Finite-difference operators and explicit advection-diffusion steps shared
// by every solver.
//
// Advection is discretised with a Peclet-switched ("hybrid") stencil: central
// where the cell Peclet number |a| dx / (2 eps) is at most one, first-order
// upwind by the sign of the local speed elsewhere. Both branches give
// nonnegative update coefficients under stable_dt, so the steps obey the
// discrete maximum principle (advective form) and preserve positivity
// (conservative form).

#include <string_view>

#include "charax/flux.hpp"
#include "charax/grid.hpp"

namespace charax {

inline constexpr double kDefaultSafety = 0.4;

enum class Form { advective, conservative };
enum class CflCheck { enforce, skip };
enum class ResolutionPolicy { ignore, warn, refuse };

/// Ghost-value rule. On line grids: linear extrapolation or held far-field
/// states. On periodic grids values wrap, shifted by a fixed jump when the
/// field itself is not periodic (alpha(x + L) = alpha(x) + L).
class Boundary {
 public:
  enum class Kind { extrapolate, hold, shift };

  /// Linear extrapolation (exact for affine far fields such as alpha = x).
  Boundary() = default;
  static Boundary extrapolate() { return Boundary(); }
  /// Ghosts pinned to constant far-field states.
  static Boundary hold(double left, double right) {
    Boundary b;
    b.kind_ = Kind::hold;
    b.left_ = left;
    b.right_ = right;
    return b;
  }

  /// Periodic wrap with q(x + L) = q(x) + jump. Extrapolates on line grids.
  static Boundary shift(double jump) {
    Boundary b;
    b.kind_ = Kind::shift;
    b.jump_ = jump;
    return b;
  }

  Kind kind() const { return kind_; }
  double jump() const { return jump_; }
  double left() const { return left_; }
  double right() const { return right_; }

 private:
  Kind kind_ = Kind::extrapolate;
  double left_ = 0.0;
  double right_ = 0.0;
  double jump_ = 0.0;
};

/// Second-order central difference; periodic wrap (shifted by `wrap_jump`),
/// or second-order one-sided differences at the two ends of a line grid.
GridFunction ddx(const GridFunction& f, double wrap_jump = 0.0);

/// safety * min(dx / max_speed, dx^2 / (2 eps)); the advective bound is
/// skipped when max_speed == 0.
double stable_dt(const Grid1D& grid, double max_speed, double eps,
                 double safety = kDefaultSafety);

/// One forward-Euler step of
///   q_t + speed q_x       = eps q_xx   (Form::advective)
///   q_t + (speed q)_x     = eps q_xx   (Form::conservative).
/// Throws CflError when dt exceeds stable_dt at safety 1 (unless skipped).
GridFunction advect_diffuse_step(const GridFunction& q,
                                 const GridFunction& speed, double eps,
                                 double dt, Form form,
                                 const Boundary& boundary = {},
                                 CflCheck check = CflCheck::enforce);

/// One forward-Euler step of u_t + f(u)_x = eps u_xx in flux form.
GridFunction conservation_step(const GridFunction& u, const ScalarFlux& flux,
                               double eps, double dt,
                               const Boundary& boundary = {},
                               CflCheck check = CflCheck::enforce);

/// Numerical flux of (a q) across the face between (aL, qL) and (aR, qR).
double linear_face_flux(double a_left, double q_left, double a_right,
                        double q_right, double dx, double eps);

/// Numerical flux of f(u) across a face, given f and f' on both sides.
double nonlinear_face_flux(double u_left, double f_left, double a_left,
                           double u_right, double f_right, double a_right,
                           double dx, double eps);

/// dx <= eps / 4.
bool resolves_viscous_layer(double dx, double eps);

/// Applies `policy` when the grid does not resolve the viscous layer:
/// ignore, print a warning to std::clog, or throw ConfigError.
void check_resolution(double dx, double eps, ResolutionPolicy policy,
                      std::string_view context);

void throw_if_cfl_violated(double dt, double limit, std::string_view context);

// ---- torus ---------------------------------------------------------------

/// Central difference along `axis` (0 = x1, 1 = x2).
GridFunction2D ddx(const GridFunction2D& f, int axis);

/// safety * min(1 / (a1/dx1 + a2/dx2), 1 / (2 eps (1/dx1^2 + 1/dx2^2))).
/// On a square grid the diffusive part is dx^2 / (4 eps).
double stable_dt_2d(const TorusGrid2D& grid, double max_speed1,
                    double max_speed2, double eps,
                    double safety = kDefaultSafety);

/// q_t + (a1 q)_x1 + (a2 q)_x2 = eps Laplace(q), one forward-Euler step.
GridFunction2D advect_diffuse_step_2d(const GridFunction2D& q,
                                      const GridFunction2D& speed1,
                                      const GridFunction2D& speed2, double eps,
                                      double dt,
                                      CflCheck check = CflCheck::enforce);

/// u_t + f1(u)_x1 + f2(u)_x2 = eps Laplace(u), one forward-Euler step.
GridFunction2D conservation_step_2d(const GridFunction2D& u,
                                    const ScalarFlux& flux1,
                                    const ScalarFlux& flux2, double eps,
                                    double dt,
                                    CflCheck check = CflCheck::enforce);

}  // namespace charax
