#pragma once

// 2x2 Temple-class systems u_t + f(u)_x = eps u_xx.
//
// With l_i = grad R_i the Riemann invariants obey
//   R_it + lt_i R_ix = eps R_ixx,   lt_i = lambda_i - eps sum_j D_ij R_jx,
// so each R_i is transported by its own modified speed. Every invariant gets
// its own characteristic coordinate alpha_i and weight theta_i,
//   alpha_it + lt_i alpha_ix = eps alpha_ixx,       alpha_i(0) = x
//   theta_it + (lt_i theta_i)_x = eps theta_ixx,    theta_i(0) = 1,
// and W_i(t, alpha_i(t,x)) = R_i(t,x) keeps the W^{1,p} bounds of R_i(u0).

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "charax/diagnostics.hpp"
#include "charax/flux.hpp"
#include "charax/grid.hpp"
#include "charax/numerics.hpp"
#include "charax/scalar1d.hpp"

namespace charax {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Eigenstructure of a 2x2 system. `right` returns r_1, r_2 as columns,
/// `left` returns l_1, l_2 as rows.
struct TempleSystem {
  std::string name;
  std::function<Vec2(const Vec2&)> eigenvalues;
  std::function<Mat2(const Vec2&)> right;
  std::function<Mat2(const Vec2&)> left;
  std::function<Vec2(const Vec2&)> invariants;  // (R_1, R_2)
  std::function<Vec2(const Vec2&)> umap;        // inverse of `invariants`

  /// A(u). Differenced from `flux` when empty.
  std::function<Mat2(const Vec2&)> jacobian;
  /// Conservative flux; without it u is stepped in quasilinear form.
  std::function<Vec2(const Vec2&)> flux;
  /// Systems that are diagonal in u may give one scalar flux per component;
  /// u is then stepped by the scalar scheme componentwise.
  std::optional<std::array<ScalarFlux, 2>> component_fluxes;
  /// Optional exact d r_j / du (j = 0, 1). Central differences otherwise.
  std::function<Mat2(const Vec2&, int)> right_derivative;

  Mat2 jacobian_at(const Vec2& u) const;
  /// (d r_j / du) v, the directional derivative r_{ju} v; exact when
  /// right_derivative is given, unless `differenced` forces central
  /// differences.
  Vec2 right_directional(const Vec2& u, int j, const Vec2& v, double step,
                         bool differenced = false) const;

  /// Diagonal system with the given speeds, r_i = l_i = e_i, R_i = u_i.
  static TempleSystem diagonal(std::function<Vec2(const Vec2&)> speeds);
  /// Diagonal system u_it + f_i(u_i)_x = eps u_ixx.
  static TempleSystem diagonal_decoupled(ScalarFlux f1, ScalarFlux f2);
  /// u_t + (u/(1+u+v))_x = 0, v_t + (v/(1+u+v))_x = 0 with
  /// R_1 = u + v, R_2 = v / (u + v).
  static TempleSystem chromatography();
};

struct StateBox {
  Vec2 lo;
  Vec2 hi;

  bool contains(const Vec2& u, double slack = 0.0) const;
  double size() const;
};

struct CertificationReport {
  std::string system;
  double biorthogonality = 0.0;  // max |l_i . r_j - delta_ij|
  double eigen_equation = 0.0;   // max |A r_i - lambda_i r_i|
  double alignment = 0.0;        // max |sin angle(grad R_i, l_i)|
  double temple = 0.0;           // max_{i != j} |<l_i, r_{ju} r_j>|
  double umap_roundtrip = 0.0;   // max |Umap(R(u)) - u|
  double coupling = 0.0;         // relative residual of the D_ij validation
  double tol = 0.0;
  std::size_t points = 0;

  bool pass() const;
  /// Names of the failing residuals, comma separated.
  std::string failures() const;
};

/// Samples a samples x samples lattice of the box and measures every
/// structural identity. Derivatives in u-space are always central differences
/// with step 1e-5 * box.size(), so a supplied exact r_{ju} is checked rather
/// than trusted. The Umap roundtrip is held to 1e-8, the rest to `tol`.
CertificationReport certify_eigenstructure(const TempleSystem& system,
                                           const StateBox& box,
                                           int samples = 41,
                                           double tol = 1e-6);

/// D_ii = <l_i, r_{iu} r_i>, D_ij = <l_i, r_{iu} r_j> + <l_i, r_{ju} r_i>.
Mat2 derive_coupling(const TempleSystem& system, const Vec2& u,
                     double step = 1e-5);

/// Compares <l_i, u'' - sum_j R_j'' r_j> with R_i' sum_j D_ij R_j' along
/// manufactured curves R(s) = R* + g s + h s^2 / 2 through random box points.
/// Returns the largest residual relative to max(1, |terms|).
double validate_coupling(const TempleSystem& system, const StateBox& box,
                         int curves = 64, std::uint64_t seed = 7);

struct TempleProblem {
  TempleSystem system;
  std::function<Vec2(double)> u0;
  Grid1D grid;
  double eps;
  StateBox box;
  /// Mollifier radius for u0; eps when unset, 0 disables.
  std::optional<double> mollify_width;
  /// Also evolve R_i directly. Each step R_i(u^n) is advanced by the invariant
  /// equation and must match R_i(u^{n+1}) to drift_tol.
  bool evolve_invariants = false;
  double drift_tol = 1e-6;
  double certify_tol = 1e-6;
  ResolutionPolicy resolution = ResolutionPolicy::warn;

  /// The (mollified) initial data actually used.
  std::function<Vec2(double)> initial_data() const;
};

struct TempleState {
  double t;
  std::array<GridFunction, 2> u;
  std::array<GridFunction, 2> R;
  std::array<GridFunction, 2> alpha;
  std::array<GridFunction, 2> theta;
  std::optional<std::array<GridFunction, 2>> R_direct;
  /// Worst one-step drift, and the gap to R_direct evolved from t = 0.
  double max_drift = 0.0;
  double max_direct_gap = 0.0;
  /// Running max over all steps of |lt_i|.
  double max_modified_speed = 0.0;
  /// Running sup over all steps of max_i |u_ix|_inf.
  double sup_gradient = 0.0;
};

/// Convolution with exp(-1/(1-s^2)) of radius `width`, wrapped on periodic
/// grids, 64-point midpoint quadrature.
std::function<Vec2(double)> mollify(std::function<Vec2(double)> u0,
                                    double width, const Grid1D& grid);

/// Certifies the eigenstructure and the coupling, checks the data against the
/// box, and samples the initial state. Throws ConfigError on any failure.
TempleState init_temple(const TempleProblem& problem);

/// lt_i at every node.
std::array<GridFunction, 2> modified_speeds(const TempleState& state,
                                            const TempleProblem& problem);

double stable_step(const TempleState& state, const TempleProblem& problem,
                   double safety = kDefaultSafety);

/// One step. Throws CflError, SolverAbort when a theta_i loses positivity or
/// the direct invariants drift beyond drift_tol.
TempleState advance_temple(const TempleState& state,
                           const TempleProblem& problem, double dt);

TempleState run_temple(
    const TempleProblem& problem, TempleState state, double t_end,
    const std::function<void(const TempleState&, bool)>& observe = {},
    std::span<const double> stops = {}, double safety = kDefaultSafety);

/// (alpha_i, R_i, R_ix / theta_i). Throws SolverAbort on theta_i <= 0 or
/// non-monotone alpha_i.
TransformedProfile reconstruct_W(const TempleState& state, int i);

/// |d W_i / d alpha|_{L^p} = (sum |R_ix|^p theta_i^(1-p) dx)^(1/p).
double w_derivative_norm(const TempleState& state, int i, double p);

/// Largest violation of x - C t - tol <= alpha_i <= x + C t + tol with
/// C = state.max_modified_speed; negative means inside.
double alpha_bound_violation(const TempleState& state, int i, double tol);

/// sup |W(a) - W(b)| / |a - b|^(1 - 1/p) over neighbour pairs at dyadic
/// separations plus `random_pairs` random pairs.
double holder_quotient(const TransformedProfile& profile, double p,
                       std::size_t random_pairs = 4000,
                       std::uint64_t seed = 11);

/// One member of an eps-family of runs.
struct ScalingFamily {
  std::string name;
  std::function<double(double eps)> dx_for;
  /// Runs the problem at eps, returns sup_t |u_x|_inf.
  std::function<double(double eps)> sup_gradient_for;
};

/// Rows (eps, sup grad, eps * sup grad), one job per eps, at most `jobs` in
/// flight. Needs >= 3 eps values in geometric progression and dx <= eps/4
/// for each; throws ConfigError otherwise.
ScalingTable gradient_scaling_study(const ScalingFamily& family,
                                    std::span<const double> eps_list,
                                    unsigned jobs = 1);

}  // namespace charax
