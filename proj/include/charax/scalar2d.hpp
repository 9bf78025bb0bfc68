#pragma once

// Viscous scalar conservation law on the periodic unit square with the
// weight theta:
//
//   u_t     + sum_i f_i(u)_{x_i}          = eps Laplace(u)
//   theta_t + sum_i (f_i'(u) theta)_{x_i} = eps Laplace(theta),  theta(0) = 1
//
// theta keeps unit mass, and |u_{x_i}| / theta, int |u_{x_i}|^p theta^(1-p)
// obey a maximum principle and an energy identity respectively.

#include <functional>
#include <vector>

#include "charax/flux.hpp"
#include "charax/grid.hpp"
#include "charax/numerics.hpp"

namespace charax {

struct ScalarProblem2D {
  ScalarFlux flux1;
  ScalarFlux flux2;
  std::function<double(double, double)> u0;
  TorusGrid2D grid;
  double eps;

  void validate() const;
};

struct CoupledState2D {
  double t;
  GridFunction2D u;
  GridFunction2D theta;
};

struct RatioReport {
  double max_ratio = 0.0;  // max over nodes of |d_i u| / theta
  double bound = 0.0;      // |d_i u0|_inf (discrete)
  double tol_ratio = 0.0;
  bool pass = false;
};

/// One entry of an energy trajectory: the weighted integral at time t and the
/// dissipation accumulated over [0, t].
struct EnergySample {
  double t;
  double weighted;
  double dissipated;
};

struct EnergyTrajectory {
  double p;
  int axis;
  double eps;
  std::vector<EnergySample> samples;
};

struct EnergyResidual {
  double value;
  bool absolute;  // weighted(0) == 0: value is the absolute residual
};

CoupledState2D init_state(const ScalarProblem2D& problem);

double stable_step(const CoupledState2D& state, const ScalarProblem2D& problem,
                   double safety = kDefaultSafety);

/// One unsplit step of u and theta. Throws CflError / SolverAbort.
CoupledState2D advance2d(const CoupledState2D& state,
                         const ScalarProblem2D& problem, double dt);

CoupledState2D run_scalar2d(
    const ScalarProblem2D& problem, CoupledState2D state, double t_end,
    const std::function<void(const CoupledState2D& prev,
                             const CoupledState2D& next, bool at_stop)>& observe = {},
    std::span<const double> stops = {}, double safety = kDefaultSafety);

RatioReport ratio_max_principle_check(const CoupledState2D& state,
                                      const ScalarProblem2D& problem, int axis,
                                      double tol_ratio);

/// sum |d_i u|^p theta^(1-p) dA. Throws DomainError for p < 1 or p = inf.
double weighted_lp(const CoupledState2D& state, double p, int axis);

/// eps (4(p-1)/p) sum theta |grad g|^2 dA with g = |d_i u|^(p/2) / theta^(p/2).
/// Gradients are one-cell face differences with theta at the face taken as
/// the geometric mean of its two neighbours.
double dissipation_rate(const CoupledState2D& state, double eps, double p,
                        int axis);

/// Starts a trajectory at `initial`.
EnergyTrajectory start_energy_trajectory(const CoupledState2D& initial,
                                         double eps, double p, int axis);

/// Appends the step prev -> next, integrating the dissipation with the
/// midpoint rule (rate evaluated at the averaged state).
void record_energy(EnergyTrajectory& trajectory, const CoupledState2D& prev,
                   const CoupledState2D& next);

/// |weighted(t) + dissipated(t) - weighted(0)| / weighted(0) at the last
/// sample.
EnergyResidual energy_balance_residual(const EnergyTrajectory& trajectory);

}  // namespace charax
