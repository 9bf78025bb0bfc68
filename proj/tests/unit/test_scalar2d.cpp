#include <doctest.h>

#include <cmath>
#include <numbers>

#include "charax/error.hpp"
#include "charax/scalar1d.hpp"
#include "charax/scalar2d.hpp"

using namespace charax;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarProblem2D diagonal_burgers(std::size_t n, double eps) {
  return {ScalarFlux::burgers(), ScalarFlux::burgers(),
          [](double x, double y) { return std::sin(2 * kPi * (x + y)); }, TorusGrid2D(n, n), eps};
}

}  // namespace

TEST_CASE("constant data stay constant with unit theta") {
  const ScalarProblem2D p{ScalarFlux::burgers(), ScalarFlux::quartic(),
                          [](double, double) { return 0.8; }, TorusGrid2D(16, 24), 1e-2};
  CoupledState2D s = run_scalar2d(p, init_state(p), 0.2);
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    CHECK(s.u.values()[k] == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(s.theta.values()[k] == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int axis : {0, 1}) {
    const RatioReport r = ratio_max_principle_check(s, p, axis, 0.05);
    CHECK(r.pass);
    CHECK(r.max_ratio == 0.0);
    CHECK(weighted_lp(s, 2.0, axis) == 0.0);
  }
  EnergyTrajectory tr = start_energy_trajectory(init_state(p), p.eps, 2.0, 0);
  record_energy(tr, init_state(p), s);
  const EnergyResidual e = energy_balance_residual(tr);
  CHECK(e.absolute);
  CHECK(e.value == 0.0);
}

TEST_CASE("t = 0 identities") {
  const ScalarProblem2D p = diagonal_burgers(32, 1e-2);
  const CoupledState2D s = init_state(p);
  for (int axis : {0, 1}) {
    const GridFunction2D d = ddx(s.u, axis);
    const RatioReport r = ratio_max_principle_check(s, p, axis, 0.0);
    CHECK(r.max_ratio == d.max_abs());
    CHECK(r.pass);
    for (double q : {1.0, 2.0, 4.0}) {
      double sum = 0.0;
      for (double v : d.values()) sum += std::pow(std::abs(v), q) * p.grid.cell_area();
      CHECK(weighted_lp(s, q, axis) == doctest::Approx(sum).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(weighted_lp(s, 0.5, 0), DomainError);
  CHECK_THROWS_AS(weighted_lp(s, INFINITY, 0), DomainError);
}

TEST_CASE("x2-independent data reduce to the 1D solver") {
  const std::size_t n = 64;
  const double eps = 1e-2;
  const auto u0 = [](double x) { return 0.3 + std::sin(2 * kPi * x); };
  const ScalarProblem2D p2{ScalarFlux::burgers(), ScalarFlux::zero(),
                           [u0](double x, double) { return u0(x); }, TorusGrid2D(n, n), eps};
  const ScalarProblem1D p1{ScalarFlux::burgers(), u0, Grid1D(n, 0.0, 1.0), eps,
                           ResolutionPolicy::ignore};
  CoupledState2D s2 = init_state(p2);
  CoupledState1D s1 = init_state(p1);
  double worst = 0.0;
  for (int step = 0; step < 300; ++step) {
    const double dt = std::min(stable_step(s2, p2), stable_step(s1, p1));
    s2 = advance2d(s2, p2, dt);
    s1 = advance(s1, p1, dt);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        worst = std::max({worst, std::abs(s2.u(i, j) - s1.u[i]),
                          std::abs(s2.theta(i, j) - s1.theta[i])});
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("diagonal Burgers stays a function of x1 + x2 and matches a rotated 1D run") {
  // u = v(x1 + x2) solves v_t + (2 f(v))_s = 2 eps v_ss with period 1 in s.
  // Node (i, j) sits at s = (i + j + 1) / n, node k of the shifted 1D grid.
  const std::size_t n = 64;
  const double eps = 1e-2;
  const ScalarProblem2D p2 = diagonal_burgers(n, eps);
  const ScalarProblem1D p1{ScalarFlux::scaled(ScalarFlux::burgers(), 2.0),
                           [](double s) { return std::sin(2 * kPi * s); },
                           Grid1D(n, 0.5 / n, 1.0 + 0.5 / n), 2 * eps, ResolutionPolicy::ignore};
  CoupledState2D s2 = init_state(p2);
  CoupledState1D s1 = init_state(p1);
  double worst = 0.0, shift = 0.0;
  while (s2.t < 0.25) {
    const double dt = std::min({stable_step(s2, p2), stable_step(s1, p1), 0.25 - s2.t});
    s2 = advance2d(s2, p2, dt);
    s1 = advance(s1, p1, dt);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (i + j) % n;
        worst = std::max({worst, std::abs(s2.u(i, j) - s1.u[k]),
                          std::abs(s2.theta(i, j) - s1.theta[k])});
        shift = std::max(shift, std::abs(s2.u(i, j) - s2.u((i + 1) % n, (j + n - 1) % n)));
      }
    }
  }
  CHECK(shift <= 1e-12);
  CHECK(worst <= 1e-10);
}

TEST_CASE("torus invariants along a post-shock run") {
  const ScalarProblem2D p = diagonal_burgers(48, 2e-2);
  const CoupledState2D s0 = init_state(p);
  const double bound = s0.u.max_abs();
  std::array<double, 3> prev{};
  const std::array<double, 3> ps{1.0, 2.0, 4.0};
  for (int k = 0; k < 3; ++k) prev[k] = weighted_lp(s0, ps[k], 0);
  EnergyTrajectory tr = start_energy_trajectory(s0, p.eps, 2.0, 0);
  run_scalar2d(p, s0, 0.3, [&](const CoupledState2D& a, const CoupledState2D& b, bool) {
    REQUIRE(std::abs(b.theta.integral() - 1.0) <= 1e-10);
    REQUIRE(b.theta.min() > 0.0);
    REQUIRE(b.u.max_abs() <= bound + 1e-10);
    for (int axis : {0, 1}) REQUIRE(ratio_max_principle_check(b, p, axis, 0.05).pass);
    std::array<double, 3> root{};
    for (int k = 0; k < 3; ++k) {
      const double w = weighted_lp(b, ps[k], 0);
      REQUIRE(w <= prev[k] * (1 + 1e-3));
      prev[k] = w;
      root[k] = std::pow(w, 1.0 / ps[k]);
    }
    REQUIRE(root[0] <= root[1] * (1 + 1e-12));
    REQUIRE(root[1] <= root[2] * (1 + 1e-12));
    record_energy(tr, a, b);
  });
  const EnergyResidual e = energy_balance_residual(tr);
  CHECK_FALSE(e.absolute);
  CHECK(e.value < 0.1);
}

TEST_CASE("energy residual at fixed time shrinks under refinement") {
  const auto residual = [](std::size_t n) {
    const ScalarProblem2D p = diagonal_burgers(n, 2e-2);
    const CoupledState2D s0 = init_state(p);
    EnergyTrajectory tr = start_energy_trajectory(s0, p.eps, 2.0, 0);
    run_scalar2d(p, s0, 0.3, [&](const CoupledState2D& a, const CoupledState2D& b, bool) {
      record_energy(tr, a, b);
    });
    return energy_balance_residual(tr).value;
  };
  const double coarse = residual(32), fine = residual(64);
  CHECK(fine <= 0.6 * coarse);
}

TEST_CASE("energy residual after one step shrinks with dt") {
  const ScalarProblem2D p = diagonal_burgers(32, 2e-2);
  const CoupledState2D s0 = init_state(p);
  const auto residual = [&](double dt) {
    EnergyTrajectory tr = start_energy_trajectory(s0, p.eps, 2.0, 0);
    record_energy(tr, s0, advance2d(s0, p, dt));
    return energy_balance_residual(tr).value;
  };
  const double dt = stable_step(s0, p);
  const double r1 = residual(dt), r2 = residual(dt / 2), r4 = residual(dt / 4);
  CHECK(r2 <= 0.6 * r1);
  CHECK(r4 <= 0.6 * r2);
}

TEST_CASE("2D step rejects oversize dt") {
  const ScalarProblem2D p = diagonal_burgers(32, 1e-2);
  const CoupledState2D s = init_state(p);
  CHECK_THROWS_AS(advance2d(s, p, 1.01 * stable_step(s, p, 1.0)), CflError);
}
