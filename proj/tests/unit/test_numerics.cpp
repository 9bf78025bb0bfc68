#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "charax/error.hpp"
#include "charax/grid.hpp"
#include "charax/numerics.hpp"

using namespace charax;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction sine(const Grid1D& g, double k = 1.0) {
  return GridFunction::sample(g, [k](double x) { return std::sin(2.0 * kPi * k * x); });
}

double max_error(const GridFunction& f, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    e = std::max(e, std::abs(f[j] - exact(f.grid().x(j))));
  }
  return e;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid1D g(10, -1.0, 1.0, Topology::line);
  CHECK(g.dx() == doctest::Approx(0.2));
  CHECK(g.x(0) == doctest::Approx(-0.9));
  CHECK(g.x(9) == doctest::Approx(0.9));
  CHECK_THROWS_AS(Grid1D(4, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid1D(16, 1.0, 0.0), ConfigError);

  const TorusGrid2D t(16, 32);
  double area = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) area += t.cell_area();
  CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("grid functions reject non-finite samples") {
  const Grid1D g(16, 0.0, 1.0);
  CHECK_THROWS_AS(GridFunction::sample(g, [](double x) { return x < 0.5 ? 0.0 : NAN; }),
                  NonFiniteError);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(15, 0.0)), ConfigError);
}

TEST_CASE("ddx of constants and linear functions") {
  const Grid1D periodic(32, 0.0, 1.0);
  const GridFunction c = GridFunction::constant(periodic, 3.0);
  CHECK(ddx(c).max_abs() == 0.0);

  const Grid1D line(40, -2.0, 3.0, Topology::line);
  const GridFunction lin = GridFunction::sample(line, [](double x) { return 2.0 * x - 1.0; });
  const GridFunction d = ddx(lin);
  for (std::size_t j = 0; j < d.size(); ++j) CHECK(d[j] == doctest::Approx(2.0).epsilon(1e-12));

  // alpha = x on a circle: wrap with the period jump.
  const GridFunction x = GridFunction::sample(periodic, [](double s) { return s; });
  const GridFunction dx = ddx(x, periodic.length());
  for (std::size_t j = 0; j < dx.size(); ++j) CHECK(dx[j] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ddx is second order on smooth periodic data") {
  const auto err = [](std::size_t n) {
    const Grid1D g(n, 0.0, 1.0);
    return max_error(ddx(sine(g)), [](double x) { return 2.0 * kPi * std::cos(2.0 * kPi * x); });
  };
  const double e64 = err(64), e128 = err(128), e256 = err(256);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.02));
  CHECK(std::log2(e128 / e256) >= 1.9);

  // Line grids use one-sided second-order ends.
  const auto err_line = [](std::size_t n) {
    const Grid1D g(n, 0.0, 1.0, Topology::line);
    return max_error(ddx(GridFunction::sample(g, [](double x) { return std::exp(x); })),
                     [](double x) { return std::exp(x); });
  };
  CHECK(std::log2(err_line(64) / err_line(128)) >= 1.9);
}

TEST_CASE("stable_dt arithmetic") {
  const Grid1D g(100, 0.0, 1.0);
  CHECK(stable_dt(g, 1.0, 1e-3, 0.5) == doctest::Approx(0.005));
  CHECK(stable_dt(g, 1.0, 1.0, 0.5) == doctest::Approx(0.5 * 5e-5));
  CHECK(stable_dt(g, 0.0, 1e-3, 1.0) == doctest::Approx(0.05));
}

TEST_CASE("advect_diffuse_step keeps constants and transports linear data exactly") {
  const Grid1D periodic(64, 0.0, 1.0);
  const GridFunction c = GridFunction::constant(periodic, 0.7);
  const GridFunction zero = GridFunction::constant(periodic, 0.0);
  const double dt = stable_dt(periodic, 0.0, 1e-2);
  for (Form form : {Form::advective, Form::conservative}) {
    const GridFunction q = advect_diffuse_step(c, zero, 1e-2, dt, form);
    for (std::size_t j = 0; j < q.size(); ++j) CHECK(q[j] == doctest::Approx(0.7).epsilon(1e-15));
  }

  // q = x, constant speed, both stencil regimes (central and upwind).
  const Grid1D line(50, 0.0, 1.0, Topology::line);
  const GridFunction x = GridFunction::sample(line, [](double s) { return s; });
  for (double eps : {1.0, 1e-4}) {
    for (double a : {0.8, -1.3}) {
      const GridFunction speed = GridFunction::constant(line, a);
      const double step = stable_dt(line, std::abs(a), eps);
      const GridFunction q = advect_diffuse_step(x, speed, eps, step, Form::advective);
      for (std::size_t j = 0; j < q.size(); ++j) {
        CHECK(q[j] == doctest::Approx(line.x(j) - a * step).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("pure diffusion matches the exact discrete Fourier solution") {
  // Each mode e^{2 pi i k x} is multiplied by 1 - 4 mu sin^2(pi k / n) per step.
  const std::size_t n = 64;
  const Grid1D g(n, 0.0, 1.0);
  const double eps = 5e-3;
  const GridFunction q0 = GridFunction::sample(
      g, [](double x) { return std::exp(-std::pow((x - 0.4) / 0.05, 2)); });
  const GridFunction zero = GridFunction::constant(g, 0.0);
  const double dt = stable_dt(g, 0.0, eps);
  const double mu = eps * dt / (g.dx() * g.dx());
  const int steps = 150;

  std::vector<std::complex<double>> hat(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      hat[k] += q0[j] * std::polar(1.0, -2.0 * kPi * double(k * j) / double(n));
    }
    hat[k] /= double(n);
  }

  GridFunction q = q0;
  double peak = q0.max();
  const double mass0 = q0.integral();
  for (int s = 0; s < steps; ++s) {
    q = advect_diffuse_step(q, zero, eps, dt, Form::conservative);
    CHECK(std::abs(q.integral() - mass0) <= 1e-12);
    CHECK(q.max() <= peak);
    peak = q.max();
  }
  double err = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<double> v = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = std::sin(kPi * double(k) / double(n));
      const double gain = std::pow(1.0 - 4.0 * mu * s * s, steps);
      v += hat[k] * gain * std::polar(1.0, 2.0 * kPi * double(k * j) / double(n));
    }
    err = std::max(err, std::abs(v.real() - q[j]));
  }
  CHECK(err <= 1e-12);
}

TEST_CASE("conservative steps conserve mass and positivity on random fields") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Grid1D g(96, 0.0, 1.0);
  for (double eps : {1e-1, 1e-3}) {
    std::vector<double> qv(g.size()), av(g.size());
    for (auto& v : qv) v = unit(rng) < 0.3 ? 0.0 : unit(rng);
    for (auto& v : av) v = 4.0 * unit(rng) - 2.0;
    GridFunction q(g, qv);
    const GridFunction a(g, av);
    const double dt = stable_dt(g, a.max_abs(), eps);
    for (int s = 0; s < 1000; ++s) {
      const double before = q.integral();
      q = advect_diffuse_step(q, a, eps, dt, Form::conservative);
      REQUIRE(std::abs(q.integral() - before) <= 1e-12 * std::max(1.0, before));
      REQUIRE(q.min() >= 0.0);
    }
  }
}

TEST_CASE("advective steps obey the discrete maximum principle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Grid1D g(80, 0.0, 1.0);
  std::vector<double> qv(g.size()), av(g.size());
  for (auto& v : qv) v = unit(rng);
  for (auto& v : av) v = 3.0 * unit(rng);
  GridFunction q(g, qv);
  const GridFunction a(g, av);
  const double lo = q.min(), hi = q.max();
  const double dt = stable_dt(g, a.max_abs(), 2e-3);
  for (int s = 0; s < 500; ++s) {
    q = advect_diffuse_step(q, a, 2e-3, dt, Form::advective);
    REQUIRE(q.min() >= lo - 1e-14);
    REQUIRE(q.max() <= hi + 1e-14);
  }
}

TEST_CASE("just past the stability limit a near-Nyquist sine grows") {
  const Grid1D g(64, 0.0, 1.0);
  const double eps = 1e-2;
  const GridFunction zero = GridFunction::constant(g, 0.0);
  const GridFunction q0 = sine(g, 31.0);
  const double safe = stable_dt(g, 0.0, eps);

  // Inside the limit the mode decays.
  GridFunction q = q0;
  for (int s = 0; s < 200; ++s) q = advect_diffuse_step(q, zero, eps, safe, Form::advective);
  CHECK(q.max_abs() < q0.max_abs());

  const double over = 1.01 / kDefaultSafety * safe;
  CHECK_THROWS_AS(advect_diffuse_step(q0, zero, eps, over, Form::advective), CflError);
  q = q0;
  for (int s = 0; s < 200; ++s) {
    q = advect_diffuse_step(q, zero, eps, over, Form::advective, {}, CflCheck::skip);
  }
  CHECK(q.max_abs() > 5.0 * q0.max_abs());
}

TEST_CASE("conservation_step is conservative and respects the CFL check") {
  const Grid1D g(128, 0.0, 1.0);
  GridFunction u = sine(g);
  const ScalarFlux f = ScalarFlux::burgers();
  const double eps = 1e-3;
  const double dt = stable_dt(g, 1.0, eps);
  for (int s = 0; s < 300; ++s) {
    u = conservation_step(u, f, eps, dt);
    REQUIRE(std::abs(u.integral()) <= 1e-13);
    REQUIRE(u.max_abs() <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(conservation_step(u, f, eps, 1.01 * stable_dt(g, u.max_abs(), eps, 1.0)),
                  CflError);
}

TEST_CASE("resolution policy") {
  CHECK(resolves_viscous_layer(2.5e-4, 1e-3));
  CHECK_FALSE(resolves_viscous_layer(3e-4, 1e-3));
  CHECK_NOTHROW(check_resolution(1e-2, 1e-3, ResolutionPolicy::ignore, "test"));
  CHECK_THROWS_AS(check_resolution(1e-2, 1e-3, ResolutionPolicy::refuse, "test"), ConfigError);
}

TEST_CASE("flux derivative check") {
  CHECK_NOTHROW(check_flux_derivative(ScalarFlux::burgers(), -2.0, 2.0));
  CHECK_NOTHROW(check_flux_derivative(ScalarFlux::quartic(), -2.0, 2.0));
  ScalarFlux bad = ScalarFlux::burgers();
  bad.df = [](double u) { return 1.1 * u; };
  CHECK_THROWS_AS(check_flux_derivative(bad, -1.0, 1.0), ConfigError);
}

TEST_CASE("torus steps conserve mass and keep theta positive") {
  const TorusGrid2D g(32, 32);
  GridFunction2D q = GridFunction2D::sample(
      g, [](double x, double y) { return 1.0 + 0.5 * std::sin(2 * kPi * x) * std::cos(2 * kPi * y); });
  const GridFunction2D a1 = GridFunction2D::sample(g, [](double x, double) { return std::cos(2 * kPi * x); });
  const GridFunction2D a2 = GridFunction2D::sample(g, [](double, double y) { return -std::sin(2 * kPi * y); });
  const double mass0 = q.integral();
  const double dt = stable_dt_2d(g, 1.0, 1.0, 1e-3);
  for (int s = 0; s < 400; ++s) {
    q = advect_diffuse_step_2d(q, a1, a2, 1e-3, dt);
    REQUIRE(std::abs(q.integral() - mass0) <= 1e-12);
    REQUIRE(q.min() > 0.0);
  }
  CHECK(stable_dt_2d(g, 0.0, 0.0, 1.0, 1.0) == doctest::Approx(g.dx1() * g.dx1() / 4.0));
}
