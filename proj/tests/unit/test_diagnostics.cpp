#include <doctest.h>

#include <charconv>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "charax/diagnostics.hpp"
#include "charax/error.hpp"
#include "charax/scalar1d.hpp"

using namespace charax;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "charax_unit" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

DiagnosticsReport sample_report() {
  DiagnosticsReport r;
  r.run_id = "toy_eps0.001_n64";
  r.config = {{"eps", 1e-3}, {"note", "x"}};
  DiagnosticsRow a;
  a.t = 0.0;
  a.linf_u = 1.0;
  a.min_theta = 1.0;
  a.lp2 = 0.1 + 0.2;  // not representable in fewer than 17 digits
  a.lpinf = 2.0 * std::numbers::pi;
  DiagnosticsRow b;
  b.t = 1.0 / 3.0;
  b.linf_u = 0.9999999999999999;
  b.mass_u = -1e-300;
  b.energy_residual = 5e-324;
  b.alpha_margin_lo = -0.0;
  b.alpha_margin_hi = 123456789.125;
  r.rows = {a, b};
  r.scaling.push_back({"chromatography", {{4e-3, 9.5, 0.038}, {2e-3, 19.0, 0.038}}});
  return r;
}

}  // namespace

TEST_CASE("lp_norm examples") {
  const Grid1D g(256, 0.0, 1.0);
  for (double p : {1.0, 2.0, 3.5, double(INFINITY)}) {
    CHECK(lp_norm(GridFunction::constant(g, 1.0), p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp_norm(GridFunction::constant(g, 0.0), p) == 0.0);
  }
  const GridFunction s =
      GridFunction::sample(g, [](double x) { return std::sin(2 * std::numbers::pi * x); });
  CHECK(std::abs(lp_norm(s, 2.0) - std::sqrt(0.5)) <= 1e-4);
  CHECK(lp_norm(s, INFINITY) == doctest::Approx(s.max_abs()));
  CHECK_THROWS_AS(lp_norm(s, 0.99), DomainError);

  const TorusGrid2D t(32, 32);
  CHECK(lp_norm(GridFunction2D::constant(t, 2.0), 3.0) == doctest::Approx(2.0));
}

TEST_CASE("lp_norm is monotone in p on a unit-measure domain") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  const Grid1D g(200, 0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(g.size());
    for (auto& x : v) x = d(rng);
    const GridFunction f(g, v);
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 4.0, 8.0, double(INFINITY)}) {
      const double n = lp_norm(f, p);
      REQUIRE(n >= prev * (1 - 1e-14));
      prev = n;
    }
  }
}

TEST_CASE("shortest round-trip numbers") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-3) == "0.001");
  CHECK(format_number(2.0) == "2");
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int k = 0; k < 10000; ++k) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = format_number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(std::memcmp(&back, &v, sizeof v) == 0);
  }
}

TEST_CASE("empty series gives a header-only CSV") {
  DiagnosticsReport r;
  r.run_id = "empty";
  const std::string csv = to_csv(r);
  CHECK(csv == std::string(kCsvHeader) + "\n");
  const DiagnosticsReport back = report_from_csv(csv);
  CHECK(back.rows.empty());
}

TEST_CASE("CSV header is fixed and missing values are empty fields") {
  const std::string csv = to_csv(sample_report());
  CHECK(csv.substr(0, csv.find('\n')) ==
        "run_id,t,linf_u,min_theta,mass_u,mass_theta,lp1,lp2,lp4,lpinf,bv_deriv,"
        "energy_residual,alpha_margin_lo,alpha_margin_hi");
  const std::string first = csv.substr(csv.find('\n') + 1, csv.find('\n', csv.find('\n') + 1) - csv.find('\n') - 1);
  CHECK(first == "toy_eps0.001_n64,0,1,1,,,,0.30000000000000004,,6.283185307179586,,,,");
}

TEST_CASE("CSV and JSON round trips are lossless") {
  const DiagnosticsReport r = sample_report();
  const auto dir = scratch("roundtrip");
  write_csv(r, dir / "r.csv");
  write_json(r, dir / "r.json");

  const DiagnosticsReport c = read_csv(dir / "r.csv");
  CHECK(c.run_id == r.run_id);
  CHECK(c.rows == r.rows);
  CHECK(std::signbit(*c.rows[1].alpha_margin_lo));

  const DiagnosticsReport j = read_json(dir / "r.json");
  CHECK(j.run_id == r.run_id);
  CHECK(j.config == r.config);
  CHECK(j.rows == r.rows);
  CHECK(j.scaling == r.scaling);
  CHECK(to_json(j) == to_json(r));
}

TEST_CASE("validate rejects bad series") {
  DiagnosticsReport r = sample_report();
  CHECK_NOTHROW(r.validate());
  r.rows[1].t = 0.0;
  CHECK_THROWS_AS(r.validate(), Error);
  r = sample_report();
  r.rows[0].lp1 = NAN;
  CHECK_THROWS_AS(r.validate(), Error);
  CHECK_THROWS_AS(report_from_csv("run_id,t\n"), Error);
}

TEST_CASE("a three-step toy run produces three increasing rows") {
  const ScalarProblem1D p{ScalarFlux::burgers(),
                          [](double x) { return std::sin(2 * std::numbers::pi * x); },
                          Grid1D(64, 0.0, 1.0), 1e-2};
  CoupledState1D s = init_state(p);
  DiagnosticsReport r;
  r.run_id = "toy";
  for (int k = 0; k < 3; ++k) {
    s = advance(s, p, stable_step(s, p));
    DiagnosticsRow row;
    row.t = s.t;
    row.linf_u = s.u.max_abs();
    row.min_theta = s.theta.min();
    row.lp2 = transformed_lp_norm(s, 2.0);
    r.rows.push_back(row);
  }
  const auto dir = scratch("toy");
  write_csv(r, dir / "toy.csv");
  const DiagnosticsReport back = read_csv(dir / "toy.csv");
  REQUIRE(back.rows.size() == 3);
  CHECK(back.rows[0].t > 0.0);
  CHECK(back.rows[1].t > back.rows[0].t);
  CHECK(back.rows[2].t > back.rows[1].t);
  CHECK_NOTHROW(back.validate());
}

TEST_CASE("scaling tables") {
  ScalingTable t{"x", {{4e-3, 10.0, 0.04}, {2e-3, 21.0, 0.042}, {1e-3, 80.0, 0.08}}};
  const auto r = t.ratios();
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(1.05));
  CHECK(r[1] == doctest::Approx(0.08 / 0.042));
  CHECK(t.bounded(0.5, 2.0));
  CHECK_FALSE(t.bounded(0.5, 1.9));
  CHECK(scaling_to_csv(t).substr(0, 20) == "eps,sup_grad,product");
}
