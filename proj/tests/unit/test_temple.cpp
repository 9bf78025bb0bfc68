#include <doctest.h>

#include <cmath>
#include <numbers>

#include "charax/acceptance.hpp"
#include "charax/config.hpp"
#include "charax/error.hpp"
#include "charax/scalar1d.hpp"
#include "charax/temple.hpp"
#include "chromatography_oracle.hpp"

using namespace charax;

namespace {

constexpr double kPi = std::numbers::pi;

const StateBox kChromBox{Vec2(0.1, 0.1), Vec2(1.0, 1.0)};

TempleProblem chromatography_problem(std::size_t n, double eps) {
  return {.system = TempleSystem::chromatography(),
          .u0 = [](double x) {
            return Vec2(0.55 + 0.44 * std::sin(2 * kPi * x),
                        0.55 + 0.44 * std::sin(2 * kPi * x + 0.3));
          },
          .grid = Grid1D(n, 0.0, 1.0),
          .eps = eps,
          .box = kChromBox,
          .mollify_width = std::nullopt,
          .evolve_invariants = false,
          .resolution = ResolutionPolicy::ignore};
}

TempleSystem diagonal_coupled() {
  return TempleSystem::diagonal(
      [](const Vec2& u) { return Vec2(u(0) + 0.25 * u(1), 0.5 + u(1) - 0.25 * u(0)); });
}

}  // namespace

TEST_CASE("chromatography eigenstructure matches the symbolic oracle") {
  const TempleSystem sys = TempleSystem::chromatography();
  for (const auto& p : chromatography_oracle::kPoints) {
    const Vec2 u(p.u, p.v);
    const Vec2 lam = sys.eigenvalues(u);
    CHECK(lam(0) == doctest::Approx(p.lambda[0]).epsilon(1e-14));
    CHECK(lam(1) == doctest::Approx(p.lambda[1]).epsilon(1e-14));
    const Vec2 R = sys.invariants(u);
    CHECK(R(0) == doctest::Approx(p.R[0]).epsilon(1e-14));
    CHECK(R(1) == doctest::Approx(p.R[1]).epsilon(1e-14));

    const double s = p.u + p.v;
    const Mat2 r = sys.right(u), l = sys.left(u);
    CHECK(r(0, 0) == doctest::Approx(p.u / s));
    CHECK(r(1, 0) == doctest::Approx(p.v / s));
    CHECK(r(0, 1) == doctest::Approx(-s));
    CHECK(r(1, 1) == doctest::Approx(s));
    CHECK(l(0, 0) == doctest::Approx(1.0));
    CHECK(l(0, 1) == doctest::Approx(1.0));
    CHECK(l(1, 0) == doctest::Approx(-p.v / (s * s)));
    CHECK(l(1, 1) == doctest::Approx(p.u / (s * s)));

    // Exact derivative path and the differenced path.
    const Mat2 D = derive_coupling(sys, u);
    TempleSystem fd = sys;
    fd.right_derivative = nullptr;
    const Mat2 Dfd = derive_coupling(fd, u);
    for (const Mat2* m : {&D, &Dfd}) {
      CHECK(std::abs((*m)(0, 0)) <= 1e-8);
      CHECK(std::abs((*m)(0, 1)) <= 1e-8);
      CHECK(std::abs((*m)(1, 1)) <= 1e-8);
      CHECK((*m)(1, 0) == doctest::Approx(p.D21).epsilon(1e-7));
    }
  }
}

TEST_CASE("chromatography certification on [0.1, 1]^2") {
  const CertificationReport r = certify_eigenstructure(TempleSystem::chromatography(), kChromBox);
  CHECK(r.pass());
  CHECK(r.biorthogonality < 1e-6);
  CHECK(r.eigen_equation < 1e-6);
  CHECK(r.alignment < 1e-6);
  CHECK(r.temple < 1e-6);
  CHECK(r.umap_roundtrip < 1e-8);
  CHECK(r.coupling < 1e-6);
  CHECK(r.points == 41 * 41);

  // The differenced-only system certifies the same way.
  TempleSystem fd = TempleSystem::chromatography();
  fd.right_derivative = nullptr;
  CHECK(validate_coupling(fd, kChromBox) < 1e-6);
}

TEST_CASE("diagonal systems certify with exact zeros and D = 0") {
  const StateBox box{Vec2(-1, -1), Vec2(1, 1)};
  for (const TempleSystem& sys :
       {diagonal_coupled(),
        TempleSystem::diagonal_decoupled(ScalarFlux::burgers(), ScalarFlux::quartic())}) {
    const CertificationReport r = certify_eigenstructure(sys, box);
    CHECK(r.biorthogonality == 0.0);
    CHECK(r.eigen_equation == 0.0);
    CHECK(r.alignment == 0.0);
    CHECK(r.temple == 0.0);
    CHECK(r.umap_roundtrip == 0.0);
    CHECK(r.coupling < 1e-6);
    CHECK(derive_coupling(sys, Vec2(0.3, -0.2)) == Mat2::Zero());
  }
}

TEST_CASE("non-Temple fields are rejected before time stepping") {
  // r_2 = (u1, 1) turns with u1: <l_1, r_2u r_2> = u1 != 0, and l_1 is not a
  // gradient.
  TempleSystem sys;
  sys.name = "sheared";
  sys.eigenvalues = [](const Vec2& u) { return Vec2(u(0), 1.0 + u(1)); };
  sys.right = [](const Vec2& u) {
    Mat2 r;
    r << 1.0, u(0), 0.0, 1.0;
    return r;
  };
  sys.left = [](const Vec2& u) {
    Mat2 l;
    l << 1.0, -u(0), 0.0, 1.0;
    return l;
  };
  sys.invariants = [](const Vec2& u) { return u; };
  sys.umap = [](const Vec2& r) { return r; };
  sys.jacobian = [sys](const Vec2& u) -> Mat2 {
    const Mat2 r = sys.right(u);
    return r * sys.eigenvalues(u).asDiagonal() * sys.left(u);
  };
  const StateBox box{Vec2(0.2, 0.2), Vec2(1, 1)};
  const CertificationReport rep = certify_eigenstructure(sys, box);
  CHECK_FALSE(rep.pass());
  CHECK(rep.temple > 0.1);
  CHECK(rep.failures().find("Temple condition") != std::string::npos);

  const TempleProblem p{.system = sys,
                        .u0 = [](double) { return Vec2(0.5, 0.5); },
                        .grid = Grid1D(32, 0.0, 1.0),
                        .eps = 1e-2,
                        .box = box,
                        .mollify_width = std::nullopt,
                        .evolve_invariants = false,
                        .resolution = ResolutionPolicy::ignore};
  CHECK_THROWS_AS(init_temple(p), ConfigError);
}

TEST_CASE("data outside the certified box are refused") {
  TempleProblem p = chromatography_problem(64, 1e-2);
  p.u0 = [](double x) { return Vec2(0.05 + x, 0.5); };
  CHECK_THROWS_AS(init_temple(p), ConfigError);
}

TEST_CASE("constant state: alpha_i = x - lambda_i t, theta_i = 1") {
  TempleProblem p = chromatography_problem(40, 1e-2);
  p.u0 = [](double) { return Vec2(0.5, 0.5); };
  const TempleState s = run_temple(p, init_temple(p), 0.4);
  const Vec2 lam(0.25, 0.5);
  for (int i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 40; ++j) {
      CHECK(s.u[i][j] == doctest::Approx(0.5).epsilon(1e-13));
      CHECK(s.theta[i][j] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(s.alpha[i][j] == doctest::Approx(p.grid.x(j) - lam(i) * s.t).epsilon(1e-12));
    }
    const TransformedProfile w = reconstruct_W(s, i);
    for (double d : w.derivs) CHECK(std::abs(d) <= 1e-12);
    CHECK(alpha_bound_violation(s, i, 1e-12) <= 0.0);
  }
}

TEST_CASE("t = 0 profiles and norms") {
  const TempleProblem p = chromatography_problem(200, 1e-2);
  const TempleState s = init_temple(p);
  for (int i = 0; i < 2; ++i) {
    const TransformedProfile w = reconstruct_W(s, i);
    const GridFunction dR = ddx(s.R[i]);
    for (std::size_t j = 0; j < 200; ++j) {
      CHECK(w.alphas[j] == p.grid.x(j));
      CHECK(w.values[j] == s.R[i][j]);
      CHECK(w.derivs[j] == doctest::Approx(dR[j]));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < 200; ++j) sum += dR[j] * dR[j] * p.grid.dx();
    CHECK(w_derivative_norm(s, i, 2.0) == doctest::Approx(std::sqrt(sum)));
    CHECK(alpha_bound_violation(s, i, 0.0) <= 0.0);
  }
}

TEST_CASE("mollifier") {
  const Grid1D g(100, 0.0, 1.0);
  const auto c = mollify([](double) { return Vec2(0.3, -2.0); }, 0.05, g);
  CHECK(c(0.4)(0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(c(0.4)(1) == doctest::Approx(-2.0).epsilon(1e-14));

  const auto step = [](double x) { return Vec2(x < 0.5 ? 0.0 : 1.0, 0.0); };
  const auto m = mollify(step, 0.05, g);
  CHECK(m(0.5)(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m(0.44)(0) == 0.0);
  CHECK(m(0.56)(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m(0.47)(0) > 0.0);
  CHECK(m(0.47)(0) < m(0.49)(0));
  // Wraps on a periodic grid: the jump at 0 is smoothed from both sides.
  const auto wrap = mollify([](double x) { return Vec2(x < 0.5 ? 1.0 : 0.0, 0.0); }, 0.05, g);
  CHECK(wrap(0.01)(0) > 0.5);
  CHECK(wrap(0.99)(0) < 0.5);
  CHECK(wrap(0.99)(0) > 0.0);
  // Width zero is the identity.
  CHECK(mollify(step, 0.0, g)(0.4999)(0) == 0.0);
}

TEST_CASE("Hoelder quotient is bounded by the L^p norm of the derivative") {
  // Linear W = a alpha on [0, 1]: quotient a h^(1/p) <= a.
  TransformedProfile lin;
  for (int k = 0; k < 101; ++k) {
    lin.alphas.push_back(k / 100.0);
    lin.values.push_back(3.0 * k / 100.0);
    lin.derivs.push_back(3.0);
  }
  CHECK(holder_quotient(lin, 2.0) <= 3.0 * (1 + 1e-12));
  CHECK(holder_quotient(lin, 2.0) >= 3.0 * std::sqrt(0.64));
  CHECK(holder_quotient(lin, 4.0) <= 3.0 * (1 + 1e-12));

  // A chromatography run: sup quotient <= |dW/dalpha|_p (Hoelder with constant 1).
  const TempleProblem p = chromatography_problem(400, 8e-3);
  const TempleState s = run_temple(p, init_temple(p), 0.3);
  for (int i = 0; i < 2; ++i) {
    const TransformedProfile w = reconstruct_W(s, i);
    for (double q : {2.0, 4.0}) {
      CHECK(holder_quotient(w, q) <= w_derivative_norm(s, i, q) * 1.01);
    }
  }
}

TEST_CASE("chromatography: invariants along a short run") {
  TempleProblem p = chromatography_problem(500, 8e-3);
  p.evolve_invariants = true;
  const TempleState s0 = init_temple(p);
  std::array<double, 2> lo{s0.R[0].min(), s0.R[1].min()}, hi{s0.R[0].max(), s0.R[1].max()};
  std::array<double, 2> w0{w_derivative_norm(s0, 0, 2.0), w_derivative_norm(s0, 1, 2.0)};
  const double mass0 = s0.u[0].integral() + s0.u[1].integral();
  const TempleState s = run_temple(p, s0, 0.5, [&](const TempleState& st, bool) {
    for (int i = 0; i < 2; ++i) {
      REQUIRE(st.R[i].min() >= lo[i] - 1e-8);
      REQUIRE(st.R[i].max() <= hi[i] + 1e-8);
      REQUIRE(st.theta[i].min() > 0.0);
      REQUIRE(w_derivative_norm(st, i, 2.0) <= 1.1 * w0[i]);
      REQUIRE(alpha_bound_violation(st, i, 2 * p.grid.dx()) <= 0.0);
    }
    REQUIRE(std::abs(st.u[0].integral() + st.u[1].integral() - mass0) <= 1e-12);
  });
  CHECK(s.R_direct.has_value());
  CHECK(s.max_drift <= p.drift_tol);
  CHECK(s.max_modified_speed > 0.0);
  CHECK(s.sup_gradient > 0.0);
}

TEST_CASE("diagonal-decoupled system reproduces two scalar runs") {
  ExperimentConfig cfg = resolve_config(preset("diag-decoupled"), {"grid.n=128", "t_end=0.3", "output.times=[0.3]"});
  CHECK(acceptance::diagonal_reduction_error(cfg) <= 1e-8);
}

TEST_CASE("gradient scaling study") {
  const double a = 1.0;
  const ScalingFamily tanh_layer{
      "viscous shock", [](double eps) { return eps / 8.0; },
      [a](double eps) {
        // Standing layer u = -a tanh(a x / (2 eps)), steepest slope a^2 / (2 eps).
        const double L = 40 * eps;
        const ScalarProblem1D p{ScalarFlux::burgers(),
                                [=](double x) { return -a * std::tanh(a * x / (2 * eps)); },
                                Grid1D(std::size_t(std::llround(2 * L / (eps / 8))), -L, L,
                                       Topology::line),
                                eps, ResolutionPolicy::refuse};
        double sup = 0.0;
        run_scalar1d(p, init_state(p), 0.02,
                     [&](const CoupledState1D& s, bool) { sup = std::max(sup, ddx(s.u).max_abs()); });
        return sup;
      }};
  const std::vector<double> eps{4e-3, 2e-3, 1e-3};
  const ScalingTable t = gradient_scaling_study(tanh_layer, eps, 2);
  REQUIRE(t.rows.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(t.rows[k].eps == eps[k]);
    CHECK(t.rows[k].product == doctest::Approx(a * a / 2).epsilon(0.01));
  }
  CHECK(t.bounded());

  const std::vector<double> two{4e-3, 2e-3};
  CHECK_THROWS_AS(gradient_scaling_study(tanh_layer, two), ConfigError);
  const std::vector<double> uneven{4e-3, 2e-3, 1.5e-3};
  CHECK_THROWS_AS(gradient_scaling_study(tanh_layer, uneven), ConfigError);
  ScalingFamily coarse = tanh_layer;
  coarse.dx_for = [](double eps) { return eps / 2; };
  CHECK_THROWS_AS(gradient_scaling_study(coarse, eps), ConfigError);
}
