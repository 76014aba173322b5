#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "conebound/analytic.hpp"

using namespace conebound;

namespace {
const Cone kHalf = Cone::half_line();
const Cone kLor = Cone::lorentz(3);
const Cone kSpd = Cone::spd(2);
}  // namespace

TEST_CASE("beta integral convergence predicate") {
  CHECK(cone_beta_converges(ConeBetaQuery::scalars(kHalf, -2.0, 1.0)));
  CHECK_FALSE(cone_beta_converges(ConeBetaQuery::scalars(kLor, -2.0, 0.4)));
  CHECK(cone_beta_converges(ConeBetaQuery::scalars(kLor, -2.0, 0.8)));

  // boundary cases decide false
  CHECK_FALSE(cone_beta_converges(ConeBetaQuery::scalars(kHalf, -1.0, 1.0)));   // s+t = 0
  CHECK_FALSE(cone_beta_converges(ConeBetaQuery::scalars(kLor, -2.0, 0.5)));    // t = d/2

  // vector exponents check every slot
  CHECK(cone_beta_converges(ConeBetaQuery{kSpd, GeneralizedPower{-3.0, -2.0}, GeneralizedPower{1.0, 0.9}}));
  CHECK_FALSE(cone_beta_converges(ConeBetaQuery{kSpd, GeneralizedPower{-3.0, -0.5}, GeneralizedPower{1.0, 0.4}}));
}

TEST_CASE("scalar convergence reduces to the worst slot") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> st(-4.0, 4.0);
  for (const Cone& c : {kHalf, kLor, kSpd}) {
    double edge = c.nr() - 1.0;
    for (int i = 0; i < 300; ++i) {
      double s = st(rng), t = st(rng);
      bool expect = t > edge && s + t < -edge;
      CHECK(cone_beta_converges(ConeBetaQuery::scalars(c, s, t)) == expect);
    }
  }
}

TEST_CASE("beta integral closed-form exponent") {
  auto q1 = ConeBetaQuery::scalars(kHalf, -2.0, 1.0);
  CHECK(cone_beta_exponent(q1).s == std::vector<double>{-1.0});

  auto q2 = ConeBetaQuery::scalars(kLor, -2.0, 0.8);
  CHECK(cone_beta_exponent(q2).s == std::vector<double>{-1.2, -1.2});

  auto q3 = ConeBetaQuery{kSpd, GeneralizedPower{-3.0, -2.0}, GeneralizedPower{1.0, 0.9}};
  auto e3 = cone_beta_exponent(q3);
  CHECK(e3[0] == Catch::Approx(-2.0));
  CHECK(e3[1] == Catch::Approx(-1.1));

  CHECK_THROWS_AS(cone_beta_exponent(ConeBetaQuery::scalars(kLor, -2.0, 0.4)), std::domain_error);
}

TEST_CASE("half-line constants match the Gamma quotient") {
  QuadratureConfig cfg;
  CHECK(cone_beta_constant(ConeBetaQuery::scalars(kHalf, -2.0, 1.0), cfg) == Catch::Approx(1.0));
  CHECK(cone_beta_constant(ConeBetaQuery::scalars(kHalf, -3.0, 1.0), cfg) == Catch::Approx(0.5));

  // quadrature agrees with the analytic value on a grid
  for (double t : {0.5, 1.0, 2.0}) {
    for (double st : {-0.5, -1.0, -2.0}) {
      double s = st - t;
      auto q = ConeBetaQuery::scalars(kHalf, s, t);
      double analytic = cone_beta_constant(q, cfg);
      auto numeric = cone_beta_integral(q, identity(kHalf), cfg);
      REQUIRE(numeric.converged);
      CHECK(numeric.value == Catch::Approx(analytic).epsilon(1e-6));
    }
  }
}

TEST_CASE("constant is independent of v") {
  // the module's core oracle: integral(v) / Delta^{s+t}(v) is flat in v
  std::mt19937_64 rng(43);
  QuadratureConfig cfg;
  cfg.target_rel_err = 1e-6;
  for (const Cone& c : {kHalf, kLor, kSpd}) {
    auto q = ConeBetaQuery::scalars(c, -2.3, c.nr() - 1.0 + 0.7);
    REQUIRE(cone_beta_converges(q));
    GeneralizedPower expo = cone_beta_exponent(q);
    double lo = kInf, hi = -kInf;
    for (int i = 0; i < 5; ++i) {
      ConePoint v = random_cone_point(c, rng);
      auto est = cone_beta_integral(q, v, cfg);
      REQUIRE(est.converged);
      double ratio = est.value / generalized_power(c, expo, v);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK((hi - lo) / (0.5 * (hi + lo)) < 1e-2);
  }
}

TEST_CASE("vector-power constant is independent of v") {
  std::mt19937_64 rng(47);
  QuadratureConfig cfg;
  cfg.target_rel_err = 1e-6;
  for (const Cone& c : {kLor, kSpd}) {
    ConeBetaQuery q{c, GeneralizedPower{-3.1, -2.4}, GeneralizedPower{1.3, 0.8}};
    REQUIRE(cone_beta_converges(q));
    GeneralizedPower expo = cone_beta_exponent(q);
    double lo = kInf, hi = -kInf;
    for (int i = 0; i < 4; ++i) {
      ConePoint v = random_cone_point(c, rng);
      auto est = cone_beta_integral(q, v, cfg);
      REQUIRE(est.converged);
      double ratio = est.value / generalized_power(c, expo, v);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK((hi - lo) / (0.5 * (hi + lo)) < 1e-2);
  }
}

TEST_CASE("lorentz constant is self-consistent across configs") {
  auto q = ConeBetaQuery::scalars(kLor, -2.0, 0.8);
  QuadratureConfig a;
  a.target_rel_err = 1e-5;
  QuadratureConfig b;
  b.target_rel_err = 1e-7;
  b.levels = 4;
  b.angular_nodes = 48;
  auto ea = cone_beta_integral(q, identity(kLor), a);
  auto eb = cone_beta_integral(q, identity(kLor), b);
  REQUIRE(ea.converged);
  REQUIRE(eb.converged);
  CHECK(ea.value == Catch::Approx(eb.value).epsilon(1e-2));
}

TEST_CASE("memoized constants are reused") {
  QuadratureConfig cfg;
  cfg.target_rel_err = 1e-5;
  auto q = ConeBetaQuery::scalars(kLor, -2.1, 0.9);
  double first = cone_beta_constant(q, cfg);
  double second = cone_beta_constant(q, cfg);
  CHECK(first == second);  // cached value, bit identical
}

TEST_CASE("mixed-norm membership") {
  CHECK(det_power_in_mixed_norm({kHalf, 1.3, 2.0, 2.0, 1.0}));
  CHECK_FALSE(det_power_in_mixed_norm({kHalf, 1.0, 2.0, 2.0, 1.0}));  // boundary not strict
  CHECK_FALSE(det_power_in_mixed_norm({kLor, 5.0, 2.0, 2.0, 0.4}));   // nu <= n/r - 1

  CHECK(det_power_norm_exponent({kHalf, 1.3, 2.0, 2.0, 1.0}) == Catch::Approx(-0.6));
  CHECK(det_power_norm_exponent({kHalf, 2.0, 2.0, 4.0, 1.0}) == Catch::Approx(-5.0));
  CHECK(det_power_norm_exponent({kLor, 2.0, 2.0, 2.0, 1.0}) == Catch::Approx(-1.5));
  CHECK_THROWS_AS(det_power_norm_exponent({kHalf, 1.0, 2.0, 2.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(det_power_in_mixed_norm({kHalf, 1.3, 1.0, kInf, 1.0}), std::invalid_argument);
}
