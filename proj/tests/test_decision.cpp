#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "conebound/decision.hpp"

using namespace conebound;

namespace {
const Cone kHalf = Cone::half_line();
const Cone kLor = Cone::lorentz(3);
const Cone kSpd = Cone::spd(2);

bool has_violation(const Verdict& v, const std::string& id) {
  for (const auto& s : v.violated)
    if (s == id) return true;
  return false;
}
}  // namespace

TEST_CASE("cone operator rule 2.1") {
  ConeOpParams P{0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0};
  Verdict v = decide_cone_op(kHalf, P);
  CHECK(v.status == BoundednessStatus::Bounded);
  CHECK(v.theorem == "2.1");
  CHECK(v.violated.empty());

  P.gamma = 2.0;
  v = decide_cone_op(kHalf, P);
  CHECK(v.status == BoundednessStatus::Unbounded);
  CHECK(has_violation(v, "homogeneity"));
}

TEST_CASE("cone operator rule 2.2 (p = 1)") {
  ConeOpParams P{0.0, 1.0, 2.0, 1.0, 1.0, 1.0, 2.0};
  Verdict v = decide_cone_op(kLor, P);
  CHECK(v.status == BoundednessStatus::Bounded);
  CHECK(v.theorem == "2.2");

  P.mu = -0.5;  // standing hypothesis fails
  v = decide_cone_op(kLor, P);
  CHECK(v.status == BoundednessStatus::ScopeError);
}

TEST_CASE("cone operator rule 2.3 (q = inf)") {
  // gamma = alpha + beta + n/r - nu/p with alpha = 0.5, beta = 0, nu = 1, p = 2
  ConeOpParams P{0.5, 0.0, 1.0, 1.0, 0.0, 2.0, kInf};
  Verdict v = decide_cone_op(kHalf, P);
  CHECK(v.status == BoundednessStatus::Bounded);
  CHECK(v.theorem == "2.3");

  P.alpha = -0.5;  // p(alpha - n/r + 1) = -1 > 0 fails
  P.gamma = 0.0;
  v = decide_cone_op(kHalf, P);
  CHECK(v.status == BoundednessStatus::Unbounded);
  CHECK(has_violation(v, "alpha_lower"));
}

TEST_CASE("scope errors for uncovered exponent patterns") {
  CHECK(decide_cone_op(kHalf, {0, 0, 1, 1, 1, 2.0, 1.5}).status == BoundednessStatus::ScopeError);  // p > q
  CHECK(decide_cone_op(kHalf, {0, 0, 1, 1, 1, 1.0, 1.0}).status == BoundednessStatus::ScopeError);
  CHECK(decide_cone_op(kHalf, {0, 0, 1, 1, 1, 1.0, kInf}).status == BoundednessStatus::ScopeError);
  CHECK(decide_cone_op(kHalf, {0, 0, 1, -4.0, -4.0, 2.0, 2.0}).status == BoundednessStatus::ScopeError);
  CHECK_THROWS_AS(decide_cone_op(kHalf, {0, 0, 1, 1, 1, 0.5, 2.0}), std::invalid_argument);
}

TEST_CASE("tube operator mixed-norm rules") {
  // reduction of the positive Bergman operator: alpha=0, beta=nu-n/r, gamma=nu
  TubeOpParams P{0.0, 0.5, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0};
  Verdict v = decide_tube_op_mixed(kLor, P);
  CHECK(v.status == BoundednessStatus::Bounded);
  CHECK(v.theorem == "2.4");

  P.mu = 0.4;
  v = decide_tube_op_mixed(kLor, P);
  CHECK(v.status == BoundednessStatus::Unbounded);
  CHECK(has_violation(v, "mu_lower"));

  // q = 1 routes to 2.5
  TubeOpParams Q{0.0, 1.0, 2.0, 1.0, 1.0, 2.0, 1.0, 2.0};
  v = decide_tube_op_mixed(kLor, Q);
  CHECK(v.theorem == "2.5");
  CHECK(v.status == BoundednessStatus::Bounded);

  // s = inf routes to 2.6
  TubeOpParams R{0.5, 0.0, 1.0, 1.0, 0.0, 2.0, 2.0, kInf};
  v = decide_tube_op_mixed(kHalf, R);
  CHECK(v.theorem == "2.6");
  CHECK(v.status == BoundednessStatus::Bounded);

  // q > s is out of scope
  TubeOpParams S{0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 3.0, 2.0};
  CHECK(decide_tube_op_mixed(kHalf, S).status == BoundednessStatus::ScopeError);
}

TEST_CASE("tube operator pure-norm sufficiency (2.7)") {
  TubeOpParams P{0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0};
  Verdict v = decide_tube_op_purenorm(kHalf, P);
  CHECK(v.status == BoundednessStatus::SufficientOnlyBounded);
  CHECK(v.theorem == "2.7");

  // second spec example: Lorentz(3), alpha=1, beta=1, p=2, q=3, nu=1, mu=2
  TubeOpParams Q{1.0, 1.0, 1.0 + 1.0 + 1.5 - 1.25 + 7.0 / 6.0, 1.0, 2.0, 2.0, 3.0, 0.0};
  v = decide_tube_op_purenorm(kLor, Q);
  CHECK(v.status == BoundednessStatus::SufficientOnlyBounded);

  // violated homogeneity never yields Unbounded from this rule
  TubeOpParams R = P;
  R.gamma = 2.0;
  v = decide_tube_op_purenorm(kHalf, R);
  CHECK(v.status == BoundednessStatus::Inconclusive);
  CHECK(has_violation(v, "homogeneity"));
}

TEST_CASE("positive Bergman operator rule 5.1") {
  CHECK(decide_positive_bergman_mixed(kHalf, 1.0, 1.0, 2.0, 2.0, 2.0).status ==
        BoundednessStatus::Bounded);
  CHECK(decide_positive_bergman_mixed(kLor, 2.0, 2.0, 2.0, 2.0, 2.0).status ==
        BoundednessStatus::Bounded);
  Verdict v = decide_positive_bergman_mixed(kLor, 2.0, 2.0, 2.0, 2.0, 3.0);
  CHECK(v.status == BoundednessStatus::Unbounded);
  CHECK(has_violation(v, "diagonal_ratio"));
  CHECK(decide_positive_bergman_mixed(kLor, 0.4, 2.0, 2.0, 2.0, 2.0).status ==
        BoundednessStatus::ScopeError);
}

TEST_CASE("reduction consistency: 5.1 equals 2.4 at the Bergman parameters") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (const Cone& c : {kHalf, kLor, kSpd}) {
    double nr = c.nr();
    for (int i = 0; i < 1000; ++i) {
      double nu = nr - 1.0 + 0.05 + 3.0 * uni(rng);
      double q = 1.05 + 3.0 * uni(rng);
      double s = q + 2.5 * uni(rng);
      double p = 1.1 + 3.0 * uni(rng);
      double mu;
      if (i % 2 == 0) {
        mu = nu * s / q;  // on the diagonal ratio
        if (!(mu > nr - 1.0)) continue;
      } else {
        mu = nr - 1.0 + 0.05 + 3.0 * uni(rng);
      }
      Verdict a = decide_positive_bergman_mixed(c, nu, mu, p, q, s);
      TubeOpParams P{0.0, nu - nr, nu, nu, mu, p, q, s};
      Verdict b = decide_tube_op_mixed(c, P);
      INFO(c.to_string() << " nu=" << nu << " mu=" << mu << " p=" << p << " q=" << q << " s=" << s);
      REQUIRE(a.status == b.status);
    }
  }
}

TEST_CASE("necessity of the off-diagonal Bergman projection (5.2)") {
  // half-line: the q-upper clause never fires (n/r <= p')
  Verdict v = necessity_bergman_offdiag(kHalf, 1.0, 1.0, 1.0, 2.0, 50.0, 60.0);
  CHECK(v.margins.at("q_upper") == kInf);

  // Lorentz with p' = 1.25: q~ = (1 + 0.5)/0.2 = 7.5, so q = 8 is unbounded
  double p = 5.0;
  v = necessity_bergman_offdiag(kLor, 1.0, 2.0, 2.0, p, 8.0, 9.0);
  CHECK(v.status == BoundednessStatus::Unbounded);
  CHECK(has_violation(v, "q_upper"));
  v = necessity_bergman_offdiag(kLor, 1.0, 2.0, 2.0, p, 7.0, 9.0);
  CHECK_FALSE(has_violation(v, "q_upper"));

  // mu below n/r - 1 is always unbounded
  v = necessity_bergman_offdiag(kLor, 1.0, 0.4, 2.0, 2.0, 2.0, 2.0);
  CHECK(v.status == BoundednessStatus::Unbounded);
  CHECK(has_violation(v, "mu_lower"));

  CHECK_THROWS_AS(necessity_bergman_offdiag(kLor, 1, 1, 1, 0.5, 2, 2), std::invalid_argument);
}

TEST_CASE("diagonal degeneracy and weight rescaling") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    double alpha = uni(rng), beta = uni(rng);
    double p = 1.2 + 2.0 * (uni(rng) + 1.0);
    double q = p + (uni(rng) + 1.0);
    double nu = 0.3 + (uni(rng) + 1.0);
    double mu = 0.3 + (uni(rng) + 1.0);
    double nr = kLor.nr();
    double gamma0 = alpha + beta + nr - nu / p + mu / q;

    // p = q, nu = mu forces gamma = alpha + beta + n/r
    double g_diag = alpha + beta + nr - nu / p + nu / p;
    CHECK(g_diag == Catch::Approx(alpha + beta + nr).margin(1e-12));

    // the rescaling (nu, mu) -> (nu + c, mu + c q/p) leaves gamma0 unchanged
    double cshift = uni(rng);
    double gamma1 = alpha + beta + nr - (nu + cshift) / p + (mu + cshift * q / p) / q;
    CHECK(gamma1 == Catch::Approx(gamma0).margin(1e-12));

    ConeOpParams P{alpha, beta, gamma0, nu, mu, p, q};
    Verdict v = decide_cone_op(kLor, P);
    if (v.status != BoundednessStatus::ScopeError)
      CHECK(v.margins.at("homogeneity") > 0.0);
  }
}

TEST_CASE("margins flip sign exactly when the verdict flips") {
  const ConeOpParams base{0.3, 0.1, 0.0, 1.2, 1.0, 2.0, 3.0};
  const double nr = kHalf.nr();
  ConeOpParams P = base;
  P.gamma = P.alpha + P.beta + nr - P.nu / P.p + P.mu / P.q;

  // scan mu across its lower critical value n/r - 1 - q alpha
  double crit = nr - 1.0 - P.q * P.alpha;
  for (double delta : {-0.2, -0.01, 0.01, 0.2}) {
    ConeOpParams Q = P;
    Q.mu = crit + delta;
    Q.gamma = Q.alpha + Q.beta + nr - Q.nu / Q.p + Q.mu / Q.q;  // keep homogeneity
    Verdict v = decide_cone_op(kHalf, Q);
    if (v.status == BoundednessStatus::ScopeError) continue;
    CHECK((v.margins.at("mu_lower") > 0.0) == (delta > 0.0));
    if (delta > 0.0 && v.status == BoundednessStatus::Bounded) CHECK(v.violated.empty());
    if (delta < 0.0) CHECK(v.status == BoundednessStatus::Unbounded);
  }

  // scan nu across its upper critical value p(beta+1) + n/r - 1
  double crit_nu = P.p * (P.beta + 1.0) + nr - 1.0;
  for (double delta : {-0.3, -0.02, 0.02, 0.3}) {
    ConeOpParams Q = P;
    Q.nu = crit_nu - delta;
    Q.gamma = Q.alpha + Q.beta + nr - Q.nu / Q.p + Q.mu / Q.q;
    Verdict v = decide_cone_op(kHalf, Q);
    if (v.status == BoundednessStatus::ScopeError) continue;
    CHECK((v.margins.at("nu_upper") > 0.0) == (delta > 0.0));
  }
}

TEST_CASE("pure-norm rule agrees with the cone rule on the half-line diagonal") {
  // on the half-line with p = q the sufficiency conditions coincide with
  // the homogeneity, nu-upper and mu-lower conditions of rule 2.1
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  int bounded_seen = 0;
  for (int i = 0; i < 500; ++i) {
    double alpha = uni(rng), beta = uni(rng);
    double p = 1.2 + 2.0 * (uni(rng) + 1.0);
    double nu = 0.2 + (uni(rng) + 1.0) * 1.5;
    double mu = 0.2 + (uni(rng) + 1.0) * 1.5;
    double gamma = (i % 3 == 0) ? alpha + beta + 1.0 - nu / p + mu / p
                                : uni(rng) * 3.0;
    ConeOpParams S{alpha, beta, gamma, nu, mu, p, p};
    TubeOpParams T{alpha, beta, gamma, nu, mu, p, p, p};
    Verdict vs = decide_cone_op(kHalf, S);
    Verdict vt = decide_tube_op_purenorm(kHalf, T);
    if (vs.status == BoundednessStatus::ScopeError || vt.status == BoundednessStatus::ScopeError)
      continue;
    if (vs.status == BoundednessStatus::Bounded) {
      ++bounded_seen;
      CHECK(vt.status == BoundednessStatus::SufficientOnlyBounded);
    }
    if (vt.status == BoundednessStatus::Inconclusive)
      CHECK(vs.status == BoundednessStatus::Unbounded);
  }
  CHECK(bounded_seen > 20);
}
