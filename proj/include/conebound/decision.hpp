#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "conebound/cone.hpp"
#include "conebound/util.hpp"

namespace conebound {

enum class BoundednessStatus { Bounded, Unbounded, SufficientOnlyBounded, Inconclusive, ScopeError };

inline const char* to_string(BoundednessStatus s) {
  switch (s) {
    case BoundednessStatus::Bounded: return "Bounded";
    case BoundednessStatus::Unbounded: return "Unbounded";
    case BoundednessStatus::SufficientOnlyBounded: return "SufficientOnlyBounded";
    case BoundednessStatus::Inconclusive: return "Inconclusive";
    case BoundednessStatus::ScopeError: return "ScopeError";
  }
  return "?";
}

/// Parameters of the cone operator S_{alpha,beta,gamma} acting
/// L^p_nu(Omega) -> L^q_mu(Omega), 1 <= p <= q <= inf.
struct ConeOpParams {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double nu = 0.0, mu = 0.0;
  double p = 2.0, q = 2.0;
};

/// Parameters of the tube operator T+_{alpha,beta,gamma}. The mixed-norm
/// question is L^{p,q}_nu -> L^{p,s}_mu; the pure-norm question
/// L^p_nu -> L^q_mu ignores s.
struct TubeOpParams {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double nu = 0.0, mu = 0.0;
  double p = 2.0, q = 2.0, s = 2.0;
};

/// Explainable decision: which rule applied, which conditions failed, and
/// the signed slack of every condition that was checked.
struct Verdict {
  BoundednessStatus status = BoundednessStatus::ScopeError;
  std::string theorem;
  std::vector<std::string> violated;
  std::map<std::string, double> margins;
  std::string note;

  bool bounded() const { return status == BoundednessStatus::Bounded; }
};

namespace detail {

/// Relative tolerance for equality conditions among user-supplied floats.
inline constexpr double kEqualityTol = 1e-9;

struct ConditionSet {
  Verdict v;

  explicit ConditionSet(std::string theorem) { v.theorem = std::move(theorem); }

  void equality(const std::string& id, double value, double required) {
    double tol = kEqualityTol * std::max(1.0, std::fabs(required));
    record(id, tol - std::fabs(value - required));
  }
  /// value > bound, margin value - bound
  void strict_lower(const std::string& id, double value, double bound) {
    record(id, value - bound);
  }
  /// value < bound, margin bound - value
  void strict_upper(const std::string& id, double value, double bound) {
    record(id, bound - value);
  }

  Verdict conclude(BoundednessStatus when_ok, BoundednessStatus when_fail) {
    v.status = v.violated.empty() ? when_ok : when_fail;
    return v;
  }

 private:
  void record(const std::string& id, double margin) {
    v.margins[id] = margin;
    if (!(margin > 0.0)) v.violated.push_back(id);
  }
};

inline Verdict scope_error(std::string theorem, std::string why) {
  Verdict v;
  v.status = BoundednessStatus::ScopeError;
  v.theorem = std::move(theorem);
  v.note = std::move(why);
  return v;
}

}  // namespace detail

/// Boundedness of S: routes to the 1 < p <= q < inf rule ("2.1"), the p = 1
/// rule ("2.2"), or the q = inf rule ("2.3"). Necessary and sufficient in
/// all three.
inline Verdict decide_cone_op(const Cone& cone, const ConeOpParams& P) {
  const double nr = cone.nr();
  if (std::isnan(P.p) || std::isnan(P.q) || P.p < 1.0 || P.q < 1.0)
    throw std::invalid_argument("decide_cone_op: p, q must be >= 1");
  if (P.p > P.q) return detail::scope_error("", "requires p <= q");

  if (P.p == 1.0 && P.q > 1.0 && !std::isinf(P.q)) {
    if (!(P.mu > 0.0)) return detail::scope_error("2.2", "standing hypothesis mu > 0 fails");
    detail::ConditionSet c("2.2");
    c.equality("homogeneity", P.gamma, P.alpha + P.beta + nr - P.nu + P.mu / P.q);
    c.strict_lower("gamma_positive", P.gamma, 0.0);
    c.strict_lower("mu_lower", P.mu, nr - 1.0 - P.q * P.alpha);
    c.strict_upper("mu_upper", P.mu, P.q * (P.gamma - P.alpha) - nr + 1.0);
    return c.conclude(BoundednessStatus::Bounded, BoundednessStatus::Unbounded);
  }

  if (std::isinf(P.q) && P.p > 1.0 && !std::isinf(P.p)) {
    detail::ConditionSet c("2.3");
    c.equality("homogeneity", P.gamma, P.alpha + P.beta + nr - P.nu / P.p);
    c.strict_upper("nu_upper", P.nu, P.p * (P.beta + 1.0) + nr - 1.0);
    c.strict_lower("alpha_lower", P.p * (P.alpha - nr + 1.0), -nr + 1.0);
    return c.conclude(BoundednessStatus::Bounded, BoundednessStatus::Unbounded);
  }

  if (P.p > 1.0 && !std::isinf(P.q)) {
    double pp = conjugate_exponent(P.p);
    if (!(P.nu / pp + P.mu / P.q > 0.0))
      return detail::scope_error("2.1", "standing hypothesis nu/p' + mu/q > 0 fails");
    detail::ConditionSet c("2.1");
    c.equality("homogeneity", P.gamma, P.alpha + P.beta + nr - P.nu / P.p + P.mu / P.q);
    c.strict_lower("nu_lower", P.nu, P.p * (P.beta - P.gamma + 2.0 * nr - 1.0) - nr + 1.0);
    c.strict_upper("nu_upper", P.nu, P.p * (P.beta + 1.0) + nr - 1.0);
    c.strict_lower("mu_lower", P.mu, nr - 1.0 - P.q * P.alpha);
    c.strict_upper("mu_upper", P.mu, P.q * (P.gamma - P.alpha) - nr + 1.0);
    return c.conclude(BoundednessStatus::Bounded, BoundednessStatus::Unbounded);
  }

  return detail::scope_error("", "no rule covers this (p, q) pattern");
}

/// Mixed-norm boundedness of T+: L^{p,q}_nu -> L^{p,s}_mu. Routes to the
/// 1 < q <= s < inf rule ("2.4"), the q = 1 rule ("2.5"), or the s = inf
/// rule ("2.6").
inline Verdict decide_tube_op_mixed(const Cone& cone, const TubeOpParams& P) {
  const double nr = cone.nr();
  if (std::isnan(P.p) || P.p <= 1.0 || std::isinf(P.p))
    return detail::scope_error("", "requires 1 < p < inf");
  if (P.q < 1.0 || P.s < 1.0) throw std::invalid_argument("decide_tube_op_mixed: q, s must be >= 1");

  if (P.q == 1.0 && !std::isinf(P.s) && P.s > 1.0) {
    if (!(P.mu > 0.0)) return detail::scope_error("2.5", "standing hypothesis mu > 0 fails");
    detail::ConditionSet c("2.5");
    c.equality("homogeneity", P.gamma, P.alpha + P.beta + nr - P.nu + P.mu / P.s);
    c.strict_lower("gamma_positive", P.gamma, 0.0);
    c.strict_lower("mu_lower", P.mu, nr - 1.0 - P.s * P.alpha);
    c.strict_upper("mu_upper", P.mu, P.s * (P.gamma - P.alpha) - nr + 1.0);
    return c.conclude(BoundednessStatus::Bounded, BoundednessStatus::Unbounded);
  }

  if (std::isinf(P.s) && P.q > 1.0 && !std::isinf(P.q)) {
    detail::ConditionSet c("2.6");
    c.equality("homogeneity", P.gamma, P.alpha + P.beta + nr - P.nu / P.q);
    c.strict_upper("nu_upper", P.nu, P.q * (P.beta + 1.0) + nr - 1.0);
    c.strict_lower("alpha_lower", P.q * (P.alpha - nr + 1.0), -nr + 1.0);
    return c.conclude(BoundednessStatus::Bounded, BoundednessStatus::Unbounded);
  }

  if (P.q > 1.0 && P.q <= P.s && !std::isinf(P.s)) {
    double pp = conjugate_exponent(P.p);
    // hypothesis exactly as printed (nu/p' + mu/q), see the scope note
    if (!(P.nu / pp + P.mu / P.q > 0.0))
      return detail::scope_error("2.4", "standing hypothesis nu/p' + mu/q > 0 fails (printed form)");
    detail::ConditionSet c("2.4");
    c.equality("homogeneity", P.gamma, P.alpha + P.beta + nr - P.nu / P.q + P.mu / P.s);
    c.strict_lower("nu_lower", P.nu, P.q * (P.beta - P.gamma + 2.0 * nr - 1.0) - nr + 1.0);
    c.strict_upper("nu_upper", P.nu, P.q * (P.beta + 1.0) + nr - 1.0);
    c.strict_lower("mu_lower", P.mu, nr - 1.0 - P.s * P.alpha);
    c.strict_upper("mu_upper", P.mu, P.s * (P.gamma - P.alpha) - nr + 1.0);
    return c.conclude(BoundednessStatus::Bounded, BoundednessStatus::Unbounded);
  }

  return detail::scope_error("", "no rule covers this (q, s) pattern");
}

/// Pure-norm sufficiency for T+: L^p_nu -> L^q_mu ("2.7"). The region is
/// sufficient only; when a condition fails the verdict is Inconclusive,
/// never Unbounded.
inline Verdict decide_tube_op_purenorm(const Cone& cone, const TubeOpParams& P) {
  const double nr = cone.nr();
  if (!(P.p > 1.0) || std::isinf(P.p) || !(P.q >= P.p) || std::isinf(P.q))
    return detail::scope_error("2.7", "requires 1 < p <= q < inf");
  double pp = conjugate_exponent(P.p);
  if (!((P.nu + nr) / pp + (P.mu + nr) / P.q > 0.0))
    return detail::scope_error("2.7", "standing hypothesis (nu+n/r)/p' + (mu+n/r)/q > 0 fails");
  detail::ConditionSet c("2.7");
  c.equality("homogeneity", P.gamma,
             P.alpha + P.beta + nr - (P.nu + nr) / P.p + (P.mu + nr) / P.q);
  c.strict_upper("nu_upper", P.nu, P.p * (P.beta + 1.0) + (nr - 1.0) * (1.0 - P.p / P.q));
  c.strict_lower("mu_lower", P.mu, -P.q * P.alpha + (nr - 1.0) * (1.0 + P.q / pp));
  Verdict v = c.conclude(BoundednessStatus::SufficientOnlyBounded, BoundednessStatus::Inconclusive);
  if (v.status == BoundednessStatus::Inconclusive)
    v.note = "sufficiency conditions fail; no necessity is claimed here";
  return v;
}

/// Boundedness of the positive Bergman operator P_nu^+ from L^{p,q}_nu to
/// L^{p,s}_mu ("5.1"): bounded iff nu/q = mu/s and
/// 1 + (n/r-1)/mu < q < 1 + nu/(n/r-1), the upper bound +inf at n/r = 1.
inline Verdict decide_positive_bergman_mixed(const Cone& cone, double nu, double mu, double p,
                                             double q, double s) {
  const double nr = cone.nr();
  if (!(p > 1.0) || std::isinf(p) || !(q > 1.0) || !(q <= s) || std::isinf(s))
    return detail::scope_error("5.1", "requires 1 < p < inf and 1 < q <= s < inf");
  if (!(nu > nr - 1.0) || !(mu > nr - 1.0))
    return detail::scope_error("5.1", "requires nu, mu > n/r - 1");
  detail::ConditionSet c("5.1");
  c.equality("diagonal_ratio", nu / q, mu / s);
  c.strict_lower("q_lower", q, 1.0 + (nr - 1.0) / mu);
  double q_hi = nr == 1.0 ? kInf : 1.0 + nu / (nr - 1.0);
  c.strict_upper("q_upper", q, q_hi);
  return c.conclude(BoundednessStatus::Bounded, BoundednessStatus::Unbounded);
}

/// Necessary conditions for the (signed) Bergman projection P_gamma to be
/// bounded from L^{p,q}_nu to L^{p,s}_mu ("5.2"). Any failure certifies
/// unboundedness; otherwise the verdict is Inconclusive. The (x)_+
/// denominators follow the convention quotient = +inf when (x)_+ = 0.
inline Verdict necessity_bergman_offdiag(const Cone& cone, double nu, double mu, double gamma,
                                         double p, double q, double s) {
  if (!(p >= 1.0) || !(q >= 1.0) || !(s >= 1.0))
    throw std::invalid_argument("necessity_bergman_offdiag: p, q, s must be >= 1");
  const double nr = cone.nr();
  const double pp = conjugate_exponent(p);
  detail::ConditionSet c("5.2");
  c.strict_lower("mu_lower", mu, nr - 1.0);
  c.strict_lower("kernel_integrability", gamma + nr,
                 (2.0 * nr - 1.0) * std::max(1.0 / p, 1.0 / pp));
  double n_over_rpp = std::isinf(pp) ? 0.0 : cone.n / (cone.r * pp);
  c.strict_lower("s_lower", s, quotient_pospart(mu + nr - 1.0, gamma + n_over_rpp));
  c.strict_lower("q_lower", q, quotient_pospart(nu - nr + 1.0, gamma - nr + 1.0));
  c.strict_upper("q_upper", q, quotient_pospart(nu + nr - 1.0, n_over_rpp - 1.0));
  Verdict v = c.conclude(BoundednessStatus::Inconclusive, BoundednessStatus::Unbounded);
  if (v.status == BoundednessStatus::Inconclusive)
    v.note = "all necessary conditions pass; boundedness is not decided";
  return v;
}

}  // namespace conebound
