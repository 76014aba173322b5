#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "conebound/analytic.hpp"
#include "conebound/cone.hpp"
#include "conebound/decision.hpp"
#include "conebound/quadrature.hpp"

namespace conebound {

enum class CertificateKind { ConeS, ConeS_p1, TubeTplus };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::ConeS: return "ConeS";
    case CertificateKind::ConeS_p1: return "ConeS_p1";
    case CertificateKind::TubeTplus: return "TubeTplus";
  }
  return "?";
}

/// Witness for the off-diagonal Schur test: test functions Delta^{-u} and
/// Delta^{-v} with exponent split t, plus the verified constants M1, M2
/// giving the operator-norm bound M1 M2.
struct OkikioluCertificate {
  CertificateKind kind = CertificateKind::ConeS;
  double u = 0.0, v = 0.0;
  double t = 0.0;
  double omega = 0.0;
  double M1 = 0.0, M2 = 0.0;
  double slack = 0.0;
};

struct AffineBound {
  double c0 = 0.0, c1 = 0.0;
  double at(double t) const { return c0 + c1 * t; }
};

struct VarWindow {
  std::vector<AffineBound> lowers, uppers;
  std::pair<double, double> at(double t) const {
    double lo = -kInf, hi = kInf;
    for (const auto& b : lowers) lo = std::max(lo, b.at(t));
    for (const auto& b : uppers) hi = std::min(hi, b.at(t));
    return {lo, hi};
  }
};

/// The affine-in-t constraint systems from the sufficiency proofs: interval
/// bounds for u and for v at every t, the linkage v - u = delta(t), and the
/// admissible t range. [pref_lo, pref_hi] is the subrange where the proofs'
/// device 0 < v - u < mu/q holds; the full range only needs 0 < t < 1.
struct FeasibilityWindow {
  CertificateKind kind = CertificateKind::ConeS;
  double t_lo = 0.0, t_hi = 1.0;
  double pref_lo = 0.0, pref_hi = 1.0;
  VarWindow u, v;
  AffineBound delta;  // v - u as a function of t
  double omega = 0.0;
};

/// Thrown when the scalar-witness system has no solution. On the half-line
/// every Bounded tuple is feasible. On rank-2 cones the scalar system
/// carries strengthened window conditions (the n/r - 1 corrections do not
/// cancel), so part of the Bounded region admits only vector-exponent
/// witnesses, which are out of scope here.
struct CertificateInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Constraint system for the cone operator (p > 1 and p = 1 branches).
inline FeasibilityWindow cone_op_window(const Cone& cone, const ConeOpParams& P) {
  const double nr = cone.nr();
  FeasibilityWindow w;
  const double B = P.beta - P.nu + nr;
  const double G = P.beta - P.gamma - P.nu + nr;
  const double ga = P.gamma - P.alpha;

  if (P.p > 1.0) {
    const double pp = conjugate_exponent(P.p);
    w.kind = CertificateKind::ConeS;
    w.omega = P.alpha + P.beta - P.gamma - P.nu + nr;  // = -(nu/p' + mu/q)
    w.u.lowers = {{-B, B}, {(P.nu + nr - 1.0) / pp, G}};
    w.u.uppers = {{(P.nu - nr + 1.0) / pp, B}, {-G, G}};
    w.v.lowers = {{0.0, -P.alpha}, {(P.mu + nr - 1.0) / P.q - ga, ga}};
    w.v.uppers = {{(P.mu - nr + 1.0) / P.q + P.alpha, -P.alpha}, {0.0, ga}};
    w.delta = {-P.nu / pp, -w.omega};
    w.t_lo = 0.0;
    w.t_hi = 1.0;
    // the proofs' device 0 < v - u < mu/q selects a preferred subrange;
    // 0 < t < 1 itself only needs -nu/p' < v - u < mu/q
    double t0 = (P.nu / pp) / (-w.omega);
    if (P.mu > 0.0 && t0 < 1.0) {
      w.pref_lo = std::max(0.0, t0);
      w.pref_hi = 1.0;
    } else {
      w.pref_lo = 0.0;
      w.pref_hi = 1.0;
    }
  } else {
    w.kind = CertificateKind::ConeS_p1;
    w.omega = P.alpha + P.beta - P.gamma - P.nu + nr;  // = -mu/q
    w.u.lowers = {{-B, B}, {0.0, G}};
    w.u.uppers = {{0.0, B}, {-G, G}};
    w.v.lowers = {{0.0, -P.alpha}, {(P.mu + nr - 1.0) / P.q - ga, ga}};
    w.v.uppers = {{(P.mu - nr + 1.0) / P.q + P.alpha, -P.alpha}, {0.0, ga}};
    w.delta = {0.0, -w.omega};
    w.t_lo = 0.0;
    w.t_hi = 1.0;
    w.pref_lo = 0.0;
    w.pref_hi = 1.0;
  }
  return w;
}

/// Constraint system for the pure-norm tube operator.
inline FeasibilityWindow tube_op_window(const Cone& cone, const TubeOpParams& P) {
  const double nr = cone.nr();
  const double pp = conjugate_exponent(P.p);
  const double B = P.beta - P.nu + nr;
  FeasibilityWindow w;
  w.kind = CertificateKind::TubeTplus;
  w.omega = P.alpha + P.beta - P.gamma - P.nu;  // = -[(nu+n/r)/p' + (mu+n/r)/q]
  w.u.lowers = {{-B + (nr - 1.0) / P.q, B}};
  w.u.uppers = {{(P.nu - nr + 1.0) / pp, B}};
  w.v.lowers = {{(nr - 1.0) / pp, -P.alpha}};
  w.v.uppers = {{(P.mu - nr + 1.0) / P.q + P.alpha, -P.alpha}};
  w.delta = {-(P.nu + nr) / pp, -w.omega};
  w.t_lo = 0.0;
  w.t_hi = 1.0;
  double t0 = ((P.nu + nr) / pp) / (-w.omega);
  if (P.mu + nr > 0.0 && t0 < 1.0) {
    w.pref_lo = std::max(0.0, t0);
    w.pref_hi = 1.0;
  } else {
    w.pref_lo = 0.0;
    w.pref_hi = 1.0;
  }
  return w;
}

/// Scans t over a uniform grid of the admissible interval, intersects the
/// four affine intervals with the linkage, and returns the witness with the
/// largest minimal slack (Chebyshev-center style). The slack is concave in
/// t (a min of affine functions minus a max of affine functions), so a
/// ternary-search refinement finds the optimum even when the feasible
/// sliver falls between grid points.
inline OkikioluCertificate select_witness(const FeasibilityWindow& w, int grid = 64) {
  auto slack_at = [&](double t, double lo_t, double hi_t) -> double {
    double delta = w.delta.at(t);
    auto [ulo, uhi] = w.u.at(t);
    auto [vlo, vhi] = w.v.at(t);
    double lo = std::max(ulo, vlo - delta);
    double hi = std::min(uhi, vhi - delta);
    double span_slack = 0.5 * (hi - lo);
    double t_slack = std::min(t - lo_t, hi_t - t) * (-w.omega);
    return std::min(span_slack, t_slack);
  };

  auto search = [&](double lo_t, double hi_t, double& t_out) -> double {
    double t_best = 0.5 * (lo_t + hi_t);
    double s_best = slack_at(t_best, lo_t, hi_t);
    for (int k = 0; k < grid; ++k) {
      double t = lo_t + (k + 0.5) / grid * (hi_t - lo_t);
      double s = slack_at(t, lo_t, hi_t);
      if (s > s_best) { s_best = s; t_best = t; }
    }
    double a = lo_t, b = hi_t;
    for (int it = 0; it < 200; ++it) {
      double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      if (slack_at(m1, lo_t, hi_t) < slack_at(m2, lo_t, hi_t)) a = m1; else b = m2;
    }
    double t = 0.5 * (a + b);
    double s = slack_at(t, lo_t, hi_t);
    if (s > s_best) { s_best = s; t_best = t; }
    t_out = t_best;
    return s_best;
  };

  double t_best;
  double s_best = search(w.pref_lo, w.pref_hi, t_best);
  if (!(s_best > 0.0) && (w.pref_lo > w.t_lo || w.pref_hi < w.t_hi)) {
    // infeasible within the proofs' device range: the full 0 < t < 1 range
    // still yields a valid split
    s_best = search(w.t_lo, w.t_hi, t_best);
  }
  if (!(s_best > 0.0))
    throw CertificateInfeasible("select_witness: no scalar witness in the window system");

  OkikioluCertificate best;
  double delta = w.delta.at(t_best);
  auto [ulo, uhi] = w.u.at(t_best);
  auto [vlo, vhi] = w.v.at(t_best);
  best.kind = w.kind;
  best.u = 0.5 * (std::max(ulo, vlo - delta) + std::min(uhi, vhi - delta));
  best.v = best.u + delta;
  best.t = t_best;
  best.omega = w.omega;
  best.slack = s_best;
  return best;
}

/// Residuals of the exponent identities that close the Schur-test proofs;
/// both vanish for a consistent certificate.
inline std::pair<double, double> certificate_exponent_identities(const Cone& cone,
                                                                 const ConeOpParams& P,
                                                                 const OkikioluCertificate& c) {
  const double nr = cone.nr();
  const double B = P.beta - P.nu + nr;
  double r1;
  if (c.kind == CertificateKind::ConeS_p1) {
    r1 = -c.u + c.v + c.t * (P.alpha - P.gamma + B);
  } else {
    const double pp = conjugate_exponent(P.p);
    r1 = c.t * pp * (P.alpha - P.gamma + B) - pp * c.u + P.nu + pp * c.v;
  }
  double r2 = (1.0 - c.t) * P.q * (B - P.gamma + P.alpha) - P.q * c.v + P.mu + P.q * c.u;
  return {r1, r2};
}

inline std::pair<double, double> certificate_exponent_identities(const Cone& cone,
                                                                 const TubeOpParams& P,
                                                                 const OkikioluCertificate& c) {
  const double nr = cone.nr();
  const double pp = conjugate_exponent(P.p);
  const double B = P.beta - P.nu + nr;
  double r1 = c.t * pp * (P.alpha - (P.gamma + nr) + B) - pp * c.u + P.nu + nr + pp * c.v;
  double r2 = (1.0 - c.t) * P.q * (B - (P.gamma + nr) + P.alpha) - P.q * c.v + P.mu + nr + P.q * c.u;
  return {r1, r2};
}

/// Finds the Okikiolu witness for a Bounded cone-operator tuple.
inline OkikioluCertificate find_certificate_cone_op(const Cone& cone, const ConeOpParams& P) {
  Verdict v = decide_cone_op(cone, P);
  if (v.status != BoundednessStatus::Bounded)
    throw std::invalid_argument("find_certificate_cone_op: operator is not Bounded (" +
                                std::string(to_string(v.status)) + ")");
  if (std::isinf(P.q))
    throw std::invalid_argument("find_certificate_cone_op: q = inf uses the sup-norm bound instead");
  return select_witness(cone_op_window(cone, P));
}

/// Finds the witness for a SufficientOnlyBounded pure-norm tube tuple.
inline OkikioluCertificate find_certificate_tube_op(const Cone& cone, const TubeOpParams& P) {
  Verdict v = decide_tube_op_purenorm(cone, P);
  if (v.status != BoundednessStatus::SufficientOnlyBounded)
    throw std::invalid_argument("find_certificate_tube_op: sufficiency conditions do not hold");
  return select_witness(tube_op_window(cone, P));
}

/// Dilates of the identity plus a few random interior points; the dilates
/// expose homogeneity errors, the random points frame errors.
inline std::vector<ConePoint> default_verification_samples(const Cone& cone,
                                                           unsigned seed = 101,
                                                           int n_random = 3) {
  std::vector<ConePoint> out;
  for (double lambda : {0.25, 0.5, 1.0, 2.0, 4.0}) out.push_back(lambda * identity(cone));
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n_random; ++i) out.push_back(random_cone_point(cone, rng));
  return out;
}

struct CertificateVerification {
  double M1 = 0.0, M2 = 0.0;
  double ratio_spread_1 = 0.0, ratio_spread_2 = 0.0;  // (max - min) / mid over samples
  double quad_rel_err = 0.0;
  double sup_condition_max = 0.0;  // p = 1 branch only
  bool converged = true;
  double bound() const { return M1 * M2; }
};

/// Numerically verifies both Schur-test conditions for a cone certificate:
/// the two test integrals must reproduce Delta^{-p'v} and Delta^{-qu} with
/// sample-independent constants. Returns the observed constants as
/// (M1, M2); the operator norm is then at most M1 M2.
inline CertificateVerification verify_certificate_cone_op(const Cone& cone, const ConeOpParams& P,
                                                          const OkikioluCertificate& cert,
                                                          const QuadratureConfig& cfg,
                                                          std::vector<ConePoint> samples = {}) {
  const double nr = cone.nr();
  const double B = P.beta - P.nu + nr;
  if (samples.empty()) samples = default_verification_samples(cone);
  CertificateVerification out;

  auto ratio_stats = [](const std::vector<double>& ratios, double& spread) {
    double lo = kInf, hi = -kInf;
    for (double r : ratios) { lo = std::min(lo, r); hi = std::max(hi, r); }
    spread = (hi - lo) / std::max(0.5 * (hi + lo), 1e-300);
    return hi;
  };

  // second condition (shared by both branches):
  //   int K(y,x)^{(1-t)q} Delta^{-qv}(y) dnu(y) = C2 Delta^{-qu}(x)
  {
    double s2 = -(1.0 - cert.t) * P.q * P.gamma;
    double t2 = (1.0 - cert.t) * P.q * P.alpha - P.q * cert.v + P.mu;
    auto q2 = ConeBetaQuery::scalars(cone, s2, t2);
    if (!cone_beta_converges(q2))
      throw std::domain_error("verify_certificate_cone_op: second test integral diverges");
    std::vector<double> ratios;
    for (const auto& x : samples) {
      auto est = cone_beta_integral(q2, x, cfg);
      out.converged = out.converged && est.converged;
      out.quad_rel_err = std::max(out.quad_rel_err, est.rel_err);
      double det_x = determinant(cone, x);
      double val = pow_product({{det_x, (1.0 - cert.t) * P.q * B}}) * est.value;
      ratios.push_back(val * pow_product({{det_x, P.q * cert.u}}));
    }
    double c2 = ratio_stats(ratios, out.ratio_spread_2);
    out.M2 = std::pow(c2, 1.0 / P.q);
  }

  if (cert.kind == CertificateKind::ConeS_p1) {
    // sup condition: phi1(x) K(y,x)^t <= C1 phi2(y), with C1 = 1 in exact
    // arithmetic for this construction
    double sup = 0.0;
    for (const auto& x : samples) {
      for (const auto& y : samples) {
        ConePoint yx = y + x;
        double val = pow_product({{determinant(cone, x), -cert.u + cert.t * B},
                                  {determinant(cone, yx), -P.gamma * cert.t},
                                  {determinant(cone, y), cert.v + cert.t * P.alpha}});
        sup = std::max(sup, val);
      }
    }
    out.sup_condition_max = sup;
    out.M1 = sup;
    out.ratio_spread_1 = 0.0;
    return out;
  }

  const double pp = conjugate_exponent(P.p);
  double s1 = -cert.t * pp * P.gamma;
  double t1 = cert.t * pp * B - pp * cert.u + P.nu;
  auto q1 = ConeBetaQuery::scalars(cone, s1, t1);
  if (!cone_beta_converges(q1))
    throw std::domain_error("verify_certificate_cone_op: first test integral diverges");
  std::vector<double> ratios;
  for (const auto& y : samples) {
    auto est = cone_beta_integral(q1, y, cfg);
    out.converged = out.converged && est.converged;
    out.quad_rel_err = std::max(out.quad_rel_err, est.rel_err);
    double det_y = determinant(cone, y);
    double val = pow_product({{det_y, cert.t * pp * P.alpha}}) * est.value;
    ratios.push_back(val * pow_product({{det_y, pp * cert.v}}));
  }
  double c1 = ratio_stats(ratios, out.ratio_spread_1);
  out.M1 = std::pow(c1, 1.0 / pp);
  return out;
}

/// Sup-norm bound for the q = inf branch: the Hoelder argument shows
/// Delta^alpha(y) (int Delta^{-p'gamma}(y+x) Delta^{p'(beta-nu+n/r)+nu-n/r}(x) dx)^{1/p'}
/// is constant in y; returns that constant (the operator norm bound).
struct SupNormBound {
  double value = 0.0;
  double spread = 0.0;
  bool converged = true;
};

inline SupNormBound supnorm_bound_cone_op(const Cone& cone, const ConeOpParams& P,
                                          const QuadratureConfig& cfg,
                                          std::vector<ConePoint> samples = {}) {
  Verdict v = decide_cone_op(cone, P);
  if (v.theorem != "2.3" || v.status != BoundednessStatus::Bounded)
    throw std::domain_error("supnorm_bound_cone_op: needs a Bounded q = inf tuple");
  const double nr = cone.nr();
  const double pp = conjugate_exponent(P.p);
  double s = -pp * P.gamma;
  double t = pp * (P.beta - P.nu + nr) + P.nu;
  auto q = ConeBetaQuery::scalars(cone, s, t);
  if (!cone_beta_converges(q))
    throw std::domain_error("supnorm_bound_cone_op: bounding integral diverges");
  if (samples.empty()) samples = default_verification_samples(cone);
  SupNormBound out;
  double lo = kInf, hi = -kInf;
  for (const auto& y : samples) {
    auto est = cone_beta_integral(q, y, cfg);
    out.converged = out.converged && est.converged;
    double w = pow_product({{determinant(cone, y), P.alpha}}) * std::pow(est.value, 1.0 / pp);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  out.value = hi;
  out.spread = (hi - lo) / std::max(0.5 * (hi + lo), 1e-300);
  return out;
}

/// Generic Schur/Okikiolu condition checker for arbitrary kernels, test
/// functions and weights. For p > 1 both conditions are integrals; for
/// p = 1 the first condition is a sampled essential sup. Returns the
/// smallest constants observed on the sample set; the implied norm bound
/// is M1 * M2.
struct OkikioluInput {
  std::function<double(const ConePoint& y, const ConePoint& x)> kernel;  // K(y, x)
  std::function<double(const ConePoint&)> phi1, phi2;
  double t = 0.5;
  double p = 2.0;      // source exponent (1 allowed)
  double r_exp = 2.0;  // target exponent
  std::function<double(const ConePoint&)> mu_weight;  // input measure density
  std::function<double(const ConePoint&)> nu_weight;  // output measure density
  std::vector<ConePoint> samples_x, samples_y;
};

struct OkikioluReport {
  double M1 = 0.0, M2 = 0.0;
  bool ok = false;
  std::string witness;
  double bound() const { return M1 * M2; }
};

inline OkikioluReport okikiolu_check(const Cone& cone, const OkikioluInput& in,
                                     const QuadratureConfig& cfg) {
  if (!(in.t > 0.0) || !(in.t <= 1.0))
    throw std::invalid_argument("okikiolu_check: t must lie in (0, 1]");
  if (in.samples_x.empty() || in.samples_y.empty())
    throw std::invalid_argument("okikiolu_check: empty sample sets");
  OkikioluReport out;
  out.ok = true;

  auto fail = [&](const std::string& what, const ConePoint& at) {
    out.ok = false;
    std::ostringstream os;
    os << what << " at (";
    for (std::size_t i = 0; i < at.size(); ++i) os << (i ? "," : "") << at[i];
    os << ")";
    if (out.witness.empty()) out.witness = os.str();
  };

  if (in.p > 1.0) {
    double qq = conjugate_exponent(in.p);
    double c1 = 0.0;
    for (const auto& y : in.samples_y) {
      auto f = [&](const ConePoint& x, double) {
        return std::pow(in.kernel(y, x), in.t * qq) * std::pow(in.phi1(x), qq) * in.mu_weight(x);
      };
      auto est = integrate_cone(cone, f, cfg);
      if (est.diverging || !std::isfinite(est.value)) { fail("first condition diverges", y); continue; }
      c1 = std::max(c1, est.value / std::pow(in.phi2(y), qq));
    }
    out.M1 = std::pow(c1, 1.0 / qq);
  } else {
    double c1 = 0.0;
    for (const auto& x : in.samples_x)
      for (const auto& y : in.samples_y) {
        double val = in.phi1(x) * std::pow(in.kernel(y, x), in.t) / in.phi2(y);
        if (!std::isfinite(val)) { fail("sup condition not finite", x); continue; }
        c1 = std::max(c1, val);
      }
    out.M1 = c1;
  }

  double c2 = 0.0;
  for (const auto& x : in.samples_x) {
    auto f = [&](const ConePoint& y, double) {
      return std::pow(in.kernel(y, x), (1.0 - in.t) * in.r_exp) * std::pow(in.phi2(y), in.r_exp) *
             in.nu_weight(y);
    };
    auto est = integrate_cone(cone, f, cfg);
    if (est.diverging || !std::isfinite(est.value)) { fail("second condition diverges", x); continue; }
    c2 = std::max(c2, est.value / std::pow(in.phi1(x), in.r_exp));
  }
  out.M2 = std::pow(c2, 1.0 / in.r_exp);
  return out;
}

/// Verifies the tube certificate: the two tube test integrals J1, J2 must
/// reproduce Delta^{-p'v}(Im z) and Delta^{-qu}(Im w) with constant ratios
/// over the sample set of imaginary parts.
inline CertificateVerification verify_certificate_tube_op(const Cone& cone, const TubeOpParams& P,
                                                          const OkikioluCertificate& cert,
                                                          const QuadratureConfig& cfg,
                                                          std::vector<ConePoint> samples = {}) {
  if (cert.kind != CertificateKind::TubeTplus)
    throw std::invalid_argument("verify_certificate_tube_op: wrong certificate kind");
  const double nr = cone.nr();
  const double pp = conjugate_exponent(P.p);
  const double B = P.beta - P.nu + nr;
  if (samples.empty())
    samples = {0.5 * identity(cone), identity(cone), 1.5 * identity(cone), 2.0 * identity(cone),
               3.0 * identity(cone)};
  CertificateVerification out;

  double A1 = cert.t * pp * (P.gamma + nr);
  double B1 = cert.t * pp * B - pp * cert.u + P.nu;
  double A2 = (1.0 - cert.t) * P.q * (P.gamma + nr);
  double B2 = (1.0 - cert.t) * P.q * P.alpha - P.q * cert.v + P.mu;
  if (!det_power_in_mixed_norm({cone, A1, 1.0, 1.0, B1}) ||
      !det_power_in_mixed_norm({cone, A2, 1.0, 1.0, B2}))
    throw std::domain_error("verify_certificate_tube_op: a test integral diverges");

  auto kernel_mag = [&](const ConePoint& ysum, const std::vector<double>& xw) {
    return std::abs(complex_determinant(cone, ysum.x, xw));
  };

  auto ratio_stats = [](const std::vector<double>& ratios, double& spread) {
    double lo = kInf, hi = -kInf;
    for (double r : ratios) { lo = std::min(lo, r); hi = std::max(hi, r); }
    spread = (hi - lo) / std::max(0.5 * (hi + lo), 1e-300);
    return hi;
  };

  {
    std::vector<double> ratios;
    for (const auto& y : samples) {
      auto f = [&](const TubePoint& wpt) {
        ConePoint ysum = y + wpt.y;
        return pow_product({{kernel_mag(ysum, wpt.x), -A1},
                            {determinant(cone, wpt.y), B1 - nr}});
      };
      auto est = integrate_tube(cone, f, cfg);
      out.converged = out.converged && est.converged;
      out.quad_rel_err = std::max(out.quad_rel_err, est.rel_err);
      double det_y = determinant(cone, y);
      ratios.push_back(pow_product({{det_y, cert.t * pp * P.alpha + pp * cert.v}}) * est.value);
    }
    double c1 = ratio_stats(ratios, out.ratio_spread_1);
    out.M1 = std::pow(c1, 1.0 / pp);
  }
  {
    std::vector<double> ratios;
    for (const auto& x : samples) {
      auto f = [&](const TubePoint& zpt) {
        ConePoint ysum = x + zpt.y;
        return pow_product({{kernel_mag(ysum, zpt.x), -A2},
                            {determinant(cone, zpt.y), B2 - nr}});
      };
      auto est = integrate_tube(cone, f, cfg);
      out.converged = out.converged && est.converged;
      out.quad_rel_err = std::max(out.quad_rel_err, est.rel_err);
      double det_x = determinant(cone, x);
      ratios.push_back(pow_product({{det_x, (1.0 - cert.t) * P.q * B + P.q * cert.u}}) * est.value);
    }
    double c2 = ratio_stats(ratios, out.ratio_spread_2);
    out.M2 = std::pow(c2, 1.0 / P.q);
  }
  return out;
}

}  // namespace conebound
