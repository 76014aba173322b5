#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "conebound/cone.hpp"
#include "conebound/quadrature.hpp"
#include "conebound/util.hpp"

namespace conebound {

/// log Delta^a(p), optionally with the exact determinant supplied by the
/// quadrature parametrization (used for the top minor).
inline double log_gen_power(const Cone& cone, const GeneralizedPower& a, const ConePoint& p,
                            double det_hint) {
  if (a.size() != static_cast<std::size_t>(cone.r))
    throw std::invalid_argument("log_gen_power: exponent length != rank");
  if (a.is_scalar()) {
    if (a[0] == 0.0) return 0.0;
    return a[0] * std::log(det_hint);
  }
  double L = 0.0;
  for (int j = 1; j <= cone.r; ++j) {
    double e = a[static_cast<std::size_t>(j - 1)] -
               (j < cone.r ? a[static_cast<std::size_t>(j)] : 0.0);
    if (e == 0.0) continue;
    double m = (j == cone.r) ? det_hint : principal_minor(cone, j, p);
    L += e * std::log(m);
  }
  return L;
}

namespace detail {

/// Cancellation-free Delta(y + v) for huge y: expands through the bilinear
/// form, whose three terms are all positive on the cone.
struct ShiftedDet {
  Cone cone;
  ConePoint v;
  double det_v;

  ShiftedDet(const Cone& c, ConePoint shift)
      : cone(c), v(std::move(shift)), det_v(determinant(c, v)) {}

  double operator()(const ConePoint& y, double det_y) const {
    switch (cone.kind) {
      case ConeKind::HalfLine:
        return y[0] + v[0];
      case ConeKind::Lorentz: {
        double b = y[0] * v[0];
        for (int j = 1; j < cone.n; ++j) b -= y[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
        return det_y + 2.0 * b + det_v;
      }
      case ConeKind::Spd: {
        if (cone.r == 2) {
          double b = 0.5 * (y[0] * v[2] + y[2] * v[0]) - y[1] * v[1];
          return det_y + 2.0 * b + det_v;
        }
        return determinant(cone, y + v);
      }
    }
    return determinant(cone, y + v);
  }
};

}  // namespace detail

/// The det-power integral over the cone,
///   int_Omega Delta^s(y + v) Delta^{t - n/r}(y) dy = C_{s,t} Delta^{s+t}(v),
/// a Beta-type integral whose constant depends only on the cone and the
/// exponent vectors.
struct ConeBetaQuery {
  Cone cone;
  GeneralizedPower s, t;

  static ConeBetaQuery scalars(const Cone& c, double s_val, double t_val) {
    return ConeBetaQuery{c, GeneralizedPower::scalar(s_val, c.r),
                         GeneralizedPower::scalar(t_val, c.r)};
  }
};

/// Convergence test: for every j = 1..r,
///   t_j > (r-j) d/2  and  s_j + t_j < -(j-1) d/2.
inline bool cone_beta_converges(const ConeBetaQuery& q) {
  int r = q.cone.r;
  double d = q.cone.d;
  if (q.s.size() != static_cast<std::size_t>(r) || q.t.size() != static_cast<std::size_t>(r))
    throw std::invalid_argument("cone_beta_converges: exponent length != rank");
  for (int j = 1; j <= r; ++j) {
    double tj = q.t[static_cast<std::size_t>(j - 1)];
    double sj = q.s[static_cast<std::size_t>(j - 1)];
    if (!(tj > (r - j) * d / 2.0)) return false;
    if (!(sj + tj < -(j - 1) * d / 2.0)) return false;
  }
  return true;
}

/// Exponent of Delta(v) in the closed form: s + t componentwise.
inline GeneralizedPower cone_beta_exponent(const ConeBetaQuery& q) {
  if (!cone_beta_converges(q))
    throw std::domain_error("cone_beta_exponent: divergent parameters");
  return q.s + q.t;
}

/// Numeric evaluation of the integral at a given interior v.
inline QuadratureEstimate cone_beta_integral(const ConeBetaQuery& q, const ConePoint& v,
                                             const QuadratureConfig& cfg) {
  const Cone& cone = q.cone;
  if (!contains(cone, v)) throw std::domain_error("cone_beta_integral: v not in the open cone");
  detail::ShiftedDet shifted(cone, v);
  GeneralizedPower t_shift = q.t + GeneralizedPower::scalar(-cone.nr(), cone.r);
  const bool scalar_s = q.s.is_scalar();
  auto f = [&](const ConePoint& y, double det_y) -> double {
    double det_sh = shifted(y, det_y);
    double L;
    if (scalar_s) {
      L = q.s[0] * std::log(det_sh);
    } else {
      ConePoint yv = y + v;
      L = log_gen_power(cone, q.s, yv, det_sh);
    }
    L += log_gen_power(cone, t_shift, y, det_y);
    return std::exp(L);
  };
  return integrate_cone(cone, f, cfg);
}

/// The constant C_{s,t}: analytic Gamma quotient on the half-line, numeric
/// at v = e otherwise (memoized per cone and exponents).
inline double cone_beta_constant(const ConeBetaQuery& q, const QuadratureConfig& cfg) {
  if (!cone_beta_converges(q))
    throw std::domain_error("cone_beta_constant: divergent parameters");

  if (q.cone.kind == ConeKind::HalfLine) {
    double s = q.s[0], t = q.t[0];
    return std::exp(std::lgamma(t) + std::lgamma(-s - t) - std::lgamma(-s));
  }

  struct Key {
    int kind, n;
    std::vector<double> s, t;
    bool operator<(const Key& o) const {
      return std::tie(kind, n, s, t) < std::tie(o.kind, o.n, o.s, o.t);
    }
  };
  static std::map<Key, std::pair<double, double>> cache;  // key -> (value, rel_err)
  static std::mutex cache_mutex;

  Key key{static_cast<int>(q.cone.kind), q.cone.n, q.s.s, q.t.s};
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end() && it->second.second <= cfg.target_rel_err * 8.0)
      return it->second.first;
  }
  QuadratureEstimate est = cone_beta_integral(q, identity(q.cone), cfg);
  if (est.diverging || !std::isfinite(est.value))
    throw std::runtime_error("cone_beta_constant: quadrature failed to converge");
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, std::make_pair(est.value, est.rel_err));
  }
  return est.value;
}

/// Membership of f(z) = Delta^{-alpha}((z + it)/i) in the mixed-norm space
/// L^{p,q}_nu over the tube, and the exponent of Delta(t) in ||f||^q.
struct MixedNormQuery {
  Cone cone;
  double alpha = 0.0;
  double p = 2.0, q = 2.0;
  double nu = 1.0;
};

inline bool det_power_in_mixed_norm(const MixedNormQuery& q) {
  if (!(q.p >= 1.0) || !(q.q >= 1.0) || std::isinf(q.p) || std::isinf(q.q))
    throw std::invalid_argument("det_power_in_mixed_norm: p, q must be finite and >= 1");
  double nr = q.cone.nr();
  if (!(q.nu > nr - 1.0)) return false;
  double lower = std::max((2.0 * nr - 1.0) / q.p,
                          q.cone.n / (q.cone.r * q.p) + (q.nu + nr - 1.0) / q.q);
  return q.alpha > lower;
}

/// Exponent of Delta(t) in ||f||^q_{p,q,nu}: -q alpha + nq/(rp) + nu.
inline double det_power_norm_exponent(const MixedNormQuery& q) {
  if (!det_power_in_mixed_norm(q))
    throw std::domain_error("det_power_norm_exponent: function not in the space");
  return -q.q * q.alpha + q.cone.n * q.q / (q.cone.r * q.p) + q.nu;
}

}  // namespace conebound
