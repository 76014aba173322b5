#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "conebound/cone.hpp"
#include "conebound/util.hpp"

namespace conebound {

enum class MapKind { ExpSubstitution, Compactify };

/// Controls for the deterministic improper-integral machinery. `truncation`
/// is the initial half-width of the window in the *mapped* coordinate
/// (log-scale for cone directions), and divergence is probed on doubling
/// windows.
struct QuadratureConfig {
  int levels = 3;                  ///< step-halving refinement levels (>= 2)
  MapKind map = MapKind::ExpSubstitution;
  double truncation = 12.0;        ///< initial mapped half-width
  double target_rel_err = 1e-8;
  int mc_samples = 0;              ///< Monte-Carlo fallback sample count
  int angular_nodes = 32;          ///< Lorentz angular grid (multiple of 4)
  bool axisymmetric = false;       ///< integrand invariant under rotations about the cone axis
  double max_halfwidth = 700.0;    ///< cap on mapped window growth

  QuadratureConfig with_target(double t) const {
    QuadratureConfig c = *this;
    c.target_rel_err = t;
    return c;
  }
};

struct QuadratureEstimate {
  double value = 0.0;
  double rel_err = kInf;   ///< last-two-level Richardson difference, relative
  bool converged = false;
  bool diverging = false;
};

/// Config tuned for divergence probing: coarse tolerance, wide growth room.
inline QuadratureConfig divergence_config() {
  QuadratureConfig cfg;
  cfg.levels = 2;
  cfg.target_rel_err = 1e-3;
  cfg.truncation = 12.0;
  cfg.max_halfwidth = 800.0;
  return cfg;
}

namespace detail {

/// Compensated accumulator; summation order is fixed by construction, so
/// results are bit-identical across runs and thread counts.
struct Accum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double get() const { return s; }
};

struct DivergeSignal {};  // thrown by nested integrands to abort the outer sweep

/// Collects inner-integral accuracy; entries whose magnitude is negligible
/// against the largest contribution do not affect the verdict (tail rings
/// cancel to roundoff and report meaningless relative errors).
struct NestedAgg {
  std::vector<std::pair<double, QuadratureEstimate>> entries;  // (|value|, estimate)
  void merge(const QuadratureEstimate& e) { entries.emplace_back(std::fabs(e.value), e); }
  double worst_rel() const {
    double vmax = 0.0;
    for (const auto& [m, e] : entries) vmax = std::max(vmax, m);
    double worst = 0.0;
    for (const auto& [m, e] : entries)
      if (m >= 1e-9 * vmax) worst = std::max(worst, e.rel_err);
    return worst;
  }
  bool nonconverged() const {
    double vmax = 0.0;
    for (const auto& [m, e] : entries) vmax = std::max(vmax, m);
    for (const auto& [m, e] : entries)
      if (m >= 1e-9 * vmax && !e.converged) return true;
    return false;
  }
};

struct LineOptions {
  bool two_sided = true;
  /// Window-doubling marks for divergence detection: geometric marks double
  /// the mapped half-width; arithmetic marks step by log 2, which doubles
  /// the *physical* width when the mapped coordinate is itself a log.
  bool arithmetic_marks = false;
  /// Per-side extension caps; NaN means use cfg.max_halfwidth.
  double cap_pos = std::numeric_limits<double>::quiet_NaN();
  double cap_neg = std::numeric_limits<double>::quiet_NaN();
};

/// Trapezoidal sum over a mapped axis: adaptive window extension with
/// geometric-growth divergence detection, then step-halving refinement on
/// the settled window.
template <class G>
QuadratureEstimate integrate_line(G&& g, const QuadratureConfig& cfg, const LineOptions& opt) {
  const double h0 = 0.5;
  const double target = cfg.target_rel_err;
  const double cap_pos = std::isnan(opt.cap_pos) ? cfg.max_halfwidth : opt.cap_pos;
  const double cap_neg = std::isnan(opt.cap_neg) ? cfg.max_halfwidth : opt.cap_neg;
  const double T = std::min(std::max(2.0, cfg.truncation), std::min(cap_pos, cap_neg));
  const double block = 8.0;
  const double mark_step = std::log(2.0);

  QuadratureEstimate out;
  Accum acc;
  bool nan_seen = false;

  auto eval = [&](double u) {
    double v = g(u);
    if (std::isnan(v)) { nan_seen = true; return 0.0; }
    return v;
  };

  // level-0 base window
  double h = h0;
  {
    double w0 = eval(0.0) * (opt.two_sided ? 1.0 : 0.5);
    acc.add(w0 * h);
  }
  long k = 1;
  for (; k * h <= T; ++k) {
    acc.add(eval(k * h) * h);
    if (opt.two_sided) acc.add(eval(-k * h) * h);
  }
  double L_right = (k - 1) * h;
  double L_left = opt.two_sided ? L_right : 0.0;

  double next_mark = opt.arithmetic_marks ? T + mark_step : T * 2.0;
  int growth_streak = 0;
  double prev_partial = acc.get();

  auto note_mark = [&](double width) {
    while (width >= next_mark && !out.diverging) {
      double cur = acc.get();
      if (std::isinf(cur)) { out.diverging = true; return; }
      double denom = std::fabs(prev_partial);
      double ratio = denom > 0 ? std::fabs(cur) / denom : (std::fabs(cur) > 0 ? kInf : 1.0);
      if (ratio >= 1.5) ++growth_streak; else growth_streak = 0;
      if (growth_streak >= 3) { out.diverging = true; return; }
      prev_partial = cur;
      if (opt.arithmetic_marks) next_mark += mark_step; else next_mark *= 2.0;
    }
  };

  auto extend = [&](int dir, double& L) -> bool {  // true when the side settled
    double prev_chunk = -1.0;
    const double cap = dir > 0 ? cap_pos : cap_neg;
    auto edge_settled = [&](double edge_value) {
      // at the cap the chunk extrapolation is dominated by its first nodes;
      // judge the lost tail by the boundary node instead
      double base = std::max(std::fabs(acc.get()), 1e-300);
      double thresh = std::max(target / 8.0, 1e-16) * base;
      return std::fabs(edge_value) * 8.0 * h <= thresh;
    };
    for (;;) {
      long steps = static_cast<long>(block / h);
      long cap_steps = static_cast<long>(std::floor((cap - L) / h));
      steps = std::min(steps, cap_steps);
      if (steps <= 0) return edge_settled(eval(dir * L));
      Accum chunk;
      double last_node = 0.0;
      for (long j = 1; j <= steps; ++j) {
        double v = eval(dir * (L + j * h));
        chunk.add(v * h);
        acc.add(v * h);
        last_node = v;
        // divergence marks are checked per node so that a single wide
        // chunk cannot swallow several window doublings
        note_mark(std::max(std::max(L_left, L_right), L + j * h));
        if (out.diverging) return false;
        if (std::isinf(acc.get())) { out.diverging = true; return false; }
      }
      L += steps * h;
      double cmag = std::fabs(chunk.get());
      double base = std::max(std::fabs(acc.get()), 1e-300);
      double thresh = std::max(target / 8.0, 1e-16) * base;
      double tail_est;
      if (prev_chunk > 0.0 && cmag < prev_chunk) {
        double rho = cmag / prev_chunk;
        tail_est = cmag * rho / (1.0 - rho);
      } else {
        tail_est = cmag * 8.0;
      }
      if (cmag == 0.0 && prev_chunk == 0.0) return true;
      if (tail_est <= thresh) return true;
      if (L >= cap) return edge_settled(last_node);
      prev_chunk = cmag;
    }
  };

  bool settled_r = extend(+1, L_right);
  if (out.diverging) { out.value = acc.get(); return out; }
  bool settled_l = opt.two_sided ? extend(-1, L_left) : true;
  if (out.diverging) { out.value = acc.get(); return out; }

  if (std::isinf(acc.get())) {
    out.value = acc.get();
    out.diverging = true;
    return out;
  }

  // step-halving refinement on the fixed window
  double current = acc.get();
  double rel = kInf;
  int levels = std::max(2, cfg.levels);
  for (int lvl = 1; lvl < levels; ++lvl) {
    double hh = h / 2.0;
    Accum mids;
    double lo = opt.two_sided ? -L_left : 0.0;
    long m = static_cast<long>(std::llround((L_right - lo) / h));
    for (long j = 0; j < m; ++j) mids.add(eval(lo + (j + 0.5) * h) * hh);
    double refined = current / 2.0 + mids.get();
    double denom = std::max(std::fabs(refined), 1e-300);
    rel = std::fabs(refined - current) / denom;
    current = refined;
    h = hh;
    if (rel <= target / 4.0) break;
  }

  out.value = current;
  out.rel_err = rel;
  out.converged = !nan_seen && settled_r && settled_l && rel <= target;
  if (nan_seen) out.rel_err = kInf;
  return out;
}

/// tanh-sinh rule on (a, b): nodes never touch the endpoints and the
/// transformed integrand decays double-exponentially, so endpoint
/// singularities and seam discontinuities cost nothing.
template <class G>
QuadratureEstimate integrate_de_finite(G&& g, double a, double b, const QuadratureConfig& cfg) {
  const double mid = 0.5 * (a + b);
  const double halfspan = 0.5 * (b - a);
  auto transformed = [&](double t) -> double {
    double s = 0.5 * kPi * std::sinh(t);
    double u = std::exp(-2.0 * std::fabs(s));
    double dist = (b - a) * u / (1.0 + u);  // distance from the nearer endpoint
    if (dist == 0.0) return 0.0;
    double x = s > 0.0 ? b - dist : (s < 0.0 ? a + dist : mid);
    double w = halfspan * 0.5 * kPi * std::cosh(t) * 4.0 * u / ((1.0 + u) * (1.0 + u));
    if (w == 0.0 || !std::isfinite(w)) return 0.0;
    return g(x) * w;
  };
  QuadratureConfig inner = cfg;
  inner.truncation = 4.0;
  inner.max_halfwidth = 7.0;
  return integrate_line(transformed, inner, LineOptions{});
}

/// Midpoint rule on a fixed compact interval (a, b) with step halving; used
/// by the Compactify map, whose endpoints may carry integrable singularities.
template <class G>
QuadratureEstimate integrate_compact(G&& g, double a, double b, const QuadratureConfig& cfg) {
  QuadratureEstimate out;
  long n = 64;
  double prev = 0.0;
  bool have_prev = false;
  int rounds = std::max(2, cfg.levels) + 4;
  for (int lvl = 0; lvl < rounds; ++lvl) {
    double h = (b - a) / static_cast<double>(n);
    Accum acc;
    for (long j = 0; j < n; ++j) {
      double v = g(a + (j + 0.5) * h);
      if (std::isnan(v)) v = 0.0;
      acc.add(v * h);
    }
    double cur = acc.get();
    if (have_prev) {
      double rel = std::fabs(cur - prev) / std::max(std::fabs(cur), 1e-300);
      out.rel_err = rel;
      if (rel <= cfg.target_rel_err) {
        out.value = cur;
        out.converged = true;
        return out;
      }
    }
    prev = cur;
    have_prev = true;
    n *= 2;
  }
  out.value = prev;
  out.converged = false;
  return out;
}

}  // namespace detail

/// Integrates f over the open cone. The integrand receives the point and
/// the exact determinant from the boundary-aligned parametrization; use the
/// supplied value for Delta(y) powers, because recomputing y1^2 - |ybar|^2
/// near the boundary cancels catastrophically.
///
/// HalfLine: y = e^u over the real line. Lorentz(3): polar coordinates
/// (y1, rho, theta) with rho = y1 (1 - e^-w) and w = e^sigma, so the
/// determinant is y1^2 e^-w (2 - e^-w) exactly and both sigma tails decay
/// exponentially. SPD(2) goes through the linear identification with
/// Lorentz(3) (volume factor 2). Lorentz(n > 3) falls back to importance-
/// sampled Monte Carlo.
template <class F>
QuadratureEstimate integrate_cone(const Cone& cone, F&& f, const QuadratureConfig& cfg);

namespace detail {

template <class F>
QuadratureEstimate integrate_lorentz3(F&& f, const QuadratureConfig& cfg) {
  NestedAgg agg;
  QuadratureConfig ring_cfg = cfg;
  ring_cfg.target_rel_err = cfg.target_rel_err * 0.2;
  // the exp-of-exp profile along sigma needs a finer step than the outer
  // radial sweep; the early break keeps easy rings cheap
  ring_cfg.levels = std::min(cfg.levels + 3, 9);
  ring_cfg.truncation = std::log(std::max(4.0, std::min(cfg.truncation, 60.0)));
  LineOptions ring_opt;
  ring_opt.two_sided = true;
  ring_opt.arithmetic_marks = true;  // marks double the physical depth
  // physical boundary depth w = e^sigma; w beyond ~500 underflows e^-w
  // weights and contributes nothing a convergent integral needs
  ring_opt.cap_pos = 6.2;

  const int K = std::max(4, cfg.angular_nodes);
  std::vector<double> cth(static_cast<std::size_t>(K)), sth(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    double th = 2.0 * kPi * (j + 0.5) / K;
    cth[static_cast<std::size_t>(j)] = std::cos(th);
    sth[static_cast<std::size_t>(j)] = std::sin(th);
  }

  auto outer = [&](double u) -> double {
    double y1 = std::exp(u);
    auto ring = [&](double sigma) -> double {
      double w = std::exp(sigma);
      double emw = std::exp(-w);
      double rho = y1 * (1.0 - emw);
      double det = y1 * y1 * emw * (2.0 - emw);
      double jac = y1 * emw * rho * w;  // drho/dw * rho(polar) * dw/dsigma
      if (jac == 0.0) return 0.0;
      double tsum;
      ConePoint pt{y1, 0.0, 0.0};
      if (cfg.axisymmetric) {
        pt.x[1] = rho;
        tsum = 2.0 * kPi * f(pt, det);
      } else {
        Accum a;
        for (int j = 0; j < K; ++j) {
          pt.x[1] = rho * cth[static_cast<std::size_t>(j)];
          pt.x[2] = rho * sth[static_cast<std::size_t>(j)];
          a.add(f(pt, det));
        }
        tsum = a.get() * (2.0 * kPi / K);
      }
      return jac * tsum;
    };
    QuadratureEstimate inner = integrate_line(ring, ring_cfg, ring_opt);
    if (inner.diverging) throw DivergeSignal{};
    agg.merge(inner);
    return y1 * inner.value;
  };

  QuadratureEstimate est;
  try {
    est = integrate_line(outer, cfg, LineOptions{});
  } catch (const DivergeSignal&) {
    est.diverging = true;
    est.converged = false;
    return est;
  }
  est.rel_err = est.rel_err + agg.worst_rel();
  est.converged = est.converged && !agg.nonconverged() && est.rel_err <= cfg.target_rel_err * 4.0;
  return est;
}

template <class F>
QuadratureEstimate integrate_lorentz_mc(const Cone& cone, F&& f, const QuadratureConfig& cfg) {
  int n = cone.n;
  long N = cfg.mc_samples > 0 ? cfg.mc_samples : 100000;
  std::mt19937_64 rng(0xC0FFEEuLL);
  std::gamma_distribution<double> gam(2.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double sphere_area = 2.0 * std::pow(kPi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n - 1));

  auto gamma_pdf = [](double x) { return x * std::exp(-x); };  // Gamma(2,1)

  Accum sum, sumsq;
  std::vector<double> dir(static_cast<std::size_t>(n - 1));
  ConePoint y(std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (long i = 0; i < N; ++i) {
    double l1 = gam(rng), l2 = gam(rng);
    if (l1 < l2) std::swap(l1, l2);
    double rad = 0.5 * (l1 - l2);
    double norm2 = 0.0;
    for (auto& c : dir) { c = gauss(rng); norm2 += c * c; }
    double nrm = std::sqrt(norm2);
    if (nrm == 0.0) { dir[0] = 1.0; nrm = 1.0; }
    y.x[0] = 0.5 * (l1 + l2);
    for (int j = 1; j < n; ++j) y.x[static_cast<std::size_t>(j)] = rad * dir[static_cast<std::size_t>(j - 1)] / nrm;
    double det = l1 * l2;
    double dens = 2.0 * gamma_pdf(l1) * gamma_pdf(l2) / sphere_area;
    double w = f(y, det) * 0.5 * std::pow(rad, n - 2) / dens;
    sum.add(w);
    sumsq.add(w * w);
  }
  QuadratureEstimate est;
  double mean = sum.get() / static_cast<double>(N);
  double var = std::max(0.0, sumsq.get() / static_cast<double>(N) - mean * mean);
  est.value = mean;
  est.rel_err = std::sqrt(var / static_cast<double>(N)) / std::max(std::fabs(mean), 1e-300);
  est.converged = est.rel_err <= cfg.target_rel_err;
  return est;
}

}  // namespace detail

template <class F>
QuadratureEstimate integrate_cone(const Cone& cone, F&& f, const QuadratureConfig& cfg) {
  switch (cone.kind) {
    case ConeKind::HalfLine: {
      auto g = [&](double u) {
        double y = std::exp(u);
        ConePoint pt{y};
        return f(pt, y) * y;
      };
      return detail::integrate_line(g, cfg, detail::LineOptions{});
    }
    case ConeKind::Lorentz:
      if (cone.n == 3) return detail::integrate_lorentz3(f, cfg);
      if (cfg.mc_samples > 0 || cone.n <= 6)
        return detail::integrate_lorentz_mc(cone, f, cfg);
      throw std::invalid_argument("integrate_cone: Lorentz n > 6 unsupported");
    case ConeKind::Spd: {
      if (cone.r != 2)
        throw std::invalid_argument("integrate_cone: only SPD(2) has a deterministic grid");
      auto g = [&](const ConePoint& u, double det) {
        return f(lorentz3_to_spd2(u), det);
      };
      QuadratureEstimate est = detail::integrate_lorentz3(g, cfg);
      est.value *= 2.0;  // packed-entry volume is twice the Lorentz volume
      return est;
    }
  }
  throw std::logic_error("unreachable");
}

/// True when partial integrals over doubling windows keep growing
/// geometrically (three successive doublings each >= 1.5x). Declared, never
/// proven.
template <class F>
bool detect_divergence(const Cone& cone, F&& f, const QuadratureConfig& cfg) {
  return integrate_cone(cone, f, cfg).diverging;
}

/// Piecewise half-line integration with interior breakpoints (for
/// integrands with indicator factors). Finite pieces use tanh-sinh; the
/// unbounded piece uses the shifted exponential map y = p + e^u.
template <class F>
QuadratureEstimate integrate_halfline_segmented(F&& f, std::vector<double> breakpoints,
                                                const QuadratureConfig& cfg) {
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<double> pts;
  for (double b : breakpoints)
    if (b > 0.0 && std::isfinite(b) && (pts.empty() || b > pts.back() * (1.0 + 1e-14)))
      pts.push_back(b);

  if (pts.empty()) {
    auto g = [&](double u) { double y = std::exp(u); return f(y) * y; };
    return detail::integrate_line(g, cfg, detail::LineOptions{});
  }

  detail::Accum total;
  double rel = 0.0;
  bool conv = true, div = false;

  {  // (0, p0)
    auto e = detail::integrate_de_finite(f, 0.0, pts.front(), cfg);
    total.add(e.value);
    rel = std::max(rel, e.rel_err);
    conv = conv && e.converged;
    div = div || e.diverging;
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto e = detail::integrate_de_finite(f, pts[i], pts[i + 1], cfg);
    total.add(e.value);
    rel = std::max(rel, e.rel_err);
    conv = conv && e.converged;
  }
  {  // (pk, inf)
    double p = pts.back();
    auto g = [&](double u) { double y = p + std::exp(u); return f(y) * std::exp(u); };
    auto e = detail::integrate_line(g, cfg, detail::LineOptions{});
    total.add(e.value);
    rel = std::max(rel, e.rel_err);
    conv = conv && e.converged;
    div = div || e.diverging;
  }
  QuadratureEstimate out;
  out.value = total.get();
  out.rel_err = rel;
  out.converged = conv && !div;
  out.diverging = div;
  return out;
}

/// Iterated integral over the tube R^n + i Omega: inner R^n integral with a
/// decay-aware map per coordinate (sinh by default, tan for Compactify),
/// outer cone integral through integrate_cone.
template <class F>
QuadratureEstimate integrate_tube(const Cone& cone, F&& f, const QuadratureConfig& cfg) {
  if (cone.n > 3) throw std::invalid_argument("integrate_tube: n <= 3 only");
  detail::NestedAgg agg;
  QuadratureConfig inner_cfg = cfg;
  inner_cfg.target_rel_err = cfg.target_rel_err * 0.2;

  auto inner_x = [&](const ConePoint& y) -> double {
    int n = cone.n;
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::function<double(int)> level = [&](int dim) -> double {
      if (dim == n) {
        TubePoint z{x, y};
        return f(z);
      }
      QuadratureEstimate e;
      if (cfg.map == MapKind::Compactify) {
        auto g = [&](double phi) {
          double c = std::cos(phi);
          x[static_cast<std::size_t>(dim)] = std::tan(phi);
          return level(dim + 1) / (c * c);
        };
        e = detail::integrate_compact(g, -kPi / 2.0, kPi / 2.0, inner_cfg);
      } else {
        auto g = [&](double v) {
          x[static_cast<std::size_t>(dim)] = std::sinh(v);
          return level(dim + 1) * std::cosh(v);
        };
        e = detail::integrate_line(g, inner_cfg, detail::LineOptions{});
      }
      if (e.diverging) throw detail::DivergeSignal{};
      agg.merge(e);
      return e.value;
    };
    return level(0);
  };

  QuadratureEstimate est;
  try {
    est = integrate_cone(cone, [&](const ConePoint& y, double) { return inner_x(y); }, cfg);
  } catch (const detail::DivergeSignal&) {
    est.diverging = true;
    est.converged = false;
    return est;
  }
  est.rel_err = est.rel_err + agg.worst_rel();
  est.converged = est.converged && !agg.nonconverged();
  return est;
}

}  // namespace conebound
