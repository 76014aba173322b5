#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace conebound {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846264338327950288;

inline bool is_inf(double x) { return std::isinf(x); }

/// Hoelder conjugate: p' = p/(p-1), with 1' = inf and inf' = 1.
inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// Positive part (x)_+ used in the sharp-exponent quotients.
inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

/// a / (x)_+ with the convention that the quotient is +inf when (x)_+ = 0.
inline double quotient_pospart(double a, double x) {
  double d = positive_part(x);
  if (d == 0.0) return kInf;
  return a / d;
}

/// exp(sum_i e_i log b_i) for positive bases: evaluates products of large
/// powers without intermediate overflow; the result over/underflows only
/// when the product itself does.
inline double pow_product(std::initializer_list<std::pair<double, double>> base_exp) {
  double L = 0.0;
  for (const auto& [b, e] : base_exp) {
    if (e == 0.0) continue;
    if (b <= 0.0) return 0.0;
    L += e * std::log(b);
  }
  return std::exp(L);
}

namespace detail {

/// Pairwise summation: deterministic and accurate regardless of length.
inline double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

inline unsigned thread_count() {
  if (const char* env = std::getenv("CONEBOUND_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

/// Index-parallel loop. Each index writes only its own slot, so results do
/// not depend on scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned workers = thread_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  workers = std::min<std::size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic_size_t next{0};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need >= 2 paired points");
  std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace conebound
