#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "conebound/util.hpp"

namespace conebound {

enum class ConeKind { HalfLine, Lorentz, Spd };

/// Descriptor of an irreducible symmetric cone from the three supported
/// families: the half-line (0,inf), the Lorentz cone of R^n (n >= 3), and
/// the cone of positive definite symmetric r x r matrices.
///
/// Invariant: (r-1)*d/2 = n/r - 1 holds exactly in each family.
struct Cone {
  ConeKind kind = ConeKind::HalfLine;
  int n = 1;  ///< ambient dimension
  int r = 1;  ///< rank
  double d = 0.0;  ///< structure constant

  static Cone half_line() { return Cone{ConeKind::HalfLine, 1, 1, 0.0}; }

  static Cone lorentz(int n) {
    if (n < 3) throw std::invalid_argument("lorentz: need n >= 3");
    return Cone{ConeKind::Lorentz, n, 2, static_cast<double>(n - 2)};
  }

  static Cone spd(int r) {
    if (r < 1) throw std::invalid_argument("spd: need r >= 1");
    return Cone{ConeKind::Spd, r * (r + 1) / 2, r, 1.0};
  }

  /// n/r as a double; the exponent that drives every integrability bound.
  double nr() const { return static_cast<double>(n) / r; }

  bool operator==(const Cone& o) const {
    return kind == o.kind && n == o.n && r == o.r;
  }

  std::string to_string() const {
    switch (kind) {
      case ConeKind::HalfLine: return "halfline";
      case ConeKind::Lorentz: return "lorentz:" + std::to_string(n);
      case ConeKind::Spd: return "spd:" + std::to_string(r);
    }
    return "?";
  }

  /// Parses "halfline", "lorentz:<n>", "spd:<r>".
  static Cone parse(const std::string& s) {
    if (s == "halfline") return half_line();
    auto colon = s.find(':');
    if (colon != std::string::npos) {
      std::string head = s.substr(0, colon);
      int arg = std::stoi(s.substr(colon + 1));
      if (head == "lorentz") return lorentz(arg);
      if (head == "spd") return spd(arg);
    }
    throw std::invalid_argument("unknown cone spec: " + s);
  }
};

/// A point of the ambient space R^n. SPD points store the n = r(r+1)/2
/// independent entries of the symmetric matrix in row-major upper-triangular
/// order: (y11, y12, ..., y1r, y22, y23, ...).
struct ConePoint {
  std::vector<double> x;

  ConePoint() = default;
  explicit ConePoint(std::vector<double> coords) : x(std::move(coords)) {}
  ConePoint(std::initializer_list<double> coords) : x(coords) {}

  std::size_t size() const { return x.size(); }
  double& operator[](std::size_t i) { return x[i]; }
  double operator[](std::size_t i) const { return x[i]; }
};

inline ConePoint operator+(const ConePoint& a, const ConePoint& b) {
  if (a.size() != b.size()) throw std::invalid_argument("point dimension mismatch");
  ConePoint out = a;
  for (std::size_t i = 0; i < b.size(); ++i) out.x[i] += b[i];
  return out;
}

inline ConePoint operator*(double lambda, const ConePoint& a) {
  ConePoint out = a;
  for (auto& c : out.x) c *= lambda;
  return out;
}

/// Point of the tube domain R^n + i*Omega; `y` must lie in the open cone.
struct TubePoint {
  std::vector<double> x;
  ConePoint y;
};

/// Exponent vector s = (s_1,...,s_r) for the generalized power
/// Delta^s = Delta_1^{s1-s2} ... Delta_r^{sr}. A scalar a embeds as
/// (a,...,a), for which Delta^s = Delta^a.
struct GeneralizedPower {
  std::vector<double> s;

  GeneralizedPower() = default;
  explicit GeneralizedPower(std::vector<double> v) : s(std::move(v)) {}
  GeneralizedPower(std::initializer_list<double> v) : s(v) {}

  static GeneralizedPower scalar(double a, int rank) {
    return GeneralizedPower(std::vector<double>(static_cast<std::size_t>(rank), a));
  }

  bool is_scalar() const {
    for (double v : s)
      if (v != s.front()) return false;
    return true;
  }

  std::size_t size() const { return s.size(); }
  double operator[](std::size_t j) const { return s[j]; }
};

inline GeneralizedPower operator+(const GeneralizedPower& a, const GeneralizedPower& b) {
  if (a.size() != b.size()) throw std::invalid_argument("power length mismatch");
  GeneralizedPower out = a;
  for (std::size_t i = 0; i < b.size(); ++i) out.s[i] += b[i];
  return out;
}

namespace detail {

inline void check_dims(const Cone& cone, const ConePoint& p) {
  if (p.size() != static_cast<std::size_t>(cone.n))
    throw std::invalid_argument("point dimension mismatch for cone " + cone.to_string());
}

/// Dense symmetric matrix from the packed upper-triangular storage.
inline std::vector<double> spd_dense(int r, const ConePoint& p) {
  std::vector<double> m(static_cast<std::size_t>(r) * r);
  std::size_t k = 0;
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) {
      m[static_cast<std::size_t>(i) * r + j] = p[k];
      m[static_cast<std::size_t>(j) * r + i] = p[k];
      ++k;
    }
  return m;
}

/// Determinant of the leading j x j block, by Gaussian elimination with
/// partial pivoting (sizes here are tiny).
inline double leading_minor(std::vector<double> m, int r, int j) {
  double det = 1.0;
  for (int col = 0; col < j; ++col) {
    int piv = col;
    for (int row = col + 1; row < j; ++row)
      if (std::fabs(m[static_cast<std::size_t>(row) * r + col]) >
          std::fabs(m[static_cast<std::size_t>(piv) * r + col]))
        piv = row;
    if (piv != col) {
      for (int c = 0; c < j; ++c)
        std::swap(m[static_cast<std::size_t>(piv) * r + c],
                  m[static_cast<std::size_t>(col) * r + c]);
      det = -det;
    }
    double diag = m[static_cast<std::size_t>(col) * r + col];
    if (diag == 0.0) return 0.0;
    det *= diag;
    for (int row = col + 1; row < j; ++row) {
      double f = m[static_cast<std::size_t>(row) * r + col] / diag;
      for (int c = col; c < j; ++c)
        m[static_cast<std::size_t>(row) * r + c] -= f * m[static_cast<std::size_t>(col) * r + c];
    }
  }
  return det;
}

inline std::complex<double> complex_det(std::vector<std::complex<double>> m, int r) {
  std::complex<double> det = 1.0;
  for (int col = 0; col < r; ++col) {
    int piv = col;
    for (int row = col + 1; row < r; ++row)
      if (std::abs(m[static_cast<std::size_t>(row) * r + col]) >
          std::abs(m[static_cast<std::size_t>(piv) * r + col]))
        piv = row;
    if (piv != col) {
      for (int c = 0; c < r; ++c)
        std::swap(m[static_cast<std::size_t>(piv) * r + c],
                  m[static_cast<std::size_t>(col) * r + c]);
      det = -det;
    }
    std::complex<double> diag = m[static_cast<std::size_t>(col) * r + col];
    if (diag == 0.0) return 0.0;
    det *= diag;
    for (int row = col + 1; row < r; ++row) {
      std::complex<double> f = m[static_cast<std::size_t>(row) * r + col] / diag;
      for (int c = col; c < r; ++c)
        m[static_cast<std::size_t>(row) * r + c] -= f * m[static_cast<std::size_t>(col) * r + c];
    }
  }
  return det;
}

}  // namespace detail

/// Identity element e: Delta_j(e) = 1 for all j.
inline ConePoint identity(const Cone& cone) {
  switch (cone.kind) {
    case ConeKind::HalfLine: return ConePoint{1.0};
    case ConeKind::Lorentz: {
      std::vector<double> v(static_cast<std::size_t>(cone.n), 0.0);
      v[0] = 1.0;
      return ConePoint(std::move(v));
    }
    case ConeKind::Spd: {
      std::vector<double> v(static_cast<std::size_t>(cone.n), 0.0);
      std::size_t k = 0;
      for (int i = 0; i < cone.r; ++i) {
        v[k] = 1.0;
        k += static_cast<std::size_t>(cone.r - i);
      }
      return ConePoint(std::move(v));
    }
  }
  throw std::logic_error("unreachable");
}

/// Determinant polynomial Delta; sign is meaningful for any p in R^n,
/// positivity holds on the open cone. Homogeneous of degree r.
inline double determinant(const Cone& cone, const ConePoint& p) {
  detail::check_dims(cone, p);
  switch (cone.kind) {
    case ConeKind::HalfLine: return p[0];
    case ConeKind::Lorentz: {
      double q = p[0] * p[0];
      for (int j = 1; j < cone.n; ++j) q -= p[j] * p[j];
      return q;
    }
    case ConeKind::Spd:
      return detail::leading_minor(detail::spd_dense(cone.r, p), cone.r, cone.r);
  }
  throw std::logic_error("unreachable");
}

/// Strict membership in the open cone. No epsilon: callers that need
/// tolerance apply it at the quadrature layer.
inline bool contains(const Cone& cone, const ConePoint& p) {
  detail::check_dims(cone, p);
  switch (cone.kind) {
    case ConeKind::HalfLine: return p[0] > 0.0;
    case ConeKind::Lorentz: return p[0] > 0.0 && determinant(cone, p) > 0.0;
    case ConeKind::Spd: {
      auto m = detail::spd_dense(cone.r, p);
      for (int j = 1; j <= cone.r; ++j)
        if (detail::leading_minor(m, cone.r, j) <= 0.0) return false;
      return true;
    }
  }
  throw std::logic_error("unreachable");
}

/// Principal minor Delta_j relative to the fixed Jordan frame.
/// Lorentz convention: Delta_1(y) = y_1 + y_n, Delta_2 = Delta.
inline double principal_minor(const Cone& cone, int j, const ConePoint& p) {
  detail::check_dims(cone, p);
  if (j < 1 || j > cone.r) throw std::out_of_range("principal_minor: j out of 1..r");
  switch (cone.kind) {
    case ConeKind::HalfLine: return p[0];
    case ConeKind::Lorentz:
      return j == 1 ? p[0] + p[static_cast<std::size_t>(cone.n) - 1] : determinant(cone, p);
    case ConeKind::Spd:
      return detail::leading_minor(detail::spd_dense(cone.r, p), cone.r, j);
  }
  throw std::logic_error("unreachable");
}

/// Generalized power Delta^s(p) = prod_j Delta_j(p)^{s_j - s_{j+1}}, with
/// s_{r+1} = 0. Requires p in the open cone.
inline double generalized_power(const Cone& cone, const GeneralizedPower& s, const ConePoint& p) {
  detail::check_dims(cone, p);
  if (s.size() != static_cast<std::size_t>(cone.r))
    throw std::invalid_argument("generalized_power: exponent length != rank");
  if (!contains(cone, p))
    throw std::domain_error("generalized_power: point not in the open cone");
  if (s.is_scalar()) return std::pow(determinant(cone, p), s[0]);
  double out = 1.0;
  for (int j = 1; j <= cone.r; ++j) {
    double e = s[static_cast<std::size_t>(j - 1)] -
               (j < cone.r ? s[static_cast<std::size_t>(j)] : 0.0);
    if (e != 0.0) out *= std::pow(principal_minor(cone, j, p), e);
  }
  return out;
}

/// Holomorphic polynomial extension of Delta evaluated at re + i*im.
inline std::complex<double> complex_determinant(const Cone& cone,
                                                const std::vector<double>& re,
                                                const std::vector<double>& im) {
  if (re.size() != static_cast<std::size_t>(cone.n) || im.size() != re.size())
    throw std::invalid_argument("complex_determinant: dimension mismatch");
  using C = std::complex<double>;
  switch (cone.kind) {
    case ConeKind::HalfLine: return C(re[0], im[0]);
    case ConeKind::Lorentz: {
      C q = C(re[0], im[0]) * C(re[0], im[0]);
      for (int j = 1; j < cone.n; ++j) q -= C(re[j], im[j]) * C(re[j], im[j]);
      return q;
    }
    case ConeKind::Spd: {
      std::vector<C> m(static_cast<std::size_t>(cone.r) * cone.r);
      std::size_t k = 0;
      for (int i = 0; i < cone.r; ++i)
        for (int j = i; j < cone.r; ++j) {
          m[static_cast<std::size_t>(i) * cone.r + j] = C(re[k], im[k]);
          m[static_cast<std::size_t>(j) * cone.r + i] = C(re[k], im[k]);
          ++k;
        }
      return detail::complex_det(std::move(m), cone.r);
    }
  }
  throw std::logic_error("unreachable");
}

/// Delta(z/i) for z = x + iy in the tube: the argument convention used by
/// the kernel |Delta^{-g-n/r}((z - conj(w))/i)|. Here z/i = y - ix.
inline std::complex<double> determinant_over_i(const Cone& cone, const TubePoint& z) {
  std::vector<double> im(z.x.size());
  for (std::size_t j = 0; j < z.x.size(); ++j) im[j] = -z.x[j];
  return complex_determinant(cone, z.y.x, im);
}

/// Smallest Jordan eigenvalue; positive exactly on the open cone. Used to
/// size balls that must stay inside Omega.
inline double min_eigenvalue(const Cone& cone, const ConePoint& p) {
  detail::check_dims(cone, p);
  switch (cone.kind) {
    case ConeKind::HalfLine: return p[0];
    case ConeKind::Lorentz: {
      double norm2 = 0.0;
      for (int j = 1; j < cone.n; ++j) norm2 += p[j] * p[j];
      return p[0] - std::sqrt(norm2);
    }
    case ConeKind::Spd: {
      // Smallest eigenvalue via bisection on det(y - t*I) sign changes is
      // overkill at r = 2..3; use the bound through minors for r = 2 and a
      // safe trace-based bound otherwise.
      if (cone.r == 2) {
        double a = p[0], b = p[1], c = p[2];
        double mean = 0.5 * (a + c);
        double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        return mean - disc;
      }
      auto m = detail::spd_dense(cone.r, p);
      double lo = 0.0, hi = 0.0;
      for (int i = 0; i < cone.r; ++i) hi = std::max(hi, m[static_cast<std::size_t>(i) * cone.r + i] + 1.0);
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        auto shifted = m;
        for (int i = 0; i < cone.r; ++i) shifted[static_cast<std::size_t>(i) * cone.r + i] -= mid;
        bool pd = true;
        for (int j = 1; j <= cone.r; ++j)
          if (detail::leading_minor(shifted, cone.r, j) <= 0.0) { pd = false; break; }
        (pd ? lo : hi) = mid;
      }
      return lo;
    }
  }
  throw std::logic_error("unreachable");
}

/// SPD(2) <-> Lorentz(3) linear identification:
/// (y11, y22, y12) |-> ((y11+y22)/2, (y11-y22)/2, y12).
/// The Lorentz determinant of the image equals det of the matrix, and the
/// Lebesgue volume on the packed entries is twice the Lorentz volume.
inline ConePoint spd2_to_lorentz3(const ConePoint& p) {
  if (p.size() != 3) throw std::invalid_argument("spd2_to_lorentz3: need 3 coords");
  return ConePoint{0.5 * (p[0] + p[2]), 0.5 * (p[0] - p[2]), p[1]};
}

inline ConePoint lorentz3_to_spd2(const ConePoint& u) {
  if (u.size() != 3) throw std::invalid_argument("lorentz3_to_spd2: need 3 coords");
  return ConePoint{u[0] + u[1], u[2], u[0] - u[1]};
}

/// Random interior point with eigenvalues in [lo, hi]; deterministic given
/// the generator state.
inline ConePoint random_cone_point(const Cone& cone, std::mt19937_64& rng,
                                   double lo = 0.4, double hi = 2.5) {
  std::uniform_real_distribution<double> eig(lo, hi);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  switch (cone.kind) {
    case ConeKind::HalfLine: return ConePoint{eig(rng)};
    case ConeKind::Lorentz: {
      double l1 = eig(rng), l2 = eig(rng);
      if (l1 < l2) std::swap(l1, l2);
      std::vector<double> v(static_cast<std::size_t>(cone.n), 0.0);
      v[0] = 0.5 * (l1 + l2);
      double rad = 0.5 * (l1 - l2);
      // random direction in the transverse coordinates
      double norm2 = 0.0;
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> dir(static_cast<std::size_t>(cone.n - 1));
      for (auto& c : dir) { c = gauss(rng); norm2 += c * c; }
      double nrm = std::sqrt(norm2);
      if (nrm == 0.0) { dir[0] = 1.0; nrm = 1.0; }
      for (int j = 1; j < cone.n; ++j) v[static_cast<std::size_t>(j)] = rad * dir[static_cast<std::size_t>(j - 1)] / nrm;
      return ConePoint(std::move(v));
    }
    case ConeKind::Spd: {
      if (cone.r == 2) {
        double l1 = eig(rng), l2 = eig(rng), th = ang(rng);
        double c = std::cos(th), s = std::sin(th);
        // Q diag(l1,l2) Q^T with Q the rotation by th
        double a = l1 * c * c + l2 * s * s;
        double b = (l1 - l2) * c * s;
        double d2 = l1 * s * s + l2 * c * c;
        return ConePoint{a, b, d2};
      }
      // general r: A = Q D Q^T from a random orthogonalized frame
      int r = cone.r;
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> q(static_cast<std::size_t>(r) * r);
      for (auto& c : q) c = gauss(rng);
      // Gram-Schmidt
      for (int i = 0; i < r; ++i) {
        for (int k = 0; k < i; ++k) {
          double dot = 0.0;
          for (int j = 0; j < r; ++j)
            dot += q[static_cast<std::size_t>(i) * r + j] * q[static_cast<std::size_t>(k) * r + j];
          for (int j = 0; j < r; ++j)
            q[static_cast<std::size_t>(i) * r + j] -= dot * q[static_cast<std::size_t>(k) * r + j];
        }
        double nn = 0.0;
        for (int j = 0; j < r; ++j) nn += q[static_cast<std::size_t>(i) * r + j] * q[static_cast<std::size_t>(i) * r + j];
        nn = std::sqrt(nn);
        for (int j = 0; j < r; ++j) q[static_cast<std::size_t>(i) * r + j] /= nn;
      }
      std::vector<double> lam(static_cast<std::size_t>(r));
      for (auto& l : lam) l = eig(rng);
      std::vector<double> packed;
      packed.reserve(static_cast<std::size_t>(cone.n));
      for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) {
          double v = 0.0;
          for (int k = 0; k < r; ++k)
            v += q[static_cast<std::size_t>(k) * r + i] * lam[static_cast<std::size_t>(k)] *
                 q[static_cast<std::size_t>(k) * r + j];
          packed.push_back(v);
        }
      return ConePoint(std::move(packed));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace conebound
