#pragma once

// Unitarily invariant norms through their symmetric gauge functions, and
// weak submajorization of real vectors.

#include "ptrace_lab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace ptl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Schatten p-norm (p in [1, inf]) or Ky Fan k-norm (k >= 1).
class NormSpec {
 public:
  enum class Kind { schatten, kyfan };

  static NormSpec schatten(double p) {
    if (!(p >= 1.0)) throw DomainError("norm spec: Schatten exponent must satisfy p >= 1");
    NormSpec s;
    s.kind_ = Kind::schatten;
    s.p_ = p;
    return s;
  }

  static NormSpec kyfan(Index k) {
    if (k < 1) throw DomainError("norm spec: Ky Fan index must satisfy k >= 1");
    NormSpec s;
    s.kind_ = Kind::kyfan;
    s.k_ = k;
    return s;
  }

  Kind kind() const { return kind_; }
  bool is_schatten() const { return kind_ == Kind::schatten; }
  bool is_kyfan() const { return kind_ == Kind::kyfan; }
  double p() const { return p_; }
  Index k() const { return k_; }

  /// Hoelder conjugate q = p / (p - 1); 1 <-> inf.
  double q() const {
    if (p_ == 1.0) return kInf;
    if (std::isinf(p_)) return 1.0;
    return p_ / (p_ - 1.0);
  }

  /// 1 - 1/p, the exponent that appears in rank factors; 1 for p = inf.
  double one_minus_inv_p() const { return std::isinf(p_) ? 1.0 : 1.0 - 1.0 / p_; }

  std::string to_string() const {
    std::ostringstream os;
    if (is_schatten()) {
      os << "schatten(";
      if (std::isinf(p_)) os << "inf"; else os << p_;
      os << ")";
    } else {
      os << "kyfan(" << k_ << ")";
    }
    return os.str();
  }

 private:
  Kind kind_ = Kind::schatten;
  double p_ = 2.0;
  Index k_ = 1;
};

/// l_p norm of a non-negative vector; p = inf handled symbolically.
inline double lp_norm(const std::vector<double>& x, double p) {
  if (x.empty()) return 0.0;
  const double top = *std::max_element(x.begin(), x.end());
  if (std::isinf(p)) return std::max(top, 0.0);
  if (p == 1.0) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  if (top <= 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += std::pow(v / top, p);
  return top * std::pow(s, 1.0 / p);
}

/// Symmetric gauge function of the norm applied to a non-negative vector.
inline double gauge(const std::vector<double>& sorted_desc, const NormSpec& spec) {
  if (spec.is_schatten()) return lp_norm(sorted_desc, spec.p());
  double s = 0.0;
  for (Index j = 0; j < std::min<Index>(spec.k(), static_cast<Index>(sorted_desc.size())); ++j) {
    s += sorted_desc[static_cast<std::size_t>(j)];
  }
  return s;
}

inline std::vector<double> to_std(const RealVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline double norm(const Matrix& m, const NormSpec& spec) {
  require_finite(m, "norm");
  return gauge(to_std(singular_values(m)), spec);
}

inline double trace_norm(const Matrix& m) { return norm(m, NormSpec::schatten(1.0)); }

/// Gauge function of the dual norm: l_q for Schatten p, max(max x, sum x / k) for Ky Fan k.
inline double dual_gauge(const std::vector<double>& x, const NormSpec& spec) {
  for (double v : x) {
    if (v < 0.0) throw DomainError("dual_gauge: components must be non-negative");
  }
  if (spec.is_schatten()) return lp_norm(x, spec.q());
  double top = 0.0;
  double sum = 0.0;
  for (double v : x) {
    top = std::max(top, v);
    sum += v;
  }
  return std::max(top, sum / static_cast<double>(spec.k()));
}

inline double dual_gauge(const RealVector& x, const NormSpec& spec) {
  return dual_gauge(to_std(x), spec);
}

/// Smallest value of (partial sums of sorted y) - (partial sums of sorted x),
/// after padding the shorter vector with zeros. Non-negative iff x is weakly
/// submajorized by y.
inline double majorization_slack(std::vector<double> x, std::vector<double> y,
                                 std::size_t* worst_index = nullptr) {
  const std::size_t n = std::max(x.size(), y.size());
  x.resize(n, 0.0);
  y.resize(n, 0.0);
  std::sort(x.begin(), x.end(), std::greater<>());
  std::sort(y.begin(), y.end(), std::greater<>());
  double sx = 0.0;
  double sy = 0.0;
  double slack = kInf;
  std::size_t worst = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sx += x[k];
    sy += y[k];
    if (sy - sx < slack) {
      slack = sy - sx;
      worst = k;
    }
  }
  if (worst_index) *worst_index = worst;
  return n == 0 ? 0.0 : slack;
}

/// x weakly submajorized by y, partial sums compared within 1e-10.
inline bool weak_submajorize(const std::vector<double>& x, const std::vector<double>& y,
                             double tol = 1e-10) {
  return majorization_slack(x, y) >= -tol;
}

}  // namespace ptl
