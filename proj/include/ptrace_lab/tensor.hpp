#pragma once

// Tensor-product index structure over square matrices.
//
// Composite basis convention (shared by every header): for local dimensions
// (d_1, ..., d_n) the composite index of (j_1, ..., j_n) is
// ((j_1 * d_2 + j_2) * d_3 + j_3) ..., i.e. the first factor is most significant.
// Factor positions are 0-based in the library.

#include "ptrace_lab/matrix.hpp"
#include "ptrace_lab/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace ptl {

struct TensorSpace {
  std::vector<Index> dims;

  TensorSpace() = default;
  TensorSpace(std::initializer_list<Index> d) : dims(d) {}
  explicit TensorSpace(std::vector<Index> d) : dims(std::move(d)) {}

  static TensorSpace uniform(Index d, int n) { return TensorSpace(std::vector<Index>(n, d)); }

  int factors() const { return static_cast<int>(dims.size()); }

  Index total() const {
    return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
  }

  Index dim(int i) const { return dims.at(static_cast<std::size_t>(i)); }

  bool equal_dims() const {
    return std::all_of(dims.begin(), dims.end(), [&](Index d) { return d == dims.front(); });
  }

  void validate() const {
    if (dims.empty()) throw DimensionError("tensor space: needs at least one factor");
    for (Index d : dims) {
      if (d < 1) throw DimensionError("tensor space: local dimensions must be positive");
    }
  }

  /// Throws unless m is square with side equal to the product of the local dimensions.
  void check(const Matrix& m, const char* what) const {
    validate();
    require_square(m, what);
    if (m.rows() != total()) {
      std::ostringstream os;
      os << what << ": matrix side " << m.rows() << " does not match tensor space of size "
         << total();
      throw DimensionError(os.str());
    }
  }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "x" : "") << dims[i];
    return os.str();
  }

  friend bool operator==(const TensorSpace&, const TensorSpace&) = default;
};

/// Factors to trace out (0-based positions).
struct FactorSet {
  std::vector<int> indices;

  FactorSet() = default;
  FactorSet(std::initializer_list<int> i) : indices(i) {}
  explicit FactorSet(std::vector<int> i) : indices(std::move(i)) {}

  void validate(int n) const {
    if (indices.empty()) throw DomainError("factor set: must not be empty");
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("factor set: duplicate factor index");
    }
    if (sorted.front() < 0 || sorted.back() >= n) {
      throw DomainError("factor set: factor index out of range");
    }
  }

  /// Every factor except `keep`.
  static FactorSet complement_of(int keep, int n) {
    FactorSet f;
    for (int i = 0; i < n; ++i) {
      if (i != keep) f.indices.push_back(i);
    }
    return f;
  }
};

namespace detail {

struct Split {
  Index left;
  Index mid;
  Index right;
};

inline Split split_at(const TensorSpace& space, int at) {
  Split s{1, space.dim(at), 1};
  for (int i = 0; i < at; ++i) s.left *= space.dim(i);
  for (int i = at + 1; i < space.factors(); ++i) s.right *= space.dim(i);
  return s;
}

inline Matrix trace_single(const Matrix& m, const TensorSpace& space, int at) {
  const auto [left, mid, right] = split_at(space, at);
  Matrix out = Matrix::Zero(left * right, left * right);
  for (Index l = 0; l < left; ++l) {
    for (Index r = 0; r < right; ++r) {
      const Index row = l * right + r;
      for (Index lp = 0; lp < left; ++lp) {
        for (Index rp = 0; rp < right; ++rp) {
          Complex acc = 0.0;
          for (Index t = 0; t < mid; ++t) {
            acc += m((l * mid + t) * right + r, (lp * mid + t) * right + rp);
          }
          out(row, lp * right + rp) = acc;
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// Local dimensions that remain after tracing out `out`.
inline TensorSpace remaining_space(const TensorSpace& space, const FactorSet& out) {
  out.validate(space.factors());
  TensorSpace rest;
  for (int i = 0; i < space.factors(); ++i) {
    if (std::find(out.indices.begin(), out.indices.end(), i) == out.indices.end()) {
      rest.dims.push_back(space.dim(i));
    }
  }
  if (rest.dims.empty()) rest.dims.push_back(1);
  return rest;
}

/// Partial trace over the factors in `out`, by direct index summation.
/// Factors are contracted one at a time in increasing position, so tracing
/// {i, j} at once is bitwise identical to tracing i and then (the shifted) j.
inline Matrix partial_trace(const Matrix& m, const TensorSpace& space, const FactorSet& out) {
  space.check(m, "partial_trace");
  out.validate(space.factors());
  std::vector<int> order = out.indices;
  std::sort(order.begin(), order.end());

  Matrix current = m;
  TensorSpace current_space = space;
  int removed = 0;
  for (int original : order) {
    const int at = original - removed;
    current = detail::trace_single(current, current_space, at);
    current_space.dims.erase(current_space.dims.begin() + at);
    ++removed;
  }
  return current;
}

/// Marginal on a single factor: everything except `keep` traced out.
inline Matrix marginal(const Matrix& m, const TensorSpace& space, int keep) {
  if (space.factors() == 1) {
    space.check(m, "marginal");
    return m;
  }
  return partial_trace(m, space, FactorSet::complement_of(keep, space.factors()));
}

/// c placed on factor `at` with identities elsewhere.
inline Matrix embed_factor(const Matrix& c, const TensorSpace& space, int at) {
  space.validate();
  if (at < 0 || at >= space.factors()) throw DomainError("embed_factor: factor index out of range");
  require_square(c, "embed_factor");
  if (c.rows() != space.dim(at)) throw DimensionError("embed_factor: factor dimension mismatch");
  const auto [left, mid, right] = detail::split_at(space, at);
  return kron(identity(left), kron(c, identity(right)));
}

/// Kronecker sum: sum_i of cs[i] embedded on factor i.
inline Matrix kronecker_sum(const std::vector<Matrix>& cs, const TensorSpace& space) {
  space.validate();
  if (static_cast<int>(cs.size()) != space.factors()) {
    throw DimensionError("kronecker_sum: number of matrices does not match number of factors");
  }
  Matrix out = Matrix::Zero(space.total(), space.total());
  for (int i = 0; i < space.factors(); ++i) out += embed_factor(cs[i], space, i);
  return out;
}

/// tr_i[x] with the traced factor replaced by an identity, in place.
inline Matrix trace_and_replace_identity(const Matrix& x, const TensorSpace& space, int at) {
  space.check(x, "trace_and_replace_identity");
  const auto [left, mid, right] = detail::split_at(space, at);
  const Matrix reduced = detail::trace_single(x, space, at);
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Index l = 0; l < left; ++l) {
    for (Index r = 0; r < right; ++r) {
      for (Index lp = 0; lp < left; ++lp) {
        for (Index rp = 0; rp < right; ++rp) {
          const Complex v = reduced(l * right + r, lp * right + rp);
          for (Index t = 0; t < mid; ++t) {
            out((l * mid + t) * right + r, (lp * mid + t) * right + rp) = v;
          }
        }
      }
    }
  }
  return out;
}

/// Unnormalized maximally entangled vector sum_i |i>|i> in C^d (x) C^d.
inline Vector omega_vector(Index d) {
  if (d < 1) throw DimensionError("omega_vector: d must be positive");
  Vector v = Vector::Zero(d * d);
  for (Index i = 0; i < d; ++i) v(i * d + i) = 1.0;
  return v;
}

/// Swap operator on C^d (x) C^d: |a>|b> -> |b>|a>.
inline Matrix flip_operator(Index d) {
  if (d < 1) throw DimensionError("flip_operator: d must be positive");
  Matrix f = Matrix::Zero(d * d, d * d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) f(b * d + a, a * d + b) = 1.0;
  }
  return f;
}

/// (e^{-i theta} x + e^{i theta} x*) / 2.
inline Matrix rotated_hermitian_part(const Matrix& x, double theta) {
  const Complex phase = std::polar(1.0, -theta);
  return 0.5 * (phase * x + std::conj(phase) * x.adjoint());
}

/// Support-function test of W(a) inside scale * W(m) on a uniform grid of angles.
/// Per angle it requires lambda_max(H_theta(a)) <= scale * lambda_max(H_theta(m))
/// up to 1e-8 * (1 + sigma_1(m)). The reported lhs/rhs are taken at the worst angle.
inline InequalityReport range_inclusion_check(const Matrix& a, const Matrix& m, double scale,
                                              int angles = 360) {
  require_square(a, "range_inclusion_check");
  require_square(m, "range_inclusion_check");
  if (!(scale > 0.0)) throw DomainError("range_inclusion_check: scale must be positive");
  if (angles < 8) throw DomainError("range_inclusion_check: need at least 8 angles");

  const double sigma1 = singular_values(m)(0);
  const double tol = 1e-8 * (1.0 + sigma1);

  // H_theta(x) = cos(theta) Re(x) + sin(theta) Im(x) with Re/Im the Hermitian parts.
  const Matrix a_re = 0.5 * (a + a.adjoint());
  const Matrix a_im = Complex(0.0, -0.5) * (a - a.adjoint());
  const Matrix m_re = 0.5 * (m + m.adjoint());
  const Matrix m_im = Complex(0.0, -0.5) * (m - m.adjoint());

  double worst_slack = std::numeric_limits<double>::infinity();
  double worst_lhs = 0.0;
  double worst_rhs = 0.0;
  double worst_theta = 0.0;
  for (int k = 0; k < angles; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / angles;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double lhs = lambda_max_unchecked(c * a_re + s * a_im);
    const double rhs = scale * lambda_max_unchecked(c * m_re + s * m_im);
    if (rhs - lhs < worst_slack) {
      worst_slack = rhs - lhs;
      worst_lhs = lhs;
      worst_rhs = rhs;
      worst_theta = theta;
    }
  }
  return InequalityReport::make("range_inclusion", worst_lhs, worst_rhs, tol,
                                {{"scale", scale},
                                 {"angles", static_cast<double>(angles)},
                                 {"theta", worst_theta}});
}

}  // namespace ptl
