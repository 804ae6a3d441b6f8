#pragma once

// Constructive dilations: matrices on a larger product space whose partial
// traces reproduce given targets, with structure certificates attached.
//
// Bipartite spaces are (d_A, d_B) with A at position 0; tr_B means tracing
// position 1 and yields the A-marginal.

#include "ptrace_lab/matrix.hpp"
#include "ptrace_lab/report.hpp"
#include "ptrace_lab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ptl {

enum class Structure { normal, unitary, nilpotent, idempotent, rank_one, rank_two, rank_r };

inline std::string to_string(Structure s) {
  switch (s) {
    case Structure::normal: return "normal";
    case Structure::unitary: return "unitary";
    case Structure::nilpotent: return "nilpotent";
    case Structure::idempotent: return "idempotent";
    case Structure::rank_one: return "rank_one";
    case Structure::rank_two: return "rank_two";
    case Structure::rank_r: return "rank_r";
  }
  return "unknown";
}

struct DilationResult {
  Matrix m;
  TensorSpace space;
  Structure structure = Structure::rank_r;
  std::map<std::string, double> certificates;
};

/// tr_B of a bipartite matrix.
inline Matrix trace_b(const Matrix& m, const TensorSpace& space) {
  return partial_trace(m, space, {1});
}

/// tr_A of a bipartite matrix.
inline Matrix trace_a(const Matrix& m, const TensorSpace& space) {
  return partial_trace(m, space, {0});
}

/// Psi = (X (x) 1) Omega = sum_j X e_j (x) e_j, a vector in C^{rows} (x) C^{cols}.
/// With M = |Psi(X1)><Psi(X2)|: tr_B M = X1 X2^*, tr_A M = (X2^* X1)^T.
inline Vector factor_vector(const Matrix& x) {
  Vector v(x.rows() * x.cols());
  for (Index a = 0; a < x.rows(); ++a) {
    for (Index j = 0; j < x.cols(); ++j) v(a * x.cols() + j) = x(a, j);
  }
  return v;
}

inline Matrix outer_from_factors(const Matrix& x1, const Matrix& x2) {
  return factor_vector(x1) * factor_vector(x2).adjoint();
}

inline double relative_residual(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / (1.0 + want.norm());
}

// ---------------------------------------------------------------------------
// Single-matrix structured dilations

inline DilationResult normal_dilation(const Matrix& a) {
  require_square(a, "normal_dilation");
  require_finite(a, "normal_dilation");
  const Index d = a.rows();
  const Matrix herm = 0.5 * (a + a.adjoint());
  const Matrix anti = 0.5 * (a - a.adjoint());
  DilationResult r;
  r.space = TensorSpace{d, 2};
  r.structure = Structure::normal;
  r.m = kron(herm, unit(2, 0, 0)) + kron(anti, unit(2, 1, 1));
  r.certificates["normality"] = normality_residual(r.m);
  r.certificates["partial_trace"] = relative_residual(trace_b(r.m, r.space), a);
  return r;
}

/// Smallest admissible even ancilla size for unitary_dilation.
inline Index minimal_unitary_ancilla(const Matrix& a) {
  const double s1 = singular_values(a)(0);
  auto m = static_cast<Index>(std::ceil(s1 * (1.0 - 1e-12)));
  if (m < 2) m = 2;
  if (m % 2) ++m;
  return m;
}

inline DilationResult unitary_dilation(const Matrix& a, Index ancilla) {
  require_square(a, "unitary_dilation");
  require_finite(a, "unitary_dilation");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector s = svd.singularValues();
  if (ancilla < 2 || ancilla % 2 != 0 || static_cast<double>(ancilla) < s(0) * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "unitary_dilation: ancilla dimension must be even and >= ||a||_inf = " << s(0)
       << "; smallest admissible value is " << minimal_unitary_ancilla(a);
    throw DomainError(os.str());
  }
  const Index d = a.rows();
  const double mm = static_cast<double>(ancilla);
  Vector plus(d);
  Vector minus(d);
  for (Index k = 0; k < d; ++k) {
    const double phi = std::acos(std::min(1.0, s(k) / mm));
    plus(k) = std::polar(1.0, phi);
    minus(k) = std::polar(1.0, -phi);
  }
  const Matrix& u = svd.matrixU();
  const Matrix vh = svd.matrixV().adjoint();
  const Matrix w_plus = u * plus.asDiagonal() * vh;
  const Matrix w_minus = u * minus.asDiagonal() * vh;

  Matrix odd = Matrix::Zero(ancilla, ancilla);
  Matrix even = Matrix::Zero(ancilla, ancilla);
  for (Index j = 0; j < ancilla; j += 2) {
    odd(j, j) = 1.0;
    even(j + 1, j + 1) = 1.0;
  }
  DilationResult r;
  r.space = TensorSpace{d, ancilla};
  r.structure = Structure::unitary;
  r.m = kron(w_plus, odd) + kron(w_minus, even);
  r.certificates["unitarity"] = (r.m.adjoint() * r.m - identity(r.m.rows())).norm();
  r.certificates["partial_trace"] = relative_residual(trace_b(r.m, r.space), a);
  return r;
}

struct ConstantDiagonalForm {
  Matrix unitary;
  Matrix transformed;  // unitary^* a unitary, diagonal constant tr(a)/d
};

namespace detail {

/// Unit vector v in span{x, y} with v^* b v = w1 + lambda (w2 - w1), where
/// w1 = x^* b x and w2 = y^* b y. The numerical range of the compression of b
/// to span{x, y} is convex, so the segment [w1, w2] is reachable; the phase on
/// y keeps the path on the line through w1 and w2 and tau is found by bisection.
inline Vector segment_point(const Matrix& b, const Vector& x, const Vector& y, double lambda) {
  const Complex w1 = x.dot(b * x);
  const Complex w2 = y.dot(b * y);
  const double gap = std::abs(w2 - w1);
  if (gap <= 1e-15 * (1.0 + b.norm()) || lambda <= 0.0) return x;
  if (lambda >= 1.0) return y;

  // Shift and rotate so that w1 -> 0 and w2 -> 1.
  const Complex dir = (w2 - w1) / gap;
  const Matrix shifted = (std::conj(dir) / gap) * (b - w1 * identity(b.rows()));
  const Matrix herm = 0.5 * (shifted + shifted.adjoint());
  const Matrix skew = Complex(0.0, -0.5) * (shifted - shifted.adjoint());

  const Complex k12 = x.dot(skew * y);
  Complex phase = 1.0;
  if (std::abs(k12) > 0.0) phase = Complex(0.0, 1.0) * std::conj(k12) / std::abs(k12);
  const Vector yp = phase * y;

  auto point = [&](double tau) -> Vector {
    Vector v = std::cos(tau) * x + std::sin(tau) * yp;
    return v / v.norm();
  };
  auto value = [&](double tau) {
    const Vector v = point(tau);
    return v.dot(herm * v).real();
  };

  double lo = 0.0;
  double hi = std::acos(0.0);
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) < lambda) lo = mid; else hi = mid;
  }
  return point(0.5 * (lo + hi));
}

/// Unit v with v^* b v equal to the mean of b's diagonal.
inline Vector vector_with_mean_value(const Matrix& b) {
  const Index k = b.rows();
  Vector x = Vector::Zero(k);
  x(0) = 1.0;
  for (Index j = 1; j < k; ++j) {
    Vector e = Vector::Zero(k);
    e(j) = 1.0;
    // mean of the first j+1 diagonal entries lies 1/(j+1) of the way from
    // the mean of the first j towards b(j, j).
    x = segment_point(b, x, e, 1.0 / static_cast<double>(j + 1));
  }
  return x;
}

}  // namespace detail

/// Unitary change of basis making every diagonal entry equal to tr(a)/d.
/// Deflation: find a unit vector attaining the diagonal mean, rotate it to
/// the front, recurse on the trailing block (whose diagonal mean is unchanged).
inline ConstantDiagonalForm constant_diagonal_form(const Matrix& a) {
  require_square(a, "constant_diagonal_form");
  require_finite(a, "constant_diagonal_form");
  const Index d = a.rows();
  const Complex mean = a.trace() / static_cast<double>(d);
  ConstantDiagonalForm out{identity(d), a};
  const double scale = 1.0 + a.norm();

  for (Index s = 0; s + 1 < d; ++s) {
    const Index k = d - s;
    const Matrix block = out.transformed.bottomRightCorner(k, k);
    double spread = 0.0;
    for (Index i = 0; i < k; ++i) spread = std::max(spread, std::abs(block(i, i) - mean));
    if (spread <= 1e-15 * scale) break;

    const Vector v = detail::vector_with_mean_value(block);
    Eigen::HouseholderQR<Matrix> qr{Matrix(v)};
    const Matrix q = qr.householderQ() * identity(k);
    Matrix full = identity(d);
    full.bottomRightCorner(k, k) = q;
    out.transformed = full.adjoint() * out.transformed * full;
    out.unitary = out.unitary * full;
  }
  return out;
}

inline void require_traceless(const Matrix& a, const char* what) {
  if (std::abs(a.trace()) > 1e-9 * (1.0 + a.norm())) {
    std::ostringstream os;
    os << what << ": input must be traceless, |tr| = " << std::abs(a.trace());
    throw DomainError(os.str());
  }
}

inline DilationResult nilpotent_dilation(const Matrix& a) {
  require_square(a, "nilpotent_dilation");
  require_traceless(a, "nilpotent_dilation");
  const Index d = a.rows();
  const ConstantDiagonalForm cdf = constant_diagonal_form(a);
  const Matrix lower = cdf.transformed.triangularView<Eigen::StrictlyLower>();
  const Matrix upper = cdf.transformed.triangularView<Eigen::StrictlyUpper>();
  const Matrix& v = cdf.unitary;

  DilationResult r;
  r.space = TensorSpace{d, 2};
  r.structure = Structure::nilpotent;
  r.m = kron(v * lower * v.adjoint(), unit(2, 0, 0)) + kron(v * upper * v.adjoint(), unit(2, 1, 1));
  r.certificates["nilpotency"] = matrix_power(r.m, static_cast<int>(d)).norm();
  r.certificates["partial_trace"] = relative_residual(trace_b(r.m, r.space), a);
  return r;
}

/// Idempotent dilation on d (x) (rank * trace). a = 0 gives M = 0 on d (x) 1;
/// a nonzero with trace 0 is rejected, as is any non-integer trace.
inline DilationResult idempotent_dilation(const Matrix& a, const Tolerance& tol = {}) {
  require_square(a, "idempotent_dilation");
  require_finite(a, "idempotent_dilation");
  const Index d = a.rows();
  DilationResult r;
  r.structure = Structure::idempotent;
  if (a.norm() <= tol.abs) {
    r.space = TensorSpace{d, 1};
    r.m = Matrix::Zero(d, d);
    r.certificates["idempotency"] = 0.0;
    r.certificates["partial_trace"] = relative_residual(r.m, a);
    return r;
  }
  const Complex tr = a.trace();
  const double nearest = std::round(tr.real());
  if (std::abs(tr - Complex(nearest, 0.0)) > 1e-9 || nearest < 1.0) {
    std::ostringstream os;
    os << "idempotent_dilation: trace must be a positive integer, got (" << tr.real() << ", "
       << tr.imag() << "), nearest integer " << nearest;
    throw DomainError(os.str());
  }
  const auto t = static_cast<Index>(nearest);
  const Index rank = rank_tol(a, tol);

  Eigen::JacobiSVD<Matrix> svd(a / nearest, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::ArrayXd root = svd.singularValues().head(rank).array().sqrt();
  const Matrix x1 = svd.matrixU().leftCols(rank) * root.matrix().cast<Complex>().asDiagonal();
  const Matrix x2 = svd.matrixV().leftCols(rank) * root.matrix().cast<Complex>().asDiagonal();
  const Vector phi = factor_vector(x1);
  const Vector psi = factor_vector(x2);

  r.space = TensorSpace{d, rank * t};
  r.m = kron(phi * psi.adjoint(), identity(t));
  r.certificates["idempotency"] = (r.m * r.m - r.m).norm();
  r.certificates["overlap"] = std::abs(psi.dot(phi) - 1.0);
  r.certificates["partial_trace"] = relative_residual(trace_b(r.m, r.space), a);
  r.certificates["trace"] = nearest;
  r.certificates["rank"] = static_cast<double>(rank);
  return r;
}

// ---------------------------------------------------------------------------
// Jordan structure at zero and Flanders-similarity

/// Decreasing Jordan block sizes at eigenvalue 0.
struct SegreCharacteristic {
  std::vector<Index> sizes;
  bool unstable = false;
};

/// Rank-of-powers method: with r_k = rank(a^k), r_0 = d, the number of zero
/// blocks of size >= k is r_{k-1} - r_k. A singular value within a factor of
/// 100 of the rank threshold marks the result unstable.
inline SegreCharacteristic segre_at_zero(const Matrix& a, const Tolerance& tol = {}) {
  require_square(a, "segre_at_zero");
  tol.validate();
  const Index d = a.rows();
  SegreCharacteristic out;
  std::vector<Index> at_least;  // at_least[k-1] = number of blocks of size >= k
  Index prev = d;
  Matrix power = identity(d);
  for (Index k = 1; k <= d; ++k) {
    power = power * a;
    const RealVector s = singular_values(power);
    const double thr = tol.threshold(s(0));
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
      if (s(i) > thr) ++rank;
      if (s(i) > thr * 1e-2 && s(i) < thr * 1e2) out.unstable = true;
    }
    const Index count = prev - rank;
    if (count <= 0) break;
    at_least.push_back(count);
    prev = rank;
  }
  for (std::size_t k = 0; k < at_least.size(); ++k) {
    const Index next = k + 1 < at_least.size() ? at_least[k + 1] : 0;
    const Index exact = at_least[k] - next;
    for (Index i = 0; i < exact; ++i) out.sizes.push_back(static_cast<Index>(k + 1));
  }
  std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());
  return out;
}

/// |a_i - b_i| <= 1 after zero padding.
inline bool segre_compatible(std::vector<Index> a, std::vector<Index> b, std::size_t* violated = nullptr) {
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  const std::size_t n = std::max(a.size(), b.size());
  a.resize(n, 0);
  b.resize(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(a[i] - b[i]) > 1) {
      if (violated) *violated = i;
      return false;
    }
  }
  return true;
}

struct FlandersVerdict {
  bool similar = false;
  bool unstable = false;
  std::string reason;
  SegreCharacteristic zero_a;
  SegreCharacteristic zero_b;
};

namespace detail {

struct EigenCluster {
  Complex center;
  Index multiplicity;
};

inline std::vector<EigenCluster> cluster_eigenvalues(const Matrix& x, double radius) {
  Eigen::ComplexEigenSolver<Matrix> es(x, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("flanders_similar: eigensolver failed for " + fingerprint(x));
  }
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + x.rows());
  // single-linkage clustering
  std::vector<int> label(ev.size());
  std::iota(label.begin(), label.end(), 0);
  std::function<int(int)> find = [&](int i) { return label[i] == i ? i : label[i] = find(label[i]); };
  for (std::size_t i = 0; i < ev.size(); ++i) {
    for (std::size_t j = i + 1; j < ev.size(); ++j) {
      if (std::abs(ev[i] - ev[j]) <= radius) label[find(static_cast<int>(i))] = find(static_cast<int>(j));
    }
  }
  std::map<int, std::pair<Complex, Index>> acc;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    auto& slot = acc[find(static_cast<int>(i))];
    slot.first += ev[i];
    slot.second += 1;
  }
  std::vector<EigenCluster> out;
  for (const auto& [_, v] : acc) {
    out.push_back({v.first / static_cast<double>(v.second), v.second});
  }
  return out;
}

inline std::vector<Index> nullity_sequence(const Matrix& x, Complex lambda, Index max_power,
                                           const Tolerance& tol, bool& unstable) {
  const Index d = x.rows();
  const Matrix shifted = x - lambda * identity(d);
  std::vector<Index> out;
  Matrix power = identity(d);
  for (Index k = 1; k <= max_power; ++k) {
    power = power * shifted;
    const RealVector s = singular_values(power);
    const double thr = tol.threshold(s(0));
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
      if (s(i) > thr) ++rank;
      if (s(i) > thr * 1e-2 && s(i) < thr * 1e2) unstable = true;
    }
    out.push_back(d - rank);
  }
  return out;
}

}  // namespace detail

/// Flanders-similarity of two square matrices (sizes may differ): equal Jordan
/// structure at every nonzero eigenvalue, and zero-eigenvalue Segre
/// characteristics that differ by at most one entrywise after padding.
///
/// Eigenvalues are grouped into clusters of radius 1e-4 (1 + spectral radius),
/// which absorbs the splitting of defective blocks; Jordan structure at a
/// cluster is read off the nullities of (x - center)^k. Verdicts that involve a
/// repeated nonzero eigenvalue, nearby clusters or borderline rank decisions
/// carry the unstable flag.
inline FlandersVerdict flanders_similar(const Matrix& a, const Matrix& b, const Tolerance& tol = {}) {
  require_square(a, "flanders_similar");
  require_square(b, "flanders_similar");
  require_finite(a, "flanders_similar");
  require_finite(b, "flanders_similar");
  FlandersVerdict out;

  Eigen::ComplexEigenSolver<Matrix> ea(a, false);
  Eigen::ComplexEigenSolver<Matrix> eb(b, false);
  const double spectral =
      std::max(ea.eigenvalues().cwiseAbs().maxCoeff(), eb.eigenvalues().cwiseAbs().maxCoeff());
  const double radius = 1e-4 * (1.0 + spectral);

  const auto ca = detail::cluster_eigenvalues(a, radius);
  const auto cb = detail::cluster_eigenvalues(b, radius);

  auto nonzero = [&](const std::vector<detail::EigenCluster>& cs) {
    std::vector<detail::EigenCluster> out_cs;
    for (const auto& c : cs) {
      if (std::abs(c.center) > radius) out_cs.push_back(c);
      if (std::abs(c.center) > radius && std::abs(c.center) <= 10.0 * radius) out.unstable = true;
    }
    return out_cs;
  };
  const auto na = nonzero(ca);
  const auto nb = nonzero(cb);

  for (const auto* cs : {&ca, &cb}) {
    for (std::size_t i = 0; i < cs->size(); ++i) {
      for (std::size_t j = i + 1; j < cs->size(); ++j) {
        if (std::abs((*cs)[i].center - (*cs)[j].center) < 10.0 * radius) out.unstable = true;
      }
    }
  }

  out.zero_a = segre_at_zero(a, tol);
  out.zero_b = segre_at_zero(b, tol);
  out.unstable = out.unstable || out.zero_a.unstable || out.zero_b.unstable;

  std::ostringstream reason;
  bool ok = true;
  if (na.size() != nb.size()) {
    ok = false;
    reason << "different number of distinct nonzero eigenvalues (" << na.size() << " vs "
           << nb.size() << ")";
  }
  std::vector<bool> used(nb.size(), false);
  for (const auto& c : na) {
    if (!ok) break;
    std::size_t match = nb.size();
    for (std::size_t j = 0; j < nb.size(); ++j) {
      if (!used[j] && std::abs(nb[j].center - c.center) <= 10.0 * radius) {
        match = j;
        break;
      }
    }
    if (match == nb.size()) {
      ok = false;
      reason << "eigenvalue (" << c.center.real() << ", " << c.center.imag() << ") has no partner";
      break;
    }
    used[match] = true;
    if (nb[match].multiplicity != c.multiplicity) {
      ok = false;
      reason << "eigenvalue (" << c.center.real() << ", " << c.center.imag()
             << ") has multiplicity " << c.multiplicity << " vs " << nb[match].multiplicity;
      break;
    }
    if (c.multiplicity > 1) out.unstable = true;
    const Complex center = 0.5 * (c.center + nb[match].center);
    const auto sa = detail::nullity_sequence(a, center, c.multiplicity, tol, out.unstable);
    const auto sb = detail::nullity_sequence(b, center, c.multiplicity, tol, out.unstable);
    if (sa != sb) {
      ok = false;
      reason << "Jordan structure differs at eigenvalue (" << center.real() << ", " << center.imag()
             << ")";
      break;
    }
  }
  std::size_t violated = 0;
  if (ok && !segre_compatible(out.zero_a.sizes, out.zero_b.sizes, &violated)) {
    ok = false;
    reason << "zero-eigenvalue block sizes differ by more than one at position " << violated;
  }
  out.similar = ok;
  out.reason = ok ? "" : reason.str();
  return out;
}

// ---------------------------------------------------------------------------
// Rank-one dilations

struct PurificationResult {
  DilationResult dilation;
  Matrix b;  // tr_A of the rank-one dilation
  FlandersVerdict flanders;
};

/// Rank-one M on d_A (x) d_b with tr_B M = a; exists iff d_b >= rank(a).
inline PurificationResult purify(const Matrix& a, Index d_b, const Tolerance& tol = {}) {
  require_square(a, "purify");
  require_finite(a, "purify");
  const Index rank = rank_tol(a, tol);
  if (d_b < 1 || d_b < rank) {
    std::ostringstream os;
    os << "purify: ancilla dimension " << d_b << " is smaller than rank(a) = " << rank
       << "; no rank-one dilation exists";
    throw DomainError(os.str());
  }
  const Index d_a = a.rows();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Index used = std::min(d_b, d_a);
  Matrix x1 = Matrix::Zero(d_a, d_b);
  Matrix x2 = Matrix::Zero(d_a, d_b);
  for (Index j = 0; j < used; ++j) {
    const double root = std::sqrt(svd.singularValues()(j));
    x1.col(j) = root * svd.matrixU().col(j);
    x2.col(j) = root * svd.matrixV().col(j);
  }
  PurificationResult out;
  DilationResult& r = out.dilation;
  r.space = TensorSpace{d_a, d_b};
  r.structure = Structure::rank_one;
  r.m = outer_from_factors(x1, x2);
  out.b = trace_a(r.m, r.space);
  r.certificates["partial_trace"] = relative_residual(trace_b(r.m, r.space), a);
  r.certificates["factor_identity"] = relative_residual(out.b, (x2.adjoint() * x1).transpose());
  r.certificates["rank"] = static_cast<double>(rank_tol(r.m, tol));
  out.flanders = flanders_similar(a, out.b, tol);
  return out;
}

struct JordanBlock {
  Complex eigenvalue;
  Index size = 1;
};

/// Matrix given by Jordan data: basis * (direct sum of blocks) * basis^{-1}.
struct JordanSpec {
  std::vector<JordanBlock> blocks;
  std::optional<Matrix> basis;

  Index dimension() const {
    Index d = 0;
    for (const auto& b : blocks) d += b.size;
    return d;
  }

  void validate() const {
    if (blocks.empty()) throw DomainError("jordan spec: needs at least one block");
    for (const auto& b : blocks) {
      if (b.size < 1) throw DomainError("jordan spec: block sizes must be positive");
    }
    if (basis) {
      require_square(*basis, "jordan spec basis");
      if (basis->rows() != dimension()) throw DimensionError("jordan spec: basis size mismatch");
      const RealVector s = singular_values(*basis);
      if (s(s.size() - 1) <= 1e-9 * s(0)) throw DomainError("jordan spec: basis is not invertible");
    }
  }

  Matrix canonical() const {
    const Index d = dimension();
    Matrix j = Matrix::Zero(d, d);
    Index at = 0;
    for (const auto& b : blocks) {
      j.block(at, at, b.size, b.size) = jordan_block(b.size, b.eigenvalue);
      at += b.size;
    }
    return j;
  }

  Matrix basis_or_identity() const { return basis ? *basis : identity(dimension()); }

  Matrix matrix() const {
    validate();
    const Matrix s = basis_or_identity();
    return s * canonical() * s.inverse();
  }
};

namespace detail {

inline bool is_zero_eigenvalue(Complex z) { return std::abs(z) <= 1e-12; }

/// Shift factors P (p x q), Q (q x p) with P Q = J_p(0), Q P = J_q(0), |p - q| <= 1.
inline std::pair<Matrix, Matrix> shift_factors(Index p, Index q) {
  Matrix pm = Matrix::Zero(p, q);
  Matrix qm = Matrix::Zero(q, p);
  if (p == q) {
    pm = jordan_block(p, 0.0);
    qm = identity(p);
  } else if (p == q + 1) {
    for (Index j = 0; j < q; ++j) pm(j, j) = 1.0;      // embed into the first q coordinates
    for (Index j = 1; j < p; ++j) qm(j - 1, j) = 1.0;  // drop the first coordinate, shift down
  } else {
    for (Index j = 1; j < q; ++j) pm(j - 1, j) = 1.0;
    for (Index j = 0; j < p; ++j) qm(j, j) = 1.0;
  }
  return {pm, qm};
}

}  // namespace detail

/// Rank-one M on d_A (x) d_B with tr_B M = A and tr_A M = B for Flanders-similar
/// Jordan data. Blocks are paired (equal nonzero blocks; zero blocks sorted by
/// size and padded), factors Y1, Y2 with A = Y1 Y2^*, B = Y2^* Y1 are built
/// blockwise, and a transpose similarity T (T B T^{-1} = B^T) converts them to
/// X1 = Y1 T^{-1}, X2^* = T Y2^*.
inline DilationResult joint_rank_one_dilation(const JordanSpec& a_spec, const JordanSpec& b_spec) {
  a_spec.validate();
  b_spec.validate();
  const Index d_a = a_spec.dimension();
  const Index d_b = b_spec.dimension();

  std::vector<Index> off_a;
  std::vector<Index> off_b;
  for (Index at = 0; const auto& blk : a_spec.blocks) { off_a.push_back(at); at += blk.size; }
  for (Index at = 0; const auto& blk : b_spec.blocks) { off_b.push_back(at); at += blk.size; }

  Matrix y1 = Matrix::Zero(d_a, d_b);   // Y1
  Matrix y2h = Matrix::Zero(d_b, d_a);  // Y2^*

  // nonzero eigenvalues: identical blocks
  std::vector<bool> used_b(b_spec.blocks.size(), false);
  for (std::size_t i = 0; i < a_spec.blocks.size(); ++i) {
    const auto& blk = a_spec.blocks[i];
    if (detail::is_zero_eigenvalue(blk.eigenvalue)) continue;
    std::size_t match = b_spec.blocks.size();
    for (std::size_t j = 0; j < b_spec.blocks.size(); ++j) {
      const auto& other = b_spec.blocks[j];
      if (!used_b[j] && other.size == blk.size &&
          std::abs(other.eigenvalue - blk.eigenvalue) <= 1e-12 * (1.0 + std::abs(blk.eigenvalue))) {
        match = j;
        break;
      }
    }
    if (match == b_spec.blocks.size()) {
      std::ostringstream os;
      os << "joint_rank_one_dilation: not Flanders-similar; block J_" << blk.size << "("
         << blk.eigenvalue.real() << ", " << blk.eigenvalue.imag() << ") of A has no partner in B";
      throw DomainError(os.str());
    }
    used_b[match] = true;
    y1.block(off_a[i], off_b[match], blk.size, blk.size) = jordan_block(blk.size, blk.eigenvalue);
    y2h.block(off_b[match], off_a[i], blk.size, blk.size) = identity(blk.size);
  }
  for (std::size_t j = 0; j < b_spec.blocks.size(); ++j) {
    const auto& blk = b_spec.blocks[j];
    if (!detail::is_zero_eigenvalue(blk.eigenvalue) && !used_b[j]) {
      std::ostringstream os;
      os << "joint_rank_one_dilation: not Flanders-similar; block J_" << blk.size << "("
         << blk.eigenvalue.real() << ", " << blk.eigenvalue.imag() << ") of B has no partner in A";
      throw DomainError(os.str());
    }
  }

  // zero eigenvalue: pair sorted block sizes, padding with empty blocks
  auto zero_blocks = [](const JordanSpec& spec) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
      if (detail::is_zero_eigenvalue(spec.blocks[i].eigenvalue)) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
      return spec.blocks[l].size > spec.blocks[r].size;
    });
    return idx;
  };
  const auto za = zero_blocks(a_spec);
  const auto zb = zero_blocks(b_spec);
  for (std::size_t i = 0; i < std::max(za.size(), zb.size()); ++i) {
    const Index p = i < za.size() ? a_spec.blocks[za[i]].size : 0;
    const Index q = i < zb.size() ? b_spec.blocks[zb[i]].size : 0;
    if (std::abs(p - q) > 1) {
      std::ostringstream os;
      os << "joint_rank_one_dilation: not Flanders-similar; zero blocks of sizes " << p << " and "
         << q << " are paired at position " << i;
      throw DomainError(os.str());
    }
    if (p == 0 || q == 0) continue;  // J_1(0) against nothing contributes zero rows/columns
    const auto [pm, qm] = detail::shift_factors(p, q);
    y1.block(off_a[za[i]], off_b[zb[i]], p, q) = pm;
    y2h.block(off_b[zb[i]], off_a[za[i]], q, p) = qm;
  }

  const Matrix sa = a_spec.basis_or_identity();
  const Matrix sb = b_spec.basis_or_identity();
  const Matrix sa_inv = sa.inverse();
  const Matrix sb_inv = sb.inverse();
  y1 = sa * y1 * sb_inv;
  y2h = sb * y2h * sa_inv;

  // Reversal R satisfies R J R = J^T blockwise, so T = S_B^{-T} R S_B^{-1}.
  Matrix reversal = Matrix::Zero(d_b, d_b);
  for (std::size_t j = 0; j < b_spec.blocks.size(); ++j) {
    const Index k = b_spec.blocks[j].size;
    for (Index i = 0; i < k; ++i) reversal(off_b[j] + i, off_b[j] + k - 1 - i) = 1.0;
  }
  const Matrix t = sb_inv.transpose() * reversal * sb_inv;
  const Matrix t_inv = sb * reversal * sb.transpose();

  const Matrix x1 = y1 * t_inv;
  const Matrix x2 = (t * y2h).adjoint();

  DilationResult r;
  r.space = TensorSpace{d_a, d_b};
  r.structure = Structure::rank_one;
  r.m = outer_from_factors(x1, x2);
  r.certificates["partial_trace_a"] = relative_residual(trace_b(r.m, r.space), a_spec.matrix());
  r.certificates["partial_trace_b"] = relative_residual(trace_a(r.m, r.space), b_spec.matrix());
  r.certificates["rank"] = static_cast<double>(rank_tol(r.m));
  return r;
}

// ---------------------------------------------------------------------------
// Rank-two and higher-rank joint dilations

struct ShodaResult {
  Matrix k;
  Matrix l;
  double condition = 1.0;  // condition number of the basis change used
  double residual = 0.0;   // ||(kl - lk) - c||_F / (1 + ||c||_F)
};

/// Commutator decomposition c = kl - lk of a traceless matrix. c is brought to
/// zero diagonal by a unitary V (constant_diagonal_form), then with
/// k' = diag(1..d) and l'_ij = c'_ij / (i - j) one has k'l' - l'k' = c'.
inline ShodaResult shoda_decomposition(const Matrix& c) {
  require_square(c, "shoda_decomposition");
  require_finite(c, "shoda_decomposition");
  require_traceless(c, "shoda_decomposition");
  const Index d = c.rows();
  ShodaResult out;
  if (c.norm() == 0.0) {
    out.k = Matrix::Zero(d, d);
    out.l = Matrix::Zero(d, d);
    return out;
  }
  const ConstantDiagonalForm cdf = constant_diagonal_form(c);
  const Matrix& v = cdf.unitary;
  Matrix kp = Matrix::Zero(d, d);
  Matrix lp = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    kp(i, i) = static_cast<double>(i + 1);
    for (Index j = 0; j < d; ++j) {
      if (i != j) lp(i, j) = cdf.transformed(i, j) / static_cast<double>(i - j);
    }
  }
  out.k = v * kp * v.adjoint();
  out.l = v * lp * v.adjoint();
  const RealVector s = singular_values(v);
  out.condition = s(0) / s(s.size() - 1);
  out.residual = relative_residual(out.k * out.l - out.l * out.k, c);
  return out;
}

/// Rank <= 2 matrix M on d (x) d with tr_B M = a and tr_A M = b; requires tr a = tr b.
inline DilationResult joint_rank_two_dilation(const Matrix& a, const Matrix& b) {
  require_square(a, "joint_rank_two_dilation");
  require_square(b, "joint_rank_two_dilation");
  if (a.rows() != b.rows()) throw DimensionError("joint_rank_two_dilation: a and b must have equal size");
  if (std::abs(a.trace() - b.trace()) > 1e-9) {
    std::ostringstream os;
    os << "joint_rank_two_dilation: traces differ by " << std::abs(a.trace() - b.trace())
       << "; equal traces are necessary";
    throw DomainError(os.str());
  }
  const Index d = a.rows();
  const ShodaResult kl = shoda_decomposition(b.transpose() - a);
  // X2^* = K, X1 = L, Y2^* = 1, Y1 = a - LK
  const Matrix x1 = kl.l;
  const Matrix x2 = kl.k.adjoint();
  const Matrix y1 = a - kl.l * kl.k;
  const Matrix y2 = identity(d);

  DilationResult r;
  r.space = TensorSpace{d, d};
  r.structure = Structure::rank_two;
  r.m = outer_from_factors(x1, x2) + outer_from_factors(y1, y2);
  r.certificates["partial_trace_a"] = relative_residual(trace_b(r.m, r.space), a);
  r.certificates["partial_trace_b"] = relative_residual(trace_a(r.m, r.space), b);
  r.certificates["rank"] = static_cast<double>(rank_tol(r.m));
  r.certificates["shoda_residual"] = kl.residual;
  return r;
}

/// Same partial traces, prescribed rank: M_t = m + t N where N is the cyclic
/// shift product S_{d_A} (x) S_{d_B} with all rows from `kept` on set to zero.
/// N vanishes on every entry that a partial trace reads, so the marginals are
/// unchanged for every t. Each additional kept row changes the rank by at most
/// one, so a scan over `kept` reaches every rank between rank(m) and d_A d_B.
inline DilationResult adjust_dilation_rank(const Matrix& m, const TensorSpace& space, Index target,
                                           const Tolerance& tol = {}) {
  space.check(m, "adjust_dilation_rank");
  if (space.factors() != 2) throw DimensionError("adjust_dilation_rank: needs a bipartite space");
  const Index total = space.total();
  const Index current = rank_tol(m, tol);
  if (target < current || target > total) {
    std::ostringstream os;
    os << "adjust_dilation_rank: target rank " << target << " outside [" << current << ", " << total
       << "]";
    throw DomainError(os.str());
  }
  const Matrix a = trace_b(m, space);
  const Matrix b = trace_a(m, space);
  DilationResult r;
  r.space = space;
  r.structure = Structure::rank_r;
  auto finish = [&](const Matrix& mt, double t, Index kept) {
    r.m = mt;
    r.certificates["t"] = t;
    r.certificates["kept_rows"] = static_cast<double>(kept);
    r.certificates["rank"] = static_cast<double>(rank_tol(mt, tol));
    r.certificates["partial_trace_a"] = relative_residual(trace_b(mt, space), a);
    r.certificates["partial_trace_b"] = relative_residual(trace_a(mt, space), b);
    return r;
  };
  if (target == current) return finish(m, 0.0, 0);
  if (space.dim(0) < 2 || space.dim(1) < 2) {
    throw DomainError("adjust_dilation_rank: both local dimensions must be at least 2 to change the rank");
  }

  const Matrix shift = kron(cyclic_shift(space.dim(0)), cyclic_shift(space.dim(1)));
  const double base = m.norm() > 0.0 ? m.norm() : 1.0;
  for (int attempt = 0; attempt < 32; ++attempt) {
    // 1, 1/2, 2, 1/4, 4, ...
    const int e = (attempt + 1) / 2;
    const double factor = attempt == 0 ? 1.0 : (attempt % 2 ? std::ldexp(1.0, -e) : std::ldexp(1.0, e));
    const double t = factor * base;
    Matrix partial = Matrix::Zero(total, total);
    for (Index kept = 1; kept <= total; ++kept) {
      partial.row(kept - 1) = shift.row(kept - 1);
      const Matrix mt = m + t * partial;
      if (rank_tol(mt, tol) == target) return finish(mt, t, kept);
    }
  }
  throw NumericalError("adjust_dilation_rank: no admissible t found after 32 attempts; check tolerances");
}

/// max(rank A, rank B) <= rank(M) * min(d_A, d_B).
inline InequalityReport check_dimension_constraint(const Matrix& m, const TensorSpace& space,
                                                   const Tolerance& tol = {}) {
  space.check(m, "check_dimension_constraint");
  if (space.factors() != 2) throw DimensionError("check_dimension_constraint: needs a bipartite space");
  const auto rank_a = static_cast<double>(rank_tol(trace_b(m, space), tol));
  const auto rank_b = static_cast<double>(rank_tol(trace_a(m, space), tol));
  const auto rank_m = static_cast<double>(rank_tol(m, tol));
  const auto dmin = static_cast<double>(std::min(space.dim(0), space.dim(1)));
  return InequalityReport::make("dimension_constraint", std::max(rank_a, rank_b), rank_m * dmin, 0.0,
                                {{"rank_a", rank_a}, {"rank_b", rank_b}, {"r", rank_m}, {"d_min", dmin}});
}

}  // namespace ptl
