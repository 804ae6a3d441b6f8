#pragma once

// Dense complex matrix substrate: the types every other header works with,
// tolerance-aware rank decisions and thin wrappers over Eigen decompositions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ptl {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not fit together (non-square input, wrong tensor factorization, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition does not hold (nonzero trace, rank too large, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A decomposition or iterative construction failed to produce a usable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Absolute and relative thresholds for rank and equality decisions.
/// A singular value counts as nonzero when it exceeds max(abs, rel * sigma_1).
struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-12;

  void validate() const {
    if (!(abs >= 0.0) || !(rel >= 0.0) || (abs == 0.0 && rel == 0.0)) {
      throw DomainError("tolerance: abs and rel must be non-negative and not both zero");
    }
  }

  double threshold(double sigma_max) const { return std::max(abs, rel * sigma_max); }
};

inline bool all_finite(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

/// Short hex digest of the entries, used to identify a matrix in error messages.
inline std::string fingerprint(const Matrix& m) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double x) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &x, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      mix(m(i, j).real());
      mix(m(i, j).imag());
    }
  }
  std::ostringstream os;
  os << m.rows() << "x" << m.cols() << ":" << std::hex << h;
  return os.str();
}

inline void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) {
    throw DomainError(std::string(what) + ": matrix has non-finite entries");
  }
}

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

inline double frobenius(const Matrix& m) { return m.norm(); }

inline Matrix identity(Index d) { return Matrix::Identity(d, d); }

/// Matrix unit |i><j| of size d.
inline Matrix unit(Index d, Index i, Index j) {
  Matrix e = Matrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Matrix kron_power(const Matrix& a, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, a);
  return out;
}

/// Singular values in decreasing order.
inline RealVector singular_values(const Matrix& m) {
  require_finite(m, "singular_values");
  if (m.size() == 0) return RealVector(0);
  Eigen::BDCSVD<Matrix> svd(m);
  RealVector s = svd.singularValues();
  if (svd.info() != Eigen::Success || !s.allFinite()) {
    throw NumericalError("singular_values: SVD did not converge for matrix " + fingerprint(m));
  }
  return s;
}

/// Number of singular values above tol.threshold(sigma_1).
inline Index rank_tol(const Matrix& m, const Tolerance& tol = {}) {
  tol.validate();
  const RealVector s = singular_values(m);
  if (s.size() == 0) return 0;
  const double thr = tol.threshold(s(0));
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > thr) ++r;
  }
  return r;
}

inline double hermiticity_residual(const Matrix& m) { return (m - m.adjoint()).norm(); }

inline double normality_residual(const Matrix& m) {
  return (m * m.adjoint() - m.adjoint() * m).norm();
}

/// Real eigenvalues of a Hermitian matrix, decreasing.
inline RealVector eig_hermitian(const Matrix& m, const Tolerance& tol = {}) {
  require_square(m, "eig_hermitian");
  require_finite(m, "eig_hermitian");
  if (hermiticity_residual(m) > tol.abs * (1.0 + m.norm())) {
    throw DomainError("eig_hermitian: input is not Hermitian (" + fingerprint(m) + ")");
  }
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eig_hermitian: eigensolver did not converge for " + fingerprint(m));
  }
  return es.eigenvalues().reverse();
}

/// Largest eigenvalue of a matrix that is Hermitian by construction; no check.
inline double lambda_max_unchecked(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

/// Modulus |c| = (c* c)^{1/2}.
inline Matrix abs_matrix(const Matrix& c) {
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeThinV);
  const Matrix& v = svd.matrixV();
  return v * svd.singularValues().cast<Complex>().asDiagonal() * v.adjoint();
}

inline Matrix matrix_power(const Matrix& m, int k) {
  Matrix out = identity(m.rows());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

/// Cyclic shift |i+1 mod d><i|.
inline Matrix cyclic_shift(Index d) {
  Matrix s = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) s((i + 1) % d, i) = 1.0;
  return s;
}

/// Upper-shift Jordan block J_k(lambda).
inline Matrix jordan_block(Index k, Complex lambda) {
  Matrix j = lambda * identity(k);
  for (Index i = 0; i + 1 < k; ++i) j(i, i + 1) = 1.0;
  return j;
}

}  // namespace ptl
