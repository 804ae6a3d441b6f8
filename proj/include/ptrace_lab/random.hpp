#pragma once

// Seeded generators for the random matrix families used by the property sweeps.
// The bit stream comes from std::mt19937_64, whose output sequence is fixed by
// the standard; normal variates use our own Box-Muller so results do not depend
// on the standard library's distribution implementation.

#include "ptrace_lab/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

namespace ptl {

enum class RandomKind { ginibre, hermitian, positive, normal, fixed_rank, unit_vector };

inline std::string to_string(RandomKind kind) {
  switch (kind) {
    case RandomKind::ginibre: return "ginibre";
    case RandomKind::hermitian: return "hermitian";
    case RandomKind::positive: return "positive";
    case RandomKind::normal: return "normal";
    case RandomKind::fixed_rank: return "fixed-rank";
    case RandomKind::unit_vector: return "unit-vector";
  }
  return "unknown";
}

struct RandomSpec {
  std::uint64_t seed = 0;
  RandomKind kind = RandomKind::ginibre;
  Index rows = 1;
  Index cols = 1;
  Index rank = 0;  // fixed_rank only

  void validate() const {
    if (rows < 1 || cols < 1) throw DimensionError("random spec: shape must be positive");
    switch (kind) {
      case RandomKind::hermitian:
      case RandomKind::positive:
      case RandomKind::normal:
        if (rows != cols) {
          throw DimensionError("random spec: " + to_string(kind) + " requires a square shape");
        }
        break;
      case RandomKind::fixed_rank:
        if (rank < 0 || rank > std::min(rows, cols)) {
          throw DomainError("random spec: fixed-rank requires 0 <= r <= min(rows, cols)");
        }
        break;
      case RandomKind::unit_vector:
        if (cols != 1) throw DimensionError("random spec: unit-vector requires cols == 1");
        break;
      case RandomKind::ginibre:
        break;
    }
  }
};

/// splitmix64 finalizer; derives independent stream seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index = 0) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Complex Ginibre entry (g1 + i g2) / sqrt(2).
  Complex ginibre() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * std::numbers::sqrt2 * 0.5;
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Matrix ginibre(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.ginibre();
  }
  return m;
}

/// Hermitian part with exact symmetry: entry (j,i) is the conjugate of (i,j) bit for bit.
inline Matrix exact_hermitian_part(const Matrix& g) {
  const Index d = g.rows();
  Matrix h(d, d);
  for (Index i = 0; i < d; ++i) {
    h(i, i) = Complex(g(i, i).real(), 0.0);
    for (Index j = i + 1; j < d; ++j) {
      const Complex v = 0.5 * (g(i, j) + std::conj(g(j, i)));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix on R's diagonal).
inline Matrix haar_unitary(Rng& rng, Index d) {
  const Matrix g = ginibre(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

inline Matrix generate(Rng& rng, const RandomSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case RandomKind::ginibre:
      return ginibre(rng, spec.rows, spec.cols);
    case RandomKind::hermitian:
      return exact_hermitian_part(ginibre(rng, spec.rows, spec.rows));
    case RandomKind::positive: {
      const Matrix g = ginibre(rng, spec.rows, spec.rows);
      return exact_hermitian_part(g * g.adjoint());
    }
    case RandomKind::normal: {
      const Matrix u = haar_unitary(rng, spec.rows);
      Vector z(spec.rows);
      for (Index i = 0; i < spec.rows; ++i) z(i) = rng.ginibre();
      return u * z.asDiagonal() * u.adjoint();
    }
    case RandomKind::fixed_rank: {
      const Matrix x = ginibre(rng, spec.rows, spec.rank);
      const Matrix y = ginibre(rng, spec.cols, spec.rank);
      if (spec.rank == 0) return Matrix::Zero(spec.rows, spec.cols);
      return x * y.adjoint();
    }
    case RandomKind::unit_vector: {
      Matrix v = ginibre(rng, spec.rows, 1);
      return v / v.norm();
    }
  }
  throw DomainError("random spec: unknown kind");
}

/// Deterministic in spec.seed: the same spec always yields bitwise-identical entries.
inline Matrix generate(const RandomSpec& spec) {
  Rng rng(spec.seed);
  return generate(rng, spec);
}

/// Normal matrix U diag(z_1..z_r, 0..0) U* of exact rank r.
inline Matrix random_normal_of_rank(Rng& rng, Index d, Index r) {
  const Matrix u = haar_unitary(rng, d);
  Vector z = Vector::Zero(d);
  for (Index i = 0; i < r; ++i) z(i) = rng.ginibre();
  return u * z.asDiagonal() * u.adjoint();
}

}  // namespace ptl
