#pragma once

// Werner states and the two-copy inequality, Schmidt-number witnesses W_k and
// the associated k-positive map.

#include "ptrace_lab/dilations.hpp"
#include "ptrace_lab/matrix.hpp"
#include "ptrace_lab/random.hpp"
#include "ptrace_lab/report.hpp"
#include "ptrace_lab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

namespace ptl {

// ---------------------------------------------------------------------------
// Werner states

/// (1 + alpha F) / (d^2 + alpha d) on C^d (x) C^d.
inline Matrix werner_state(Index d, double alpha) {
  if (d < 2) throw DomainError("werner_state: d must be >= 2");
  if (!(alpha >= -1.0 && alpha <= 1.0)) throw DomainError("werner_state: alpha must lie in [-1, 1]");
  const double dd = static_cast<double>(d);
  return (identity(d * d) + alpha * flip_operator(d)) / (dd * dd + alpha * dd);
}

/// Side length d of a matrix on d (x) d.
inline Index square_root_dim(const Matrix& m, const char* what) {
  require_square(m, what);
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m.rows()))));
  if (d * d != m.rows()) {
    std::ostringstream os;
    os << what << ": matrix side " << m.rows() << " is not a perfect square";
    throw DimensionError(os.str());
  }
  return d;
}

/// ||M_A||_2^2 + ||M_B||_2^2 <= |alpha| |tr M|^2 + ||M||_2^2 / |alpha|.
inline InequalityReport check_two_copy(const Matrix& m, double alpha) {
  const Index d = square_root_dim(m, "check_two_copy");
  if (!(alpha < 0.0 && alpha >= -1.0)) throw DomainError("check_two_copy: alpha must lie in [-1, 0)");
  const TensorSpace space{d, d};
  const double a = trace_b(m, space).norm();
  const double b = trace_a(m, space).norm();
  const double abs_alpha = std::abs(alpha);
  const double fro = m.norm();
  const double tr = std::abs(m.trace());
  const double rhs = abs_alpha * tr * tr + fro * fro / abs_alpha;
  return InequalityReport::make("two_copy", a * a + b * b, rhs, inequality_tolerance(rhs),
                                {{"alpha", alpha}, {"d", static_cast<double>(d)}});
}

/// Rank-two matrix in factor form: M = |Psi(X1)><Psi(X2)| + |Psi(Y1)><Psi(Y2)|.
struct RankTwoFactors {
  Matrix x1, x2, y1, y2;

  Matrix assemble() const { return outer_from_factors(x1, x2) + outer_from_factors(y1, y2); }
};

/// slack(M) / ||M||_2^2 for the two-copy inequality and its gradient
/// (2 d/dZbar for every factor). Scale invariant.
struct TwoCopyObjective {
  double alpha;

  double value(const RankTwoFactors& z, RankTwoFactors* grad = nullptr) const {
    const double aa = std::abs(alpha);
    const Matrix a = z.x1 * z.x2.adjoint() + z.y1 * z.y2.adjoint();
    const Matrix bp = z.x2.adjoint() * z.x1 + z.y2.adjoint() * z.y1;
    const Complex t = (z.x2.adjoint() * z.x1).trace() + (z.y2.adjoint() * z.y1).trace();
    const double s11 = z.x1.squaredNorm();
    const double s22 = z.x2.squaredNorm();
    const double r11 = z.y1.squaredNorm();
    const double r22 = z.y2.squaredNorm();
    const Complex u = (z.x1.adjoint() * z.y1).trace();
    const Complex v = (z.y2.adjoint() * z.x2).trace();
    const double nn = s11 * s22 + r11 * r22 + 2.0 * (u * v).real();
    const double tt = std::norm(t);
    const double ss = a.squaredNorm() + bp.squaredNorm();
    const double f = (aa * tt - ss) / nn + 1.0 / aa;
    if (!grad) return f;

    const double num = aa * tt - ss;
    auto combine = [&](const Matrix& d_t, const Matrix& d_s, const Matrix& d_n) -> Matrix {
      return 2.0 * ((aa * d_t - d_s) / nn - (num / (nn * nn)) * d_n);
    };
    grad->x1 = combine(t * z.x2, a * z.x2 + z.x2 * bp, s22 * z.x1 + v * z.y1);
    grad->x2 = combine(std::conj(t) * z.x1, a.adjoint() * z.x1 + z.x1 * bp.adjoint(),
                       s11 * z.x2 + std::conj(u) * z.y2);
    grad->y1 = combine(t * z.y2, a * z.y2 + z.y2 * bp, r22 * z.y1 + std::conj(v) * z.x1);
    grad->y2 = combine(std::conj(t) * z.y1, a.adjoint() * z.y1 + z.y1 * bp.adjoint(),
                       r11 * z.y2 + u * z.x2);
    return f;
  }
};

struct SearchConfig {
  std::uint64_t seed = 1;
  int starts = 100;
  int iterations = 40;
  double initial_step = 0.1;
  int jobs = 1;

  void validate() const {
    if (starts < 1 || iterations < 1) throw DomainError("search config: starts and iterations must be >= 1");
    if (!(initial_step > 0.0)) throw DomainError("search config: initial step must be positive");
    if (jobs < 1) throw DomainError("search config: jobs must be >= 1");
  }
};

struct SearchResult {
  InequalityReport best;         // explicit report at the incumbent
  Matrix incumbent;              // the rank-two matrix with the smallest slack found
  double normalized_slack = 0.0; // slack / ||M||_2^2 at the incumbent
  int best_start = 0;
  bool violation = false;        // only set after re-verification at 1e-12
  std::uint64_t seed = 0;
  int starts = 0;
  int iterations = 0;
};

namespace detail {

inline RankTwoFactors scaled(const RankTwoFactors& z, double s) {
  return {s * z.x1, s * z.x2, s * z.y1, s * z.y2};
}

inline double factor_norm_sq(const RankTwoFactors& z) {
  return z.x1.squaredNorm() + z.x2.squaredNorm() + z.y1.squaredNorm() + z.y2.squaredNorm();
}

/// Balance the factors so that all four have unit Frobenius norm where possible;
/// keeps the iterate well conditioned without changing M's direction.
inline RankTwoFactors normalize(const RankTwoFactors& z) {
  const double total = std::sqrt(factor_norm_sq(z));
  if (total == 0.0) return z;
  return scaled(z, 2.0 / total);
}

struct StartOutcome {
  double value = std::numeric_limits<double>::infinity();
  RankTwoFactors point;
};

inline StartOutcome run_start(Index d, const TwoCopyObjective& obj, const SearchConfig& cfg, int index) {
  Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(index)));
  RankTwoFactors z{ginibre(rng, d, d), ginibre(rng, d, d), ginibre(rng, d, d), ginibre(rng, d, d)};
  z = normalize(z);
  RankTwoFactors g = z;
  double f = obj.value(z, &g);
  double step = cfg.initial_step;
  for (int it = 0; it < cfg.iterations; ++it) {
    const double gg = factor_norm_sq(g);
    if (gg < 1e-28) break;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      RankTwoFactors trial{z.x1 - step * g.x1, z.x2 - step * g.x2, z.y1 - step * g.y1, z.y2 - step * g.y2};
      const double ft = obj.value(trial);
      if (std::isfinite(ft) && ft <= f - 1e-4 * step * gg) {
        z = normalize(trial);
        f = obj.value(z, &g);
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return {f, z};
}

}  // namespace detail

/// Multi-start local descent over rank-two matrices in factor form, minimizing
/// the normalized two-copy slack. A negative result is reported as a violation
/// only if the explicit matrix confirms it with slack below -1e-12 (1 + rhs)
/// and the standard verdict fails; a non-negative minimum is evidence, never a proof.
inline SearchResult search_two_copy_violation(Index d, double alpha, const SearchConfig& cfg) {
  if (d < 2) throw DomainError("search_two_copy_violation: d must be >= 2");
  if (!(alpha < 0.0 && alpha >= -1.0)) throw DomainError("search_two_copy_violation: alpha must lie in [-1, 0)");
  cfg.validate();
  const TwoCopyObjective obj{alpha};

  std::vector<detail::StartOutcome> outcomes(static_cast<std::size_t>(cfg.starts));
  auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) outcomes[static_cast<std::size_t>(i)] = detail::run_start(d, obj, cfg, i);
  };
  const int jobs = std::min(cfg.jobs, cfg.starts);
  if (jobs <= 1) {
    worker(0, cfg.starts);
  } else {
    std::vector<std::thread> threads;
    const int chunk = (cfg.starts + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j) {
      const int begin = j * chunk;
      const int end = std::min(cfg.starts, begin + chunk);
      if (begin < end) threads.emplace_back(worker, begin, end);
    }
    for (auto& t : threads) t.join();
  }

  int best = 0;
  for (int i = 1; i < cfg.starts; ++i) {
    if (outcomes[static_cast<std::size_t>(i)].value < outcomes[static_cast<std::size_t>(best)].value) best = i;
  }
  SearchResult out;
  out.best_start = best;
  out.normalized_slack = outcomes[static_cast<std::size_t>(best)].value;
  out.incumbent = outcomes[static_cast<std::size_t>(best)].point.assemble();
  out.best = check_two_copy(out.incumbent, alpha);
  out.violation = !out.best.verdict && out.best.slack < -1e-12 * (1.0 + std::abs(out.best.rhs));
  out.seed = cfg.seed;
  out.starts = cfg.starts;
  out.iterations = cfg.iterations;
  out.best.constants["normalized_slack"] = out.normalized_slack;
  out.best.constants["rank"] = static_cast<double>(rank_tol(out.incumbent));
  return out;
}

// ---------------------------------------------------------------------------
// Schmidt-number witnesses and the k-positive map

struct WitnessSpec {
  Index d = 2;
  int n = 2;
  Index k = 1;

  void validate() const {
    if (d < 1) throw DomainError("witness spec: d must be positive");
    if (n < 1) throw DomainError("witness spec: n must be positive");
    if (k < 0 || k >= d) throw DomainError("witness spec: k must satisfy 0 <= k < d");
  }

  /// k = 0 or a single factor: the witness statement is trivial there.
  bool degenerate() const { return k == 0 || n == 1; }

  double coefficient() const { return 1.0 + static_cast<double>(n - 1) * static_cast<double>(k); }

  TensorSpace space() const { return TensorSpace::uniform(d, n); }

  Index side() const { return space().total(); }
};

/// W_k = (1 + (n-1)k) 1 - sum_i omega_(i) on (A_1..A_n) (x) (B_1..B_n), where
/// omega_(i) is the identity on A_i B_i and the unnormalized |Omega><Omega| on
/// every other pair A_j B_j.
inline Matrix witness_matrix(const WitnessSpec& w) {
  w.validate();
  const Index half = w.side();
  if (half * half > 4096) throw DomainError("witness_matrix: d^{2n} exceeds 4096; use witness_value instead");
  const Index full = half * half;
  auto digits = [&](Index idx) {
    std::vector<Index> out(static_cast<std::size_t>(w.n));
    for (int i = w.n - 1; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = idx % w.d;
      idx /= w.d;
    }
    return out;
  };
  Matrix out = w.coefficient() * identity(full);
  for (Index row = 0; row < full; ++row) {
    const auto a = digits(row / half);
    const auto b = digits(row % half);
    for (Index col = 0; col < full; ++col) {
      const auto ap = digits(col / half);
      const auto bp = digits(col % half);
      for (int i = 0; i < w.n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        bool hit = a[si] == ap[si] && b[si] == bp[si];
        for (int j = 0; j < w.n && hit; ++j) {
          const auto sj = static_cast<std::size_t>(j);
          if (j != i) hit = a[sj] == b[sj] && ap[sj] == bp[sj];
        }
        if (hit) out(row, col) -= 1.0;
      }
    }
  }
  return out;
}

/// <psi, W_k psi> for psi = (M (x) 1)|Omega>, i.e. (1 + (n-1)k)||M||_2^2 - sum_i ||M_i||_2^2.
inline double witness_value(const WitnessSpec& w, const Matrix& m) {
  w.validate();
  const TensorSpace space = w.space();
  space.check(m, "witness_value");
  double total = 0.0;
  for (int i = 0; i < w.n; ++i) total += marginal(m, space, i).squaredNorm();
  return w.coefficient() * m.squaredNorm() - total;
}

/// T(X) = (1 + (n-1)k) tr(X) 1 - sum_i tr_i[X] (x) 1 with the identity in place of factor i.
inline Matrix kpositive_map_apply(const Matrix& x, const TensorSpace& space, Index k) {
  space.check(x, "kpositive_map_apply");
  if (!space.equal_dims()) throw DimensionError("kpositive_map_apply: needs equal local dimensions");
  if (k < 0) throw DomainError("kpositive_map_apply: k must be >= 0");
  const double coeff = 1.0 + static_cast<double>(space.factors() - 1) * static_cast<double>(k);
  Matrix out = coeff * x.trace() * identity(x.rows());
  for (int i = 0; i < space.factors(); ++i) out -= trace_and_replace_identity(x, space, i);
  return out;
}

/// Choi matrix sum_{a,b} T(|a><b|) (x) |a><b| of a linear map on matrices over `space`.
inline Matrix choi_matrix(const std::function<Matrix(const Matrix&)>& map, const TensorSpace& space) {
  space.validate();
  const Index n = space.total();
  Matrix out = Matrix::Zero(n * n, n * n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      out += kron(map(unit(n, a, b)), unit(n, a, b));
    }
  }
  return out;
}

/// The rank-(k+1) matrix |0><0|^{(x)(n-1)} (x) 1_{k+1} (identity padded into C^d).
inline Matrix witness_sharp_example(const WitnessSpec& w) {
  w.validate();
  Matrix last = Matrix::Zero(w.d, w.d);
  for (Index i = 0; i <= w.k && i < w.d; ++i) last(i, i) = 1.0;
  Matrix out = last;
  for (int i = 0; i + 1 < w.n; ++i) out = kron(unit(w.d, 0, 0), out);
  return out;
}

}  // namespace ptl
