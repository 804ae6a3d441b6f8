#pragma once

// The constant kappa(c) of the norm inequality template
//   sum_i |||M_i||| <= c ||M||_1 + kappa(c) |||M|||,
// kappa(c) = sup phi*(Lambda_1..Lambda_r) over lambda^(i) >= 0 with phi*(lambda^(i)) <= 1,
// where Lambda lists (sum_i lambda^(i)_{j_i} - c)_+ over all multi-indices, decreasingly.

#include "ptrace_lab/matrix.hpp"
#include "ptrace_lab/norms.hpp"
#include "ptrace_lab/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace ptl {

struct KappaQuery {
  NormSpec spec = NormSpec::schatten(2.0);
  double c = 0.0;
  std::vector<Index> dims;
  Index r = 0;  // rank cap; 0 means unconstrained (all prod d_i components)

  int n() const { return static_cast<int>(dims.size()); }

  Index total() const {
    return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
  }

  Index effective_r() const { return r == 0 ? total() : r; }

  bool unconstrained() const { return effective_r() == total(); }

  bool equal_dims() const {
    return std::all_of(dims.begin(), dims.end(), [&](Index d) { return d == dims.front(); });
  }

  void validate() const {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("kappa query: c must be finite and >= 0");
    if (dims.empty()) throw DimensionError("kappa query: needs at least one factor");
    for (Index d : dims) {
      if (d < 1) throw DimensionError("kappa query: local dimensions must be positive");
    }
    if (r < 0 || r > total()) throw DomainError("kappa query: rank cap must satisfy 1 <= r <= prod d_i");
  }
};

enum class KappaBranch { closed_form, parametrized, brute_force };

inline std::string to_string(KappaBranch b) {
  switch (b) {
    case KappaBranch::closed_form: return "closed-form";
    case KappaBranch::parametrized: return "parametrized";
    case KappaBranch::brute_force: return "brute-force";
  }
  return "unknown";
}

struct KappaResult {
  double value = 0.0;
  KappaBranch branch = KappaBranch::closed_form;
  bool lower_bound = false;  // true when the value is only a certified lower bound
  std::map<std::string, double> diagnostics;
};

struct LambdaProfile {
  std::vector<double> values;                 // decreasing, truncated to r
  std::vector<std::vector<double>> generator;  // the lambda^(i)
};

/// All (sum_i lams[i][j_i] - c)_+, sorted decreasingly and truncated to r.
inline LambdaProfile build_lambda(const std::vector<std::vector<double>>& lams, double c, Index r) {
  if (lams.empty()) throw DimensionError("build_lambda: needs at least one vector");
  Index total = 1;
  for (const auto& l : lams) {
    if (l.empty()) throw DimensionError("build_lambda: vectors must be non-empty");
    for (double v : l) {
      if (v < 0.0) throw DomainError("build_lambda: components must be non-negative");
    }
    total *= static_cast<Index>(l.size());
  }
  if (r < 1 || r > total) throw DomainError("build_lambda: r must satisfy 1 <= r <= prod d_i");

  std::vector<double> sums{0.0};
  for (const auto& l : lams) {
    std::vector<double> next;
    next.reserve(sums.size() * l.size());
    for (double s : sums) {
      for (double v : l) next.push_back(s + v);
    }
    sums = std::move(next);
  }
  for (double& s : sums) s = std::max(s - c, 0.0);
  std::sort(sums.begin(), sums.end(), std::greater<>());
  sums.resize(static_cast<std::size_t>(r));
  return {sums, lams};
}

/// n d^{n-1} - (d^n - (d-k)^n) / k for k <= d, (n-1) k^{n-1} for k >= d.
/// Integer arithmetic up to the final division, so the n = 2 value is exactly k.
inline double kappa_tilde(int n, Index d, Index k) {
  if (n < 1 || d < 1 || k < 1) throw DomainError("kappa_tilde: n, d, k must be positive");
  auto ipow = [](Index base, int e) {
    Index v = 1;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
  };
  if (k >= d) return static_cast<double>((n - 1) * ipow(k, n - 1));
  const Index numer = ipow(d, n) - ipow(d - k, n);
  const Index whole = n * ipow(d, n - 1) * k - numer;  // k * kappa_tilde
  return static_cast<double>(whole) / static_cast<double>(k);
}

/// Ky Fan norms: the supremum is attained at lambda^(i) = (1,..,1,0,..,0) with
/// min(d_i, k) ones; closed forms are used where available, otherwise the
/// canonical optimizer is evaluated.
inline KappaResult kappa_kyfan(const KappaQuery& q) {
  q.validate();
  if (!q.spec.is_kyfan()) throw DomainError("kappa_kyfan: needs a Ky Fan norm");
  const Index k = q.spec.k();
  const int n = q.n();
  const Index r = q.effective_r();

  std::vector<std::vector<double>> canonical;
  for (Index d : q.dims) {
    std::vector<double> v(static_cast<std::size_t>(d), 0.0);
    std::fill(v.begin(), v.begin() + std::min(d, k), 1.0);
    canonical.push_back(v);
  }
  const double evaluated = dual_gauge(build_lambda(canonical, q.c, r).values, q.spec);

  KappaResult out;
  out.branch = KappaBranch::closed_form;
  out.diagnostics["canonical_value"] = evaluated;
  if (q.c == 1.0 && q.unconstrained() && q.equal_dims()) {
    out.value = kappa_tilde(n, q.dims.front(), k);
  } else if (r <= k) {
    out.value = std::max(static_cast<double>(n) - q.c, 0.0);
  } else {
    out.value = evaluated;
    out.diagnostics["canonical_evaluation"] = 1.0;
  }
  return out;
}

namespace detail {

/// A vector with up to three levels: `hi` x count_hi, `lo` x count_lo, 0 x count_zero.
struct Levels {
  double hi;
  double lo;
  Index count_hi;
  Index count_lo;
  Index count_zero;
};

struct Composition {
  Index count_hi;
  Index count_lo;
  Index count_zero;
};

inline std::vector<Composition> compositions(Index d, bool zero_level) {
  std::vector<Composition> out;
  for (Index m = 1; m <= d; ++m) {
    for (Index z = 0; z <= (zero_level ? d - m : 0); ++z) out.push_back({m, d - m - z, z});
  }
  return out;
}

/// Levels from the position s in [0, 1] along the admissible range of the top
/// level; the second level is fixed by m hi^q + rest lo^q = 1.
inline Levels levels_at(const Composition& comp, double q, double s) {
  const double m = static_cast<double>(comp.count_hi);
  const double rest = static_cast<double>(comp.count_lo);
  const double top = std::pow(m, -1.0 / q);
  if (comp.count_lo == 0) return {top, 0.0, comp.count_hi, 0, comp.count_zero};
  const double bottom = std::pow(m + rest, -1.0 / q);
  const double hi = bottom + s * (top - bottom);
  const double lo = std::pow(std::max(0.0, (1.0 - m * std::pow(hi, q)) / rest), 1.0 / q);
  return {hi, std::min(lo, hi), comp.count_hi, comp.count_lo, comp.count_zero};
}

inline double two_factor_objective(const Levels& x, const Levels& y, double c, double q) {
  const double xv[3] = {x.hi, x.lo, 0.0};
  const double xc[3] = {static_cast<double>(x.count_hi), static_cast<double>(x.count_lo),
                        static_cast<double>(x.count_zero)};
  const double yv[3] = {y.hi, y.lo, 0.0};
  const double yc[3] = {static_cast<double>(y.count_hi), static_cast<double>(y.count_lo),
                        static_cast<double>(y.count_zero)};
  double total = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (xc[a] == 0.0 || yc[b] == 0.0) continue;
      const double v = xv[a] + yv[b] - c;
      if (v > 0.0) total += xc[a] * yc[b] * std::pow(v, q);
    }
  }
  return std::pow(total, 1.0 / q);
}

/// 32 x 32 grid over the two level positions, then coordinate ascent down to a 1e-10 step.
inline double maximize_pair(const Composition& cx, const Composition& cy, double c, double q) {
  auto f = [&](double s, double t) {
    return two_factor_objective(levels_at(cx, q, s), levels_at(cy, q, t), c, q);
  };
  constexpr int kGrid = 32;
  double best = -1.0;
  double bs = 0.0;
  double bt = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double s = static_cast<double>(i) / (kGrid - 1);
      const double t = static_cast<double>(j) / (kGrid - 1);
      const double v = f(s, t);
      if (v > best) {
        best = v;
        bs = s;
        bt = t;
      }
    }
  }
  double step = 1.0 / (kGrid - 1);
  for (int guard = 0; step >= 1e-10 && guard < 100000; ++guard) {
    bool moved = false;
    for (const auto& [ds, dt] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
      const double s = std::clamp(bs + ds * step, 0.0, 1.0);
      const double t = std::clamp(bt + dt * step, 0.0, 1.0);
      const double v = f(s, t);
      if (v > best) {
        best = v;
        bs = s;
        bt = t;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace detail

struct BruteForceConfig {
  int starts = 64;
  int iterations = 300;
  std::uint64_t seed = 1;
};

namespace detail {

inline void project_dual_ball(std::vector<double>& x, const NormSpec& spec) {
  for (double& v : x) v = std::max(v, 0.0);
  if (spec.is_kyfan()) {
    // Euclidean projection onto {0 <= x <= 1, sum x <= k}
    for (double& v : x) v = std::min(v, 1.0);
    const double k = static_cast<double>(spec.k());
    double sum = std::accumulate(x.begin(), x.end(), 0.0);
    if (sum <= k) return;
    double lo = 0.0;
    double hi = *std::max_element(x.begin(), x.end());
    auto shifted_sum = [&](double tau) {
      double s = 0.0;
      for (double v : x) s += std::clamp(v - tau, 0.0, 1.0);
      return s;
    };
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (shifted_sum(mid) > k) lo = mid; else hi = mid;
    }
    for (double& v : x) v = std::clamp(v - hi, 0.0, 1.0);
    return;
  }
  const double q = spec.q();
  if (std::isinf(q)) {
    for (double& v : x) v = std::min(v, 1.0);
    return;
  }
  const double nrm = lp_norm(x, q);
  if (nrm > 1.0) {
    for (double& v : x) v /= nrm;
  }
}

/// argmax of <g, v> over the nonnegative part of the dual unit ball.
inline std::vector<double> dual_ball_vertex(const std::vector<double>& g, const NormSpec& spec) {
  std::vector<double> v(g.size(), 0.0);
  if (spec.is_kyfan()) {
    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
    const auto k = std::min(static_cast<std::size_t>(spec.k()), g.size());
    for (std::size_t j = 0; j < k; ++j) {
      if (g[order[j]] > 0.0) v[order[j]] = 1.0;
    }
    return v;
  }
  const double q = spec.q();
  if (std::isinf(q)) {
    for (std::size_t j = 0; j < g.size(); ++j) v[j] = g[j] > 0.0 ? 1.0 : 0.0;
    return v;
  }
  if (q == 1.0) {
    const auto at = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
    if (g[at] > 0.0) v[at] = 1.0;
    return v;
  }
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = g[j] > 0.0 ? std::pow(g[j], 1.0 / (q - 1.0)) : 0.0;
  const double nrm = lp_norm(v, q);
  if (nrm > 0.0) {
    for (double& x : v) x /= nrm;
  }
  return v;
}

struct BruteForceState {
  const KappaQuery& query;
  std::vector<std::vector<Index>> multi;  // multi-index of every Lambda component

  explicit BruteForceState(const KappaQuery& q) : query(q) {
    multi.push_back({});
    for (Index d : q.dims) {
      std::vector<std::vector<Index>> next;
      for (const auto& prefix : multi) {
        for (Index j = 0; j < d; ++j) {
          auto v = prefix;
          v.push_back(j);
          next.push_back(std::move(v));
        }
      }
      multi = std::move(next);
    }
  }

  /// Objective value; fills grad (same shape as lams) when non-null.
  double evaluate(const std::vector<std::vector<double>>& lams,
                  std::vector<std::vector<double>>* grad) const {
    const std::size_t total = multi.size();
    std::vector<double> vals(total);
    for (std::size_t t = 0; t < total; ++t) {
      double s = -query.c;
      for (std::size_t i = 0; i < lams.size(); ++i) s += lams[i][static_cast<std::size_t>(multi[t][i])];
      vals[t] = std::max(s, 0.0);
    }
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    const auto r = static_cast<std::size_t>(query.effective_r());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r), order.end(),
                      [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    std::vector<double> top(r);
    for (std::size_t j = 0; j < r; ++j) top[j] = vals[order[j]];
    const double value = dual_gauge(top, query.spec);
    if (!grad) return value;

    for (std::size_t i = 0; i < lams.size(); ++i) std::fill((*grad)[i].begin(), (*grad)[i].end(), 0.0);
    if (value <= 0.0) return value;
    std::vector<double> dg(r, 0.0);
    const NormSpec& spec = query.spec;
    if (spec.is_kyfan()) {
      const double sum = std::accumulate(top.begin(), top.end(), 0.0);
      if (top[0] >= sum / static_cast<double>(spec.k())) {
        dg[0] = 1.0;
      } else {
        for (std::size_t j = 0; j < r; ++j) dg[j] = top[j] > 0.0 ? 1.0 / static_cast<double>(spec.k()) : 0.0;
      }
    } else {
      const double q = spec.q();
      if (std::isinf(q)) {
        dg[0] = 1.0;
      } else if (q == 1.0) {
        for (std::size_t j = 0; j < r; ++j) dg[j] = top[j] > 0.0 ? 1.0 : 0.0;
      } else {
        for (std::size_t j = 0; j < r; ++j) dg[j] = std::pow(top[j] / value, q - 1.0);
      }
    }
    for (std::size_t j = 0; j < r; ++j) {
      if (dg[j] == 0.0 || top[j] <= 0.0) continue;
      const auto& idx = multi[order[j]];
      for (std::size_t i = 0; i < lams.size(); ++i) (*grad)[i][static_cast<std::size_t>(idx[i])] += dg[j];
    }
    return value;
  }
};

}  // namespace detail

/// Projected multi-start ascent on the variational form, each start finished by
/// successive linearization. Returns the best value
/// found, which is a lower bound on kappa; spread = best - worst over starts.
inline KappaResult kappa_bruteforce(const KappaQuery& q, const BruteForceConfig& cfg = {}) {
  q.validate();
  if (q.total() > 256) throw DomainError("kappa_bruteforce: prod d_i must be <= 256");
  if (cfg.starts < 1 || cfg.iterations < 1) throw DomainError("kappa_bruteforce: budget must be >= 1");
  const detail::BruteForceState state(q);

  double best = 0.0;
  double worst = kInf;
  int best_start = 0;
  for (int s = 0; s < cfg.starts; ++s) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(s)));
    std::vector<std::vector<double>> lams;
    for (Index d : q.dims) {
      std::vector<double> v(static_cast<std::size_t>(d));
      for (double& x : v) x = rng.uniform();
      // start on the boundary of the dual ball
      const double g = dual_gauge(v, q.spec);
      if (g > 0.0) for (double& x : v) x /= g;
      detail::project_dual_ball(v, q.spec);
      lams.push_back(v);
    }
    auto grad = lams;
    double value = state.evaluate(lams, &grad);
    double step = 1.0;
    for (int it = 0; it < cfg.iterations && step > 1e-12; ++it) {
      auto trial = lams;
      for (std::size_t i = 0; i < trial.size(); ++i) {
        for (std::size_t j = 0; j < trial[i].size(); ++j) trial[i][j] += step * grad[i][j];
        detail::project_dual_ball(trial[i], q.spec);
      }
      const double tv = state.evaluate(trial, nullptr);
      if (tv > value + 1e-15) {
        lams = std::move(trial);
        value = state.evaluate(lams, &grad);
        step = std::min(step * 2.0, 4.0);
      } else {
        step *= 0.5;
      }
    }
    // The objective is convex in the lambdas, so jumping to the vertex that
    // maximizes the linearization never decreases it.
    for (int it = 0; it < cfg.iterations; ++it) {
      auto trial = lams;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = detail::dual_ball_vertex(grad[i], q.spec);
      const double tv = state.evaluate(trial, nullptr);
      if (!(tv > value + 1e-15)) break;
      lams = std::move(trial);
      value = state.evaluate(lams, &grad);
    }
    if (value > best) {
      best = value;
      best_start = s;
    }
    worst = std::min(worst, value);
  }
  KappaResult out;
  out.value = best;
  out.branch = KappaBranch::brute_force;
  out.lower_bound = true;
  out.diagnostics["starts"] = cfg.starts;
  out.diagnostics["iterations"] = cfg.iterations;
  out.diagnostics["spread"] = best - worst;
  out.diagnostics["best_start"] = best_start;
  return out;
}

/// Schatten norms. p = 1: (n - c)_+. Two factors: 0 for c >= 2, 2 - c on [1, 2];
/// on [0, 1) a search over two-level vectors (plus a zero level when q < 2).
/// Everything else falls through to kappa_bruteforce.
inline KappaResult kappa_schatten(const KappaQuery& q, const BruteForceConfig& fallback = {}) {
  q.validate();
  if (!q.spec.is_schatten()) throw DomainError("kappa_schatten: needs a Schatten norm");
  const double qq = q.spec.q();
  const double n = static_cast<double>(q.n());
  KappaResult out;
  out.branch = KappaBranch::closed_form;
  if (std::isinf(qq)) {
    out.value = std::max(n - q.c, 0.0);
    return out;
  }
  if (q.n() == 2 && q.c >= 2.0) {
    out.value = 0.0;
    return out;
  }
  if (q.n() == 2 && q.c >= 1.0) {
    out.value = 2.0 - q.c;
    return out;
  }
  if (q.n() != 2 || !q.unconstrained()) {
    KappaResult bf = kappa_bruteforce(q, fallback);
    bf.diagnostics["routed"] = 1.0;
    return bf;
  }
  const bool zero_level = qq < 2.0;
  double best = 0.0;
  int branches = 0;
  for (const auto& cx : detail::compositions(q.dims[0], zero_level)) {
    for (const auto& cy : detail::compositions(q.dims[1], zero_level)) {
      best = std::max(best, detail::maximize_pair(cx, cy, q.c, qq));
      ++branches;
    }
  }
  out.value = best;
  out.branch = KappaBranch::parametrized;
  out.diagnostics["branches"] = branches;
  out.diagnostics["zero_level"] = zero_level ? 1.0 : 0.0;
  return out;
}

/// Dispatch on the norm kind.
inline KappaResult kappa(const KappaQuery& q, const BruteForceConfig& fallback = {}) {
  return q.spec.is_kyfan() ? kappa_kyfan(q) : kappa_schatten(q, fallback);
}

}  // namespace ptl
