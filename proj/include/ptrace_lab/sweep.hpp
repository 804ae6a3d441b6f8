#pragma once

// Seeded property sweeps: every checker over random instances on a list of
// tensor shapes. Output order is fixed by (shape, checker, seed) regardless of
// the number of worker threads.

#include "ptrace_lab/dilations.hpp"
#include "ptrace_lab/inequalities.hpp"
#include "ptrace_lab/kappa.hpp"
#include "ptrace_lab/random.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace ptl {

struct SweepRecord {
  std::string checker;
  std::string shape;
  std::uint64_t seed = 0;
  InequalityReport report;
};

struct SweepConfig {
  std::vector<std::string> checkers;
  std::vector<TensorSpace> shapes;
  int seeds = 100;
  std::uint64_t base_seed = 0;
  int jobs = 1;
  Tolerance tol{};
};

inline const std::vector<std::string>& sweep_checker_names() {
  static const std::vector<std::string> names = {"kron-majorization", "individual", "template",
                                                 "kyfan",             "audenaert",  "large-rank",
                                                 "rank-one",          "normal-rank", "dimension"};
  return names;
}

/// "2x3x2" -> {2, 3, 2}.
inline TensorSpace parse_shape(const std::string& text) {
  TensorSpace space;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 1) throw std::invalid_argument(part);
      space.dims.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw DomainError("shape \"" + text + "\": expected positive integers separated by 'x'");
    }
  }
  space.validate();
  return space;
}

namespace detail {

inline std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline bool sweep_applicable(const std::string& checker, const TensorSpace& space) {
  if (checker == "kyfan" || checker == "large-rank") return space.equal_dims();
  if (checker == "rank-one" || checker == "normal-rank" || checker == "dimension") return space.factors() == 2;
  return true;
}

inline Matrix random_of_rank(Rng& rng, Index side, Index rank) {
  return ginibre(rng, side, rank) * ginibre(rng, side, rank).adjoint();
}

inline std::vector<double> sweep_p_values() { return {1.0, 1.5, 2.0, 3.0, kInf}; }

}  // namespace detail

/// Reports of one checker on one random instance.
inline std::vector<InequalityReport> sweep_instance(const std::string& checker, const TensorSpace& space,
                                                    std::uint64_t seed, std::uint64_t base_seed = 0,
                                                    const Tolerance& tol = {}) {
  space.validate();
  Rng rng(mix_seed(base_seed ^ detail::name_hash(checker + "/" + space.to_string()), seed));
  const Index side = space.total();
  const int n = space.factors();
  std::vector<InequalityReport> out;
  auto append = [&](std::vector<InequalityReport> rs) { out.insert(out.end(), rs.begin(), rs.end()); };
  // rank 1..side, cycling with the seed, with every third instance full Ginibre
  const Index rank = 1 + static_cast<Index>(seed % static_cast<std::uint64_t>(side));
  auto general = [&]() { return seed % 3 == 0 ? ginibre(rng, side, side) : detail::random_of_rank(rng, side, rank); };

  if (checker == "kron-majorization") {
    std::vector<Matrix> cs;
    for (Index d : space.dims) cs.push_back(ginibre(rng, d, d));
    out.push_back(check_kron_majorization(cs, space));
  } else if (checker == "individual") {
    const Matrix m = general();
    for (double p : detail::sweep_p_values()) append(check_individual_bound(m, space, NormSpec::schatten(p), tol));
    for (Index k = 1; k <= 3; ++k) append(check_individual_bound(m, space, NormSpec::kyfan(k), tol));
  } else if (checker == "template") {
    const Matrix m = general();
    const Index r = rank_tol(m, tol);
    for (double p : detail::sweep_p_values()) {
      const NormSpec spec = NormSpec::schatten(p);
      std::vector<double> cs = {static_cast<double>(n - 1)};
      if (n == 2) cs = {0.5, 1.0, 1.5, 2.0, 2.5};
      for (double c : cs) {
        double kv = 1.0;  // c = n - 1: extended Audenaert
        if (n == 2) kv = kappa_schatten({spec, c, space.dims, 0}).value;
        out.push_back(check_template(m, space, spec, c, kv));
      }
    }
    for (Index k = 1; k <= 3; ++k) {
      for (double c : {0.0, 0.5, 1.0, 2.0}) {
        out.push_back(check_template(m, space, NormSpec::kyfan(k), c, kappa_kyfan({NormSpec::kyfan(k), c, space.dims, 0}).value));
        out.push_back(check_template(m, space, NormSpec::kyfan(k), c, kappa_kyfan({NormSpec::kyfan(k), c, space.dims, r}).value));
      }
    }
  } else if (checker == "kyfan") {
    const Matrix m = general();
    for (Index k = 1; k <= space.dim(0); ++k) {
      out.push_back(check_kyfan_family(m, space, k, KyFanGeneral{}, tol));
      if (n == 2) out.push_back(check_kyfan_family(m, space, k, KyFanTwoFactor{}, tol));
      const Matrix low = detail::random_of_rank(rng, side, 1 + static_cast<Index>(seed % static_cast<std::uint64_t>(k)));
      for (double c : {0.0, 0.5, 1.0, static_cast<double>(n)}) {
        out.push_back(check_kyfan_family(low, space, k, KyFanLowRank{c}, tol));
      }
    }
  } else if (checker == "audenaert") {
    Matrix m = general();
    if (seed % 2 == 1) m = exact_hermitian_part(m * m.adjoint());
    for (double p : detail::sweep_p_values()) {
      for (double g : {1.0, 2.0, 3.0}) append(check_audenaert_family(m, space, p, g, tol));
    }
  } else if (checker == "large-rank") {
    const Matrix m = general();
    for (double p : detail::sweep_p_values()) out.push_back(check_large_rank(m, space, p));
  } else if (checker == "rank-one") {
    const Matrix m = detail::random_of_rank(rng, side, 1);
    for (double g : {2.0, 3.0, 4.0}) out.push_back(check_rank_one_gamma(m, space, g, tol));
  } else if (checker == "normal-rank") {
    const Matrix m = random_normal_of_rank(rng, side, rank);
    out.push_back(check_normal_rank_r(m, space, tol));
  } else if (checker == "dimension") {
    out.push_back(check_dimension_constraint(detail::random_of_rank(rng, side, rank), space, tol));
  } else {
    throw DomainError("sweep: unknown checker \"" + checker + "\"");
  }
  return out;
}

inline std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  if (cfg.seeds < 1) throw DomainError("sweep: seeds must be >= 1");
  if (cfg.jobs < 1) throw DomainError("sweep: jobs must be >= 1");
  for (const auto& c : cfg.checkers) {
    const auto& names = sweep_checker_names();
    if (std::find(names.begin(), names.end(), c) == names.end()) {
      throw DomainError("sweep: unknown checker \"" + c + "\"");
    }
  }
  std::vector<SweepRecord> out;
  for (const auto& space : cfg.shapes) {
    for (const auto& checker : cfg.checkers) {
      if (!detail::sweep_applicable(checker, space)) continue;
      std::vector<std::vector<InequalityReport>> slots(static_cast<std::size_t>(cfg.seeds));
      auto worker = [&](int begin, int end) {
        for (int s = begin; s < end; ++s) {
          slots[static_cast<std::size_t>(s)] =
              sweep_instance(checker, space, static_cast<std::uint64_t>(s), cfg.base_seed, cfg.tol);
        }
      };
      const int jobs = std::min(cfg.jobs, cfg.seeds);
      if (jobs == 1) {
        worker(0, cfg.seeds);
      } else {
        std::vector<std::thread> threads;
        const int chunk = (cfg.seeds + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
          const int begin = j * chunk;
          const int end = std::min(cfg.seeds, begin + chunk);
          if (begin < end) threads.emplace_back(worker, begin, end);
        }
        for (auto& t : threads) t.join();
      }
      for (int s = 0; s < cfg.seeds; ++s) {
        for (auto& r : slots[static_cast<std::size_t>(s)]) {
          out.push_back({checker, space.to_string(), static_cast<std::uint64_t>(s), std::move(r)});
        }
      }
    }
  }
  return out;
}

}  // namespace ptl
