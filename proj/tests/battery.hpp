#pragma once

// Canonical pairs of Jordan data admitting a joint rank-one dilation:
// equal nonzero blocks, zero-eigenvalue block sizes within one of each other.

#include "ptrace_lab/dilations.hpp"
#include "ptrace_lab/random.hpp"

#include <utility>
#include <vector>

namespace ptl::oracle {

inline std::vector<std::pair<JordanSpec, JordanSpec>> jordan_battery() {
  using B = JordanBlock;
  const Complex i(0.0, 1.0);
  auto spec = [](std::vector<B> blocks) { return JordanSpec{std::move(blocks), std::nullopt}; };
  auto with_basis = [](std::vector<B> blocks, std::uint64_t seed) {
    JordanSpec s{std::move(blocks), std::nullopt};
    Rng rng(seed);
    const Index d = s.dimension();
    s.basis = identity(d) + 0.3 * ginibre(rng, d, d);
    return s;
  };
  std::vector<std::pair<JordanSpec, JordanSpec>> out;
  out.push_back({spec({{1.0, 1}}), spec({{1.0, 1}})});
  out.push_back({spec({{2.0, 1}}), spec({{2.0, 1}, {0.0, 1}})});
  out.push_back({spec({{0.0, 2}}), spec({{0.0, 1}})});
  out.push_back({spec({{0.0, 2}}), spec({{0.0, 3}})});
  out.push_back({spec({{0.0, 1}}), spec({{0.0, 1}})});
  out.push_back({spec({{1.0, 2}}), spec({{1.0, 2}, {0.0, 1}})});
  out.push_back({spec({{1.0 + i, 1}, {2.0, 1}}), spec({{2.0, 1}, {1.0 + i, 1}})});
  out.push_back({spec({{3.0, 2}, {0.0, 2}}), spec({{3.0, 2}, {0.0, 1}})});
  out.push_back({spec({{0.0, 2}, {0.0, 1}}), spec({{0.0, 1}, {0.0, 1}, {0.0, 1}})});
  out.push_back({spec({{0.0, 3}, {0.0, 1}}), spec({{0.0, 2}, {0.0, 2}})});
  out.push_back({spec({{1.0, 1}, {0.0, 2}}), spec({{1.0, 1}, {0.0, 1}})});
  out.push_back({spec({{-1.0, 3}}), spec({{-1.0, 3}})});
  out.push_back({spec({{2.0, 1}, {2.0, 1}}), spec({{2.0, 1}, {2.0, 1}, {0.0, 1}})});
  out.push_back({spec({{1.0, 1}, {2.0, 1}, {3.0, 1}}), spec({{3.0, 1}, {2.0, 1}, {1.0, 1}, {0.0, 1}})});
  out.push_back({spec({{i, 2}, {0.0, 1}}), spec({{i, 2}, {0.0, 2}})});
  out.push_back({spec({{0.0, 4}}), spec({{0.0, 3}, {0.0, 1}})});
  out.push_back({with_basis({{1.0, 1}, {0.0, 2}}, 11), with_basis({{1.0, 1}, {0.0, 1}}, 12)});
  out.push_back({with_basis({{2.0, 2}, {0.0, 1}}, 13), with_basis({{2.0, 2}}, 14)});
  out.push_back({spec({{0.5, 1}, {0.0, 1}, {0.0, 1}}), spec({{0.5, 1}, {0.0, 2}})});
  out.push_back({with_basis({{1.0, 1}}, 15), with_basis({{1.0, 1}, {0.0, 1}, {0.0, 1}}, 16)});
  return out;
}

}  // namespace ptl::oracle
