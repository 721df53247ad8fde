#pragma once

#include <optional>
#include <utility>

#include "gammoid/alpha.hpp"
#include "gammoid/catalog.hpp"
#include "gammoid/matroid.hpp"
#include "gammoid/minor_search.hpp"

namespace gammoid {

// A matroid is binary iff it has no U(2,4) minor.
inline bool is_binary(const Matroid& m) {
  return !find_minor_isomorphic(m, u24()).has_value();
}

enum class SpVerdict { gammoid, not_gammoid, inconclusive };

// Excluded-minor screen: an M(K4) minor rules the matroid out; absence of
// both M(K4) and U(2,4) minors makes it binary series-parallel, hence a
// gammoid. Anything else stays open.
inline SpVerdict series_parallel_gammoid_test(const Matroid& m) {
  if (find_minor_isomorphic(m, mk4())) return SpVerdict::not_gammoid;
  if (!find_minor_isomorphic(m, u24())) return SpVerdict::gammoid;
  return SpVerdict::inconclusive;
}

// A subset of rank 3 with negative alpha, if any: the restriction to its
// closure is then a rank-3 matroid that is not strict, so not a gammoid.
inline std::optional<Mask> rank3_alpha_witness(const Matroid& m) {
  const AlphaTable& t = alpha_table(m);
  const auto& rank = m.rank_table();
  for (Mask x = 0; x < t.values.size(); ++x)
    if (t.values[x] < 0 && rank[x] == 3) return x;
  return std::nullopt;
}

// Looks for an independent X with |X| = rk(E) - 3 whose contraction has a
// negative alpha value at some Y. Such a pair certifies a rank-3 minor that
// is not a strict gammoid; since rank-3 gammoids are strict, the matroid has
// a non-gammoid minor. Y is reported in the original labeling.
inline std::optional<std::pair<Mask, Mask>> rank3_contraction_witness(
    const Matroid& m) {
  if (m.rank() < 3)
    throw RankTooLow("rank-3 contraction witness needs rank >= 3");
  const int csize = m.rank() - 3;
  std::optional<std::pair<Mask, Mask>> found;
  for_each_subset_of_size(m.ground_mask(), csize, [&](Mask x) {
    if (found) return;
    if (m.rank_of(x) != csize) return;
    const MinorSpec spec{x, 0};
    Matroid contraction = m.minor(spec);
    const auto witness = alpha_non_negative(contraction);
    if (!witness) return;
    const std::vector<int> back = m.minor_element_map(spec);
    Mask y = 0;
    for (int e : elements_of(*witness)) y |= bit(back[e]);
    found = std::make_pair(x, y);
  });
  return found;
}

}  // namespace gammoid
