#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "gammoid/canonical.hpp"
#include "gammoid/matroid.hpp"

namespace gammoid {

// Searches for a minor of m isomorphic to the pattern. Every minor can be
// written with an independent contract set and a coindependent delete set,
// which fixes both sizes: |C| = rk(m) - rk(p), |D| = corank(m) - corank(p).
// Exhaustive over those pairs, with cheap invariant filters before the
// canonical-key comparison.
inline std::optional<MinorSpec> find_minor_isomorphic(const Matroid& m,
                                                      const Matroid& pattern) {
  if (pattern.size() > m.size()) return std::nullopt;
  const int c = m.rank() - pattern.rank();
  const int d = m.corank() - pattern.corank();
  if (c < 0 || d < 0) return std::nullopt;

  const CanonicalKey want = canonical_key(pattern);
  std::vector<int> pattern_deg = pattern.basis_degrees();
  std::sort(pattern_deg.begin(), pattern_deg.end());
  const std::size_t pattern_bases = pattern.bases().size();

  const auto& rank = m.rank_table();
  const Mask full = m.ground_mask();
  const int rk = m.rank();

  std::optional<MinorSpec> found;
  for_each_subset_of_size(full, c, [&](Mask contract) {
    if (found) return;
    if (rank[contract] != c) return;  // contract set must be independent
    for_each_subset_of_size(full & ~contract, d, [&](Mask remove) {
      if (found) return;
      if (rank[full & ~remove] != rk) return;  // delete set must be coindependent
      const MinorSpec spec{contract, remove};
      Matroid candidate = m.minor(spec);
      if (candidate.bases().size() != pattern_bases) return;
      std::vector<int> deg = candidate.basis_degrees();
      std::sort(deg.begin(), deg.end());
      if (deg != pattern_deg) return;
      if (canonical_key(candidate) == want) found = spec;
    });
  });
  return found;
}

}  // namespace gammoid
