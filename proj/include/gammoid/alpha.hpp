#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "gammoid/matroid.hpp"

namespace gammoid {

// Values of the set function defined by
//   a(X) = |X| - rk(X) - sum of a(F) over flats F strictly inside X,
// for every subset of the ground set. a >= 0 everywhere characterizes
// strict gammoids.
struct AlphaTable {
  std::vector<std::int64_t> values;      // indexed by subset mask
  std::optional<Mask> negative_witness;  // smallest mask with a < 0
};

namespace detail {

inline std::shared_ptr<const AlphaTable> compute_alpha(const Matroid& m) {
  const int n = m.size();
  const std::size_t total = std::size_t{1} << n;
  const auto& rank = m.rank_table();
  const auto& flats = m.flats();

  // Resolve the recurrence on flats first; flats of equal rank are
  // incomparable, so increasing-rank order is a valid evaluation order.
  std::vector<std::int64_t> on_flat(flats.size(), 0);
  for (std::size_t i = 0; i < flats.size(); ++i) {
    const Mask f = flats[i];
    std::int64_t v = popcount(f) - rank[f];
    for (std::size_t j = 0; j < i; ++j) {
      const Mask g = flats[j];
      if (g != f && (g & f) == g) v -= on_flat[j];
    }
    on_flat[i] = v;
  }

  // Subset-sum transform turns "sum over flats inside X" into one pass.
  auto table = std::make_shared<AlphaTable>();
  std::vector<std::int64_t> sum(total, 0);
  for (std::size_t i = 0; i < flats.size(); ++i) sum[flats[i]] = on_flat[i];
  std::vector<std::int64_t> flat_value = sum;
  for (int e = 0; e < n; ++e) {
    const Mask b = bit(e);
    for (Mask x = 0; x < total; ++x)
      if (x & b) sum[x] += sum[x & ~b];
  }
  table->values.resize(total);
  for (Mask x = 0; x < total; ++x) {
    const std::int64_t proper = sum[x] - flat_value[x];
    table->values[x] = popcount(x) - rank[x] - proper;
    if (table->values[x] < 0 && !table->negative_witness)
      table->negative_witness = x;
  }
  return table;
}

}  // namespace detail

inline const AlphaTable& alpha_table(const Matroid& m) {
  auto& cache = m.cache();
  {
    std::lock_guard<std::mutex> lk(cache.mu);
    if (cache.alpha) return *cache.alpha;
  }
  auto table = detail::compute_alpha(m);
  std::lock_guard<std::mutex> lk(cache.mu);
  if (!cache.alpha) cache.alpha = std::move(table);
  return *cache.alpha;
}

inline std::int64_t alpha(const Matroid& m, Mask x) {
  return alpha_table(m).values[x];
}

enum class AlphaScan {
  all_subsets,
  // Incomplete shortcut that only inspects flats; a clean verdict from it
  // does not certify anything.
  flats_only_heuristic,
};

// Empty result means a(X) >= 0 for every X (m is a strict gammoid);
// otherwise returns a subset with negative value.
inline std::optional<Mask> alpha_non_negative(
    const Matroid& m, AlphaScan scan = AlphaScan::all_subsets) {
  if (scan == AlphaScan::flats_only_heuristic) {
    const AlphaTable& t = alpha_table(m);
    for (Mask f : m.flats())
      if (t.values[f] < 0) return f;
    return std::nullopt;
  }
  return alpha_table(m).negative_witness;
}

}  // namespace gammoid
