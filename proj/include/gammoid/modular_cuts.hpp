#pragma once

#include <algorithm>
#include <vector>

#include "gammoid/matroid.hpp"

namespace gammoid {

// A modular cut, identified by its minimal flats; all_flats is the up-closure
// inside the flat lattice. The empty family and the full lattice both qualify.
struct ModularCut {
  std::vector<Mask> minimal_flats;  // antichain, sorted
  std::vector<Mask> all_flats;      // sorted

  bool contains(Mask f) const {
    return std::binary_search(all_flats.begin(), all_flats.end(), f);
  }

  bool operator==(const ModularCut&) const = default;
};

inline bool is_modular_pair(const Matroid& m, Mask f, Mask g) {
  return m.rank_of(f) + m.rank_of(g) == m.rank_of(f | g) + m.rank_of(f & g);
}

// Checks both closure conditions for a family of flats of m.
inline bool is_modular_cut(const Matroid& m, const std::vector<Mask>& family) {
  for (Mask f : family)
    if (!m.is_flat(f)) return false;
  std::vector<Mask> sorted = family;
  std::sort(sorted.begin(), sorted.end());
  auto in = [&](Mask f) {
    return std::binary_search(sorted.begin(), sorted.end(), f);
  };
  for (Mask f : sorted) {
    for (Mask g : m.flats())
      if ((f & g) == f && !in(g)) return false;  // super-flat missing
  }
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j)
      if (is_modular_pair(m, sorted[i], sorted[j]) &&
          !in(sorted[i] & sorted[j]))
        return false;
  return true;
}

inline ModularCut make_cut(std::vector<Mask> all_flats) {
  std::sort(all_flats.begin(), all_flats.end());
  ModularCut cut;
  for (Mask f : all_flats) {
    bool minimal = true;
    for (Mask g : all_flats)
      if (g != f && (g & f) == g) {
        minimal = false;
        break;
      }
    if (minimal) cut.minimal_flats.push_back(f);
  }
  cut.all_flats = std::move(all_flats);
  return cut;
}

struct ModularCutLimits {
  std::size_t max_flats = 64;
};

// Enumerates every modular cut of m: up-sets of the flat lattice generated
// by antichains, pruned by the modular-pair condition during the search.
// Deterministic order (by all_flats, lexicographically).
inline std::vector<ModularCut> modular_cuts(const Matroid& m,
                                            ModularCutLimits limits = {}) {
  const std::vector<Mask>& flats = m.flats();
  if (flats.size() > limits.max_flats)
    throw FlatLatticeTooLarge("flat lattice has " +
                              std::to_string(flats.size()) +
                              " members, cap is " +
                              std::to_string(limits.max_flats));
  // Work in descending popcount so every superset of a flat is decided first.
  std::vector<Mask> order = flats;
  std::sort(order.begin(), order.end(), [](Mask a, Mask b) {
    if (popcount(a) != popcount(b)) return popcount(a) > popcount(b);
    return a < b;
  });
  const int k = static_cast<int>(order.size());
  std::vector<int> index_of(1u << m.size(), -1);
  for (int i = 0; i < k; ++i) index_of[order[i]] = i;
  std::vector<std::vector<int>> supersets(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j)
      if ((order[j] & order[i]) == order[i]) supersets[i].push_back(j);

  std::vector<char> chosen(k, 0);
  std::vector<char> required(k, 0);
  std::vector<ModularCut> out;

  auto rec = [&](auto&& self, int i) -> void {
    if (i == k) {
      std::vector<Mask> all;
      for (int j = 0; j < k; ++j)
        if (chosen[j]) all.push_back(order[j]);
      out.push_back(make_cut(std::move(all)));
      return;
    }
    // Exclude, unless some included modular pair forces this flat in.
    if (!required[i]) {
      chosen[i] = 0;
      self(self, i + 1);
    }
    // Include, if the up-closure allows it.
    bool up_ok = true;
    for (int j : supersets[i])
      if (!chosen[j]) {
        up_ok = false;
        break;
      }
    if (up_ok) {
      std::vector<int> newly_required;
      bool feasible = true;
      for (int j = 0; j < i && feasible; ++j) {
        if (!chosen[j]) continue;
        if (!is_modular_pair(m, order[i], order[j])) continue;
        const Mask meet = order[i] & order[j];
        const int mi = index_of[meet];
        if (mi <= i) {
          // Already decided (or is one of the pair); must be chosen.
          if (mi < i && !chosen[mi]) feasible = false;
        } else if (!required[mi]) {
          required[mi] = 1;
          newly_required.push_back(mi);
        }
      }
      if (feasible) {
        chosen[i] = 1;
        self(self, i + 1);
        chosen[i] = 0;
      }
      for (int j : newly_required) required[j] = 0;
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(),
            [](const ModularCut& a, const ModularCut& b) {
              return a.all_flats < b.all_flats;
            });
  return out;
}

// Crapo single-element extension: the new element lies in the closure of
// exactly the flats of the cut. The empty cut adds a coloop, the full
// lattice adds a loop. The result is re-validated against the axioms.
inline Matroid extend_by_cut(const Matroid& m, const ModularCut& cut) {
  if (!is_modular_cut(m, cut.all_flats))
    throw InvalidCut("family is not a modular cut of this matroid");
  const int n = m.size();
  if (n + 1 > kMaxGroundSize)
    throw SizeExceeded("extension exceeds the ground set cap");
  const Mask full = m.ground_mask();
  const int e = n;
  auto rank_ext = [&](Mask x) -> int {
    if (!has_bit(x, e)) return m.rank_of(x);
    const Mask base = x & full;
    const int r = m.rank_of(base);
    return cut.contains(m.closure(base)) ? r : r + 1;
  };
  const int new_rank = rank_ext(full | bit(e));
  std::vector<Mask> bases;
  for_each_subset_of_size(full | bit(e), new_rank, [&](Mask x) {
    // rank_ext(x) <= |x| always, with equality exactly on independent sets.
    if (rank_ext(x) == new_rank) bases.push_back(x);
  });
  GroundSet g{n + 1, {}};
  if (!m.ground().labels.empty()) {
    for (int i = 0; i < n; ++i) g.labels.push_back(m.ground().label(i));
    g.labels.push_back("e" + std::to_string(n + 1));
  }
  return Matroid(std::move(g), std::move(bases), Matroid::Validation::full);
}

// The modular cut that re-attaches element e of ext over the sub-matroid on
// the remaining elements: flats of ext|rest whose closure in ext catches e.
inline std::vector<Mask> recovered_cut(const Matroid& ext, int e) {
  std::vector<Mask> out;
  const Mask rest = ext.ground_mask() & ~bit(e);
  for_each_subset(rest, [&](Mask f) {
    if ((ext.closure(f) & rest) != f) return;  // not a flat of the restriction
    if (ext.rank_of(f | bit(e)) == ext.rank_of(f)) out.push_back(f);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gammoid
