#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace gammoid {

// Subsets of a ground set with at most 20 elements, one bit per element.
using Mask = std::uint32_t;

inline constexpr int kMaxGroundSize = 20;

inline int popcount(Mask x) { return std::popcount(x); }

inline Mask bit(int i) { return Mask{1} << i; }

inline bool has_bit(Mask x, int i) { return (x >> i) & 1u; }

inline Mask full_mask(int n) { return n == 0 ? 0u : ((Mask{1} << n) - 1u); }

inline int lowest_bit(Mask x) { return std::countr_zero(x); }

inline std::vector<int> elements_of(Mask x) {
  std::vector<int> out;
  while (x) {
    int e = std::countr_zero(x);
    out.push_back(e);
    x &= x - 1;
  }
  return out;
}

inline Mask mask_of(std::initializer_list<int> elems) {
  Mask m = 0;
  for (int e : elems) m |= bit(e);
  return m;
}

// Re-indexes x (a subset of keep) into the compact numbering of keep's
// elements.
inline Mask compress(Mask x, Mask keep) {
  Mask out = 0;
  int idx = 0;
  Mask rest = keep;
  while (rest) {
    const int e = std::countr_zero(rest);
    rest &= rest - 1;
    if (has_bit(x, e)) out |= bit(idx);
    ++idx;
  }
  return out;
}

// Visits every subset of x, including 0 and x itself.
template <typename F>
void for_each_subset(Mask x, F&& f) {
  Mask s = x;
  while (true) {
    f(s);
    if (s == 0) break;
    s = (s - 1) & x;
  }
}

// Visits every subset of universe with exactly k bits, in increasing mask order.
template <typename F>
void for_each_subset_of_size(Mask universe, int k, F&& f) {
  std::vector<int> elems = elements_of(universe);
  const int n = static_cast<int>(elems.size());
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    Mask m = 0;
    for (int i : idx) m |= bit(elems[i]);
    f(m);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace gammoid
