#pragma once

#include <vector>

#include "gammoid/matroid.hpp"

namespace gammoid {

inline Mask mask_from_1based(std::initializer_list<int> elems) {
  Mask m = 0;
  for (int e : elems) m |= bit(e - 1);
  return m;
}

// U(2,4): the excluded minor for binary matroids.
inline const Matroid& u24() {
  static const Matroid m = Matroid::uniform(2, 4);
  return m;
}

// Cycle matroid of K4 on edge set {12,13,14,23,24,34}; the four triangles
// are the non-basis 3-sets.
inline const Matroid& mk4() {
  static const Matroid m = [] {
    std::vector<Mask> bases;
    const std::vector<Mask> triangles = {
        mask_from_1based({1, 2, 4}), mask_from_1based({1, 3, 5}),
        mask_from_1based({2, 3, 6}), mask_from_1based({4, 5, 6})};
    for_each_subset_of_size(full_mask(6), 3, [&](Mask x) {
      for (Mask t : triangles)
        if (t == x) return;
      bases.push_back(x);
    });
    return Matroid::from_bases(6, std::move(bases));
  }();
  return m;
}

// G(8,4,1): rank 4 on 8 elements; every 4-set is a basis except five.
inline const Matroid& g841() {
  static const Matroid m = [] {
    std::vector<Mask> bases;
    const std::vector<Mask> dependent = {
        mask_from_1based({1, 3, 7, 8}), mask_from_1based({1, 5, 6, 8}),
        mask_from_1based({2, 3, 6, 8}), mask_from_1based({4, 5, 6, 7}),
        mask_from_1based({2, 4, 7, 8})};
    for_each_subset_of_size(full_mask(8), 4, [&](Mask x) {
      for (Mask d : dependent)
        if (d == x) return;
      bases.push_back(x);
    });
    return Matroid::from_bases(8, std::move(bases));
  }();
  return m;
}

}  // namespace gammoid
