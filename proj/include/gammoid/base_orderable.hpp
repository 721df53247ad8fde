#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "gammoid/matroid.hpp"

namespace gammoid {

// Outcome of the strong base-orderability test. For a failing matroid the
// witness fixes one basis pair and records, for every bijection between the
// difference sets, a subset whose simultaneous exchange leaves the basis
// family.
struct SboWitness {
  bool orderable = true;
  std::pair<Mask, Mask> basis_pair{0, 0};
  // For the orderable verdict: phi on elements_of(B1 \ B2), ascending, as
  // elements of B2 \ B1. Identity on the intersection.
  std::vector<int> bijection;
  struct FailedBijection {
    std::vector<int> phi;
    Mask failing_subset;  // X with (B1 \ X) u phi[X] not a basis
  };
  std::vector<FailedBijection> failures;
};

namespace detail {

inline Mask apply_exchange(Mask b1, const std::vector<int>& d1,
                           const std::vector<int>& phi_of, Mask idx_set) {
  Mask out = b1;
  Mask idx = idx_set;
  while (idx) {
    int i = lowest_bit(idx);
    idx &= idx - 1;
    out &= ~bit(d1[i]);
    out |= bit(phi_of[i]);
  }
  return out;
}

// Backtracking over partial bijections; a partial map already fails if some
// subset of the assigned positions does.
inline bool pair_orderable(const Matroid& m, Mask b1, Mask b2,
                           std::vector<int>* phi_out) {
  const std::vector<int> d1 = elements_of(b1 & ~b2);
  const std::vector<int> d2 = elements_of(b2 & ~b1);
  const int k = static_cast<int>(d1.size());
  std::vector<int> phi(k, -1);
  std::vector<bool> taken(k, false);
  auto rec = [&](auto&& self, int t) -> bool {
    if (t == k) {
      if (phi_out) *phi_out = phi;
      return true;
    }
    for (int j = 0; j < k; ++j) {
      if (taken[j]) continue;
      phi[t] = d2[j];
      taken[j] = true;
      bool ok = true;
      // Check the new subsets: those containing position t.
      for (Mask rest = 0; ok && rest < (Mask{1} << t); ++rest) {
        Mask idx_set = rest | bit(t);
        if (!m.is_basis(apply_exchange(b1, d1, phi, idx_set))) ok = false;
      }
      if (ok && self(self, t + 1)) return true;
      taken[j] = false;
      phi[t] = -1;
    }
    return false;
  };
  return rec(rec, 0);
}

}  // namespace detail

inline SboWitness strongly_base_orderable(const Matroid& m) {
  SboWitness w;
  const auto& bases = m.bases();
  bool recorded = false;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    for (std::size_t j = i + 1; j < bases.size(); ++j) {
      std::vector<int> phi;
      if (detail::pair_orderable(m, bases[i], bases[j], &phi)) {
        if (!recorded) {
          w.basis_pair = {bases[i], bases[j]};
          w.bijection = std::move(phi);
          recorded = true;
        }
        continue;
      }
      // Failing pair: collect one counterexample subset per bijection.
      w.orderable = false;
      w.basis_pair = {bases[i], bases[j]};
      w.bijection.clear();
      const std::vector<int> d1 = elements_of(bases[i] & ~bases[j]);
      std::vector<int> d2 = elements_of(bases[j] & ~bases[i]);
      const int k = static_cast<int>(d1.size());
      std::sort(d2.begin(), d2.end());
      std::vector<int> phi_perm = d2;
      do {
        SboWitness::FailedBijection fb;
        fb.phi = phi_perm;
        fb.failing_subset = 0;
        bool found = false;
        for (Mask idx = 1; !found && idx < (Mask{1} << k); ++idx) {
          Mask swapped = detail::apply_exchange(bases[i], d1, phi_perm, idx);
          if (!m.is_basis(swapped)) {
            Mask x = 0;
            for (int t : elements_of(idx)) x |= bit(d1[t]);
            fb.failing_subset = x;
            found = true;
          }
        }
        w.failures.push_back(std::move(fb));
      } while (std::next_permutation(phi_perm.begin(), phi_perm.end()));
      return w;
    }
  }
  if (!recorded && !bases.empty()) w.basis_pair = {bases[0], bases[0]};
  return w;
}

}  // namespace gammoid
