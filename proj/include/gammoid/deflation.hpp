#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gammoid/canonical.hpp"
#include "gammoid/matroid.hpp"

namespace gammoid {

// Status of the re-attachment cut for one element over a restriction: the
// family of flats of m|keep whose closure in m contains e. Re-attachment by
// a principal extension needs a unique minimal flat; an empty cut (e is a
// coloop over keep) fails that condition by convention.
struct PrincipalCutStatus {
  enum class Kind { unique, empty_cut, multiple_minima } kind;
  Mask minimal = 0;  // meaningful when unique
};

inline PrincipalCutStatus principal_cut_status(const Matroid& m, Mask keep,
                                               int e) {
  if (has_bit(keep, e)) throw InputError("element must lie outside keep");
  const auto& rank = m.rank_table();
  std::vector<Mask> members;
  for_each_subset(keep, [&](Mask f) {
    if ((m.closure(f) & keep) != f) return;  // not a flat of m|keep
    if (rank[f | bit(e)] == rank[f]) members.push_back(f);
  });
  if (members.empty()) return {PrincipalCutStatus::Kind::empty_cut, 0};
  std::vector<Mask> minimal;
  for (Mask f : members) {
    bool is_min = true;
    for (Mask g : members)
      if (g != f && (g & f) == g) {
        is_min = false;
        break;
      }
    if (is_min) minimal.push_back(f);
  }
  if (minimal.size() == 1) return {PrincipalCutStatus::Kind::unique, minimal[0]};
  return {PrincipalCutStatus::Kind::multiple_minima, 0};
}

inline std::optional<Mask> principal_cut_minimum(const Matroid& m, Mask keep,
                                                 int e) {
  const PrincipalCutStatus s = principal_cut_status(m, keep, e);
  if (s.kind == PrincipalCutStatus::Kind::unique) return s.minimal;
  return std::nullopt;
}

// Witness that m restricted to kept is a deflate of m: elements were removed
// in the recorded order (first entry removed first), each with the unique
// minimal flat of its cut at that stage.
struct DeflationCertificate {
  Mask kept = 0;
  std::vector<int> removal_order;
  std::vector<Mask> minimal_flat_per_step;

  bool trivial() const { return removal_order.empty(); }
};

// Re-verifies a certificate step by step against the definition.
inline bool replay_deflation(const Matroid& m, const DeflationCertificate& c) {
  if (c.removal_order.size() != c.minimal_flat_per_step.size()) return false;
  Mask current = m.ground_mask();
  for (std::size_t i = 0; i < c.removal_order.size(); ++i) {
    const int e = c.removal_order[i];
    if (!has_bit(current, e)) return false;
    const PrincipalCutStatus s = principal_cut_status(m, current & ~bit(e), e);
    if (s.kind != PrincipalCutStatus::Kind::unique) return false;
    if (s.minimal != c.minimal_flat_per_step[i]) return false;
    current &= ~bit(e);
  }
  return current == c.kept;
}

inline bool is_deflated(const Matroid& m) {
  const Mask full = m.ground_mask();
  for (int e = 0; e < m.size(); ++e) {
    const PrincipalCutStatus s = principal_cut_status(m, full & ~bit(e), e);
    if (s.kind == PrincipalCutStatus::Kind::unique) return false;
  }
  return true;
}

enum class DeflateStrategy {
  exhaustive,
  // Removes the first removable element at each stage. Fast, but removal
  // orders matter, so this may miss a smaller deflate.
  greedy_heuristic,
};

namespace detail {

struct DeflateSearch {
  const Matroid& m;
  // Reached kept-sets with the step that got there.
  struct Step {
    Mask parent;
    int removed;
    Mask flat;
  };
  std::map<Mask, Step> seen;

  explicit DeflateSearch(const Matroid& mm) : m(mm) {}

  void explore_all() {
    const Mask start = m.ground_mask();
    seen.emplace(start, Step{start, -1, 0});
    std::vector<Mask> frontier = {start};
    while (!frontier.empty()) {
      std::vector<Mask> next;
      for (Mask y : frontier) {
        for (int e : elements_of(y)) {
          const Mask smaller = y & ~bit(e);
          if (seen.count(smaller)) continue;
          const PrincipalCutStatus s = principal_cut_status(m, smaller, e);
          if (s.kind != PrincipalCutStatus::Kind::unique) continue;
          seen.emplace(smaller, Step{y, e, s.minimal});
          next.push_back(smaller);
        }
      }
      frontier = std::move(next);
    }
  }

  DeflationCertificate certificate_for(Mask kept) const {
    DeflationCertificate cert;
    cert.kept = kept;
    Mask cur = kept;
    while (true) {
      const Step& s = seen.at(cur);
      if (s.removed < 0) break;
      cert.removal_order.push_back(s.removed);
      cert.minimal_flat_per_step.push_back(s.flat);
      cur = s.parent;
    }
    std::reverse(cert.removal_order.begin(), cert.removal_order.end());
    std::reverse(cert.minimal_flat_per_step.begin(),
                 cert.minimal_flat_per_step.end());
    return cert;
  }
};

}  // namespace detail

// A deflate of minimal ground-set cardinality, with its certificate.
// Backtracks over removal orders; removability is order-sensitive, so the
// greedy strategy is only a heuristic. Ties break toward the smallest mask.
inline std::pair<Matroid, DeflationCertificate> minimal_deflate(
    const Matroid& m, DeflateStrategy strategy = DeflateStrategy::exhaustive) {
  if (strategy == DeflateStrategy::greedy_heuristic) {
    DeflationCertificate cert;
    Mask current = m.ground_mask();
    bool progress = true;
    while (progress) {
      progress = false;
      for (int e : elements_of(current)) {
        const PrincipalCutStatus s =
            principal_cut_status(m, current & ~bit(e), e);
        if (s.kind == PrincipalCutStatus::Kind::unique) {
          cert.removal_order.push_back(e);
          cert.minimal_flat_per_step.push_back(s.minimal);
          current &= ~bit(e);
          progress = true;
          break;
        }
      }
    }
    cert.kept = current;
    return {m.restricted(current), cert};
  }
  detail::DeflateSearch search(m);
  search.explore_all();
  Mask best = m.ground_mask();
  for (const auto& [y, step] : search.seen) {
    if (popcount(y) < popcount(best) || (popcount(y) == popcount(best) && y < best))
      best = y;
  }
  DeflationCertificate cert = search.certificate_for(best);
  return {m.restricted(best), cert};
}

// Searches for a removal chain from m down to a restriction isomorphic to
// the target; used to verify tableau identifications.
inline std::optional<DeflationCertificate> deflate_chain_to(
    const Matroid& m, const CanonicalKey& target_key) {
  const int want = target_key.n();
  if (want > m.size()) return std::nullopt;
  if (want == m.size()) {
    if (canonical_key(m) == target_key) return DeflationCertificate{m.ground_mask(), {}, {}};
    return std::nullopt;
  }
  detail::DeflateSearch search(m);
  search.explore_all();
  std::optional<Mask> found;
  for (const auto& [y, step] : search.seen) {
    if (popcount(y) != want) continue;
    if (canonical_key(m.restricted(y)) == target_key) {
      if (!found || y < *found) found = y;
    }
  }
  if (!found) return std::nullopt;
  return search.certificate_for(*found);
}

}  // namespace gammoid
