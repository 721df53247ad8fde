#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gammoid/bits.hpp"
#include "gammoid/errors.hpp"

namespace gammoid {

struct GroundSet {
  int size = 0;
  // Optional display names; when empty, elements print as 1-based numbers.
  std::vector<std::string> labels;

  std::string label(int i) const {
    if (i >= 0 && i < static_cast<int>(labels.size())) return labels[i];
    return std::to_string(i + 1);
  }
};

struct MinorSpec {
  Mask contract = 0;
  Mask remove = 0;  // deleted elements

  bool operator==(const MinorSpec&) const = default;
};

struct AlphaTable;  // see alpha.hpp

namespace detail {

// Derived tables shared between copies of the same matroid. Built lazily
// under the mutex, then read without it; the built flags are released with
// the data so a Matroid may be shared freely between concurrent workers.
struct MatroidCache {
  std::mutex mu;
  std::atomic<bool> tables_built{false};
  std::vector<std::uint64_t> indep;  // one bit per subset mask
  std::vector<std::uint8_t> rank;    // indexed by subset mask
  std::atomic<bool> flats_built{false};
  std::vector<Mask> flats;  // sorted by (rank, mask)
  std::atomic<bool> degrees_built{false};
  std::vector<int> degree;  // per element: number of bases containing it
  std::shared_ptr<const AlphaTable> alpha;
  std::optional<std::string> key_bytes;       // canonical key, see canonical.hpp
  std::optional<std::string> dual_key_bytes;  // canonical key of the dual
};

inline bool get_word_bit(const std::vector<std::uint64_t>& w, Mask i) {
  return (w[i >> 6] >> (i & 63u)) & 1u;
}

inline void set_word_bit(std::vector<std::uint64_t>& w, Mask i) {
  w[i >> 6] |= std::uint64_t{1} << (i & 63u);
}

}  // namespace detail

// A matroid stored explicitly by its basis family over a bitmask-encoded
// ground set. Immutable after construction; derived tables (independence,
// rank, flats) are populated lazily under internal synchronization.
class Matroid {
 public:
  enum class Validation { full, trusted };

  Matroid(GroundSet ground, std::vector<Mask> bases,
          Validation v = Validation::full)
      : ground_(std::move(ground)),
        bases_(std::move(bases)),
        cache_(std::make_shared<detail::MatroidCache>()) {
    if (ground_.size < 0 || ground_.size > kMaxGroundSize)
      throw SizeExceeded("ground set size " + std::to_string(ground_.size) +
                         " outside 0.." + std::to_string(kMaxGroundSize));
    std::sort(bases_.begin(), bases_.end());
    bases_.erase(std::unique(bases_.begin(), bases_.end()), bases_.end());
    if (bases_.empty()) throw InputError("matroid needs at least one basis");
    const Mask full = full_mask(ground_.size);
    rank_ = popcount(bases_.front());
    for (Mask b : bases_) {
      if ((b & ~full) != 0)
        throw InputError("basis uses elements outside the ground set");
      if (popcount(b) != rank_)
        throw InputError("bases must all have the same cardinality");
    }
    if (v == Validation::full) validate_axioms();
  }

  static Matroid from_bases(int n, std::vector<Mask> bases,
                            Validation v = Validation::full) {
    return Matroid(GroundSet{n, {}}, std::move(bases), v);
  }

  static Matroid uniform(int r, int n) {
    if (r < 0 || r > n) throw InputError("uniform matroid needs 0 <= r <= n");
    std::vector<Mask> bases;
    for_each_subset_of_size(full_mask(n), r,
                            [&](Mask m) { bases.push_back(m); });
    return Matroid(GroundSet{n, {}}, std::move(bases), Validation::trusted);
  }

  static Matroid free_matroid(int n) { return uniform(n, n); }
  static Matroid rank_zero(int n) { return uniform(0, n); }

  int size() const { return ground_.size; }
  int rank() const { return rank_; }
  int corank() const { return ground_.size - rank_; }
  Mask ground_mask() const { return full_mask(ground_.size); }
  const GroundSet& ground() const { return ground_; }
  const std::vector<Mask>& bases() const { return bases_; }

  bool is_basis(Mask x) const {
    return std::binary_search(bases_.begin(), bases_.end(), x);
  }

  bool independent(Mask x) const {
    ensure_tables();
    return detail::get_word_bit(cache_->indep, x);
  }

  int rank_of(Mask x) const {
    ensure_tables();
    return cache_->rank[x];
  }

  // Direct table access for hot loops; valid for the matroid's lifetime.
  const std::vector<std::uint64_t>& indep_words() const {
    ensure_tables();
    return cache_->indep;
  }

  const std::vector<std::uint8_t>& rank_table() const {
    ensure_tables();
    return cache_->rank;
  }

  Mask closure(Mask x) const {
    ensure_tables();
    const int r = cache_->rank[x];
    Mask cl = x;
    Mask rest = ground_mask() & ~x;
    while (rest) {
      int e = lowest_bit(rest);
      rest &= rest - 1;
      if (cache_->rank[x | bit(e)] == r) cl |= bit(e);
    }
    return cl;
  }

  bool is_flat(Mask x) const { return closure(x) == x; }

  Mask loops() const { return closure(0); }

  // All flats, sorted by (rank, mask).
  const std::vector<Mask>& flats() const {
    ensure_tables();
    if (!cache_->flats_built.load(std::memory_order_acquire)) {
      std::lock_guard<std::mutex> lk(cache_->mu);
      if (!cache_->flats_built.load(std::memory_order_relaxed)) {
        std::vector<Mask> fl;
        const Mask full = ground_mask();
        for (Mask x = 0;; ++x) {
          if (closure_unlocked(x) == x) fl.push_back(x);
          if (x == full) break;
        }
        std::sort(fl.begin(), fl.end(), [&](Mask a, Mask b) {
          int ra = cache_->rank[a], rb = cache_->rank[b];
          if (ra != rb) return ra < rb;
          return a < b;
        });
        cache_->flats = std::move(fl);
        cache_->flats_built.store(true, std::memory_order_release);
      }
    }
    return cache_->flats;
  }

  // Number of bases containing element e.
  int basis_degree(int e) const {
    ensure_degrees();
    return cache_->degree[e];
  }

  const std::vector<int>& basis_degrees() const {
    ensure_degrees();
    return cache_->degree;
  }

  Matroid dual() const {
    const Mask full = ground_mask();
    std::vector<Mask> db;
    db.reserve(bases_.size());
    for (Mask b : bases_) db.push_back(full & ~b);
    return Matroid(ground_, std::move(db), Validation::trusted);
  }

  // Minor with re-indexed ground set: surviving elements keep their relative
  // order. Contraction by dependent sets uses the rank formula
  // rk_N(Y) = rk_M(Y u C) - rk_M(C).
  Matroid minor(const MinorSpec& spec) const {
    if (spec.contract & spec.remove)
      throw InputError("minor: contract and delete sets must be disjoint");
    ensure_tables();
    const Mask gone = spec.contract | spec.remove;
    const Mask keep = ground_mask() & ~gone;
    const std::vector<int> old_of = elements_of(keep);
    const int n = static_cast<int>(old_of.size());
    const int rc = cache_->rank[spec.contract];
    const int rn = cache_->rank[keep | spec.contract] - rc;
    std::vector<Mask> nb;
    for_each_subset_of_size(full_mask(n), rn, [&](Mask y) {
      Mask old = spec.contract;
      for (int i = 0; i < n; ++i)
        if (has_bit(y, i)) old |= bit(old_of[i]);
      if (cache_->rank[old] == rn + rc) nb.push_back(y);
    });
    GroundSet g{n, {}};
    if (!ground_.labels.empty()) {
      for (int i = 0; i < n; ++i) g.labels.push_back(ground_.label(old_of[i]));
    }
    return Matroid(std::move(g), std::move(nb), Validation::trusted);
  }

  // For element i of minor(spec), the index it had in this matroid.
  std::vector<int> minor_element_map(const MinorSpec& spec) const {
    return elements_of(ground_mask() & ~(spec.contract | spec.remove));
  }

  Matroid restricted(Mask keep) const {
    return minor(MinorSpec{0, ground_mask() & ~keep});
  }

  Matroid contracted(Mask c) const { return minor(MinorSpec{c, 0}); }

  static Matroid direct_sum(const Matroid& a, const Matroid& b) {
    const int n = a.size() + b.size();
    if (n > kMaxGroundSize)
      throw SizeExceeded("direct sum exceeds the ground set cap");
    std::vector<Mask> bases;
    bases.reserve(a.bases_.size() * b.bases_.size());
    for (Mask x : a.bases_)
      for (Mask y : b.bases_) bases.push_back(x | (y << a.size()));
    GroundSet g{n, {}};
    if (!a.ground_.labels.empty() || !b.ground_.labels.empty()) {
      for (int i = 0; i < a.size(); ++i) g.labels.push_back(a.ground_.label(i));
      for (int i = 0; i < b.size(); ++i) g.labels.push_back(b.ground_.label(i));
    }
    return Matroid(std::move(g), std::move(bases), Validation::trusted);
  }

  // Relabels elements: element i becomes perm[i].
  Matroid permuted(const std::vector<int>& perm) const {
    std::vector<Mask> nb;
    nb.reserve(bases_.size());
    for (Mask b : bases_) {
      Mask m = 0;
      for (int e : elements_of(b)) m |= bit(perm[e]);
      nb.push_back(m);
    }
    return Matroid(GroundSet{ground_.size, {}}, std::move(nb),
                   Validation::trusted);
  }

  // Identical labeled matroid: same ground size and basis list.
  bool operator==(const Matroid& o) const {
    return ground_.size == o.ground_.size && bases_ == o.bases_;
  }

  detail::MatroidCache& cache() const { return *cache_; }

 private:
  void ensure_tables() const {
    if (cache_->tables_built.load(std::memory_order_acquire)) return;
    std::lock_guard<std::mutex> lk(cache_->mu);
    if (cache_->tables_built.load(std::memory_order_relaxed)) return;
    const int n = ground_.size;
    const std::size_t total = std::size_t{1} << n;
    std::vector<std::uint64_t> indep((total + 63) / 64, 0);
    for (Mask b : bases_) detail::set_word_bit(indep, b);
    // Downward closure: every subset of an independent set is independent.
    for (Mask x = static_cast<Mask>(total - 1);; --x) {
      if (detail::get_word_bit(indep, x)) {
        Mask rest = x;
        while (rest) {
          int e = lowest_bit(rest);
          rest &= rest - 1;
          detail::set_word_bit(indep, x & ~bit(e));
        }
      }
      if (x == 0) break;
    }
    std::vector<std::uint8_t> rank(total, 0);
    for (Mask x = 1; x < total; ++x) {
      if (detail::get_word_bit(indep, x)) {
        rank[x] = static_cast<std::uint8_t>(popcount(x));
      } else {
        std::uint8_t r = 0;
        Mask rest = x;
        while (rest) {
          int e = lowest_bit(rest);
          rest &= rest - 1;
          r = std::max(r, rank[x & ~bit(e)]);
        }
        rank[x] = r;
      }
    }
    cache_->indep = std::move(indep);
    cache_->rank = std::move(rank);
    cache_->tables_built.store(true, std::memory_order_release);
  }

  Mask closure_unlocked(Mask x) const {
    const int r = cache_->rank[x];
    Mask cl = x;
    Mask rest = ground_mask() & ~x;
    while (rest) {
      int e = lowest_bit(rest);
      rest &= rest - 1;
      if (cache_->rank[x | bit(e)] == r) cl |= bit(e);
    }
    return cl;
  }

  void ensure_degrees() const {
    if (cache_->degrees_built.load(std::memory_order_acquire)) return;
    std::lock_guard<std::mutex> lk(cache_->mu);
    if (cache_->degrees_built.load(std::memory_order_relaxed)) return;
    std::vector<int> deg(ground_.size, 0);
    for (Mask b : bases_)
      for (int e : elements_of(b)) ++deg[e];
    cache_->degree = std::move(deg);
    cache_->degrees_built.store(true, std::memory_order_release);
  }

  // The local exchange condition on the derived rank table is equivalent to
  // the basis-exchange axiom and checkable in O(2^n * n^2).
  void validate_axioms() const {
    ensure_tables();
    const int n = ground_.size;
    const auto& rank = cache_->rank;
    const Mask full = full_mask(n);
    for (Mask x = 0;; ++x) {
      for (int e = 0; e < n; ++e) {
        if (has_bit(x, e)) continue;
        for (int f = e + 1; f < n; ++f) {
          if (has_bit(x, f)) continue;
          const int lhs = rank[x | bit(e)] + rank[x | bit(f)];
          const int rhs = rank[x | bit(e) | bit(f)] + rank[x];
          if (lhs < rhs) {
            throw InputError("basis family violates the exchange axiom: " +
                             exchange_witness());
          }
        }
      }
      if (x == full) break;
    }
  }

  // Slow path, only reached on invalid input: find an explicit exchange
  // failure (B1, B2, x) for the error message.
  std::string exchange_witness() const {
    for (Mask b1 : bases_) {
      for (Mask b2 : bases_) {
        Mask from = b1 & ~b2;
        while (from) {
          int x = lowest_bit(from);
          from &= from - 1;
          bool ok = false;
          Mask to = b2 & ~b1;
          while (to) {
            int y = lowest_bit(to);
            to &= to - 1;
            if (is_basis((b1 & ~bit(x)) | bit(y))) {
              ok = true;
              break;
            }
          }
          if (!ok) {
            return "no exchange for element " + ground_.label(x) +
                   " between bases " + format_set(b1) + " and " +
                   format_set(b2);
          }
        }
      }
    }
    return "exchange axiom fails";
  }

 public:
  std::string format_set(Mask x) const {
    std::string s = "{";
    bool first = true;
    for (int e : elements_of(x)) {
      if (!first) s += ",";
      s += ground_.label(e);
      first = false;
    }
    return s + "}";
  }

 private:
  GroundSet ground_;
  std::vector<Mask> bases_;
  int rank_ = 0;
  std::shared_ptr<detail::MatroidCache> cache_;
};

}  // namespace gammoid
