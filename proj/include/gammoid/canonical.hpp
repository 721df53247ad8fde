#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "gammoid/matroid.hpp"

namespace gammoid {

// Exact canonicalization enumerates relabelings; capped well below the
// general ground-set cap.
inline constexpr int kMaxCanonicalGround = 12;

// Isomorphism-invariant fingerprint of a matroid: the basis family under a
// canonical relabeling. Two matroids have equal keys iff they are isomorphic.
// Layout: [n][rank][count hi][count lo][3 bytes per basis mask, ascending].
struct CanonicalKey {
  std::string bytes;

  auto operator<=>(const CanonicalKey&) const = default;

  int n() const { return static_cast<unsigned char>(bytes.at(0)); }
  int rank() const { return static_cast<unsigned char>(bytes.at(1)); }
  int basis_count() const {
    return (static_cast<unsigned char>(bytes.at(2)) << 8) |
           static_cast<unsigned char>(bytes.at(3));
  }

  std::string summary() const {
    return "[n=" + std::to_string(n()) + " r=" + std::to_string(rank()) +
           " bases=" + std::to_string(basis_count()) + "]";
  }
};

namespace detail {

struct CanonSearch {
  const Matroid& m;
  int n;
  const std::vector<std::uint64_t>& indep;
  std::vector<int> deg;
  std::vector<Mask> old_of;  // position-submask -> original-element mask
  std::vector<std::uint8_t> enc;
  std::vector<std::uint8_t> best;
  bool have_best = false;
  std::vector<int> perm;  // position -> original element
  std::vector<int> best_perm;
  std::vector<std::vector<int>> autos;  // discovered automorphisms

  explicit CanonSearch(const Matroid& mm)
      : m(mm),
        n(mm.size()),
        indep(mm.indep_words()),
        deg(mm.basis_degrees()),
        old_of(std::size_t{1} << mm.size(), 0),
        perm(mm.size(), -1) {}

  std::vector<std::uint8_t> record_for(int k, int e) const {
    std::vector<std::uint8_t> rec;
    rec.reserve(2 + (std::size_t{1} << k));
    rec.push_back(static_cast<std::uint8_t>(deg[e] >> 8));
    rec.push_back(static_cast<std::uint8_t>(deg[e] & 0xff));
    const Mask lim = static_cast<Mask>(Mask{1} << k);
    for (Mask sub = 0; sub < lim; ++sub)
      rec.push_back(get_word_bit(indep, old_of[sub] | bit(e)) ? 1 : 0);
    return rec;
  }

  // enc extended by rec, compared against the same-length prefix of best.
  std::strong_ordering compare_with_best(
      const std::vector<std::uint8_t>& rec) const {
    std::size_t off = enc.size();
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i] != best[off + i])
        return rec[i] < best[off + i] ? std::strong_ordering::less
                                      : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

  bool orbit_pruned(int k, int e, const std::vector<int>& tried) const {
    for (const auto& g : autos) {
      bool fixes = true;
      for (int i = 0; i < k && fixes; ++i) fixes = g[perm[i]] == perm[i];
      if (!fixes) continue;
      for (int t : tried)
        if (g[t] == e) return true;
    }
    return false;
  }

  // True iff the current partial encoding equals the prefix of best.
  bool prefix_tight() const {
    return have_best && std::equal(enc.begin(), enc.end(), best.begin());
  }

  void dfs(int k, Mask used) {
    if (k == n) {
      if (!have_best || enc < best) {
        best = enc;
        best_perm = perm;
        have_best = true;
      } else if (enc == best && perm != best_perm && autos.size() < 64) {
        std::vector<int> g(n);
        for (int i = 0; i < n; ++i) g[best_perm[i]] = perm[i];
        autos.push_back(std::move(g));
      }
      return;
    }
    struct Cand {
      int e;
      std::vector<std::uint8_t> rec;
    };
    std::vector<Cand> cands;
    for (int e = 0; e < n; ++e)
      if (!has_bit(used, e)) cands.push_back({e, record_for(k, e)});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.rec != b.rec) return a.rec < b.rec;
      return a.e < b.e;
    });
    std::vector<int> tried;
    bool tight = prefix_tight();
    for (const Cand& c : cands) {
      // Pruning against best is only meaningful while the partial encoding
      // matches best's prefix; below it, every completion is an improvement.
      if (tight && compare_with_best(c.rec) == std::strong_ordering::greater)
        break;  // records ascend, so every later candidate is worse
      if (orbit_pruned(k, c.e, tried)) {
        tried.push_back(c.e);
        continue;
      }
      const std::size_t mark = enc.size();
      enc.insert(enc.end(), c.rec.begin(), c.rec.end());
      perm[k] = c.e;
      const Mask lim = static_cast<Mask>(Mask{1} << k);
      for (Mask sub = 0; sub < lim; ++sub)
        old_of[sub | lim] = old_of[sub] | bit(c.e);
      dfs(k + 1, used | bit(c.e));
      enc.resize(mark);
      perm[k] = -1;
      tried.push_back(c.e);
      tight = prefix_tight();  // a descendant may have replaced best
    }
  }
};

inline void append_u24(std::string& s, Mask x) {
  s.push_back(static_cast<char>((x >> 16) & 0xff));
  s.push_back(static_cast<char>((x >> 8) & 0xff));
  s.push_back(static_cast<char>(x & 0xff));
}

inline std::string serialize_key(int n, int r, const std::vector<Mask>& bases) {
  std::string s;
  s.push_back(static_cast<char>(n));
  s.push_back(static_cast<char>(r));
  s.push_back(static_cast<char>((bases.size() >> 8) & 0xff));
  s.push_back(static_cast<char>(bases.size() & 0xff));
  for (Mask b : bases) append_u24(s, b);
  return s;
}

inline std::string compute_key_bytes(const Matroid& m) {
  const int n = m.size();
  if (n > kMaxCanonicalGround)
    throw SizeExceeded("canonicalization supports at most " +
                       std::to_string(kMaxCanonicalGround) +
                       " elements, got " + std::to_string(n));
  if (n == 0) return serialize_key(0, 0, {0});
  CanonSearch s(m);
  s.dfs(0, 0);
  std::vector<int> pos_of(n);
  for (int i = 0; i < n; ++i) pos_of[s.best_perm[i]] = i;
  std::vector<Mask> relabeled;
  relabeled.reserve(m.bases().size());
  for (Mask b : m.bases()) {
    Mask x = 0;
    for (int e : elements_of(b)) x |= bit(pos_of[e]);
    relabeled.push_back(x);
  }
  std::sort(relabeled.begin(), relabeled.end());
  return serialize_key(n, m.rank(), relabeled);
}

}  // namespace detail

inline CanonicalKey canonical_key(const Matroid& m) {
  auto& cache = m.cache();
  {
    std::lock_guard<std::mutex> lk(cache.mu);
    if (cache.key_bytes) return CanonicalKey{*cache.key_bytes};
  }
  std::string bytes = detail::compute_key_bytes(m);
  std::lock_guard<std::mutex> lk(cache.mu);
  if (!cache.key_bytes) cache.key_bytes = bytes;
  return CanonicalKey{*cache.key_bytes};
}

inline CanonicalKey dual_canonical_key(const Matroid& m) {
  auto& cache = m.cache();
  {
    std::lock_guard<std::mutex> lk(cache.mu);
    if (cache.dual_key_bytes) return CanonicalKey{*cache.dual_key_bytes};
  }
  std::string bytes = detail::compute_key_bytes(m.dual());
  std::lock_guard<std::mutex> lk(cache.mu);
  if (!cache.dual_key_bytes) cache.dual_key_bytes = bytes;
  return CanonicalKey{*cache.dual_key_bytes};
}

// Rebuilds the canonical-form matroid encoded in a key.
inline Matroid matroid_from_key(const CanonicalKey& key,
                                Matroid::Validation v = Matroid::Validation::full) {
  const std::string& s = key.bytes;
  if (s.size() < 4) throw InputError("truncated canonical key");
  const int n = static_cast<unsigned char>(s[0]);
  const int count = key.basis_count();
  if (s.size() != 4 + 3 * static_cast<std::size_t>(count))
    throw InputError("canonical key length mismatch");
  std::vector<Mask> bases;
  bases.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::size_t off = 4 + 3 * static_cast<std::size_t>(i);
    Mask b = (static_cast<Mask>(static_cast<unsigned char>(s[off])) << 16) |
             (static_cast<Mask>(static_cast<unsigned char>(s[off + 1])) << 8) |
             static_cast<Mask>(static_cast<unsigned char>(s[off + 2]));
    bases.push_back(b);
  }
  return Matroid::from_bases(n, std::move(bases), v);
}

inline std::string key_to_hex(const CanonicalKey& key) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(key.bytes.size() * 2);
  for (unsigned char c : key.bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  return out;
}

inline CanonicalKey key_from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw InputError("odd-length key encoding");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw InputError("bad hex digit in key encoding");
  };
  std::string bytes;
  bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2)
    bytes.push_back(static_cast<char>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
  return CanonicalKey{std::move(bytes)};
}

}  // namespace gammoid
