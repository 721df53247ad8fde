#pragma once

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gammoid/canonical.hpp"
#include "gammoid/matroid.hpp"
#include "gammoid/modular_cuts.hpp"

namespace gammoid {

// Vertex-count bound for representations: rk(E)^2 * |E| + rk(E) + |E|.
// Extension enumeration up to this many elements is decisive.
inline int size_bound(const Matroid& m) {
  const int r = m.rank();
  const int n = m.size();
  return r * r * n + r + n;
}

// Level-by-level enumeration of extensions of a base matroid, one
// representative per isomorphism class per size, deduplicated by canonical
// key at every level. Levels are built on demand.
class ExtensionEnumerator {
 public:
  explicit ExtensionEnumerator(Matroid base, ModularCutLimits cut_limits = {})
      : base_(std::move(base)), cut_limits_(cut_limits) {
    std::map<CanonicalKey, Matroid> level;
    level.emplace(canonical_key(base_), base_);
    levels_.push_back(std::move(level));
  }

  int base_size() const { return base_.size(); }

  // Classes with exactly `size` elements, keyed canonically.
  const std::map<CanonicalKey, Matroid>& level(int size) {
    if (size < base_.size())
      throw InputError("extension size below the base ground set");
    if (size > kMaxCanonicalGround)
      throw SizeExceeded("extension enumeration beyond the canonicalization cap");
    while (base_.size() + static_cast<int>(levels_.size()) - 1 < size) {
      const auto& prev = levels_.back();
      std::map<CanonicalKey, Matroid> next;
      for (const auto& [key, m] : prev) {
        for (const ModularCut& cut : modular_cuts(m, cut_limits_)) {
          Matroid ext = extend_by_cut(m, cut);
          CanonicalKey k = canonical_key(ext);
          next.emplace(std::move(k), std::move(ext));
        }
      }
      levels_.push_back(std::move(next));
    }
    return levels_[size - base_.size()];
  }

 private:
  Matroid base_;
  ModularCutLimits cut_limits_;
  std::vector<std::map<CanonicalKey, Matroid>> levels_;
};

// Pull-based stream over the isomorphism classes of extensions of m with
// exactly target_size elements. The optional predicate aborts enumeration.
class ExtensionStream {
 public:
  ExtensionStream(const Matroid& m, int target_size,
                  std::function<bool(const Matroid&)> stop = {})
      : enumerator_(m), target_(target_size), stop_(std::move(stop)) {
    if (target_size < m.size())
      throw InputError("extension size below the base ground set");
  }

  std::optional<Matroid> next() {
    if (done_) return std::nullopt;
    if (!begun_) {
      const auto& lvl = enumerator_.level(target_);
      it_ = lvl.begin();
      end_ = lvl.end();
      begun_ = true;
    }
    if (it_ == end_) {
      done_ = true;
      return std::nullopt;
    }
    Matroid out = it_->second;
    ++it_;
    if (stop_ && stop_(out)) done_ = true;
    return out;
  }

 private:
  ExtensionEnumerator enumerator_;
  int target_;
  std::function<bool(const Matroid&)> stop_;
  bool begun_ = false;
  bool done_ = false;
  std::map<CanonicalKey, Matroid>::const_iterator it_, end_;
};

inline ExtensionStream extensions_up_to_iso(
    const Matroid& m, int target_size,
    std::function<bool(const Matroid&)> stop = {}) {
  return ExtensionStream(m, target_size, std::move(stop));
}

}  // namespace gammoid
