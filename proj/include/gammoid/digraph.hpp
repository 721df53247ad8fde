#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "gammoid/matroid.hpp"

namespace gammoid {

struct Digraph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> arcs;  // loops permitted

  bool has_arc(int u, int v) const {
    return std::binary_search(arcs.begin(), arcs.end(), std::make_pair(u, v));
  }

  void normalize() {
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    for (auto [u, v] : arcs)
      if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
        throw InputError("arc endpoint outside the vertex set");
  }
};

// The triple (digraph, targets, ground) representing a gammoid: elements of
// the ground set are independent when they can be routed to the targets by
// vertex-disjoint paths.
struct Representation {
  Digraph digraph;
  std::vector<int> targets;  // sorted vertex ids
  std::vector<int> ground;   // sorted vertex ids; element i of the matroid

  void normalize() {
    digraph.normalize();
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    std::sort(ground.begin(), ground.end());
    ground.erase(std::unique(ground.begin(), ground.end()), ground.end());
    for (int t : targets)
      if (t < 0 || t >= digraph.vertex_count)
        throw InputError("target outside the vertex set");
    for (int e : ground)
      if (e < 0 || e >= digraph.vertex_count)
        throw InputError("ground element outside the vertex set");
  }
};

struct Routing {
  std::vector<std::vector<int>> paths;
};

// Checks the three routing conditions: every source starts a path, every
// path ends in the target set, and paths are pairwise vertex-disjoint
// (each path itself being non-empty, non-repeating, and arc-connected).
inline bool verify_routing(const Representation& rep, const Routing& r,
                           const std::vector<int>& sources) {
  std::set<int> used;
  std::set<int> starts;
  for (const auto& p : r.paths) {
    if (p.empty()) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      if (!rep.digraph.has_arc(p[i], p[i + 1])) return false;
    for (int v : p) {
      if (v < 0 || v >= rep.digraph.vertex_count) return false;
      if (!used.insert(v).second) return false;  // repeat or overlap
    }
    if (!std::binary_search(rep.targets.begin(), rep.targets.end(), p.back()))
      return false;
    starts.insert(p.front());
  }
  for (int x : sources)
    if (!starts.count(x)) return false;
  return true;
}

namespace detail {

// Unit-vertex-capacity max flow by vertex splitting; BFS augmentation is
// plenty at these sizes.
class DisjointPathCounter {
 public:
  explicit DisjointPathCounter(const Representation& rep)
      : n_(rep.digraph.vertex_count) {
    // Node ids: 2v = v_in, 2v+1 = v_out, 2n = source, 2n+1 = sink.
    adj_.assign(2 * n_ + 2, {});
    for (int v = 0; v < n_; ++v) add_edge(2 * v, 2 * v + 1, 1);
    for (auto [u, v] : rep.digraph.arcs)
      if (u != v) add_edge(2 * u + 1, 2 * v, 1);
    for (int t : rep.targets) add_edge(2 * t + 1, sink(), 1);
    source_edge_.assign(n_, -1);
    for (int v = 0; v < n_; ++v) source_edge_[v] = add_edge(source(), 2 * v, 0);
  }

  // Number of vertex-disjoint paths from the given ground elements to the
  // target set, capped at |sources|.
  int count(const std::vector<int>& sources) {
    for (auto& e : edges_) e.flow = 0;
    for (int s : sources) edges_[source_edge_[s]].cap = 1;
    int flow = 0;
    while (flow < static_cast<int>(sources.size()) && augment()) ++flow;
    for (int s : sources) edges_[source_edge_[s]].cap = 0;
    return flow;
  }

 private:
  struct Edge {
    int to;
    int cap;
    int flow;
  };

  int source() const { return 2 * n_; }
  int sink() const { return 2 * n_ + 1; }

  int add_edge(int u, int v, int cap) {
    int id = static_cast<int>(edges_.size());
    edges_.push_back({v, cap, 0});
    edges_.push_back({u, 0, 0});
    adj_[u].push_back(id);
    adj_[v].push_back(id + 1);
    return id;
  }

  bool augment() {
    std::vector<int> prev_edge(adj_.size(), -1);
    std::vector<char> seen(adj_.size(), 0);
    std::queue<int> q;
    q.push(source());
    seen[source()] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      if (u == sink()) break;
      for (int id : adj_[u]) {
        const Edge& e = edges_[id];
        if (e.cap - e.flow <= 0 || seen[e.to]) continue;
        seen[e.to] = 1;
        prev_edge[e.to] = id;
        q.push(e.to);
      }
    }
    if (!seen[sink()]) return false;
    for (int v = sink(); v != source();) {
      int id = prev_edge[v];
      edges_[id].flow += 1;
      edges_[id ^ 1].flow -= 1;
      v = edges_[id ^ 1].to;
    }
    return true;
  }

  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> source_edge_;
};

}  // namespace detail

struct GammaLimits {
  int max_vertices = 64;
};

// The matroid represented by (D, T, E): X is independent iff |X| disjoint
// paths route X into T. A ground vertex that is itself a target routes by a
// single-vertex path.
inline Matroid gamma(const Representation& rep_in, GammaLimits limits = {}) {
  Representation rep = rep_in;
  rep.normalize();
  if (rep.digraph.vertex_count > limits.max_vertices)
    throw SizeExceeded("digraph exceeds the vertex cap");
  const int n = static_cast<int>(rep.ground.size());
  if (n > kMaxGroundSize)
    throw SizeExceeded("ground set exceeds the element cap");

  detail::DisjointPathCounter counter(rep);
  const std::size_t total = std::size_t{1} << n;
  std::vector<char> indep(total, 0);
  indep[0] = 1;
  int rank = 0;
  for (Mask x = 1; x < total; ++x) {
    // Independence is closed downward; skip sets with a dependent subset.
    bool candidate = true;
    for (int e : elements_of(x))
      if (!indep[x & ~bit(e)]) {
        candidate = false;
        break;
      }
    if (!candidate) continue;
    std::vector<int> sources;
    for (int e : elements_of(x)) sources.push_back(rep.ground[e]);
    if (counter.count(sources) == popcount(x)) {
      indep[x] = 1;
      rank = std::max(rank, popcount(x));
    }
  }
  std::vector<Mask> bases;
  for (Mask x = 0; x < total; ++x)
    if (indep[x] && popcount(x) == rank) bases.push_back(x);
  GroundSet g{n, {}};
  return Matroid(std::move(g), std::move(bases), Matroid::Validation::full);
}

// Attaches a new ground element in general position over the span of f1:
// a fresh vertex with arcs onto every element of f1. Restricting the result
// to the old ground set gives back the original matroid.
inline Representation deflation_extend_representation(const Representation& rep,
                                                      const std::vector<int>& f1,
                                                      int e_new) {
  if (e_new < rep.digraph.vertex_count)
    throw InputError("new element must be a fresh vertex");
  for (int v : f1)
    if (!std::binary_search(rep.ground.begin(), rep.ground.end(), v))
      throw InputError("attachment set must lie in the ground set");
  Representation out = rep;
  out.digraph.vertex_count = e_new + 1;
  for (int v : f1) out.digraph.arcs.emplace_back(e_new, v);
  out.ground.push_back(e_new);
  out.normalize();
  return out;
}

namespace detail {

class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform-enough pick in [0, n); n > 0.
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

}  // namespace detail

// Deterministic generator of representations and their matroids. Biased
// toward small target sets and mid arc density so the ranks are nontrivial;
// roughly a third of the draws use the whole vertex set as ground, which is
// the strict case.
inline std::pair<Representation, Matroid> random_gammoid(std::uint64_t seed,
                                                         int v_max, int e_max) {
  detail::SplitMix rng(seed);
  Representation rep;
  const int v = 1 + rng.below(std::max(1, v_max));
  rep.digraph.vertex_count = v;
  const int density = 20 + rng.below(45);  // percent
  for (int u = 0; u < v; ++u)
    for (int w = 0; w < v; ++w)
      if (rng.below(100) < density) rep.digraph.arcs.emplace_back(u, w);
  const int tsize = 1 + rng.below(std::max(1, (v + 1) / 2));
  std::vector<int> verts(v);
  for (int i = 0; i < v; ++i) verts[i] = i;
  for (int i = 0; i < tsize; ++i) {
    int j = i + rng.below(v - i);
    std::swap(verts[i], verts[j]);
    rep.targets.push_back(verts[i]);
  }
  const int cap = std::min(e_max, std::min(v, kMaxGroundSize));
  if (cap > 0 && v <= cap && rng.below(3) == 0) {
    for (int i = 0; i < v; ++i) rep.ground.push_back(i);  // strict case
  } else if (cap > 0) {
    const int esize = 1 + rng.below(cap);
    for (int i = 0; i < v; ++i) verts[i] = i;
    for (int i = 0; i < esize; ++i) {
      int j = i + rng.below(v - i);
      std::swap(verts[i], verts[j]);
      rep.ground.push_back(verts[i]);
    }
  }
  rep.normalize();
  return {rep, gamma(rep)};
}

}  // namespace gammoid
