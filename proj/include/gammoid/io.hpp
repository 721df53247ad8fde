#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gammoid/digraph.hpp"
#include "gammoid/matroid.hpp"

namespace gammoid {

// Text formats use 1-based element numbers; `#` starts a comment and blank
// lines separate nothing. A lone `-` denotes the empty set.

namespace detail {

inline std::vector<std::string> read_logical_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    std::string tok, joined;
    while (ss >> tok) {
      if (!joined.empty()) joined += ' ';
      joined += tok;
    }
    if (!joined.empty()) lines.push_back(joined);
  }
  return lines;
}

inline Mask parse_element_line(const std::string& line, int n,
                               const char* what) {
  if (line == "-") return 0;
  std::istringstream ss(line);
  Mask m = 0;
  long v;
  while (ss >> v) {
    if (v < 1 || v > n)
      throw InputError(std::string(what) + ": element " + std::to_string(v) +
                       " outside 1.." + std::to_string(n));
    m |= bit(static_cast<int>(v - 1));
  }
  if (!ss.eof()) throw InputError(std::string(what) + ": bad token in line '" + line + "'");
  return m;
}

}  // namespace detail

// One matroid per file: ELEMENTS <n>, then one of
//   BASES           one basis per line
//   NONBASES <r>    all r-sets are bases except those listed
//   CIRCUITS        one circuit per line
// Input is validated against the matroid axioms.
inline Matroid parse_matroid(std::istream& in) {
  const auto lines = detail::read_logical_lines(in);
  std::size_t i = 0;
  auto need = [&](const char* why) -> const std::string& {
    if (i >= lines.size()) throw InputError(std::string("unexpected end of file: ") + why);
    return lines[i];
  };
  {
    std::istringstream ss(need("expected ELEMENTS"));
    std::string kw;
    long n;
    if (!(ss >> kw >> n) || kw != "ELEMENTS" || n < 0 || n > kMaxGroundSize)
      throw InputError("expected 'ELEMENTS <n>' with 0 <= n <= " +
                       std::to_string(kMaxGroundSize));
    ++i;
    const int size = static_cast<int>(n);
    std::istringstream hs(need("expected BASES, NONBASES or CIRCUITS"));
    std::string head;
    hs >> head;
    ++i;
    if (head == "BASES") {
      std::vector<Mask> bases;
      for (; i < lines.size(); ++i)
        bases.push_back(detail::parse_element_line(lines[i], size, "basis"));
      if (bases.empty()) throw InputError("BASES section is empty");
      return Matroid(GroundSet{size, {}}, std::move(bases));
    }
    if (head == "NONBASES") {
      long r;
      if (!(hs >> r) || r < 0 || r > n)
        throw InputError("expected 'NONBASES <r>' with 0 <= r <= n");
      std::vector<Mask> excluded;
      for (; i < lines.size(); ++i)
        excluded.push_back(detail::parse_element_line(lines[i], size, "nonbasis"));
      for (Mask x : excluded)
        if (popcount(x) != r)
          throw InputError("nonbasis line does not have " + std::to_string(r) +
                           " elements");
      std::vector<Mask> bases;
      for_each_subset_of_size(full_mask(size), static_cast<int>(r), [&](Mask x) {
        for (Mask e : excluded)
          if (e == x) return;
        bases.push_back(x);
      });
      if (bases.empty())
        throw InputError("every " + std::to_string(r) + "-set is excluded");
      return Matroid(GroundSet{size, {}}, std::move(bases));
    }
    if (head == "CIRCUITS") {
      std::vector<Mask> circuits;
      for (; i < lines.size(); ++i)
        circuits.push_back(detail::parse_element_line(lines[i], size, "circuit"));
      for (Mask c : circuits)
        if (c == 0) throw InputError("the empty set cannot be a circuit");
      const std::size_t total = std::size_t{1} << size;
      std::vector<char> indep(total, 1);
      for (Mask x = 0; x < total; ++x)
        for (Mask c : circuits)
          if ((x & c) == c) {
            indep[x] = 0;
            break;
          }
      int rank = 0;
      for (Mask x = 0; x < total; ++x)
        if (indep[x]) rank = std::max(rank, popcount(x));
      std::vector<Mask> bases;
      for (Mask x = 0; x < total; ++x)
        if (indep[x] && popcount(x) == rank) bases.push_back(x);
      Matroid m(GroundSet{size, {}}, std::move(bases));
      // The family must reproduce exactly the independence system it claims.
      for (Mask x = 0; x < total; ++x)
        if (m.independent(x) != static_cast<bool>(indep[x]))
          throw InputError("lines are not the circuit system of a matroid");
      return m;
    }
    throw InputError("expected BASES, NONBASES or CIRCUITS, got '" + head + "'");
  }
}

inline Matroid parse_matroid(const std::string& text) {
  std::istringstream in(text);
  return parse_matroid(in);
}

inline void write_matroid(std::ostream& out, const Matroid& m) {
  out << "ELEMENTS " << m.size() << "\n";
  out << "BASES\n";
  for (Mask b : m.bases()) {
    if (b == 0) {
      out << "-\n";
      continue;
    }
    bool first = true;
    for (int e : elements_of(b)) {
      if (!first) out << ' ';
      out << (e + 1);
      first = false;
    }
    out << "\n";
  }
}

// Digraph representation: VERTICES <n>, TARGETS i j ..., GROUND i j ...,
// ARCS followed by one `u v` per line.
inline Representation parse_digraph(std::istream& in) {
  const auto lines = detail::read_logical_lines(in);
  std::size_t i = 0;
  Representation rep;
  auto need = [&](const char* why) -> const std::string& {
    if (i >= lines.size()) throw InputError(std::string("unexpected end of file: ") + why);
    return lines[i];
  };
  {
    std::istringstream ss(need("expected VERTICES"));
    std::string kw;
    long n;
    if (!(ss >> kw >> n) || kw != "VERTICES" || n < 0)
      throw InputError("expected 'VERTICES <n>'");
    rep.digraph.vertex_count = static_cast<int>(n);
    ++i;
  }
  auto parse_vertex_list = [&](const char* kw_want) {
    std::istringstream ss(need(kw_want));
    std::string kw;
    ss >> kw;
    if (kw != kw_want)
      throw InputError(std::string("expected '") + kw_want + "', got '" + kw + "'");
    std::vector<int> out;
    long v;
    while (ss >> v) {
      if (v < 1 || v > rep.digraph.vertex_count)
        throw InputError(std::string(kw_want) + ": vertex " + std::to_string(v) +
                         " outside 1.." + std::to_string(rep.digraph.vertex_count));
      out.push_back(static_cast<int>(v - 1));
    }
    ++i;
    return out;
  };
  rep.targets = parse_vertex_list("TARGETS");
  rep.ground = parse_vertex_list("GROUND");
  {
    std::istringstream ss(need("expected ARCS"));
    std::string kw;
    ss >> kw;
    if (kw != "ARCS") throw InputError("expected 'ARCS', got '" + kw + "'");
    ++i;
  }
  for (; i < lines.size(); ++i) {
    std::istringstream ss(lines[i]);
    long u, v;
    if (!(ss >> u >> v))
      throw InputError("expected 'u v' arc line, got '" + lines[i] + "'");
    std::string extra;
    if (ss >> extra) throw InputError("trailing token on arc line '" + lines[i] + "'");
    if (u < 1 || u > rep.digraph.vertex_count || v < 1 ||
        v > rep.digraph.vertex_count)
      throw InputError("arc endpoint outside 1.." +
                       std::to_string(rep.digraph.vertex_count));
    rep.digraph.arcs.emplace_back(static_cast<int>(u - 1),
                                  static_cast<int>(v - 1));
  }
  rep.normalize();
  return rep;
}

inline Representation parse_digraph(const std::string& text) {
  std::istringstream in(text);
  return parse_digraph(in);
}

}  // namespace gammoid
