#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gammoid/tableau.hpp"

namespace gammoid {

// Knowledge-base file format, line oriented and deterministic:
//   GAMMOID-KB 1
//   GOAL <hexkey>
//   MATROID <hexkey> <families: subset of GMX or -> <flags: m/a or -> <cert>
//   EQUIV <hexkey> <hexkey>
//   LOG <kind> <added> <merges> <note...>, then LADD / LMERGE lines
//   END
// Exporting a freshly imported store reproduces the file byte for byte.

namespace detail {

inline std::string family_tags(unsigned fams) {
  std::string s;
  if (fams & family_bit(Family::gammoids)) s += 'G';
  if (fams & family_bit(Family::intermediates)) s += 'M';
  if (fams & family_bit(Family::excluded)) s += 'X';
  return s.empty() ? "-" : s;
}

inline unsigned family_bits_from_tags(const std::string& tags) {
  if (tags == "-") return 0;
  unsigned fams = 0;
  for (char c : tags) {
    if (c == 'G') fams |= family_bit(Family::gammoids);
    else if (c == 'M') fams |= family_bit(Family::intermediates);
    else if (c == 'X') fams |= family_bit(Family::excluded);
    else throw InputError("unknown family tag in knowledge base");
  }
  return fams;
}

inline std::string entry_flags(const TableauEntry& e) {
  std::string s;
  if (e.minor_of_goal) s += 'm';
  if (e.all_minors_gammoid) s += 'a';
  return s.empty() ? "-" : s;
}

inline const char* record_kind_name(DerivationRecord::Kind k) {
  switch (k) {
    case DerivationRecord::Kind::seed: return "seed";
    case DerivationRecord::Kind::join: return "join";
    case DerivationRecord::Kind::sub: return "sub";
    case DerivationRecord::Kind::expansion: return "expansion";
    case DerivationRecord::Kind::extended: return "extended";
    case DerivationRecord::Kind::conclusion: return "conclusion";
    case DerivationRecord::Kind::identify: return "identify";
    case DerivationRecord::Kind::import: return "import";
  }
  return "?";
}

inline DerivationRecord::Kind record_kind_from_name(const std::string& s) {
  if (s == "seed") return DerivationRecord::Kind::seed;
  if (s == "join") return DerivationRecord::Kind::join;
  if (s == "sub") return DerivationRecord::Kind::sub;
  if (s == "expansion") return DerivationRecord::Kind::expansion;
  if (s == "extended") return DerivationRecord::Kind::extended;
  if (s == "conclusion") return DerivationRecord::Kind::conclusion;
  if (s == "identify") return DerivationRecord::Kind::identify;
  if (s == "import") return DerivationRecord::Kind::import;
  throw InputError("unknown derivation kind in knowledge base");
}

}  // namespace detail

inline void write_kb(std::ostream& out, const Tableau& t) {
  out << "GAMMOID-KB 1\n";
  out << "GOAL " << key_to_hex(t.goal_key()) << "\n";
  for (const auto& [k, e] : t.entries()) {
    out << "MATROID " << key_to_hex(k) << ' ' << detail::family_tags(e.families)
        << ' ' << detail::entry_flags(e) << ' ' << e.cert_gammoid.token() << ' '
        << e.cert_excluded.token() << ' ' << e.cert_note.token() << "\n";
  }
  for (const auto& cls : t.partition()) {
    for (std::size_t j = 1; j < cls.size(); ++j)
      out << "EQUIV " << key_to_hex(cls[0]) << ' ' << key_to_hex(cls[j]) << "\n";
  }
  for (const auto& rec : t.log()) {
    out << "LOG " << detail::record_kind_name(rec.kind) << ' '
        << rec.added.size() << ' ' << rec.merges.size();
    if (!rec.note.empty()) out << ' ' << rec.note;
    out << "\n";
    for (const auto& a : rec.added) {
      out << "LADD " << key_to_hex(a.key) << ' ' << a.families << ' '
          << (a.minor_of_goal ? 1 : 0) << ' ' << (a.all_minors_gammoid ? 1 : 0)
          << ' ' << (a.cert_gammoid.empty() ? "-" : a.cert_gammoid) << ' '
          << (a.cert_excluded.empty() ? "-" : a.cert_excluded) << ' '
          << (a.cert_note.empty() ? "-" : a.cert_note) << "\n";
    }
    for (const auto& [x, y] : rec.merges)
      out << "LMERGE " << key_to_hex(x) << ' ' << key_to_hex(y) << "\n";
  }
  out << "END\n";
}

inline Tableau read_kb(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "GAMMOID-KB 1")
    throw InputError("not a knowledge-base file (missing header)");
  if (!std::getline(in, line) || line.rfind("GOAL ", 0) != 0)
    throw InputError("knowledge base must start with a GOAL line");
  const CanonicalKey goal_key = key_from_hex(line.substr(5));
  Tableau t(matroid_from_key(goal_key));
  bool ended = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "END") {
      ended = true;
      break;
    }
    if (kw == "MATROID") {
      std::string hex, tags, flags, cert_g, cert_x, cert_n;
      if (!(ss >> hex >> tags >> flags >> cert_g >> cert_x >> cert_n))
        throw InputError("malformed MATROID line");
      const CanonicalKey k = key_from_hex(hex);
      t.register_key(k, flags.find('m') != std::string::npos);
      DerivationRecord rec;
      DerivationRecord::Added a;
      a.key = k;
      a.families = detail::family_bits_from_tags(tags);
      a.cert_gammoid = cert_g;
      a.cert_excluded = cert_x;
      a.cert_note = cert_n;
      rec.added.push_back(std::move(a));
      t.apply_record(rec);
      if (flags.find('a') != std::string::npos) t.set_all_minors_gammoid(k);
    } else if (kw == "EQUIV") {
      std::string a, b;
      if (!(ss >> a >> b)) throw InputError("malformed EQUIV line");
      t.merge(t.register_key(key_from_hex(a)), t.register_key(key_from_hex(b)));
    } else if (kw == "LOG") {
      std::string kind;
      std::size_t nadd = 0, nmerge = 0;
      if (!(ss >> kind >> nadd >> nmerge)) throw InputError("malformed LOG line");
      DerivationRecord rec;
      rec.kind = detail::record_kind_from_name(kind);
      std::string note;
      std::getline(ss, note);
      if (!note.empty() && note.front() == ' ') note.erase(0, 1);
      rec.note = note;
      for (std::size_t i = 0; i < nadd; ++i) {
        if (!std::getline(in, line)) throw InputError("truncated LADD section");
        std::istringstream ls(line);
        std::string lw, hex, cert_g, cert_x, cert_n;
        unsigned fams;
        int mg, amg;
        if (!(ls >> lw >> hex >> fams >> mg >> amg >> cert_g >> cert_x >> cert_n) ||
            lw != "LADD")
          throw InputError("malformed LADD line");
        DerivationRecord::Added a;
        a.key = key_from_hex(hex);
        a.families = fams;
        a.minor_of_goal = mg != 0;
        a.all_minors_gammoid = amg != 0;
        a.cert_gammoid = cert_g;
        a.cert_excluded = cert_x;
        a.cert_note = cert_n;
        rec.added.push_back(std::move(a));
      }
      for (std::size_t i = 0; i < nmerge; ++i) {
        if (!std::getline(in, line)) throw InputError("truncated LMERGE section");
        std::istringstream ls(line);
        std::string lw, a, b;
        if (!(ls >> lw >> a >> b) || lw != "LMERGE")
          throw InputError("malformed LMERGE line");
        rec.merges.emplace_back(key_from_hex(a), key_from_hex(b));
      }
      t.append_record(std::move(rec));
    } else {
      throw InputError("unknown knowledge-base line '" + kw + "'");
    }
  }
  if (!ended) throw InputError("knowledge base missing END line");
  return t;
}

}  // namespace gammoid
