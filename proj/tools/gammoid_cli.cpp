#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gammoid/alpha.hpp"
#include "gammoid/base_orderable.hpp"
#include "gammoid/catalog.hpp"
#include "gammoid/deflation.hpp"
#include "gammoid/digraph.hpp"
#include "gammoid/engine.hpp"
#include "gammoid/extensions.hpp"
#include "gammoid/invariants.hpp"
#include "gammoid/io.hpp"
#include "gammoid/kb.hpp"
#include "gammoid/matroid.hpp"
#include "gammoid/minor_search.hpp"
#include "gammoid/modular_cuts.hpp"
#include "gammoid/tableau.hpp"

namespace {

constexpr int kExitGammoid = 0;
constexpr int kExitNotGammoid = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInput = 65;
constexpr int kExitInternal = 70;

gammoid::Matroid load_matroid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gammoid::InputError("cannot open '" + path + "'");
  return gammoid::parse_matroid(in);
}

gammoid::Representation load_digraph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gammoid::InputError("cannot open '" + path + "'");
  return gammoid::parse_digraph(in);
}

gammoid::Mask parse_subset(const std::vector<std::string>& tokens,
                           const gammoid::Matroid& m) {
  if (tokens.size() == 1 && tokens[0] == "E") return m.ground_mask();
  gammoid::Mask x = 0;
  for (const std::string& t : tokens) {
    long v;
    std::istringstream ss(t);
    if (!(ss >> v) || v < 1 || v > m.size())
      throw gammoid::InputError("subset element '" + t + "' outside 1.." +
                                std::to_string(m.size()));
    x |= gammoid::bit(static_cast<int>(v - 1));
  }
  return x;
}

std::string pattern_name(const gammoid::CanonicalKey& key) {
  if (key == gammoid::canonical_key(gammoid::mk4())) return "M(K4)";
  if (key == gammoid::canonical_key(gammoid::u24())) return "U(2,4)";
  return key.summary();
}

std::string trace_kind_name(gammoid::TraceStep::Kind k) {
  using Kind = gammoid::TraceStep::Kind;
  switch (k) {
    case Kind::checked: return "checked";
    case Kind::selected: return "selected";
    case Kind::pass: return "pass";
    case Kind::update: return "update";
    case Kind::fired: return "fired";
    case Kind::decisive: return "decisive";
    case Kind::reset: return "reset";
    case Kind::capped: return "capped";
  }
  return "?";
}

void write_trace(std::ostream& out, const gammoid::Trace& trace) {
  for (const auto& s : trace.steps) {
    out << "step=" << s.step << " worker=" << s.worker
        << " kind=" << trace_kind_name(s.kind);
    if (s.intermediate) out << " M=" << s.intermediate->summary();
    if (s.source) out << " source=" << s.source->summary();
    if (s.produced) out << " produced=" << s.produced->summary();
    if (!s.detail.empty()) out << " detail=\"" << s.detail << "\"";
    out << "\n";
  }
}

int cmd_decide(const std::string& path, const std::string& kb_path, int workers,
               int batch, std::uint64_t seed, const std::string& trace_path,
               const std::string& export_kb_path) {
  gammoid::Matroid goal = load_matroid(path);
  gammoid::EngineConfig cfg;
  cfg.worker_count = workers;
  cfg.extension_batch = batch;
  cfg.seed = seed;
  std::optional<gammoid::Tableau> kb;
  if (!kb_path.empty()) {
    std::ifstream in(kb_path);
    if (!in) throw gammoid::InputError("cannot open '" + kb_path + "'");
    kb = gammoid::read_kb(in);
  }
  const gammoid::DecideResult result = gammoid::decide(goal, cfg, kb);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw gammoid::InputError("cannot write '" + trace_path + "'");
    write_trace(out, result.trace);
  }
  if (!export_kb_path.empty()) {
    std::ofstream out(export_kb_path);
    if (!out) throw gammoid::InputError("cannot write '" + export_kb_path + "'");
    gammoid::write_kb(out, result.tableau);
  }
  if (result.outcome == gammoid::Outcome::resource_exhausted) {
    std::cout << "UNDECIDED: resource limit reached before the tableau became "
                 "decisive\n";
    std::cout << "partial knowledge: gammoids="
              << result.tableau.family_keys(gammoid::Family::gammoids).size()
              << " intermediates="
              << result.tableau.family_keys(gammoid::Family::intermediates).size()
              << " excluded="
              << result.tableau.family_keys(gammoid::Family::excluded).size()
              << "\n";
    return kExitUndecided;
  }
  const gammoid::Verdict& v = *result.verdict;
  if (v.decision == gammoid::Verdict::Decision::gammoid) {
    std::cout << "GAMMOID: equivalent to certified gammoid "
              << (v.witness_key ? v.witness_key->summary() : std::string("?"))
              << " (case i)\n";
    return kExitGammoid;
  }
  if (v.decisive_case == 2) {
    std::cout << "NOT A GAMMOID: excluded minor "
              << (v.witness_key ? pattern_name(*v.witness_key) : std::string("?"));
    if (v.witness_minor) {
      std::cout << " via contract " << goal.format_set(v.witness_minor->contract)
                << " delete " << goal.format_set(v.witness_minor->remove);
    }
    std::cout << "\n";
  } else {
    std::cout << "NOT A GAMMOID: " << v.detail << " (case iii)\n";
  }
  return kExitNotGammoid;
}

int cmd_alpha(const std::string& path, const std::vector<std::string>& subset,
              bool table, bool flats_only) {
  gammoid::Matroid m = load_matroid(path);
  if (!subset.empty()) {
    std::cout << gammoid::alpha(m, parse_subset(subset, m)) << "\n";
    return 0;
  }
  const auto witness = gammoid::alpha_non_negative(
      m, flats_only ? gammoid::AlphaScan::flats_only_heuristic
                    : gammoid::AlphaScan::all_subsets);
  if (table) {
    const gammoid::AlphaTable& t = gammoid::alpha_table(m);
    for (gammoid::Mask x = 0; x < t.values.size(); ++x)
      if (t.values[x] != 0)
        std::cout << "alpha" << m.format_set(x) << " = " << t.values[x] << "\n";
  }
  if (witness) {
    std::cout << "NOT A STRICT GAMMOID: alpha" << m.format_set(*witness) << " = "
              << gammoid::alpha(m, *witness) << "\n";
  } else {
    std::cout << "STRICT GAMMOID: alpha >= 0 everywhere"
              << (flats_only ? " (flats-only heuristic; not a certificate)" : "")
              << "\n";
  }
  return 0;
}

int cmd_sbo(const std::string& path) {
  gammoid::Matroid m = load_matroid(path);
  const gammoid::SboWitness w = gammoid::strongly_base_orderable(m);
  if (w.orderable) {
    std::cout << "STRONGLY BASE-ORDERABLE\n";
  } else {
    std::cout << "NOT STRONGLY BASE-ORDERABLE: bases "
              << m.format_set(w.basis_pair.first) << " and "
              << m.format_set(w.basis_pair.second)
              << " admit no exchange bijection (" << w.failures.size()
              << " bijections refuted)\n";
  }
  return 0;
}

int cmd_minor_check(const std::string& path, const std::string& pattern) {
  gammoid::Matroid m = load_matroid(path);
  gammoid::Matroid pat = [&]() -> gammoid::Matroid {
    if (pattern == "U24") return gammoid::u24();
    if (pattern == "MK4") return gammoid::mk4();
    return load_matroid(pattern);
  }();
  if (auto spec = gammoid::find_minor_isomorphic(m, pat)) {
    std::cout << "MINOR FOUND: contract " << m.format_set(spec->contract)
              << " delete " << m.format_set(spec->remove) << "\n";
  } else {
    std::cout << "NO MINOR isomorphic to the pattern\n";
  }
  return 0;
}

int cmd_deflate(const std::string& path, bool greedy) {
  gammoid::Matroid m = load_matroid(path);
  auto [deflate, cert] = gammoid::minimal_deflate(
      m, greedy ? gammoid::DeflateStrategy::greedy_heuristic
                : gammoid::DeflateStrategy::exhaustive);
  if (cert.trivial()) {
    std::cout << "DEFLATED: the matroid is its only deflate\n";
    return 0;
  }
  std::cout << "MINIMAL DEFLATE: " << deflate.size() << " elements, kept "
            << m.format_set(cert.kept) << "\n";
  for (std::size_t i = 0; i < cert.removal_order.size(); ++i) {
    std::cout << "remove " << m.ground().label(cert.removal_order[i])
              << ": principal flat " << m.format_set(cert.minimal_flat_per_step[i])
              << "\n";
  }
  gammoid::write_matroid(std::cout, deflate);
  return 0;
}

int cmd_cuts(const std::string& path) {
  gammoid::Matroid m = load_matroid(path);
  const auto cuts = gammoid::modular_cuts(m);
  std::cout << cuts.size() << " modular cuts\n";
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    std::cout << "CUT " << i << ": minimal flats";
    if (cuts[i].minimal_flats.empty()) std::cout << " (none: empty cut)";
    for (gammoid::Mask f : cuts[i].minimal_flats)
      std::cout << ' ' << m.format_set(f);
    std::cout << "\n";
  }
  return 0;
}

int cmd_extensions(const std::string& path, int size, bool count_only) {
  gammoid::Matroid m = load_matroid(path);
  gammoid::ExtensionStream stream = gammoid::extensions_up_to_iso(m, size);
  std::size_t count = 0;
  while (auto ext = stream.next()) {
    ++count;
    if (!count_only) {
      std::cout << "# class " << count << "\n";
      gammoid::write_matroid(std::cout, *ext);
    }
  }
  std::cout << count << " isomorphism classes of " << size
            << "-element extensions\n";
  return 0;
}

int cmd_oracle_gamma(const std::string& path) {
  const gammoid::Representation rep = load_digraph(path);
  const gammoid::Matroid m = gammoid::gamma(rep);
  std::cout << "# gamma of " << path << ": element i is vertex g_i of GROUND\n";
  for (std::size_t i = 0; i < rep.ground.size(); ++i)
    std::cout << "# element " << (i + 1) << " = vertex " << (rep.ground[i] + 1)
              << "\n";
  gammoid::write_matroid(std::cout, m);
  return 0;
}

int cmd_kb_export(const std::string& path, const std::string& out_path) {
  std::ifstream in(path);
  if (!in) throw gammoid::InputError("cannot open '" + path + "'");
  const gammoid::Tableau t = gammoid::read_kb(in);
  if (out_path.empty()) {
    gammoid::write_kb(std::cout, t);
  } else {
    std::ofstream out(out_path);
    if (!out) throw gammoid::InputError("cannot write '" + out_path + "'");
    gammoid::write_kb(out, t);
  }
  return 0;
}

int cmd_kb_import(const std::vector<std::string>& paths,
                  const std::string& out_path) {
  std::optional<gammoid::Tableau> merged;
  for (const std::string& p : paths) {
    std::ifstream in(p);
    if (!in) throw gammoid::InputError("cannot open '" + p + "'");
    gammoid::Tableau t = gammoid::read_kb(in);
    if (!merged) merged = std::move(t);
    else merged = gammoid::join(*merged, t);
  }
  if (!merged) throw gammoid::InputError("kb import needs at least one file");
  if (out_path.empty()) {
    gammoid::write_kb(std::cout, *merged);
  } else {
    std::ofstream out(out_path);
    if (!out) throw gammoid::InputError("cannot write '" + out_path + "'");
    gammoid::write_kb(out, *merged);
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  gammoid::Matroid m = load_matroid(path);
  std::cout << "OK: matroid with " << m.size() << " elements, rank " << m.rank()
            << ", " << m.bases().size() << " bases\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gammoid - decide whether a matroid is a gammoid"};
  app.require_subcommand(1);

  // decide
  std::string decide_file, decide_kb, decide_trace, decide_export;
  int decide_workers = 1, decide_batch = 8;
  std::uint64_t decide_seed = 0;
  auto* decide = app.add_subcommand("decide", "run the decision procedure");
  decide->add_option("matroid-file", decide_file)->required();
  decide->add_option("--kb", decide_kb, "knowledge base to start from");
  decide->add_option("--workers", decide_workers, "parallel workers")->default_val(1);
  decide->add_option("--batch", decide_batch, "extensions per exhaustion visit")
      ->default_val(8);
  decide->add_option("--seed", decide_seed, "selection seed")->default_val(0);
  decide->add_option("--trace", decide_trace, "write the step trace to a file");
  decide->add_option("--export-kb", decide_export, "write the final tableau");

  // alpha
  std::string alpha_file;
  std::vector<std::string> alpha_subset;
  bool alpha_table_flag = false, alpha_flats_only = false;
  auto* alpha = app.add_subcommand("alpha", "alpha invariant of a matroid");
  alpha->add_option("matroid-file", alpha_file)->required();
  alpha->add_option("--subset", alpha_subset,
                    "evaluate at this subset (1-based indices, or E)");
  alpha->add_flag("--table", alpha_table_flag, "print all nonzero values");
  alpha->add_flag("--unsafe-flats-only", alpha_flats_only,
                  "scan flats only (incomplete heuristic)");

  // sbo
  std::string sbo_file;
  auto* sbo = app.add_subcommand("sbo", "strong base-orderability test");
  sbo->add_option("matroid-file", sbo_file)->required();

  // minor-check
  std::string minor_file, minor_pattern;
  auto* minor = app.add_subcommand("minor-check", "search for a minor");
  minor->add_option("matroid-file", minor_file)->required();
  minor->add_option("--pattern", minor_pattern, "U24, MK4, or a matroid file")
      ->required();

  // deflate
  std::string deflate_file;
  bool deflate_greedy = false;
  auto* deflate = app.add_subcommand("deflate", "minimal deflate");
  deflate->add_option("matroid-file", deflate_file)->required();
  deflate->add_flag("--greedy", deflate_greedy,
                    "greedy heuristic instead of exhaustive search");

  // cuts
  std::string cuts_file;
  auto* cuts = app.add_subcommand("cuts", "modular cuts");
  cuts->add_option("matroid-file", cuts_file)->required();

  // extensions
  std::string ext_file;
  int ext_size = 0;
  bool ext_count_only = false;
  auto* ext = app.add_subcommand("extensions", "extension classes up to isomorphism");
  ext->add_option("matroid-file", ext_file)->required();
  ext->add_option("--size", ext_size, "target ground-set size")->required();
  ext->add_flag("--count-only", ext_count_only);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "digraph routing oracle");
  oracle->require_subcommand(1);
  std::string gamma_file;
  auto* oracle_gamma = oracle->add_subcommand("gamma", "matroid of a representation");
  oracle_gamma->add_option("digraph-file", gamma_file)->required();

  // kb
  auto* kb = app.add_subcommand("kb", "knowledge-base utilities");
  kb->require_subcommand(1);
  std::string kb_export_file, kb_export_out;
  auto* kbe = kb->add_subcommand("export", "normalize and re-emit a knowledge base");
  kbe->add_option("kb-file", kb_export_file)->required();
  kbe->add_option("-o,--out", kb_export_out);
  std::vector<std::string> kb_import_files;
  std::string kb_import_out;
  auto* kbi = kb->add_subcommand("import", "join knowledge bases");
  kbi->add_option("kb-files", kb_import_files)->required()->expected(-1);
  kbi->add_option("-o,--out", kb_import_out);

  // validate
  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "check a matroid file");
  validate->add_option("matroid-file", validate_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*decide)
      return cmd_decide(decide_file, decide_kb, decide_workers, decide_batch,
                        decide_seed, decide_trace, decide_export);
    if (*alpha) return cmd_alpha(alpha_file, alpha_subset, alpha_table_flag,
                                 alpha_flats_only);
    if (*sbo) return cmd_sbo(sbo_file);
    if (*minor) return cmd_minor_check(minor_file, minor_pattern);
    if (*deflate) return cmd_deflate(deflate_file, deflate_greedy);
    if (*cuts) return cmd_cuts(cuts_file);
    if (*ext) return cmd_extensions(ext_file, ext_size, ext_count_only);
    if (*oracle_gamma) return cmd_oracle_gamma(gamma_file);
    if (*kbe) return cmd_kb_export(kb_export_file, kb_export_out);
    if (*kbi) return cmd_kb_import(kb_import_files, kb_import_out);
    if (*validate) return cmd_validate(validate_file);
  } catch (const gammoid::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const gammoid::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
