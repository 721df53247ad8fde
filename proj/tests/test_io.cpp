#include <doctest.h>

#include <fstream>
#include <sstream>

#include "gammoid/catalog.hpp"
#include "gammoid/engine.hpp"
#include "gammoid/io.hpp"
#include "gammoid/kb.hpp"

using namespace gammoid;

namespace {

std::string data_path(const std::string& name) {
  return std::string(GAMMOID_DATA_DIR) + "/" + name;
}

Matroid load(const std::string& name) {
  std::ifstream in(data_path(name));
  REQUIRE(in);
  return parse_matroid(in);
}

}  // namespace

TEST_CASE("bundled files match the built-in matroids") {
  CHECK(load("g841.matroid").bases() == g841().bases());
  CHECK(load("g841_dual.matroid").bases() == g841().dual().bases());
  CHECK(load("mk4.matroid").bases() == mk4().bases());
  CHECK(load("u24.matroid").bases() == u24().bases());
}

TEST_CASE("matroid writer round-trips") {
  for (const Matroid& m : {u24(), mk4(), Matroid::uniform(0, 2)}) {
    std::ostringstream out;
    write_matroid(out, m);
    CHECK(parse_matroid(out.str()).bases() == m.bases());
  }
}

TEST_CASE("parser accepts the three section forms") {
  CHECK(parse_matroid("ELEMENTS 2\nBASES\n1\n2\n").bases() ==
        Matroid::uniform(1, 2).bases());
  CHECK(parse_matroid("ELEMENTS 4\nNONBASES 2\n").bases() == u24().bases());
  CHECK(parse_matroid("ELEMENTS 3\nCIRCUITS\n1 2\n").bases() ==
        std::vector<Mask>{mask_of({0, 2}), mask_of({1, 2})});
  // Rank-zero matroid: the empty set is the only basis.
  CHECK(parse_matroid("ELEMENTS 2\nBASES\n-\n").rank() == 0);
  // Comments and blank lines are ignored.
  CHECK(parse_matroid("# c\nELEMENTS 2\n\nBASES # trailing\n1 # one\n2\n").bases() ==
        Matroid::uniform(1, 2).bases());
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_matroid(""), InputError);
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 2\n"), InputError);
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 2\nBASES\n"), InputError);
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 21\nBASES\n1\n"), InputError);
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 2\nBASES\n0\n"), InputError);
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 2\nBASES\n3\n"), InputError);
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 2\nBASES\n1 x\n"), InputError);
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 2\nTHINGS\n1\n"), InputError);
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 4\nNONBASES 2\n1 2 3\n"), InputError);
  // Unequal basis sizes.
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 2\nBASES\n1\n1 2\n"), InputError);
  // Exchange failure, reported with a witness pair.
  try {
    parse_matroid("ELEMENTS 4\nBASES\n1 2\n3 4\n");
    CHECK(false);
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("exchange") != std::string::npos);
  }
  // Circuit families that are not matroid circuit systems.
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 3\nCIRCUITS\n1 2\n2 3\n"), InputError);
  CHECK_THROWS_AS(parse_matroid("ELEMENTS 3\nCIRCUITS\n-\n"), InputError);
}

TEST_CASE("digraph parser") {
  std::ifstream in(data_path("u24.digraph"));
  REQUIRE(in);
  const Representation rep = parse_digraph(in);
  CHECK(rep.digraph.vertex_count == 4);
  CHECK(rep.targets == std::vector<int>{0, 1});
  CHECK(rep.ground.size() == 4);
  CHECK(gamma(rep).bases() == u24().bases());
  CHECK_THROWS_AS(parse_digraph("VERTICES 2\nTARGETS 3\nGROUND 1\nARCS\n"),
                  InputError);
  CHECK_THROWS_AS(parse_digraph("VERTICES 2\nTARGETS 1\nGROUND 1\nARCS\n1\n"),
                  InputError);
  CHECK_THROWS_AS(parse_digraph("TARGETS 1\n"), InputError);
}

TEST_CASE("knowledge-base round trip") {
  const DecideResult result = decide(g841());
  std::ostringstream first;
  write_kb(first, result.tableau);
  std::istringstream back(first.str());
  const Tableau imported = read_kb(back);
  CHECK(imported.same_content(result.tableau));
  std::ostringstream second;
  write_kb(second, imported);
  CHECK(second.str() == first.str());  // byte-identical
}

TEST_CASE("imported knowledge still audits clean") {
  for (const Matroid& goal : {g841(), mk4()}) {
    const DecideResult result = decide(goal);
    const AuditReport direct = is_valid(result.tableau);
    CHECK(direct.ok);
    CHECK(direct.failures.empty());
    CHECK(direct.unverified.empty());
    std::ostringstream out;
    write_kb(out, result.tableau);
    std::istringstream in(out.str());
    const Tableau imported = read_kb(in);
    const AuditReport audit = is_valid(imported);
    CHECK(audit.ok);
    CHECK(audit.failures.empty());
    // Certificates survive the round trip, so nothing becomes unverifiable.
    CHECK(audit.unverified.empty());
    CHECK(audit.checked == direct.checked);
  }
}

TEST_CASE("parsers survive token soup") {
  // Deterministic fuzz: every malformed input either parses or throws
  // InputError; nothing else may escape.
  const std::vector<std::string> atoms = {
      "ELEMENTS", "BASES",   "NONBASES", "CIRCUITS", "VERTICES", "TARGETS",
      "GROUND",   "ARCS",    "GAMMOID-KB", "GOAL",   "MATROID",  "EQUIV",
      "LOG",      "LADD",    "LMERGE",   "END",      "1",        "2",
      "4",        "21",      "-1",       "0",        "-",        "x",
      "#",        "\n",      " ",        "1 2 3",    "ff00",     "zz"};
  std::uint64_t state = 7;
  auto rng = [&]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  };
  for (int round = 0; round < 400; ++round) {
    std::string text;
    const int pieces = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < pieces; ++i) {
      text += atoms[rng() % atoms.size()];
      text += (rng() % 3) ? " " : "\n";
    }
    for (int which = 0; which < 3; ++which) {
      try {
        std::istringstream in(text);
        if (which == 0) parse_matroid(in);
        else if (which == 1) parse_digraph(in);
        else read_kb(in);
      } catch (const InputError&) {
        // expected for garbage
      }
    }
  }
  CHECK(true);  // reaching here means no crash and no foreign exception
}

TEST_CASE("knowledge-base rejects corrupted input") {
  std::istringstream bad_header("nope\n");
  CHECK_THROWS_AS(read_kb(bad_header), InputError);
  const std::string goal_hex = key_to_hex(canonical_key(Matroid::uniform(1, 1)));
  std::istringstream missing_end("GAMMOID-KB 1\nGOAL " + goal_hex + "\n");
  CHECK_THROWS_AS(read_kb(missing_end), InputError);
  std::istringstream bad_line("GAMMOID-KB 1\nGOAL " + goal_hex + "\nWHAT\nEND\n");
  CHECK_THROWS_AS(read_kb(bad_line), InputError);
}
