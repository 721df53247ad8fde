#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <sys/wait.h>

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(GAMMOID_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& name) {
  return std::string(GAMMOID_DATA_DIR) + "/" + name;
}

bool contains(const std::string& h, const std::string& needle) {
  return h.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("decide exit codes and verdict lines") {
  const RunResult g = run("decide " + data("g841.matroid"));
  CHECK(g.exit_code == 0);
  CHECK(contains(g.out, "GAMMOID"));
  const RunResult k = run("decide " + data("mk4.matroid"));
  CHECK(k.exit_code == 1);
  CHECK(contains(k.out, "NOT A GAMMOID"));
  CHECK(contains(k.out, "M(K4)"));
  CHECK(contains(k.out, "contract"));
  const RunResult u = run("decide " + data("u24.matroid"));
  CHECK(u.exit_code == 0);
}

TEST_CASE("usage and input errors") {
  CHECK(run("decide").exit_code == 64);
  CHECK(run("frobnicate x").exit_code == 64);
  CHECK(run("decide " + data("g841.matroid") + " --bogus-flag").exit_code == 64);
  CHECK(run("decide /nonexistent.matroid").exit_code == 65);
  CHECK(run("alpha " + data("g841.matroid") + " --subset 9").exit_code == 65);
}

TEST_CASE("alpha subcommand evaluates subsets") {
  CHECK(run("alpha " + data("g841.matroid") + " --subset E").out == "-1\n");
  CHECK(run("alpha " + data("g841.matroid") + " --subset 1 3 7 8").out == "1\n");
  const RunResult t = run("alpha " + data("g841.matroid"));
  CHECK(contains(t.out, "NOT A STRICT GAMMOID"));
}

TEST_CASE("certificate subcommands") {
  CHECK(contains(run("sbo " + data("mk4.matroid")).out, "NOT STRONGLY BASE-ORDERABLE"));
  CHECK(contains(run("sbo " + data("u24.matroid")).out, "STRONGLY BASE-ORDERABLE"));
  CHECK(contains(run("minor-check " + data("g841.matroid") + " --pattern U24").out,
                 "MINOR FOUND"));
  CHECK(contains(run("minor-check " + data("g841.matroid") + " --pattern MK4").out,
                 "NO MINOR"));
  const RunResult d = run("deflate " + data("g841_dual.matroid"));
  CHECK(contains(d.out, "MINIMAL DEFLATE: 7 elements"));
  CHECK(contains(d.out, "remove 8"));
  CHECK(contains(run("deflate " + data("g841.matroid")).out, "DEFLATED"));
  CHECK(contains(run("cuts " + data("u24.matroid")).out, "7 modular cuts"));
  const RunResult e = run("extensions " + data("u24.matroid") + " --size 5 --count-only");
  CHECK(e.exit_code == 0);
  CHECK(contains(run("validate " + data("g841.matroid")).out, "OK: matroid with 8"));
}

TEST_CASE("oracle gamma prints the represented matroid") {
  const RunResult r = run("oracle gamma " + data("u24.digraph"));
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "ELEMENTS 4"));
  CHECK(contains(r.out, "BASES"));
}

TEST_CASE("secondary flags and listings") {
  const RunResult cuts = run("cuts " + data("u24.matroid"));
  CHECK(contains(cuts.out, "CUT 0: minimal flats (none: empty cut)"));
  CHECK(contains(cuts.out, "{1}"));
  const RunResult table = run("alpha " + data("mk4.matroid") + " --table");
  CHECK(contains(table.out, "alpha{"));
  CHECK(contains(table.out, "= -1"));
  const RunResult heur = run("alpha " + data("u24.matroid") + " --unsafe-flats-only");
  CHECK(contains(heur.out, "heuristic"));
  const RunResult ext = run("extensions " + data("u24.matroid") + " --size 5");
  CHECK(contains(ext.out, "ELEMENTS 5"));
  CHECK(contains(ext.out, "isomorphism classes"));
  const RunResult par = run("decide " + data("g841.matroid") + " --workers 4");
  CHECK(par.exit_code == 0);
  CHECK(contains(par.out, "GAMMOID"));
}

TEST_CASE("kb import joins several bases") {
  CHECK(run("decide " + data("g841.matroid") + " --export-kb test_cli_a.kb").exit_code == 0);
  CHECK(run("decide " + data("mk4.matroid") + " --export-kb test_cli_b.kb").exit_code == 1);
  const RunResult merged = run("kb import test_cli_a.kb test_cli_b.kb -o test_cli_ab.kb");
  CHECK(merged.exit_code == 0);
  // Feeding the merged knowledge back decides both goals instantly.
  CHECK(run("decide " + data("mk4.matroid") + " --kb test_cli_ab.kb").exit_code == 1);
  CHECK(run("decide " + data("g841.matroid") + " --kb test_cli_ab.kb").exit_code == 0);
}

TEST_CASE("deterministic output at a fixed seed and one worker") {
  const std::string cmd = "decide " + data("g841.matroid") + " --seed 7 --workers 1";
  CHECK(run(cmd).out == run(cmd).out);
}

TEST_CASE("trace files record the step walk") {
  const std::string path = "test_cli_trace.txt";
  CHECK(run("decide " + data("g841.matroid") + " --trace " + path).exit_code == 0);
  FILE* f = fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  fclose(f);
  CHECK(contains(out, "step=1"));
  CHECK(contains(out, "kind=fired"));
  CHECK(contains(out, "deflate"));
}

TEST_CASE("knowledge-base export round-trips byte for byte") {
  // ctest runs in the build tree; plain relative paths land there.
  const std::string kb1 = "test_cli_kb1.kb";
  const std::string kb2 = kb1 + ".2";
  const std::string kb3 = kb1 + ".3";
  CHECK(run("decide " + data("g841.matroid") + " --export-kb " + kb1).exit_code == 0);
  CHECK(run("kb export " + kb1 + " -o " + kb2).exit_code == 0);
  CHECK(run("kb export " + kb2 + " -o " + kb3).exit_code == 0);
  auto slurp = [](const std::string& path) {
    FILE* f = fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
    fclose(f);
    return out;
  };
  const std::string a = slurp(kb2), b = slurp(kb3);
  CHECK(!a.empty());
  CHECK(a == b);
  // A decision started from the exported knowledge is immediate.
  const RunResult reused = run("decide " + data("g841.matroid") + " --kb " + kb1);
  CHECK(reused.exit_code == 0);
}

TEST_CASE("the bundled walkthrough script succeeds") {
  const std::string cmd = std::string("sh ") + data("walkthrough.sh") + " " +
                          GAMMOID_CLI_PATH + " >/dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
}
