#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "dispatch.hpp"
#include "permprime/digraph.hpp"
#include "permprime/formats.hpp"

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = permprime::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) {
  return std::string(PERMPRIME_FIXTURE_DIR) + "/" + name;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Drops the elapsed_ms line, the only part of a report allowed to vary.
std::string strip_elapsed(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("elapsed_ms", 0) == 0) continue;
    out += line;
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("cli help and usage errors") {
  CliResult r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "dg"));
  CHECK(contains(r.out, "chain"));

  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"dg"}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"dg", "classify"}).code == 2);  // missing file argument
  CHECK(run_cli({"--format", "yaml", "dg", "classify", fixture("chain2.dg")}).code == 2);
}

TEST_CASE("cli classify") {
  CliResult r = run_cli({"dg", "classify", fixture("chain2.dg")});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "verdict: pass"));
  CHECK(contains(r.out, "vertices: 2"));
  CHECK(contains(r.out, "reflexive: true"));
  CHECK(contains(r.out, "symmetric: false"));
  CHECK(contains(r.out, "transitive: true"));
  CHECK(contains(r.out, "complete: false"));

  // The elapsed time is always the last field.
  std::string trimmed = r.out;
  while (!trimmed.empty() && trimmed.back() == '\n') trimmed.pop_back();
  std::size_t nl = trimmed.rfind('\n');
  CHECK(trimmed.substr(nl + 1).rfind("elapsed_ms: ", 0) == 0);
}

TEST_CASE("cli structured format") {
  CliResult r = run_cli({"--format", "structured", "dg", "universal", fixture("path3.dg")});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "verdict=pass\n"));
  CHECK(contains(r.out, "count=1\n"));
  CHECK(contains(r.out, "universal=1\n"));
  CHECK(r.out.rfind("command=", 0) == 0);
}

TEST_CASE("cli reports are deterministic") {
  const std::vector<std::vector<std::string>> cases = {
      {"--format", "structured", "dg", "classify", fixture("path3.dg")},
      {"--format", "structured", "dg", "exp", fixture("chain2.dg"), fixture("chain2.dg")},
      {"--format", "structured", "alg", "cp", fixture("z2.alg")},
      {"--format", "structured", "chain", "verify", fixture("chain2.dg"), "--x",
       fixture("chain2.dg")},
      {"--format", "structured", "verify", "claim1", "--g1", fixture("path3.dg"), "--g2",
       fixture("path3.dg"), "--k", "1"},
  };
  for (const auto& args : cases) {
    CliResult a = run_cli(args);
    CliResult b = run_cli(args);
    CHECK(a.code == b.code);
    CHECK(strip_elapsed(a.out) == strip_elapsed(b.out));
    CHECK(!strip_elapsed(a.out).empty());
  }
}

TEST_CASE("cli digraph results inline and to file") {
  CliResult inline_r = run_cli({"dg", "complement", fixture("chain2.dg")});
  CHECK(inline_r.code == 0);
  CHECK(contains(inline_r.out, "result: digraph 2;1 0"));

  const std::string path = "/tmp/permprime_test_complement.dg";
  CliResult file_r = run_cli({"dg", "complement", fixture("chain2.dg"), "-o", path});
  CHECK(file_r.code == 0);
  CHECK(contains(file_r.out, "output: " + path));
  CHECK(!contains(file_r.out, "result:"));
  permprime::Digraph written = permprime::load_digraph(path);
  CHECK(written ==
        permprime::complement(permprime::load_digraph(fixture("chain2.dg"))));
  std::remove(path.c_str());
}

TEST_CASE("cli iso failure exit code") {
  CliResult r = run_cli({"dg", "iso", fixture("chain2.dg"), fixture("path3.dg")});
  CHECK(r.code == 1);
  CHECK(contains(r.out, "verdict: fail"));
  CHECK(contains(r.out, "isomorphic: false"));

  CliResult ok = run_cli({"dg", "iso", fixture("chain2.dg"), fixture("chain2.dg")});
  CHECK(ok.code == 0);
  CHECK(contains(ok.out, "mapping: 0 1"));
}

TEST_CASE("cli input error exit code") {
  CliResult r = run_cli({"dg", "classify", "/nonexistent/never.dg"});
  CHECK(r.code == 2);
  CHECK(contains(r.out, "verdict: error"));
  CHECK(!r.err.empty());
}

TEST_CASE("cli resource cap exit code") {
  CliResult r = run_cli({"--cap", "10", "dg", "exp", fixture("path3.dg"), fixture("path3.dg")});
  CHECK(r.code == 3);
  CHECK(contains(r.out, "verdict: error"));
  CHECK(contains(r.out, "error: "));
}

TEST_CASE("cli cap from the environment") {
  setenv("PERMPRIME_CAP", "10", 1);
  CliResult r = run_cli({"dg", "exp", fixture("path3.dg"), fixture("path3.dg")});
  CHECK(r.code == 3);
  // An explicit --cap overrides the environment.
  CliResult wide = run_cli(
      {"--cap", "100000", "dg", "exp", fixture("path3.dg"), fixture("path3.dg")});
  CHECK(wide.code == 0);
  unsetenv("PERMPRIME_CAP");
}

TEST_CASE("cli claim1 picks the lowest universal vertex") {
  CliResult r = run_cli({"verify", "claim1", "--g1", fixture("path3.dg"), "--g2",
                         fixture("path3.dg"), "--k", "1"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "u1: 1"));
  CHECK(contains(r.out, "u2: 1"));
  CHECK(contains(r.out, "vertices: 9"));
  CHECK(contains(r.out, "mismatches: 0"));

  // No universal vertex means no valid context.
  CliResult bad = run_cli({"verify", "claim1", "--g1", fixture("chain2.dg"), "--g2",
                           fixture("path3.dg"), "--k", "1"});
  CHECK(bad.code == 2);

  CliResult explicit_bad = run_cli({"verify", "claim1", "--g1", fixture("path3.dg"), "--g2",
                                    fixture("path3.dg"), "--u1", "0", "--k", "1"});
  CHECK(explicit_bad.code == 2);
}

TEST_CASE("cli swap") {
  CliResult r = run_cli({"verify", "swap", "--g1", fixture("path3.dg"), "--g2",
                         fixture("path3.dg"), "--k", "2"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "threshold: 2"));
  CHECK(contains(r.out, "quotient_vertices: 16"));
  CHECK(contains(r.out, "bijection: true"));

  CliResult below = run_cli({"verify", "swap", "--g1", fixture("path3.dg"), "--g2",
                             fixture("path3.dg"), "--k", "1"});
  CHECK(below.code == 2);
}

TEST_CASE("cli chain pipeline") {
  CliResult g1 = run_cli({"chain", "g1", fixture("chain2.dg")});
  CHECK(g1.code == 0);
  CHECK(contains(g1.out, "components: 3"));
  CHECK(contains(g1.out, "sizes: 1 3 1"));
  CHECK(contains(g1.out, "vertices: 5"));
  CHECK(contains(g1.out, "edges: 9"));

  CliResult g2 = run_cli({"chain", "g2", fixture("chain2.dg")});
  CHECK(g2.code == 0);
  CHECK(contains(g2.out, "r_component: 1"));
  CHECK(contains(g2.out, "r_size: 3"));
  CHECK(contains(g2.out, "components: 29"));
  CHECK(contains(g2.out, "vertices: 45"));

  CliResult v = run_cli({"chain", "verify", fixture("chain2.dg"), "--x", fixture("chain2.dg")});
  CHECK(v.code == 0);
  CHECK(contains(v.out, "verdict: pass"));
  CHECK(contains(v.out, "g2_vertices: 45"));
  CHECK(contains(v.out, "g3_components: 29"));
  CHECK(contains(v.out, "obstruction_v: 0"));
  CHECK(contains(v.out, "obstruction_u: 3"));
  CHECK(contains(v.out, "obstruction_w: 6"));
  CHECK(contains(v.out, "product_components: 58"));
  CHECK(contains(v.out, "materialized_ok: true"));

  CliResult o = run_cli({"chain", "obstruction", fixture("path3.dg")});
  CHECK(o.code == 0);
  CHECK(contains(o.out, "found: true"));
  CHECK(contains(o.out, "v: 0"));

  // Symmetric bases are rejected with a usage-level error.
  CliResult sym = run_cli({"chain", "verify", fixture("path3.dg"), "--x", fixture("chain2.dg")});
  CHECK(sym.code == 2);
}

TEST_CASE("cli alg commands") {
  CliResult cp = run_cli({"alg", "cp", fixture("z2.alg")});
  CHECK(cp.code == 0);
  CHECK(contains(cp.out, "permutable: true"));
  CHECK(contains(cp.out, "maltsev_term: plus(plus(x, y), z)"));

  CliResult cp_fail = run_cli({"alg", "cp", fixture("s2.alg")});
  CHECK(cp_fail.code == 1);
  CHECK(contains(cp_fail.out, "permutable: false"));
  CHECK(contains(cp_fail.out, "witness_edge: x -> y"));
  CHECK(contains(cp_fail.out, "witness_missing: y -> x"));

  CliResult m = run_cli({"alg", "maltsev", fixture("s2.alg")});
  CHECK(m.code == 1);
  CHECK(contains(m.out, "symmetric: false"));
  CHECK(contains(m.out, "terms: x; y; meet(x, y)"));

  CliResult f = run_cli({"alg", "free2", fixture("s2.alg")});
  CHECK(f.code == 0);
  CHECK(contains(f.out, "elements: 3"));

  CliResult c = run_cli({"alg", "compat", fixture("s2.alg"), fixture("chain2.dg")});
  CHECK(c.code == 0);
  CHECK(contains(c.out, "compatible: true"));
}
