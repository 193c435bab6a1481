#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "permprime/digraph.hpp"
#include "permprime/iso.hpp"

using namespace permprime;

namespace {

// Exhaustive permutation search, the reference answer for small sizes.
bool brute_isomorphic(const Digraph& a, const Digraph& b) {
  if (a.size() != b.size()) return false;
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (int u = 0; u < a.size() && ok; ++u) {
      for (int v = 0; v < a.size() && ok; ++v) {
        if (a.edge(u, v) != b.edge(perm[u], perm[v])) ok = false;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

Digraph relabel(const Digraph& d, const std::vector<int>& perm) {
  Digraph out(d.size());
  for (int u = 0; u < d.size(); ++u) {
    for (int v = 0; v < d.size(); ++v) {
      if (d.edge(u, v)) out.set_edge(perm[u], perm[v]);
    }
  }
  return out;
}

Digraph random_digraph(std::mt19937& rng, int n, double p) {
  Digraph d(n);
  std::bernoulli_distribution coin(p);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (coin(rng)) d.set_edge(u, v);
    }
  }
  return d;
}

Digraph chain2() { return build_digraph(2, {{0, 0}, {1, 1}, {0, 1}}); }

}  // namespace

TEST_CASE("check_witness") {
  Digraph a = chain2();
  CHECK(check_witness(a, a, IsoWitness{{0, 1}}));
  CHECK(!check_witness(a, a, IsoWitness{{1, 0}}));
  CHECK(!check_witness(a, a, IsoWitness{{0, 0}}));  // not a bijection
  CHECK(!check_witness(a, a, IsoWitness{{0}}));     // wrong length
  Digraph b = build_digraph(2, {{0, 0}, {1, 1}, {1, 0}});
  CHECK(check_witness(a, b, IsoWitness{{1, 0}}));
}

TEST_CASE("self isomorphism is the identity") {
  std::mt19937 rng(20240810);
  for (int i = 0; i < 20; ++i) {
    Digraph d = random_digraph(rng, 1 + static_cast<int>(rng() % 5), 0.4);
    auto w = are_isomorphic(d, d);
    REQUIRE(w.has_value());
    std::vector<int> identity(d.size());
    std::iota(identity.begin(), identity.end(), 0);
    CHECK(w->mapping == identity);
  }
}

TEST_CASE("relabelled digraphs are isomorphic") {
  Digraph a = chain2();
  Digraph b = build_digraph(2, {{0, 0}, {1, 1}, {1, 0}});
  auto w = are_isomorphic(a, b);
  REQUIRE(w.has_value());
  CHECK(w->mapping == std::vector<int>{1, 0});
  CHECK(check_witness(a, b, *w));
}

TEST_CASE("size or edge-count mismatch") {
  Digraph p3 = build_digraph(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 0}, {1, 2}, {2, 1}});
  CHECK(!are_isomorphic(chain2(), p3).has_value());
  CHECK(!are_isomorphic(chain2(), complete_digraph(2)).has_value());
}

TEST_CASE("regular digraphs that refinement cannot split") {
  // Directed 6-cycle versus two directed 3-cycles: every vertex has in- and
  // out-degree one, so only backtracking can tell them apart.
  Digraph c6 = build_digraph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
  Digraph c33 = build_digraph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
  CHECK(!are_isomorphic(c6, c33).has_value());
  CHECK(brute_isomorphic(c6, c33) == false);

  Digraph c33b = build_digraph(6, {{0, 2}, {2, 4}, {4, 0}, {1, 3}, {3, 5}, {5, 1}});
  auto w = are_isomorphic(c33, c33b);
  REQUIRE(w.has_value());
  CHECK(check_witness(c33, c33b, *w));
}

TEST_CASE("agreement with the brute-force oracle") {
  std::mt19937 rng(20240811);
  for (int i = 0; i < 100; ++i) {
    int n = 1 + static_cast<int>(rng() % 5);
    Digraph a = random_digraph(rng, n, 0.5);
    Digraph b = random_digraph(rng, n, 0.5);
    auto w = are_isomorphic(a, b);
    CHECK(w.has_value() == brute_isomorphic(a, b));
    if (w.has_value()) CHECK(check_witness(a, b, *w));
  }
}

TEST_CASE("random relabellings are always recognised") {
  std::mt19937 rng(20240812);
  for (int i = 0; i < 50; ++i) {
    int n = 1 + static_cast<int>(rng() % 6);
    Digraph a = random_digraph(rng, n, 0.4);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Digraph b = relabel(a, perm);
    auto w = are_isomorphic(a, b);
    REQUIRE(w.has_value());
    CHECK(check_witness(a, b, *w));
  }
}

TEST_CASE("empty digraphs") {
  auto w = are_isomorphic(Digraph(0), Digraph(0));
  REQUIRE(w.has_value());
  CHECK(w->mapping.empty());
}
