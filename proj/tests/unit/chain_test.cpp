#include <doctest.h>

#include <map>
#include <optional>
#include <vector>

#include "permprime/chain.hpp"
#include "permprime/digraph.hpp"
#include "permprime/errors.hpp"

using namespace permprime;

namespace {

Digraph chain2() { return build_digraph(2, {{0, 0}, {1, 1}, {0, 1}}); }

Digraph path3() {
  return build_digraph(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 0}, {1, 2}, {2, 1}});
}

std::map<std::size_t, int> component_size_counts(const Digraph& d) {
  std::map<std::size_t, int> counts;
  for (const auto& block : components(d).blocks) ++counts[block.size()];
  return counts;
}

}  // namespace

TEST_CASE("construct_g1 on the one-way chain") {
  Digraph g1 = construct_g1(chain2());
  REQUIRE(g1.size() == 5);
  CHECK(g1.edge_count() == 9);
  CHECK(g1.labels() ==
        std::vector<std::string>{"(0,0,0,0)", "(0,0,0,1)", "(0,0,1,1)", "(0,1,1,1)",
                                 "(1,1,1,1)"});

  ComponentPartition p = components(g1);
  REQUIRE(p.blocks.size() == 3);
  CHECK(p.blocks[0] == std::vector<int>{0});
  CHECK(p.blocks[1] == std::vector<int>{1, 2, 3});
  CHECK(p.blocks[2] == std::vector<int>{4});

  // (0,0,1,1) is universal in the middle component.
  CHECK(g1.edge(1, 2));
  CHECK(g1.edge(2, 1));
  CHECK(g1.edge(2, 3));
  CHECK(g1.edge(3, 2));
  CHECK(g1.edge(2, 2));
  // ((0,1,1,1),(0,0,0,1)) and its reverse are the non-edges that make the
  // middle component non-complete.
  CHECK(!g1.edge(3, 1));
  CHECK(!g1.edge(1, 3));

  CHECK_THROWS_AS(construct_g1(build_digraph(2, {{0, 1}})), InputError);
  CHECK_THROWS_AS(construct_g1(complete_digraph(40), 100000), ResourceError);
}

TEST_CASE("construct_g1 edge relation is symmetric") {
  Digraph g1 = construct_g1(chain2());
  CHECK(classify(g1).symmetric);
  CHECK(classify(construct_g1(path3())).symmetric);
}

TEST_CASE("first_noncomplete_component") {
  Digraph g1 = construct_g1(chain2());
  CHECK(first_noncomplete_component(g1) == 1);
  CHECK(first_noncomplete_component(complete_digraph(4)) == -1);
  CHECK(first_noncomplete_component(equality_digraph(3)) == -1);
  CHECK(first_noncomplete_component(path3()) == 0);
}

TEST_CASE("construct_g2 on the chain tuples") {
  Digraph g1 = construct_g1(chain2());
  Digraph g2 = construct_g2(g1, 1);
  REQUIRE(g2.size() == 45);
  CHECK(g2.label(0) == "f(*)=0 f(1)=0 f(2)=0 f(3)=0");

  std::map<std::size_t, int> counts = component_size_counts(g2);
  CHECK(counts[3] == 1);   // constant functions onto the middle component
  CHECK(counts[2] == 14);
  CHECK(counts[1] == 14);
  CHECK(components(g2).blocks.size() == 29);

  // Component 0 is complete, the chosen one must not be.
  CHECK_THROWS_AS(construct_g2(g1, 0), InputError);
  CHECK_THROWS_AS(construct_g2(g1, 7), InputError);
  CHECK_THROWS_AS(construct_g2(g1, 1, 40), ResourceError);
}

TEST_CASE("construct_g3") {
  Digraph g1 = construct_g1(chain2());
  Digraph g2 = construct_g2(g1, 1);
  Digraph g3 = construct_g3(g2, chain2());
  CHECK(g3.size() == 79);
  // One component per function class: every class pattern has a universal
  // vertex, and the constant function onto it keeps the exponential connected.
  CHECK(components(g3).blocks.size() == 29);

  // A one-vertex looped exponent reproduces the base digraph.
  Digraph loop1 = build_digraph(1, {{0, 0}});
  CHECK(construct_g3(g2, loop1) == g2);

  // A complete base with one component stays complete.
  CHECK(construct_g3(complete_digraph(2), chain2()) == complete_digraph(4));

  // Components without a universal vertex are rejected.
  Digraph two_cycle = build_digraph(2, {{0, 1}, {1, 0}});
  CHECK_THROWS_AS(construct_g3(two_cycle, chain2()), InputError);

  CHECK_THROWS_AS(construct_g3(g2, chain2(), 50), ResourceError);
}

TEST_CASE("find_obstruction") {
  std::optional<ObstructionWitness> w = find_obstruction(path3());
  REQUIRE(w.has_value());
  CHECK(*w == ObstructionWitness{0, 1, 2});

  // The chain is transitive, so no witness exists.
  CHECK(!find_obstruction(chain2()).has_value());
  CHECK(!find_obstruction(complete_digraph(4)).has_value());
  CHECK(!find_obstruction(equality_digraph(3)).has_value());

  // The middle component of the tuple digraph carries one.
  Digraph g1 = construct_g1(chain2());
  Digraph middle = induced(g1, {1, 2, 3});
  w = find_obstruction(middle);
  REQUIRE(w.has_value());
  CHECK(*w == ObstructionWitness{0, 1, 2});
  CHECK(middle.edge(w->v, w->u));
  CHECK(middle.edge(w->u, w->u));
  CHECK(middle.edge(w->u, w->w));
  CHECK(!middle.edge(w->v, w->w));
}

TEST_CASE("verify_chain on the one-way chain") {
  ChainReport r = verify_chain(chain2(), chain2());
  CHECK(r.pass);
  CHECK(r.failure.empty());

  CHECK(r.g0_vertices == 2);
  CHECK(r.x_vertices == 2);
  CHECK(r.product_n == 2);
  CHECK(r.g1_vertices == 5);
  CHECK(r.g1_components == 3);
  CHECK(r.g1_universal_per_component);
  CHECK(r.g1_star_universal);
  CHECK(r.g1_witness_nonedge);
  CHECK(r.g1_noncomplete_exists);
  CHECK(r.r_component == 1);
  CHECK(r.r_size == 3);

  CHECK(r.g2_vertices == "45");
  CHECK(r.g2_components == "29");
  CHECK(r.g2_classes == 6);
  CHECK(r.g2_counts_consistent);
  CHECK(r.g2_universal_per_component);
  CHECK(r.g2_complete_exists);
  CHECK(r.g2_noncomplete_exists);
  CHECK(r.g2_r_copy_found);
  CHECK(r.g2_clique_found);

  CHECK(r.g3_vertices == "79");
  CHECK(r.g3_components == "29");
  CHECK(r.g3_components_are_powers);
  CHECK(r.g3_noncomplete_exists);

  CHECK(r.obstruction_found);
  CHECK(r.obstruction == ObstructionWitness{0, 3, 6});
  CHECK(r.obstruction_component_size == 9);

  CHECK(r.product_structure_ok);
  CHECK(r.product_components == "58");

  // Every stage is small enough here for the literal cross-check to run.
  CHECK(r.materialized_checked);
  CHECK(r.materialized_ok);
}

TEST_CASE("verify_chain with an equality exponent") {
  ChainReport r = verify_chain(chain2(), equality_digraph(2));
  CHECK(r.pass);
  CHECK(r.g2_components == "29");
  CHECK(r.g3_vertices == "79");
  CHECK(r.g3_components == "29");
  CHECK(r.product_components == "58");
}

TEST_CASE("verify_chain with a three-copy product") {
  ChainReport r = verify_chain(chain2(), chain2(), 3);
  CHECK(r.pass);
  CHECK(r.product_n == 3);
  CHECK(r.product_components == "87");
}

TEST_CASE("verify_chain on a four-vertex input") {
  Digraph g0 = build_digraph(4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 1}});
  ChainReport r = verify_chain(g0, equality_digraph(2));
  CHECK(r.pass);
  CHECK(r.failure.empty());
}

TEST_CASE("verify_chain input validation") {
  CHECK_THROWS_AS(verify_chain(path3(), chain2()), InputError);        // symmetric
  CHECK_THROWS_AS(verify_chain(build_digraph(2, {{0, 1}}), chain2()),  // not reflexive
                  InputError);
  CHECK_THROWS_AS(verify_chain(chain2(), Digraph(2)), InputError);     // edgeless exponent
  CHECK_THROWS_AS(verify_chain(chain2(), Digraph(0)), InputError);
  CHECK_THROWS_AS(verify_chain(chain2(), chain2(), 0), InputError);
}
