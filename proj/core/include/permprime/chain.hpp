#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "permprime/caps.hpp"
#include "permprime/digraph.hpp"

namespace permprime {

// A triple of vertices witnessing that a digraph admits no compatible Maltsev
// operation: v -> u, u -> u and u -> w are edges while v -> w is not.  Any
// Maltsev term m would force v = m(v,u,u) -> m(u,u,w) = w.
struct ObstructionWitness {
  int v = -1;
  int u = -1;
  int w = -1;

  bool operator==(const ObstructionWitness&) const = default;
};

// Aggregated verdicts of verify_chain.  Vertex and component counts of the
// later stages are exact but can exceed 64 bits, so they are reported as
// decimal strings.
struct ChainReport {
  int g0_vertices = 0;
  int x_vertices = 0;
  int product_n = 2;

  // First stage: the digraph of ordered 4-tuples.
  int g1_vertices = 0;
  int g1_components = 0;
  bool g1_universal_per_component = false;
  bool g1_star_universal = false;   // (a,a,b,b) is universal in its component
  bool g1_witness_nonedge = false;  // ((a,b,b,b),(a,a,a,b)) fails for one-way edges
  bool g1_noncomplete_exists = false;
  int r_component = -1;  // chosen non-complete component (index into components)
  int r_size = 0;

  // Second stage: functions f on {0} u R with f(0) <-> f(x); counted exactly
  // through mutual-neighbourhood intersection classes.
  std::string g2_vertices;
  std::string g2_components;
  int g2_classes = 0;
  bool g2_counts_consistent = false;  // class totals match the direct sum formula
  bool g2_universal_per_component = false;
  bool g2_complete_exists = false;
  bool g2_noncomplete_exists = false;
  bool g2_r_copy_found = false;  // constant functions to u_R induce a copy of R
  bool g2_clique_found = false;  // identity-like functions induce a complete component

  // Third stage: functions X -> G2 whose range stays in one component.
  std::string g3_vertices;
  std::string g3_components;
  bool g3_components_are_powers = false;
  bool g3_noncomplete_exists = false;

  bool obstruction_found = false;
  ObstructionWitness obstruction;  // vertex ids local to the component searched
  int obstruction_component_size = 0;

  bool product_structure_ok = false;
  std::string product_components;  // n times the number of third-stage components

  // Literal cross-check on fully materialized digraphs; runs only when the
  // stage sizes are small enough to build outright.
  bool materialized_checked = false;
  bool materialized_ok = true;

  bool pass = false;
  std::string failure;  // first failed assertion, empty when pass
};

// Builds the digraph whose vertices are the 4-tuples (a,b,c,d) of g0-vertices
// with a->b, a->c, a->d, b->c, b->d, c->d all edges, and whose edges are the
// pairs ((a,b,c,d),(a',b',c',d')) with a=a', d=d', b->c' and b'->c.  Vertices
// are ordered lexicographically and labelled "(a,b,c,d)".  Requires g0
// reflexive; refuses results larger than `cap` vertices.
Digraph construct_g1(const Digraph& g0, std::size_t cap = kDefaultMaterializationCap);

// Index of the first non-complete component of d (components ordered by
// smallest member), or -1 if every component is complete.
int first_noncomplete_component(const Digraph& d);

// Builds the digraph whose vertices are the functions f on {0} u R into g1
// with f(0) <-> f(x) for every x in R, where R is the component of g1 with the
// given index; (f,f') is an edge iff f(0) -> f'(0) and f, f' agree on R.
// Vertices are ordered lexicographically with f(0) most significant and
// labelled "f(*)=v f(x1)=v1 ...".  Requires R non-complete; refuses inputs
// whose exact vertex count exceeds `cap`.
Digraph construct_g2(const Digraph& g1, int r_component,
                     std::size_t cap = kDefaultMaterializationCap);

// Builds the subdigraph of exponential(g2, x) induced by the functions whose
// range lies within a single component of g2, in exponential vertex order.
// Requires every component of g2 to contain a universal vertex (otherwise the
// range characterisation and the bound characterisation "exists u with
// f(y) -> u for all y" diverge); refuses results larger than `cap` vertices.
Digraph construct_g3(const Digraph& g2, const Digraph& x,
                     std::size_t cap = kDefaultMaterializationCap);

// Returns the lexicographically first triple (v,u,w) with v->u, u->u, u->w
// edges and v->w a non-edge (nested ascending scan over v, then u, then w), or
// nothing if no such triple exists.
std::optional<ObstructionWitness> find_obstruction(const Digraph& d);

// Runs the whole construction pipeline on a reflexive non-symmetric digraph g0
// and a digraph x with at least one edge, verifying at each stage the
// structural claims the later stages depend on: universal vertices in every
// component, existence of complete and non-complete components, the
// component-power correspondence of the third stage, an obstruction witness in
// a non-complete component, and the component inventory of the product with a
// complete and an edgeless-plus-loops factor on product_n vertices.  Stages
// whose exact sizes are small are additionally materialized and cross-checked
// against the class-based arithmetic.
ChainReport verify_chain(const Digraph& g0, const Digraph& x, int product_n = 2,
                         std::size_t cap = kDefaultMaterializationCap);

}  // namespace permprime
