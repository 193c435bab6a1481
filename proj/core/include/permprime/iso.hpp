#ifndef PERMPRIME_ISO_HPP
#define PERMPRIME_ISO_HPP

#include <optional>
#include <vector>

#include "permprime/digraph.hpp"

namespace permprime {

// Vertex bijection witnessing an isomorphism: mapping[v] is the image of v.
struct IsoWitness {
  std::vector<int> mapping;
};

// Checks that witness is an isomorphism from a onto b.
bool check_witness(const Digraph& a, const Digraph& b, const IsoWitness& witness);

// Degree/loop colour refinement followed by deterministic backtracking:
// vertices of a are assigned in ascending order and candidate vertices of b
// are tried in ascending order, so are_isomorphic(d, d) yields the identity.
std::optional<IsoWitness> are_isomorphic(const Digraph& a, const Digraph& b);

}  // namespace permprime

#endif
