#ifndef PERMPRIME_ALGEBRA_HPP
#define PERMPRIME_ALGEBRA_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "permprime/caps.hpp"
#include "permprime/digraph.hpp"

namespace permprime {

// Operation table over universe {0..n-1}; the table lists f(a_0,...,a_{r-1})
// for argument tuples in lexicographic order (a_0 most significant), so its
// length is n^r.
struct Operation {
  std::string symbol;
  int arity = 0;
  std::vector<std::uint8_t> table;
};

struct FiniteAlgebra {
  int size = 0;
  std::vector<Operation> operations;
};

// Validates table lengths, value ranges and symbol uniqueness.
void validate_algebra(const FiniteAlgebra& a);

std::size_t table_index(int universe, std::span<const std::uint8_t> args);
std::uint8_t apply_operation(const FiniteAlgebra& a, int op, std::span<const std::uint8_t> args);

// Operation term tree: a leaf holds a variable index, an inner node an
// operation index applied to child terms.
struct Term {
  int op = -1;
  int variable = -1;
  std::vector<Term> children;

  bool is_variable() const { return variable >= 0; }
};

std::uint8_t eval_term(const FiniteAlgebra& a, const Term& t,
                       std::span<const std::uint8_t> assignment);
std::string format_term(const FiniteAlgebra& a, const Term& t,
                        std::span<const std::string> variable_names);

// Element of a subpower closure: a tuple over the universe plus a record of
// how it was first derived (a generator index, or an operation applied to
// earlier elements).
struct SubpowerElement {
  std::vector<std::uint8_t> coords;
  int generator = -1;
  int op = -1;
  std::vector<int> children;
};

// Breadth-first closure of the generators inside A^index_size under all
// operations applied coordinatewise. Generators come first (deduplicated),
// nullary operations are applied once at the start, and later rounds scan
// argument tuples in a fixed order, so the element order is deterministic and
// derivations are breadth-first minimal. Exceeding cap raises ResourceError
// with the partial element count.
std::vector<SubpowerElement> generate_subpower(
    const FiniteAlgebra& a, int index_size,
    const std::vector<std::vector<std::uint8_t>>& generators,
    std::size_t cap = kDefaultClosureCap);

// Rebuilds a Term for elements[index] by replaying derivations; generator k
// becomes variable k.
Term term_from_derivation(const std::vector<SubpowerElement>& elements, int index);

// Checks that every operation maps edge tuples to edges; on failure names the
// operation and the violating tuple of edges.
struct CompatibilityWitness {
  std::string op_symbol;
  std::vector<std::pair<int, int>> edges;
  std::pair<int, int> image;
};

struct CompatibilityResult {
  bool compatible = false;
  std::optional<CompatibilityWitness> witness;
};

CompatibilityResult is_compatible(const FiniteAlgebra& a, const Digraph& d);

// Binary term functions of A, realized inside A^(A^2) as the closure of the
// two projections; coordinates are argument pairs (x, y) in lexicographic
// order. x_index and y_index locate the projections in the element list.
struct FreeAlgebra2 {
  std::vector<SubpowerElement> elements;
  int x_index = 0;
  int y_index = 0;
};

FreeAlgebra2 free_algebra_on_two(const FiniteAlgebra& a,
                                 std::size_t cap = kDefaultClosureCap);

// The algebra induced on a closed element list: same operations, tables
// computed by applying each operation coordinatewise.
FiniteAlgebra algebra_on_subpower(const FiniteAlgebra& a,
                                  const std::vector<SubpowerElement>& elements);

// Digraph on the elements of free_algebra_on_two(A) whose edge set is the
// subalgebra of pairs generated by (x,x), (x,y), (y,y); vertices are labelled
// with their terms. Symmetry of this digraph is equivalent to A generating a
// congruence-permutable variety.
struct MaltsevDigraph {
  Digraph graph;
  int x_index = 0;
  int y_index = 0;
};

MaltsevDigraph maltsev_digraph(const FiniteAlgebra& a,
                               std::size_t cap = kDefaultClosureCap);

// Searches the ternary term functions (closure of the three projections in
// A^(A^3)) for t with t(x,y,y) = x and t(y,y,x) = x; returns the first
// (breadth-first minimal) witness as a Term over variables x, y, z.
std::optional<Term> find_maltsev_term(const FiniteAlgebra& a,
                                      std::size_t cap = kDefaultClosureCap);

// Runs both decision routes and insists they agree.
struct CpVerdict {
  bool permutable = false;
  std::optional<Term> maltsev_term;
  std::optional<MaltsevDigraph> obstruction_digraph;
};

CpVerdict is_congruence_permutable(const FiniteAlgebra& a,
                                   std::size_t cap = kDefaultClosureCap);

}  // namespace permprime

#endif
