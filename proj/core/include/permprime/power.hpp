#ifndef PERMPRIME_POWER_HPP
#define PERMPRIME_POWER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "permprime/caps.hpp"
#include "permprime/digraph.hpp"

namespace permprime {

// Analysis context for the power G1^(G2* x K): two digraphs with designated
// universal vertices u1, u2 and an implicit complete digraph K on k vertices
// (never materialized). G2* is complement(delete_vertex(G2, u2)); its
// vertices are listed in g2_star by original G2 id, ascending, and likewise
// g1_star for G1.
//
// A power vertex is a function from G2* x K to G1, stored as a value vector
// indexed by coordinate (g2_pos * k + k_index) and enumerated
// lexicographically (coordinate 0 most significant).
struct PowerContext {
  Digraph g1;
  Digraph g2;
  int u1 = 0;
  int u2 = 0;
  int k = 1;
  std::vector<int> g1_star;
  std::vector<int> g2_star;

  int n1s() const { return static_cast<int>(g1_star.size()); }
  int n2s() const { return static_cast<int>(g2_star.size()); }
  int coord_count() const { return n2s() * k; }
};

PowerContext make_power_context(Digraph g1, int u1, Digraph g2, int u2, int k);

// Set of pairs (g1, g2) in G1* x G2*, packed into a 64-bit mask with bit
// (g2_pos * n1s + g1_pos); contexts whose ground set exceeds 64 pairs are
// rejected when the mask is first needed.
struct TraceSet {
  std::uint64_t bits = 0;

  bool operator==(const TraceSet&) const = default;
  auto operator<=>(const TraceSet&) const = default;
};

int trace_pair_bit(const PowerContext& ctx, int g1_pos, int g2_pos);
bool trace_contains(const PowerContext& ctx, const TraceSet& t, int g1_pos, int g2_pos);

std::int64_t power_vertex_count(const PowerContext& ctx,
                                std::size_t cap = kDefaultMaterializationCap);
std::vector<int> power_vertex(const PowerContext& ctx, std::int64_t index);

// Pairs (g1, g2) with g1 != u1 such that f maps some (g2, k) to g1.
TraceSet trace_set(const PowerContext& ctx, const std::vector<int>& f);

// Evaluates the power edge relation directly from the two value vectors:
// f -> f' iff f(c) -> f'(c') in G1 for every edge (c, c') of G2* x K.
class DirectPowerPredicate {
 public:
  explicit DirectPowerPredicate(const PowerContext& ctx);
  bool operator()(const std::vector<int>& f, const std::vector<int>& f2) const;

 private:
  const PowerContext* ctx_;
  std::vector<std::pair<int, int>> constraints_;
};

Digraph materialize_power(const PowerContext& ctx,
                          std::size_t cap = kDefaultMaterializationCap);

// Trace-only route for the same non-edge question: (f, f') is a non-edge iff
// some (g1, g2) in trace(f) and (g1', g2') in trace(f') satisfy "g1 -> g1'
// missing in G1 and g2 -> g2' missing in G2".
bool trace_nonedge(const PowerContext& ctx, const TraceSet& a, const TraceSet& b);
bool nonedge_by_claim1(const PowerContext& ctx, const std::vector<int>& f,
                       const std::vector<int>& f2);

// Exhaustive agreement check of the two edge routes over all ordered pairs of
// power vertices.
struct Claim1Report {
  std::int64_t vertices = 0;
  std::int64_t ordered_pairs = 0;
  std::int64_t mismatches = 0;
  std::optional<std::pair<std::int64_t, std::int64_t>> first_mismatch;
  bool ok() const { return mismatches == 0; }
};

Claim1Report check_claim1(const PowerContext& ctx,
                          std::size_t cap = kDefaultMaterializationCap, int threads = 1);

// All subsets of G1* x G2* whose columns each hold at most k elements (the
// exact realizability condition: such a set is a trace of some power vertex).
// Returned in ascending mask order.
std::vector<TraceSet> realizable_traces(const PowerContext& ctx,
                                        std::size_t cap = kDefaultMaterializationCap);

// Power vertices grouped by trace; blocks are sorted by trace mask and each
// records its size and smallest member index.
struct TraceBlock {
  TraceSet trace;
  std::int64_t size = 0;
  std::int64_t representative = 0;
};

std::vector<TraceBlock> trace_blocks(const PowerContext& ctx,
                                     std::size_t cap = kDefaultMaterializationCap);

// Quotient digraph built on subsets alone, never touching the power: vertices
// are realizable_traces(ctx) and (U, U') is an edge unless the trace route
// reports a non-edge.
struct TraceQuotient {
  std::vector<TraceSet> subsets;
  Digraph graph;
};

TraceQuotient quotient_power(const PowerContext& ctx,
                             std::size_t cap = kDefaultMaterializationCap);

// Quotient built the long way round: trace blocks of the materialized power
// with edges evaluated between block representatives.
struct BlockQuotient {
  std::vector<TraceBlock> blocks;
  Digraph graph;
};

BlockQuotient block_quotient(const PowerContext& ctx,
                             std::size_t cap = kDefaultMaterializationCap);

// Checks that the subset quotient and the block quotient agree vertex-for-
// vertex (same trace lists) and edge-for-edge.
struct QuotientComparison {
  bool same_traces = false;
  bool same_edges = false;
  std::int64_t subset_count = 0;
  bool ok() const { return same_traces && same_edges; }
};

QuotientComparison compare_quotients(const PowerContext& ctx,
                                     std::size_t cap = kDefaultMaterializationCap);

// Verifies that transposition of trace sets is an isomorphism between the
// quotient for (G1, G2, k) and the quotient for (G2, G1, k). Requires
// k >= max(|G1*|, |G2*|), the point from which every subset is realizable on
// both sides.
struct SwapReport {
  std::int64_t quotient_vertices = 0;
  std::int64_t ordered_pairs = 0;
  std::int64_t mismatches = 0;
  bool bijection_ok = false;
  bool ok() const { return bijection_ok && mismatches == 0; }
};

SwapReport verify_power_swap(const Digraph& g1, int u1, const Digraph& g2, int u2, int k,
                             std::size_t cap = kDefaultMaterializationCap);

}  // namespace permprime

#endif
