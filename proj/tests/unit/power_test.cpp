#include <doctest.h>

#include <cstdint>
#include <vector>

#include "permprime/digraph.hpp"
#include "permprime/errors.hpp"
#include "permprime/iso.hpp"
#include "permprime/power.hpp"

using namespace permprime;

namespace {

Digraph path3() {
  return build_digraph(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 0}, {1, 2}, {2, 1}});
}

PowerContext path3_ctx(int k) { return make_power_context(path3(), 1, path3(), 1, k); }

// A digraph whose last vertex is universal and whose other n - 1 vertices
// carry no edges at all, so the star reduct is as large as possible.
Digraph star_of(int n) {
  Digraph d(n);
  for (int v = 0; v < n; ++v) {
    d.set_edge(n - 1, v);
    d.set_edge(v, n - 1);
  }
  return d;
}

}  // namespace

TEST_CASE("make_power_context") {
  PowerContext ctx = path3_ctx(2);
  CHECK(ctx.u1 == 1);
  CHECK(ctx.u2 == 1);
  CHECK(ctx.k == 2);
  CHECK(ctx.g1_star == std::vector<int>{0, 2});
  CHECK(ctx.g2_star == std::vector<int>{0, 2});
  CHECK(ctx.n1s() == 2);
  CHECK(ctx.n2s() == 2);
  CHECK(ctx.coord_count() == 4);

  CHECK_THROWS_AS(make_power_context(path3(), 0, path3(), 1, 2), InputError);
  CHECK_THROWS_AS(make_power_context(path3(), 1, path3(), 3, 2), InputError);
  CHECK_THROWS_AS(make_power_context(path3(), 1, path3(), 1, 0), InputError);
}

TEST_CASE("power vertex enumeration") {
  PowerContext ctx = path3_ctx(1);
  CHECK(power_vertex_count(ctx) == 9);
  CHECK(power_vertex(ctx, 0) == std::vector<int>{0, 0});
  CHECK(power_vertex(ctx, 5) == std::vector<int>{1, 2});
  CHECK(power_vertex(ctx, 8) == std::vector<int>{2, 2});
  CHECK_THROWS_AS(power_vertex(ctx, 9), InputError);

  CHECK(power_vertex_count(path3_ctx(2)) == 81);
  CHECK_THROWS_AS(power_vertex_count(path3_ctx(2), 10), ResourceError);
}

TEST_CASE("trace sets") {
  PowerContext ctx = path3_ctx(1);
  CHECK(trace_pair_bit(ctx, 0, 0) == 0);
  CHECK(trace_pair_bit(ctx, 1, 0) == 1);
  CHECK(trace_pair_bit(ctx, 0, 1) == 2);
  CHECK(trace_pair_bit(ctx, 1, 1) == 3);

  // The all-u1 function has an empty trace.
  CHECK(trace_set(ctx, {1, 1}).bits == 0);
  // f sends the column of g2-vertex 0 to 0 and the column of 2 to 2.
  TraceSet t = trace_set(ctx, {0, 2});
  CHECK(t.bits == 0b1001);
  CHECK(trace_contains(ctx, t, 0, 0));
  CHECK(trace_contains(ctx, t, 1, 1));
  CHECK(!trace_contains(ctx, t, 1, 0));

  // Values equal to u1 leave no mark.
  CHECK(trace_set(ctx, {1, 2}).bits == 0b1000);
}

TEST_CASE("materialized power equals the exponential construction") {
  for (int k = 1; k <= 2; ++k) {
    PowerContext ctx = path3_ctx(k);
    Digraph direct = materialize_power(ctx);
    Digraph via_exp =
        exponential(path3(), product({star_reduct(path3(), 1), complete_digraph(k)}));
    CHECK(direct == via_exp);
  }

  PowerContext mixed = make_power_context(path3(), 1, complete_digraph(2), 0, 2);
  CHECK(materialize_power(mixed) ==
        exponential(path3(),
                    product({star_reduct(complete_digraph(2), 0), complete_digraph(2)})));

  CHECK_THROWS_AS(materialize_power(path3_ctx(2), 10), ResourceError);
}

TEST_CASE("direct predicate and trace route agree pointwise") {
  PowerContext ctx = path3_ctx(2);
  DirectPowerPredicate pred(ctx);
  std::vector<int> all0(4, 0), all1(4, 1), all2(4, 2);
  CHECK(pred(all0, all0));
  CHECK(!nonedge_by_claim1(ctx, all0, all0));
  // 0 -> 2 is missing in the base and 0 -> 2 is missing upstairs too.
  CHECK(!pred(all0, all2));
  CHECK(nonedge_by_claim1(ctx, all0, all2));
  // The all-u1 function relates to everything in both directions.
  CHECK(pred(all1, all2));
  CHECK(pred(all2, all1));
  CHECK(!nonedge_by_claim1(ctx, all1, all2));
}

TEST_CASE("check_claim1 exhaustively") {
  Claim1Report r = check_claim1(path3_ctx(2));
  CHECK(r.vertices == 81);
  CHECK(r.ordered_pairs == 6561);
  CHECK(r.mismatches == 0);
  CHECK(!r.first_mismatch.has_value());
  CHECK(r.ok());

  // Thread count must not change the outcome.
  Claim1Report r2 = check_claim1(path3_ctx(2), kDefaultMaterializationCap, 2);
  CHECK(r2.vertices == r.vertices);
  CHECK(r2.ordered_pairs == r.ordered_pairs);
  CHECK(r2.mismatches == 0);

  CHECK_THROWS_AS(check_claim1(path3_ctx(2), 10), ResourceError);
}

TEST_CASE("realizable_traces") {
  PowerContext ctx1 = path3_ctx(1);
  std::vector<TraceSet> traces = realizable_traces(ctx1);
  std::vector<std::uint64_t> masks;
  for (const TraceSet& t : traces) masks.push_back(t.bits);
  CHECK(masks == std::vector<std::uint64_t>{0, 1, 2, 4, 5, 6, 8, 9, 10});

  // With k = 2 every subset of the 2 x 2 ground set is realizable.
  CHECK(realizable_traces(path3_ctx(2)).size() == 16);
  CHECK(realizable_traces(path3_ctx(3)).size() == 16);
}

TEST_CASE("trace_blocks") {
  PowerContext ctx = path3_ctx(2);
  std::vector<TraceBlock> blocks = trace_blocks(ctx);
  REQUIRE(blocks.size() == 16);
  std::int64_t total = 0;
  for (const TraceBlock& b : blocks) total += b.size;
  CHECK(total == 81);

  // Column with no marked values: 1 way; one value: 3 ways; two values: 2.
  CHECK(blocks[0].trace.bits == 0);
  CHECK(blocks[0].size == 1);
  CHECK(blocks[0].representative == 40);  // the all-u1 function 1111
  CHECK(blocks[15].trace.bits == 15);
  CHECK(blocks[15].size == 4);

  // Every block's trace really is realizable, and vice versa.
  std::vector<TraceSet> traces = realizable_traces(ctx);
  REQUIRE(traces.size() == blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    CHECK(blocks[i].trace == traces[i]);
    CHECK(trace_set(ctx, power_vertex(ctx, blocks[i].representative)) == blocks[i].trace);
  }
}

TEST_CASE("subset quotient equals block quotient") {
  for (int k = 1; k <= 2; ++k) {
    QuotientComparison c = compare_quotients(path3_ctx(k));
    CHECK(c.ok());
    CHECK(c.subset_count == (k == 1 ? 9 : 16));
  }

  QuotientComparison mixed =
      compare_quotients(make_power_context(path3(), 1, complete_digraph(3), 0, 2));
  CHECK(mixed.ok());
}

TEST_CASE("quotient_power structure") {
  TraceQuotient q = quotient_power(path3_ctx(2));
  CHECK(q.subsets.size() == 16);
  CHECK(q.graph.size() == 16);
  // The empty trace relates to everything in both directions.
  for (int v = 0; v < 16; ++v) {
    CHECK(q.graph.edge(0, v));
    CHECK(q.graph.edge(v, 0));
  }
  BlockQuotient b = block_quotient(path3_ctx(2));
  CHECK(b.graph == q.graph);
}

TEST_CASE("verify_power_swap") {
  SwapReport r = verify_power_swap(path3(), 1, path3(), 1, 2);
  CHECK(r.quotient_vertices == 16);
  CHECK(r.ordered_pairs == 256);
  CHECK(r.mismatches == 0);
  CHECK(r.bijection_ok);
  CHECK(r.ok());

  // Below the realizability threshold the transpose map is not total.
  CHECK_THROWS_AS(verify_power_swap(path3(), 1, path3(), 1, 1), InputError);

  // From the threshold on, widening k changes nothing: every subset of the
  // ground set is already realizable on both sides.
  SwapReport wider = verify_power_swap(path3(), 1, path3(), 1, 3);
  CHECK(wider.quotient_vertices == 16);
  CHECK(wider.ok());

  // An asymmetric pair of factors.
  SwapReport mixed = verify_power_swap(path3(), 1, complete_digraph(2), 0, 2);
  CHECK(mixed.quotient_vertices == 4);
  CHECK(mixed.ok());
  SwapReport mixed_back = verify_power_swap(complete_digraph(2), 0, path3(), 1, 2);
  CHECK(mixed_back.quotient_vertices == 4);
  CHECK(mixed_back.ok());
}

TEST_CASE("trace masks are capped at 64 pairs") {
  PowerContext big = make_power_context(star_of(10), 9, star_of(9), 8, 1);
  CHECK(big.n1s() * big.n2s() == 72);
  CHECK_THROWS_AS(realizable_traces(big), ResourceError);
  CHECK_THROWS_AS(trace_set(big, std::vector<int>(big.coord_count(), 0)), ResourceError);
}
