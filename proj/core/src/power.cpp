#include "permprime/power.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>

#include "permprime/errors.hpp"
#include "permprime/parallel.hpp"

namespace permprime {

namespace {

void require_mask_capacity(const PowerContext& ctx) {
  if (ctx.n1s() * ctx.n2s() > 64) {
    throw ResourceError("trace ground set of " + std::to_string(ctx.n1s() * ctx.n2s()) +
                        " pairs exceeds the 64-bit mask representation");
  }
}

std::vector<int> star_position_lookup(const Digraph& g, const std::vector<int>& star) {
  std::vector<int> pos(static_cast<std::size_t>(g.size()), -1);
  for (std::size_t i = 0; i < star.size(); ++i) {
    pos[static_cast<std::size_t>(star[i])] = static_cast<int>(i);
  }
  return pos;
}

// For ground-set bit p, the mask of bits p' that witness a non-edge together
// with p: both the G1 coordinates and the G2 coordinates must be non-edges.
std::vector<std::uint64_t> nonedge_witness_masks(const PowerContext& ctx) {
  require_mask_capacity(ctx);
  const int n1s = ctx.n1s();
  const int n2s = ctx.n2s();
  std::vector<std::uint64_t> bad(static_cast<std::size_t>(n1s * n2s), 0);
  for (int g2p = 0; g2p < n2s; ++g2p) {
    for (int g1p = 0; g1p < n1s; ++g1p) {
      std::uint64_t mask = 0;
      for (int g2q = 0; g2q < n2s; ++g2q) {
        if (ctx.g2.edge(ctx.g2_star[static_cast<std::size_t>(g2p)],
                        ctx.g2_star[static_cast<std::size_t>(g2q)])) {
          continue;
        }
        for (int g1q = 0; g1q < n1s; ++g1q) {
          if (ctx.g1.edge(ctx.g1_star[static_cast<std::size_t>(g1p)],
                          ctx.g1_star[static_cast<std::size_t>(g1q)])) {
            continue;
          }
          mask |= std::uint64_t{1} << (g2q * n1s + g1q);
        }
      }
      bad[static_cast<std::size_t>(g2p * n1s + g1p)] = mask;
    }
  }
  return bad;
}

std::uint64_t union_of_witness_masks(const std::vector<std::uint64_t>& bad, std::uint64_t bits) {
  std::uint64_t out = 0;
  while (bits != 0) {
    const int p = std::countr_zero(bits);
    out |= bad[static_cast<std::size_t>(p)];
    bits &= bits - 1;
  }
  return out;
}

std::uint64_t transpose_mask(std::uint64_t bits, int n1s, int n2s) {
  std::uint64_t out = 0;
  while (bits != 0) {
    const int p = std::countr_zero(bits);
    const int g2p = p / n1s;
    const int g1p = p % n1s;
    out |= std::uint64_t{1} << (g1p * n2s + g2p);
    bits &= bits - 1;
  }
  return out;
}

}  // namespace

PowerContext make_power_context(Digraph g1, int u1, Digraph g2, int u2, int k) {
  if (u1 < 0 || u1 >= g1.size() || u2 < 0 || u2 >= g2.size()) {
    throw InputError("designated vertex out of range");
  }
  if (!is_universal(g1, u1)) {
    throw InputError("vertex " + std::to_string(u1) + " is not universal in the first digraph");
  }
  if (!is_universal(g2, u2)) {
    throw InputError("vertex " + std::to_string(u2) + " is not universal in the second digraph");
  }
  if (k < 1) throw InputError("k must be at least 1");

  PowerContext ctx;
  ctx.g1 = std::move(g1);
  ctx.g2 = std::move(g2);
  ctx.u1 = u1;
  ctx.u2 = u2;
  ctx.k = k;
  for (int v = 0; v < ctx.g1.size(); ++v) {
    if (v != u1) ctx.g1_star.push_back(v);
  }
  for (int v = 0; v < ctx.g2.size(); ++v) {
    if (v != u2) ctx.g2_star.push_back(v);
  }
  return ctx;
}

int trace_pair_bit(const PowerContext& ctx, int g1_pos, int g2_pos) {
  if (g1_pos < 0 || g1_pos >= ctx.n1s() || g2_pos < 0 || g2_pos >= ctx.n2s()) {
    throw InputError("trace pair position out of range");
  }
  require_mask_capacity(ctx);
  return g2_pos * ctx.n1s() + g1_pos;
}

bool trace_contains(const PowerContext& ctx, const TraceSet& t, int g1_pos, int g2_pos) {
  return (t.bits >> trace_pair_bit(ctx, g1_pos, g2_pos)) & 1;
}

std::int64_t power_vertex_count(const PowerContext& ctx, std::size_t cap) {
  const std::int64_t limit =
      static_cast<std::int64_t>(std::min<std::size_t>(cap, std::numeric_limits<int>::max()));
  std::int64_t total = 1;
  for (int c = 0; c < ctx.coord_count(); ++c) {
    if (ctx.g1.size() == 0) return 0;
    if (total > limit / ctx.g1.size()) {
      throw ResourceError("power of " + std::to_string(ctx.g1.size()) + "^" +
                          std::to_string(ctx.coord_count()) +
                          " vertices exceeds the materialization cap of " + std::to_string(cap));
    }
    total *= ctx.g1.size();
  }
  return total;
}

std::vector<int> power_vertex(const PowerContext& ctx, std::int64_t index) {
  const std::vector<int> radices(static_cast<std::size_t>(ctx.coord_count()), ctx.g1.size());
  return index_to_tuple(index, radices);
}

TraceSet trace_set(const PowerContext& ctx, const std::vector<int>& f) {
  require_mask_capacity(ctx);
  if (static_cast<int>(f.size()) != ctx.coord_count()) {
    throw InputError("power vertex has " + std::to_string(f.size()) + " coordinates, expected " +
                     std::to_string(ctx.coord_count()));
  }
  const std::vector<int> pos1 = star_position_lookup(ctx.g1, ctx.g1_star);
  TraceSet t;
  for (int g2p = 0; g2p < ctx.n2s(); ++g2p) {
    for (int ki = 0; ki < ctx.k; ++ki) {
      const int value = f[static_cast<std::size_t>(g2p * ctx.k + ki)];
      if (value < 0 || value >= ctx.g1.size()) {
        throw InputError("power vertex value " + std::to_string(value) + " out of range");
      }
      if (value == ctx.u1) continue;
      t.bits |= std::uint64_t{1} << (g2p * ctx.n1s() + pos1[static_cast<std::size_t>(value)]);
    }
  }
  return t;
}

DirectPowerPredicate::DirectPowerPredicate(const PowerContext& ctx) : ctx_(&ctx) {
  for (int g2p = 0; g2p < ctx.n2s(); ++g2p) {
    for (int g2q = 0; g2q < ctx.n2s(); ++g2q) {
      if (ctx.g2.edge(ctx.g2_star[static_cast<std::size_t>(g2p)],
                      ctx.g2_star[static_cast<std::size_t>(g2q)])) {
        continue;
      }
      for (int k1 = 0; k1 < ctx.k; ++k1) {
        for (int k2 = 0; k2 < ctx.k; ++k2) {
          constraints_.emplace_back(g2p * ctx.k + k1, g2q * ctx.k + k2);
        }
      }
    }
  }
}

bool DirectPowerPredicate::operator()(const std::vector<int>& f,
                                      const std::vector<int>& f2) const {
  for (const auto& [c1, c2] : constraints_) {
    if (!ctx_->g1.edge(f[static_cast<std::size_t>(c1)], f2[static_cast<std::size_t>(c2)])) {
      return false;
    }
  }
  return true;
}

Digraph materialize_power(const PowerContext& ctx, std::size_t cap) {
  const std::int64_t total = power_vertex_count(ctx, cap);
  std::vector<std::vector<int>> funcs(static_cast<std::size_t>(total));
  for (std::int64_t v = 0; v < total; ++v) {
    funcs[static_cast<std::size_t>(v)] = power_vertex(ctx, v);
  }
  const DirectPowerPredicate direct(ctx);
  Digraph out(static_cast<int>(total));
  for (std::int64_t s = 0; s < total; ++s) {
    for (std::int64_t t = 0; t < total; ++t) {
      if (direct(funcs[static_cast<std::size_t>(s)], funcs[static_cast<std::size_t>(t)])) {
        out.set_edge(static_cast<int>(s), static_cast<int>(t));
      }
    }
  }
  return out;
}

bool trace_nonedge(const PowerContext& ctx, const TraceSet& a, const TraceSet& b) {
  const std::vector<std::uint64_t> bad = nonedge_witness_masks(ctx);
  return (union_of_witness_masks(bad, a.bits) & b.bits) != 0;
}

bool nonedge_by_claim1(const PowerContext& ctx, const std::vector<int>& f,
                       const std::vector<int>& f2) {
  return trace_nonedge(ctx, trace_set(ctx, f), trace_set(ctx, f2));
}

Claim1Report check_claim1(const PowerContext& ctx, std::size_t cap, int threads) {
  const std::int64_t total = power_vertex_count(ctx, cap);
  std::vector<std::vector<int>> funcs(static_cast<std::size_t>(total));
  std::vector<std::uint64_t> traces(static_cast<std::size_t>(total));
  std::vector<std::uint64_t> bad_union(static_cast<std::size_t>(total));
  const std::vector<std::uint64_t> bad = nonedge_witness_masks(ctx);
  for (std::int64_t v = 0; v < total; ++v) {
    funcs[static_cast<std::size_t>(v)] = power_vertex(ctx, v);
    traces[static_cast<std::size_t>(v)] = trace_set(ctx, funcs[static_cast<std::size_t>(v)]).bits;
    bad_union[static_cast<std::size_t>(v)] =
        union_of_witness_masks(bad, traces[static_cast<std::size_t>(v)]);
  }
  const DirectPowerPredicate direct(ctx);

  struct Partial {
    std::int64_t mismatches = 0;
    std::int64_t first_v = -1;
    std::int64_t first_w = -1;
  };
  const auto partials = parallel_map_chunks<Partial>(
      total, threads, [&](std::int64_t begin, std::int64_t end) {
        Partial p;
        for (std::int64_t v = begin; v < end; ++v) {
          for (std::int64_t w = 0; w < total; ++w) {
            const bool direct_edge =
                direct(funcs[static_cast<std::size_t>(v)], funcs[static_cast<std::size_t>(w)]);
            const bool trace_edge =
                (bad_union[static_cast<std::size_t>(v)] & traces[static_cast<std::size_t>(w)]) == 0;
            if (direct_edge != trace_edge) {
              if (p.mismatches == 0) {
                p.first_v = v;
                p.first_w = w;
              }
              ++p.mismatches;
            }
          }
        }
        return p;
      });

  Claim1Report report;
  report.vertices = total;
  report.ordered_pairs = total * total;
  for (const auto& p : partials) {
    if (p.mismatches > 0 && !report.first_mismatch) {
      report.first_mismatch = std::pair<std::int64_t, std::int64_t>{p.first_v, p.first_w};
    }
    report.mismatches += p.mismatches;
  }
  return report;
}

std::vector<TraceSet> realizable_traces(const PowerContext& ctx, std::size_t cap) {
  require_mask_capacity(ctx);
  const int n1s = ctx.n1s();
  const int n2s = ctx.n2s();

  std::vector<std::uint64_t> column;
  for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << n1s); ++sub) {
    if (std::popcount(sub) <= ctx.k) column.push_back(sub);
  }

  std::size_t count = 1;
  for (int c = 0; c < n2s; ++c) {
    if (count > cap / column.size() + 1) {
      throw ResourceError("realizable trace family exceeds the cap of " + std::to_string(cap));
    }
    count *= column.size();
  }
  if (count > cap) {
    throw ResourceError("realizable trace family of " + std::to_string(count) +
                        " subsets exceeds the cap of " + std::to_string(cap));
  }

  std::vector<TraceSet> out;
  out.reserve(count);
  std::vector<std::size_t> pick(static_cast<std::size_t>(n2s), 0);
  bool done = false;
  while (!done) {
    std::uint64_t bits = 0;
    for (int c = 0; c < n2s; ++c) {
      bits |= column[pick[static_cast<std::size_t>(c)]] << (c * n1s);
    }
    out.push_back(TraceSet{bits});
    int c = 0;
    for (; c < n2s; ++c) {
      if (pick[static_cast<std::size_t>(c)] + 1 < column.size()) {
        ++pick[static_cast<std::size_t>(c)];
        break;
      }
      pick[static_cast<std::size_t>(c)] = 0;
    }
    if (c == n2s) done = true;
  }
  return out;
}

std::vector<TraceBlock> trace_blocks(const PowerContext& ctx, std::size_t cap) {
  const std::int64_t total = power_vertex_count(ctx, cap);
  std::map<std::uint64_t, TraceBlock> by_trace;
  for (std::int64_t v = 0; v < total; ++v) {
    const TraceSet t = trace_set(ctx, power_vertex(ctx, v));
    auto [it, inserted] = by_trace.try_emplace(t.bits, TraceBlock{t, 0, v});
    ++it->second.size;
  }
  std::vector<TraceBlock> out;
  out.reserve(by_trace.size());
  for (auto& [_, block] : by_trace) out.push_back(block);
  return out;
}

TraceQuotient quotient_power(const PowerContext& ctx, std::size_t cap) {
  TraceQuotient q;
  q.subsets = realizable_traces(ctx, cap);
  const std::vector<std::uint64_t> bad = nonedge_witness_masks(ctx);
  const int n = static_cast<int>(q.subsets.size());
  std::vector<std::uint64_t> bad_union(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bad_union[static_cast<std::size_t>(i)] =
        union_of_witness_masks(bad, q.subsets[static_cast<std::size_t>(i)].bits);
  }
  q.graph = Digraph(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((bad_union[static_cast<std::size_t>(i)] & q.subsets[static_cast<std::size_t>(j)].bits) ==
          0) {
        q.graph.set_edge(i, j);
      }
    }
  }
  return q;
}

BlockQuotient block_quotient(const PowerContext& ctx, std::size_t cap) {
  BlockQuotient q;
  q.blocks = trace_blocks(ctx, cap);
  const DirectPowerPredicate direct(ctx);
  const int n = static_cast<int>(q.blocks.size());
  std::vector<std::vector<int>> reps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    reps[static_cast<std::size_t>(i)] =
        power_vertex(ctx, q.blocks[static_cast<std::size_t>(i)].representative);
  }
  q.graph = Digraph(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (direct(reps[static_cast<std::size_t>(i)], reps[static_cast<std::size_t>(j)])) {
        q.graph.set_edge(i, j);
      }
    }
  }
  return q;
}

QuotientComparison compare_quotients(const PowerContext& ctx, std::size_t cap) {
  const TraceQuotient subsets = quotient_power(ctx, cap);
  const BlockQuotient blocks = block_quotient(ctx, cap);
  QuotientComparison cmp;
  cmp.subset_count = static_cast<std::int64_t>(subsets.subsets.size());
  cmp.same_traces = subsets.subsets.size() == blocks.blocks.size();
  if (cmp.same_traces) {
    for (std::size_t i = 0; i < subsets.subsets.size(); ++i) {
      if (subsets.subsets[i].bits != blocks.blocks[i].trace.bits) {
        cmp.same_traces = false;
        break;
      }
    }
  }
  cmp.same_edges = cmp.same_traces && subsets.graph == blocks.graph;
  return cmp;
}

SwapReport verify_power_swap(const Digraph& g1, int u1, const Digraph& g2, int u2, int k,
                             std::size_t cap) {
  const PowerContext forward = make_power_context(g1, u1, g2, u2, k);
  const PowerContext backward = make_power_context(g2, u2, g1, u1, k);
  const int threshold = std::max(forward.n1s(), forward.n2s());
  if (k < threshold) {
    throw InputError("k = " + std::to_string(k) + " is below the realizability threshold " +
                     std::to_string(threshold) +
                     " = max(|G1*|, |G2*|); the two sides would realize different subsets");
  }

  const TraceQuotient q12 = quotient_power(forward, cap);
  const TraceQuotient q21 = quotient_power(backward, cap);

  SwapReport report;
  report.quotient_vertices = static_cast<std::int64_t>(q12.subsets.size());

  std::vector<int> image(q12.subsets.size(), -1);
  bool bijection = q12.subsets.size() == q21.subsets.size();
  for (std::size_t i = 0; bijection && i < q12.subsets.size(); ++i) {
    const TraceSet flipped{transpose_mask(q12.subsets[i].bits, forward.n1s(), forward.n2s())};
    const auto it = std::lower_bound(q21.subsets.begin(), q21.subsets.end(), flipped);
    if (it == q21.subsets.end() || !(*it == flipped)) {
      bijection = false;
      break;
    }
    image[i] = static_cast<int>(it - q21.subsets.begin());
  }
  report.bijection_ok = bijection;
  if (!bijection) return report;

  const int n = static_cast<int>(q12.subsets.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (q12.graph.edge(i, j) != q21.graph.edge(image[static_cast<std::size_t>(i)],
                                                 image[static_cast<std::size_t>(j)])) {
        ++report.mismatches;
      }
      ++report.ordered_pairs;
    }
  }
  return report;
}

}  // namespace permprime
