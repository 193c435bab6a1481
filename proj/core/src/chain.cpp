#include "permprime/chain.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <utility>
#include <vector>

#include "permprime/errors.hpp"
#include "permprime/iso.hpp"

namespace permprime {

namespace {

using U128 = unsigned __int128;

U128 checked_mul(U128 a, U128 b) {
  if (a != 0 && b > ~U128{0} / a) {
    throw ResourceError("exact stage-size arithmetic overflows 128 bits");
  }
  return a * b;
}

U128 checked_pow(U128 base, int exp) {
  U128 out = 1;
  for (int i = 0; i < exp; ++i) out = checked_mul(out, base);
  return out;
}

std::string u128_str(U128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

std::vector<int> mutual_neighbors(const Digraph& d, int v) {
  std::vector<int> out;
  for (int w = 0; w < d.size(); ++w) {
    if (d.edge(v, w) && d.edge(w, v)) out.push_back(w);
  }
  return out;
}

// All 4-tuples (a,b,c,d) with a->b, a->c, a->d, b->c, b->d, c->d, in
// lexicographic order.
std::vector<std::array<int, 4>> g1_tuple_list(const Digraph& g0, std::size_t cap) {
  std::vector<std::array<int, 4>> tuples;
  const int n = g0.size();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (!g0.edge(a, b)) continue;
      for (int c = 0; c < n; ++c) {
        if (!g0.edge(a, c) || !g0.edge(b, c)) continue;
        for (int d = 0; d < n; ++d) {
          if (!g0.edge(a, d) || !g0.edge(b, d) || !g0.edge(c, d)) continue;
          if (tuples.size() >= cap) {
            throw ResourceError("the tuple stage would exceed the materialization cap of " +
                                std::to_string(cap) + " vertices");
          }
          tuples.push_back({a, b, c, d});
        }
      }
    }
  }
  return tuples;
}

bool g1_tuple_edge(const Digraph& g0, const std::array<int, 4>& s, const std::array<int, 4>& t) {
  return s[0] == t[0] && s[3] == t[3] && g0.edge(s[1], t[2]) && g0.edge(t[1], s[2]);
}

// All functions f on {0} u R with f(0) <-> f(x) for every x in R, encoded as
// [f(0), f(x1), ..., f(xm)] with x1 < ... < xm, in lexicographic order.
std::vector<std::vector<int>> g2_function_list(const Digraph& g1, const std::vector<int>& r_block) {
  std::vector<std::vector<int>> funcs;
  const int m = static_cast<int>(r_block.size());
  for (int f0 = 0; f0 < g1.size(); ++f0) {
    const std::vector<int> nb = mutual_neighbors(g1, f0);
    if (nb.empty()) continue;
    std::vector<std::size_t> pick(static_cast<std::size_t>(m), 0);
    bool done = false;
    while (!done) {
      std::vector<int> f(static_cast<std::size_t>(m) + 1);
      f[0] = f0;
      for (int j = 0; j < m; ++j) {
        f[static_cast<std::size_t>(j) + 1] = nb[pick[static_cast<std::size_t>(j)]];
      }
      funcs.push_back(std::move(f));
      int j = m - 1;
      for (; j >= 0; --j) {
        if (pick[static_cast<std::size_t>(j)] + 1 < nb.size()) {
          ++pick[static_cast<std::size_t>(j)];
          break;
        }
        pick[static_cast<std::size_t>(j)] = 0;
      }
      if (j < 0) done = true;
    }
  }
  return funcs;
}

int first_universal_vertex(const Digraph& d) {
  for (int v = 0; v < d.size(); ++v) {
    if (is_universal(d, v)) return v;
  }
  return -1;
}

std::vector<int> universal_vertex_set(const Digraph& d) {
  std::vector<int> out;
  for (int v = 0; v < d.size(); ++v) {
    if (is_universal(d, v)) out.push_back(v);
  }
  return out;
}

std::pair<int, std::vector<std::uint64_t>> adjacency_key(const Digraph& d) {
  const int n = d.size();
  std::vector<std::uint64_t> words((static_cast<std::size_t>(n) * n + 63) / 64, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (d.edge(i, j)) {
        const std::size_t bit = static_cast<std::size_t>(i) * n + j;
        words[bit / 64] |= std::uint64_t{1} << (bit % 64);
      }
    }
  }
  return {n, std::move(words)};
}

}  // namespace

Digraph construct_g1(const Digraph& g0, std::size_t cap) {
  if (!classify(g0).reflexive) {
    throw InputError("the tuple construction requires a reflexive digraph (every vertex looped)");
  }
  const std::vector<std::array<int, 4>> tuples = g1_tuple_list(g0, cap);
  const int n = static_cast<int>(tuples.size());
  Digraph out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g1_tuple_edge(g0, tuples[static_cast<std::size_t>(i)], tuples[static_cast<std::size_t>(j)])) {
        out.set_edge(i, j);
      }
    }
  }
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (const auto& t : tuples) {
    labels.push_back("(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                     std::to_string(t[2]) + "," + std::to_string(t[3]) + ")");
  }
  out.set_labels(std::move(labels));
  return out;
}

int first_noncomplete_component(const Digraph& d) {
  const ComponentPartition parts = components(d);
  for (std::size_t b = 0; b < parts.blocks.size(); ++b) {
    if (!classify(induced(d, parts.blocks[b])).complete) return static_cast<int>(b);
  }
  return -1;
}

Digraph construct_g2(const Digraph& g1, int r_component, std::size_t cap) {
  const ComponentPartition parts = components(g1);
  if (r_component < 0 || static_cast<std::size_t>(r_component) >= parts.blocks.size()) {
    throw InputError("component index " + std::to_string(r_component) + " out of range (digraph has " +
                     std::to_string(parts.blocks.size()) + " components)");
  }
  const std::vector<int>& r_block = parts.blocks[static_cast<std::size_t>(r_component)];
  if (classify(induced(g1, r_block)).complete) {
    throw InputError("component " + std::to_string(r_component) +
                     " is complete; the function stage needs a non-complete component");
  }

  const int m = static_cast<int>(r_block.size());
  U128 exact = 0;
  try {
    for (int v = 0; v < g1.size(); ++v) {
      exact += checked_pow(static_cast<U128>(mutual_neighbors(g1, v).size()), m);
    }
  } catch (const ResourceError&) {
    exact = ~U128{0};
  }
  if (exact > static_cast<U128>(cap)) {
    throw ResourceError("the function stage needs " +
                        (exact == ~U128{0} ? std::string("more than 2^128") : u128_str(exact)) +
                        " vertices (bound " + std::to_string(g1.size()) + "^" +
                        std::to_string(m + 1) + "), exceeding the materialization cap of " +
                        std::to_string(cap));
  }

  const std::vector<std::vector<int>> funcs = g2_function_list(g1, r_block);
  const int n = static_cast<int>(funcs.size());
  Digraph out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto& f = funcs[static_cast<std::size_t>(i)];
      const auto& g = funcs[static_cast<std::size_t>(j)];
      if (!g1.edge(f[0], g[0])) continue;
      if (std::equal(f.begin() + 1, f.end(), g.begin() + 1)) out.set_edge(i, j);
    }
  }
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (const auto& f : funcs) {
    std::string label = "f(*)=" + std::to_string(f[0]);
    for (int j = 0; j < m; ++j) {
      label += " f(" + std::to_string(r_block[static_cast<std::size_t>(j)]) +
               ")=" + std::to_string(f[static_cast<std::size_t>(j) + 1]);
    }
    labels.push_back(std::move(label));
  }
  out.set_labels(std::move(labels));
  return out;
}

Digraph construct_g3(const Digraph& g2, const Digraph& x, std::size_t cap) {
  const ComponentPartition parts = components(g2);
  for (std::size_t b = 0; b < parts.blocks.size(); ++b) {
    if (first_universal_vertex(induced(g2, parts.blocks[b])) < 0) {
      throw InputError("component " + std::to_string(b) +
                       " has no universal vertex; the range and bound characterisations of the "
                       "function stage would diverge");
    }
  }
  const int nx = x.size();
  if (nx == 0) return exponential(g2, x, cap);

  U128 total = 0;
  for (const auto& block : parts.blocks) {
    total += checked_pow(static_cast<U128>(block.size()), nx);
  }
  if (total > static_cast<U128>(cap)) {
    throw ResourceError("the component-power stage needs " + u128_str(total) +
                        " vertices, exceeding the materialization cap of " + std::to_string(cap));
  }

  std::vector<std::vector<int>> funcs;
  funcs.reserve(static_cast<std::size_t>(total));
  for (const auto& block : parts.blocks) {
    std::vector<std::size_t> pick(static_cast<std::size_t>(nx), 0);
    bool done = false;
    while (!done) {
      std::vector<int> f(static_cast<std::size_t>(nx));
      for (int j = 0; j < nx; ++j) f[static_cast<std::size_t>(j)] = block[pick[static_cast<std::size_t>(j)]];
      funcs.push_back(std::move(f));
      int j = nx - 1;
      for (; j >= 0; --j) {
        if (pick[static_cast<std::size_t>(j)] + 1 < block.size()) {
          ++pick[static_cast<std::size_t>(j)];
          break;
        }
        pick[static_cast<std::size_t>(j)] = 0;
      }
      if (j < 0) done = true;
    }
  }
  std::sort(funcs.begin(), funcs.end());

  std::vector<std::pair<int, int>> x_edges;
  for (int s = 0; s < nx; ++s) {
    for (int t = 0; t < nx; ++t) {
      if (x.edge(s, t)) x_edges.emplace_back(s, t);
    }
  }

  const int n = static_cast<int>(funcs.size());
  Digraph out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      bool ok = true;
      for (const auto& [s, t] : x_edges) {
        if (!g2.edge(funcs[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)],
                     funcs[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)])) {
          ok = false;
          break;
        }
      }
      if (ok) out.set_edge(i, j);
    }
  }
  return out;
}

std::optional<ObstructionWitness> find_obstruction(const Digraph& d) {
  const int n = d.size();
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      if (!d.edge(v, u) || !d.edge(u, u)) continue;
      for (int w = 0; w < n; ++w) {
        if (d.edge(u, w) && !d.edge(v, w)) return ObstructionWitness{v, u, w};
      }
    }
  }
  return std::nullopt;
}

namespace {

// Facts about the component-power of one induced subdigraph W: the power
// E = exponential(W, x), whether it is connected, complete, and has the
// constant function to W's first universal vertex as a universal vertex.
struct PatternFacts {
  Digraph w_graph;
  Digraph e;
  bool w_complete = false;
  bool e_complete = false;
  bool connected = false;
  bool has_universal = false;
  int universal_index = -1;
};

PatternFacts compute_pattern_facts(const Digraph& w_graph, const Digraph& x, std::size_t cap) {
  PatternFacts facts;
  facts.w_graph = w_graph;
  facts.e = exponential(w_graph, x, cap);
  facts.w_complete = classify(w_graph).complete;
  facts.e_complete = classify(facts.e).complete;
  facts.connected = components(facts.e).blocks.size() == 1;
  const int u_w = first_universal_vertex(w_graph);
  if (u_w >= 0) {
    std::int64_t idx = 0;
    for (int j = 0; j < x.size(); ++j) idx = idx * w_graph.size() + u_w;
    facts.universal_index = static_cast<int>(idx);
    facts.has_universal = is_universal(facts.e, facts.universal_index);
  }
  return facts;
}

}  // namespace

ChainReport verify_chain(const Digraph& g0, const Digraph& x, int product_n, std::size_t cap) {
  if (!classify(g0).reflexive) {
    throw InputError("the chain requires a reflexive digraph (every vertex looped)");
  }
  bool one_way = false;
  for (int a = 0; a < g0.size() && !one_way; ++a) {
    for (int b = 0; b < g0.size() && !one_way; ++b) {
      if (g0.edge(a, b) && !g0.edge(b, a)) one_way = true;
    }
  }
  if (!one_way) {
    throw InputError("the digraph is symmetric; the chain needs an edge (a,b) whose reverse is missing");
  }
  if (x.size() == 0 || x.edge_count() == 0) {
    throw InputError("the exponent digraph must have at least one edge; otherwise distinct "
                     "components merge in the component power");
  }
  if (product_n < 1) throw InputError("the product factor size must be at least 1");

  ChainReport report;
  report.g0_vertices = g0.size();
  report.x_vertices = x.size();
  report.product_n = product_n;
  const auto fail = [&report](const std::string& msg) {
    if (report.failure.empty()) report.failure = msg;
  };

  // ---- Stage 1: the tuple digraph. ------------------------------------------
  const Digraph g1 = construct_g1(g0, cap);
  const std::vector<std::array<int, 4>> tuples = g1_tuple_list(g0, cap);
  std::map<std::array<int, 4>, int> tuple_index;
  for (int i = 0; i < g1.size(); ++i) tuple_index[tuples[static_cast<std::size_t>(i)]] = i;

  const ComponentPartition comps1 = components(g1);
  report.g1_vertices = g1.size();
  report.g1_components = static_cast<int>(comps1.blocks.size());

  std::vector<Digraph> comp1_graphs;
  std::vector<int> comp1_universal;  // first universal vertex of each component, as a g1 id
  comp1_graphs.reserve(comps1.blocks.size());
  report.g1_universal_per_component = true;
  for (const auto& block : comps1.blocks) {
    comp1_graphs.push_back(induced(g1, block));
    const int local = first_universal_vertex(comp1_graphs.back());
    comp1_universal.push_back(local < 0 ? -1 : block[static_cast<std::size_t>(local)]);
    if (local < 0) {
      report.g1_universal_per_component = false;
      fail("a tuple-stage component has no universal vertex");
    }
  }
  if (!report.g1_universal_per_component) return report;

  std::vector<int> local_in_comp(static_cast<std::size_t>(g1.size()), -1);
  for (const auto& block : comps1.blocks) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      local_in_comp[static_cast<std::size_t>(block[i])] = static_cast<int>(i);
    }
  }

  report.g1_star_universal = true;
  report.g1_witness_nonedge = true;
  for (int a = 0; a < g0.size(); ++a) {
    for (int b = 0; b < g0.size(); ++b) {
      if (!g0.edge(a, b)) continue;
      const int star = tuple_index.at({a, a, b, b});
      const int comp = comps1.block_of[static_cast<std::size_t>(star)];
      if (!is_universal(comp1_graphs[static_cast<std::size_t>(comp)],
                        local_in_comp[static_cast<std::size_t>(star)])) {
        report.g1_star_universal = false;
        fail("(" + std::to_string(a) + "," + std::to_string(a) + "," + std::to_string(b) + "," +
             std::to_string(b) + ") is not universal in its component");
      }
      if (g0.edge(b, a)) continue;
      const int v1 = tuple_index.at({a, b, b, b});
      const int v2 = tuple_index.at({a, a, a, b});
      if (g1.edge(v1, v2) || comps1.block_of[static_cast<std::size_t>(v1)] != comp ||
          comps1.block_of[static_cast<std::size_t>(v2)] != comp) {
        report.g1_witness_nonedge = false;
        fail("the one-way edge (" + std::to_string(a) + "," + std::to_string(b) +
             ") does not yield the expected non-edge inside its component");
      }
    }
  }

  const int r_idx = first_noncomplete_component(g1);
  report.g1_noncomplete_exists = r_idx >= 0;
  if (r_idx < 0) {
    fail("no non-complete tuple-stage component exists");
    return report;
  }
  report.r_component = r_idx;
  const std::vector<int>& r_block = comps1.blocks[static_cast<std::size_t>(r_idx)];
  report.r_size = static_cast<int>(r_block.size());
  const int m = report.r_size;

  // ---- Stage 2, counted exactly. --------------------------------------------
  // The function part g = f restricted to R determines the component of f: the
  // admissible values of f(0) form V_g, the intersection of the mutual
  // neighbourhoods of the g(x), and the component is the subdigraph induced on
  // V_g.  Functions are therefore grouped into classes by the set V_g; every
  // realizable V_g is an intersection of at most |R| mutual neighbourhoods.
  std::vector<std::vector<int>> nbhd(static_cast<std::size_t>(g1.size()));
  for (int v = 0; v < g1.size(); ++v) nbhd[static_cast<std::size_t>(v)] = mutual_neighbors(g1, v);

  std::map<std::vector<int>, int> family;  // set -> least number of neighbourhoods intersected
  std::vector<std::vector<int>> frontier;
  for (const auto& nb : nbhd) {
    if (!nb.empty() && family.emplace(nb, 1).second) frontier.push_back(nb);
  }
  for (int depth = 2; depth <= m && !frontier.empty(); ++depth) {
    std::vector<std::vector<int>> next;
    for (const auto& s : frontier) {
      for (const auto& nb : nbhd) {
        std::vector<int> inter;
        std::set_intersection(s.begin(), s.end(), nb.begin(), nb.end(), std::back_inserter(inter));
        if (inter.empty()) continue;
        if (family.emplace(inter, depth).second) next.push_back(std::move(inter));
        if (family.size() > 200000) {
          throw ResourceError("the neighbourhood-intersection family grew past 200000 sets");
        }
      }
    }
    frontier = std::move(next);
  }

  struct ClassInfo {
    std::vector<int> set;
    U128 count = 0;
  };
  std::vector<ClassInfo> classes;
  classes.reserve(family.size());
  for (const auto& [set, _] : family) classes.push_back(ClassInfo{set, 0});
  std::sort(classes.begin(), classes.end(), [](const ClassInfo& a, const ClassInfo& b) {
    if (a.set.size() != b.set.size()) return a.set.size() > b.set.size();
    return a.set < b.set;
  });
  for (std::size_t i = 0; i < classes.size(); ++i) {
    U128 over = 0;  // functions g with V_g a strict superset of this class's set
    for (std::size_t j = 0; j < i; ++j) {
      if (classes[j].set.size() > classes[i].set.size() &&
          std::includes(classes[j].set.begin(), classes[j].set.end(), classes[i].set.begin(),
                        classes[i].set.end())) {
        over += classes[j].count;
      }
    }
    U128 at_least = 0;  // g with V_g containing the set: every g(x) must see all of it
    {
      int allowed = 0;
      for (int v = 0; v < g1.size(); ++v) {
        if (std::includes(nbhd[static_cast<std::size_t>(v)].begin(),
                          nbhd[static_cast<std::size_t>(v)].end(), classes[i].set.begin(),
                          classes[i].set.end())) {
          ++allowed;
        }
      }
      at_least = checked_pow(static_cast<U128>(allowed), m);
    }
    if (over > at_least) throw InternalError("class counting produced a negative multiplicity");
    classes[i].count = at_least - over;
  }

  U128 g2_total = 0;
  for (const auto& c : classes) g2_total += checked_mul(c.count, static_cast<U128>(c.set.size()));
  U128 g2_direct = 0;
  for (const auto& nb : nbhd) g2_direct += checked_pow(static_cast<U128>(nb.size()), m);
  report.g2_counts_consistent = g2_total == g2_direct;
  if (!report.g2_counts_consistent) {
    fail("class-based and direct counts of the function stage disagree");
  }
  report.g2_vertices = u128_str(g2_total);
  report.g2_classes = static_cast<int>(classes.size());

  // Deterministic per-class verification order: by vertex set.
  std::vector<std::size_t> order(classes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&classes](std::size_t a, std::size_t b) { return classes[a].set < classes[b].set; });

  const std::vector<int> univ_r = [&] {
    const std::vector<int> locals = universal_vertex_set(comp1_graphs[static_cast<std::size_t>(r_idx)]);
    std::vector<int> ids;
    for (int v : locals) ids.push_back(r_block[static_cast<std::size_t>(v)]);
    return ids;
  }();

  report.g2_universal_per_component = true;
  report.g3_components_are_powers = true;
  U128 g2_comp_total = 0;
  U128 g3_total = 0;
  U128 g3_comp_total = 0;
  std::map<std::pair<int, std::vector<std::uint64_t>>, PatternFacts> pattern_cache;
  const PatternFacts* first_pattern = nullptr;
  const PatternFacts* obstruction_pattern = nullptr;

  for (const std::size_t ci : order) {
    const ClassInfo& cls = classes[ci];
    if (cls.count == 0) continue;
    const int comp = comps1.block_of[static_cast<std::size_t>(cls.set[0])];
    const int u_d = comp1_universal[static_cast<std::size_t>(comp)];
    const Digraph ind_t = induced(g1, cls.set);
    const ComponentPartition parts_t = components(ind_t);
    g2_comp_total += checked_mul(cls.count, static_cast<U128>(parts_t.blocks.size()));

    // Universal vertex: replacing f(0) by the first universal vertex of the
    // ambient component must land inside the class and dominate it.
    const auto u_pos = std::lower_bound(cls.set.begin(), cls.set.end(), u_d);
    const bool u_in = u_pos != cls.set.end() && *u_pos == u_d;
    const bool u_dominates =
        u_in && parts_t.blocks.size() == 1 &&
        is_universal(ind_t, static_cast<int>(u_pos - cls.set.begin()));
    if (!u_dominates) {
      report.g2_universal_per_component = false;
      fail("a function-stage component class lacks the expected universal vertex");
    }

    bool class_complete = false;
    for (const auto& w_local : parts_t.blocks) {
      std::vector<int> w_ids;
      for (int lv : w_local) w_ids.push_back(cls.set[static_cast<std::size_t>(lv)]);
      const Digraph w_graph = induced(g1, w_ids);
      auto key = adjacency_key(w_graph);
      auto it = pattern_cache.find(key);
      if (it == pattern_cache.end()) {
        it = pattern_cache.emplace(std::move(key), compute_pattern_facts(w_graph, x, cap)).first;
      }
      const PatternFacts& facts = it->second;
      if (first_pattern == nullptr) first_pattern = &facts;
      class_complete = facts.w_complete;
      if (facts.w_complete) {
        report.g2_complete_exists = true;
      } else {
        report.g2_noncomplete_exists = true;
        report.g3_noncomplete_exists = true;
        if (obstruction_pattern == nullptr) obstruction_pattern = &facts;
      }
      if (!facts.connected || !facts.has_universal || facts.e_complete != facts.w_complete) {
        report.g3_components_are_powers = false;
        fail("a component power is not a single component with a universal constant function");
      }
      g3_total += checked_mul(cls.count, checked_pow(static_cast<U128>(w_ids.size()), x.size()));
    }
    g3_comp_total += checked_mul(cls.count, static_cast<U128>(parts_t.blocks.size()));

    if (cls.set == r_block) report.g2_r_copy_found = true;
    if (cls.set == univ_r && class_complete) report.g2_clique_found = true;
  }
  report.g2_components = u128_str(g2_comp_total);
  report.g3_vertices = u128_str(g3_total);
  report.g3_components = u128_str(g3_comp_total);
  if (!report.g2_complete_exists) fail("no complete function-stage component exists");
  if (!report.g2_noncomplete_exists) fail("no non-complete function-stage component exists");
  if (!report.g2_r_copy_found) fail("the constant functions to u_R do not form their own class");
  if (!report.g2_clique_found) fail("the identity-like functions do not form a complete class");

  // ---- Obstruction in a non-complete component power. -----------------------
  if (obstruction_pattern != nullptr) {
    const auto witness = find_obstruction(obstruction_pattern->e);
    report.obstruction_found = witness.has_value();
    if (witness) {
      report.obstruction = *witness;
      report.obstruction_component_size = obstruction_pattern->e.size();
    } else {
      fail("a non-complete component power yielded no obstruction triple");
    }
  } else {
    fail("no non-complete component power was available for the obstruction search");
  }

  // ---- Product structure, checked literally on one component power. ---------
  // With the all-loops factor the product splits into product_n disjoint
  // copies, and each copy is vertex-for-vertex the product with the complete
  // factor alone; components stay whole because every one has a universal
  // vertex.
  report.product_components = u128_str(checked_mul(static_cast<U128>(product_n), g3_comp_total));
  if (first_pattern != nullptr) {
    const Digraph& e = first_pattern->e;
    const std::vector<Digraph> triple{e, complete_digraph(product_n), equality_digraph(product_n)};
    const std::vector<Digraph> pair{e, complete_digraph(product_n)};
    const Digraph p3 = product(triple, cap);
    const Digraph ek = product(pair, cap);
    const ComponentPartition parts_p = components(p3);
    bool ok = static_cast<int>(parts_p.blocks.size()) == product_n;
    for (std::size_t b = 0; ok && b < parts_p.blocks.size(); ++b) {
      ok = induced(p3, parts_p.blocks[b]) == ek;
    }
    report.product_structure_ok = ok;
    if (!ok) fail("the product with complete and all-loops factors did not split into copies");
  }

  // ---- Literal cross-check on materialized stages. --------------------------
  constexpr U128 kStageGate = 1500;
  constexpr U128 kProductGate = 4000;
  constexpr U128 kTwoCharGate = 200000;
  if (g2_total <= kStageGate && g2_total <= static_cast<U128>(cap)) {
    report.materialized_checked = true;
    bool ok = true;
    const auto check = [&](bool cond, const std::string& msg) {
      if (!cond) {
        ok = false;
        fail("materialized cross-check: " + msg);
      }
    };

    const Digraph g2m = construct_g2(g1, r_idx, cap);
    const std::vector<std::vector<int>> funcs = g2_function_list(g1, r_block);
    check(static_cast<U128>(g2m.size()) == g2_total, "function-stage size mismatch");
    const ComponentPartition comps2 = components(g2m);
    check(static_cast<U128>(comps2.blocks.size()) == g2_comp_total,
          "function-stage component count mismatch");

    std::vector<Digraph> comp2_graphs;
    std::vector<int> local2(static_cast<std::size_t>(g2m.size()), -1);
    bool any_complete = false;
    bool any_noncomplete = false;
    for (const auto& block : comps2.blocks) {
      comp2_graphs.push_back(induced(g2m, block));
      for (std::size_t i = 0; i < block.size(); ++i) {
        local2[static_cast<std::size_t>(block[i])] = static_cast<int>(i);
      }
      check(first_universal_vertex(comp2_graphs.back()) >= 0,
            "a function-stage component has no universal vertex");
      (classify(comp2_graphs.back()).complete ? any_complete : any_noncomplete) = true;
    }
    check(any_complete && any_noncomplete, "function-stage component inventory mismatch");

    for (std::size_t i = 0; i < funcs.size() && ok; ++i) {
      std::vector<int> fu = funcs[i];
      fu[0] = comp1_universal[static_cast<std::size_t>(
          comps1.block_of[static_cast<std::size_t>(fu[0])])];
      const auto it = std::lower_bound(funcs.begin(), funcs.end(), fu);
      check(it != funcs.end() && *it == fu, "the universal replacement left the vertex set");
      if (!ok) break;
      const int j = static_cast<int>(it - funcs.begin());
      const int comp = comps2.block_of[static_cast<std::size_t>(i)];
      check(comps2.block_of[static_cast<std::size_t>(j)] == comp,
            "the universal replacement left the component");
      check(is_universal(comp2_graphs[static_cast<std::size_t>(comp)],
                         local2[static_cast<std::size_t>(j)]),
            "the universal replacement is not universal in its component");
    }

    // The constant functions to u_R form a copy of R; the identity function
    // part carries the clique on R's universal vertices.
    const int u_r = univ_r.empty() ? -1 : univ_r.front();
    std::vector<int> copy_ids;
    std::vector<int> clique_ids;
    for (std::size_t i = 0; i < funcs.size(); ++i) {
      const auto& f = funcs[i];
      if (std::all_of(f.begin() + 1, f.end(), [u_r](int v) { return v == u_r; })) {
        copy_ids.push_back(static_cast<int>(i));
      }
      if (std::equal(f.begin() + 1, f.end(), r_block.begin(), r_block.end())) {
        clique_ids.push_back(static_cast<int>(i));
      }
    }
    check(copy_ids.size() == r_block.size() &&
              induced(g2m, copy_ids) == comp1_graphs[static_cast<std::size_t>(r_idx)],
          "the constant functions to u_R do not copy R");
    check(clique_ids.size() == univ_r.size() && !clique_ids.empty() &&
              classify(induced(g2m, clique_ids)).complete,
          "the identity-like functions do not form the expected clique");
    if (!copy_ids.empty()) {
      const int b = comps2.block_of[static_cast<std::size_t>(copy_ids.front())];
      check(comps2.blocks[static_cast<std::size_t>(b)] == copy_ids, "the copy of R is not a whole component");
    }
    if (!clique_ids.empty()) {
      const int b = comps2.block_of[static_cast<std::size_t>(clique_ids.front())];
      check(comps2.blocks[static_cast<std::size_t>(b)] == clique_ids, "the clique is not a whole component");
    }

    // Third stage: the range characterisation must agree with the bound
    // characterisation, and components must be the component powers.
    bool have_g3 = false;
    Digraph g3m;
    if (g3_total <= kStageGate) {
      have_g3 = true;
      g3m = construct_g3(g2m, x, cap);
      check(static_cast<U128>(g3m.size()) == g3_total, "component-power stage size mismatch");
      const ComponentPartition comps3 = components(g3m);
      check(static_cast<U128>(comps3.blocks.size()) == g3_comp_total,
            "component-power stage component count mismatch");

      U128 all_funcs = 1;
      for (int j = 0; j < x.size(); ++j) all_funcs = checked_mul(all_funcs, static_cast<U128>(g2m.size()));
      if (all_funcs <= kTwoCharGate) {
        std::vector<int> f(static_cast<std::size_t>(x.size()), 0);
        bool done = false;
        bool agree = true;
        while (!done && agree) {
          bool one_comp = true;
          for (int j = 1; j < x.size(); ++j) {
            if (comps2.block_of[static_cast<std::size_t>(f[static_cast<std::size_t>(j)])] !=
                comps2.block_of[static_cast<std::size_t>(f[0])]) {
              one_comp = false;
              break;
            }
          }
          bool bounded = false;
          for (int u = 0; u < g2m.size() && !bounded; ++u) {
            bool all = true;
            for (int j = 0; j < x.size(); ++j) {
              if (!g2m.edge(f[static_cast<std::size_t>(j)], u)) {
                all = false;
                break;
              }
            }
            bounded = all;
          }
          agree = one_comp == bounded;
          int j = x.size() - 1;
          for (; j >= 0; --j) {
            if (f[static_cast<std::size_t>(j)] + 1 < g2m.size()) {
              ++f[static_cast<std::size_t>(j)];
              break;
            }
            f[static_cast<std::size_t>(j)] = 0;
          }
          if (j < 0) done = true;
        }
        check(agree, "the range and bound vertex characterisations disagree");
      }

      std::vector<bool> used(comps3.blocks.size(), false);
      for (std::size_t b2 = 0; b2 < comps2.blocks.size() && ok; ++b2) {
        const Digraph ec = exponential(comp2_graphs[b2], x, cap);
        bool matched = false;
        for (std::size_t b3 = 0; b3 < comps3.blocks.size() && !matched; ++b3) {
          if (used[b3] || static_cast<int>(comps3.blocks[b3].size()) != ec.size()) continue;
          if (are_isomorphic(induced(g3m, comps3.blocks[b3]), ec)) {
            used[b3] = true;
            matched = true;
          }
        }
        check(matched, "a component power matches no component of the materialized stage");
      }

      bool found_witness = false;
      for (std::size_t b3 = 0; b3 < comps3.blocks.size() && !found_witness; ++b3) {
        const Digraph comp = induced(g3m, comps3.blocks[b3]);
        if (classify(comp).complete || first_universal_vertex(comp) < 0) continue;
        found_witness = find_obstruction(comp).has_value();
      }
      check(found_witness, "no obstruction triple in any materialized non-complete component");
    }

    if (have_g3 &&
        checked_mul(g3_total, static_cast<U128>(product_n) * static_cast<U128>(product_n)) <=
            kProductGate) {
      const ComponentPartition comps3 = components(g3m);
      const std::vector<Digraph> triple{g3m, complete_digraph(product_n),
                                        equality_digraph(product_n)};
      const Digraph p = product(triple, cap);
      const ComponentPartition comps_p = components(p);
      check(static_cast<U128>(comps_p.blocks.size()) ==
                checked_mul(static_cast<U128>(product_n), g3_comp_total),
            "materialized product component count mismatch");
      for (std::size_t b = 0; b < comps_p.blocks.size() && ok; ++b) {
        const int first = comps_p.blocks[b].front();
        const int g3v = first / (product_n * product_n);
        const int src = comps3.block_of[static_cast<std::size_t>(g3v)];
        const std::vector<Digraph> pair{induced(g3m, comps3.blocks[static_cast<std::size_t>(src)]),
                                        complete_digraph(product_n)};
        const Digraph expected = product(pair, cap);
        check(induced(p, comps_p.blocks[b]) == expected,
              "a materialized product component is not the expected product");
        if (ok && b == 0) {
          check(are_isomorphic(induced(p, comps_p.blocks[b]), expected).has_value(),
                "product component unexpectedly not isomorphic to the expected product");
        }
      }
    }

    report.materialized_ok = ok;
  }

  report.pass = report.failure.empty() && report.g1_universal_per_component &&
                report.g1_star_universal && report.g1_witness_nonedge &&
                report.g1_noncomplete_exists && report.g2_counts_consistent &&
                report.g2_universal_per_component && report.g2_complete_exists &&
                report.g2_noncomplete_exists && report.g2_r_copy_found && report.g2_clique_found &&
                report.g3_components_are_powers && report.g3_noncomplete_exists &&
                report.obstruction_found && report.product_structure_ok &&
                (!report.materialized_checked || report.materialized_ok);
  return report;
}

}  // namespace permprime
