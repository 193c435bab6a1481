#include "permprime/digraph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "permprime/errors.hpp"

namespace permprime {

namespace {

// Multiplies vertex counts, failing as soon as the running product can no
// longer be a legal materialized size.
std::int64_t checked_total(std::int64_t acc, std::int64_t factor, std::size_t cap,
                           const char* what) {
  const std::int64_t limit =
      static_cast<std::int64_t>(std::min<std::size_t>(cap, std::numeric_limits<int>::max()));
  if (factor == 0) return 0;
  if (acc > limit / factor) {
    throw ResourceError(std::string(what) + " would exceed the materialization cap of " +
                        std::to_string(cap) + " vertices");
  }
  return acc * factor;
}

void require_vertex(const Digraph& d, int v, const char* what) {
  if (v < 0 || v >= d.size()) {
    throw InputError(std::string(what) + " " + std::to_string(v) +
                     " out of range for a digraph on " + std::to_string(d.size()) +
                     " vertices");
  }
}

}  // namespace

Digraph::Digraph(int n) {
  if (n < 0) throw InputError("digraph size must be non-negative");
  n_ = n;
  adj_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), false);
}

std::size_t Digraph::index(int u, int v) const {
  if (u < 0 || u >= n_ || v < 0 || v >= n_) {
    throw InputError("vertex pair (" + std::to_string(u) + ", " + std::to_string(v) +
                     ") out of range for a digraph on " + std::to_string(n_) + " vertices");
  }
  return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) +
         static_cast<std::size_t>(v);
}

std::int64_t Digraph::edge_count() const {
  return std::count(adj_.begin(), adj_.end(), true);
}

void Digraph::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(n_)) {
    throw InputError("label count " + std::to_string(labels.size()) +
                     " does not match vertex count " + std::to_string(n_));
  }
  labels_ = std::move(labels);
}

std::string Digraph::label(int v) const {
  require_vertex(*this, v, "vertex");
  if (has_labels()) return labels_[static_cast<std::size_t>(v)];
  return std::to_string(v);
}

Digraph build_digraph(int n, std::span<const std::pair<int, int>> edges) {
  Digraph d(n);
  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw InputError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") out of range for a digraph on " + std::to_string(n) + " vertices");
    }
    d.set_edge(u, v);
  }
  return d;
}

Digraph build_digraph(int n, std::initializer_list<std::pair<int, int>> edges) {
  return build_digraph(n, std::span<const std::pair<int, int>>(edges.begin(), edges.size()));
}

PropertyFlags classify(const Digraph& d) {
  const int n = d.size();
  PropertyFlags flags{true, true, true, true};
  for (int i = 0; i < n; ++i) {
    if (!d.edge(i, i)) flags.reflexive = false;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!d.edge(i, j)) flags.complete = false;
      if (d.edge(i, j) && !d.edge(j, i)) flags.symmetric = false;
    }
  }
  for (int i = 0; i < n && flags.transitive; ++i) {
    for (int j = 0; j < n && flags.transitive; ++j) {
      if (!d.edge(i, j)) continue;
      for (int k = 0; k < n; ++k) {
        if (d.edge(j, k) && !d.edge(i, k)) {
          flags.transitive = false;
          break;
        }
      }
    }
  }
  return flags;
}

Digraph complement(const Digraph& d) {
  const int n = d.size();
  Digraph out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.set_edge(i, j, !d.edge(i, j));
  }
  out.set_labels(d.labels());
  return out;
}

Digraph delete_vertex(const Digraph& d, int u) {
  require_vertex(d, u, "vertex");
  const int n = d.size();
  Digraph out(n - 1);
  auto keep = [u](int v) { return v < u ? v : v - 1; };
  for (int i = 0; i < n; ++i) {
    if (i == u) continue;
    for (int j = 0; j < n; ++j) {
      if (j == u) continue;
      out.set_edge(keep(i), keep(j), d.edge(i, j));
    }
  }
  if (d.has_labels()) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i) {
      if (i != u) labels.push_back(d.labels()[static_cast<std::size_t>(i)]);
    }
    out.set_labels(std::move(labels));
  }
  return out;
}

bool is_universal(const Digraph& d, int u) {
  require_vertex(d, u, "vertex");
  for (int v = 0; v < d.size(); ++v) {
    if (!d.edge(u, v) || !d.edge(v, u)) return false;
  }
  return true;
}

std::vector<int> universal_vertices(const Digraph& d) {
  std::vector<int> result;
  for (int u = 0; u < d.size(); ++u) {
    if (is_universal(d, u)) result.push_back(u);
  }
  return result;
}

Digraph star_reduct(const Digraph& d, int u) {
  require_vertex(d, u, "vertex");
  if (!is_universal(d, u)) {
    throw InputError("vertex " + std::to_string(u) + " is not universal");
  }
  return complement(delete_vertex(d, u));
}

Digraph product(std::span<const Digraph> factors, std::size_t cap) {
  if (factors.empty()) throw InputError("product requires at least one factor");
  const int m = static_cast<int>(factors.size());
  std::vector<int> radices(factors.size());
  std::int64_t total = 1;
  for (int i = 0; i < m; ++i) {
    radices[static_cast<std::size_t>(i)] = factors[static_cast<std::size_t>(i)].size();
    total = checked_total(total, factors[static_cast<std::size_t>(i)].size(), cap, "product");
  }
  Digraph out(static_cast<int>(total));

  std::vector<std::vector<int>> digits(static_cast<std::size_t>(total));
  for (std::int64_t v = 0; v < total; ++v) {
    digits[static_cast<std::size_t>(v)] = index_to_tuple(v, radices);
  }
  for (std::int64_t s = 0; s < total; ++s) {
    const auto& a = digits[static_cast<std::size_t>(s)];
    for (std::int64_t t = 0; t < total; ++t) {
      const auto& b = digits[static_cast<std::size_t>(t)];
      bool e = true;
      for (int i = 0; i < m; ++i) {
        if (!factors[static_cast<std::size_t>(i)].edge(a[static_cast<std::size_t>(i)],
                                                       b[static_cast<std::size_t>(i)])) {
          e = false;
          break;
        }
      }
      if (e) out.set_edge(static_cast<int>(s), static_cast<int>(t));
    }
  }
  return out;
}

Digraph product(std::initializer_list<Digraph> factors) {
  return product(std::span<const Digraph>(factors.begin(), factors.size()));
}

Digraph exponential(const Digraph& g, const Digraph& h, std::size_t cap) {
  const int gn = g.size();
  const int hn = h.size();
  std::int64_t total = 1;
  for (int i = 0; i < hn; ++i) total = checked_total(total, gn, cap, "exponential");

  std::vector<std::pair<int, int>> h_edges;
  for (int x = 0; x < hn; ++x) {
    for (int y = 0; y < hn; ++y) {
      if (h.edge(x, y)) h_edges.emplace_back(x, y);
    }
  }

  std::vector<int> radices(static_cast<std::size_t>(hn), gn);
  std::vector<std::vector<int>> funcs(static_cast<std::size_t>(total));
  for (std::int64_t v = 0; v < total; ++v) {
    funcs[static_cast<std::size_t>(v)] = index_to_tuple(v, radices);
  }

  Digraph out(static_cast<int>(total));
  for (std::int64_t s = 0; s < total; ++s) {
    const auto& f = funcs[static_cast<std::size_t>(s)];
    for (std::int64_t t = 0; t < total; ++t) {
      const auto& f2 = funcs[static_cast<std::size_t>(t)];
      bool e = true;
      for (const auto& [x, y] : h_edges) {
        if (!g.edge(f[static_cast<std::size_t>(x)], f2[static_cast<std::size_t>(y)])) {
          e = false;
          break;
        }
      }
      if (e) out.set_edge(static_cast<int>(s), static_cast<int>(t));
    }
  }
  return out;
}

ComponentPartition components(const Digraph& d) {
  const int n = d.size();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  auto unite = [&parent, &find](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (d.edge(i, j)) unite(i, j);
    }
  }

  ComponentPartition parts;
  parts.block_of.assign(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    const int root = find(v);
    if (parts.block_of[static_cast<std::size_t>(root)] < 0) {
      parts.block_of[static_cast<std::size_t>(root)] = static_cast<int>(parts.blocks.size());
      parts.blocks.emplace_back();
    }
    const int block = parts.block_of[static_cast<std::size_t>(root)];
    parts.block_of[static_cast<std::size_t>(v)] = block;
    parts.blocks[static_cast<std::size_t>(block)].push_back(v);
  }
  return parts;
}

Digraph induced(const Digraph& d, std::span<const int> vertices) {
  std::vector<int> vs(vertices.begin(), vertices.end());
  std::sort(vs.begin(), vs.end());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    require_vertex(d, vs[i], "vertex");
    if (i > 0 && vs[i] == vs[i - 1]) {
      throw InputError("duplicate vertex " + std::to_string(vs[i]) + " in induced-subdigraph set");
    }
  }
  const int m = static_cast<int>(vs.size());
  Digraph out(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      out.set_edge(i, j, d.edge(vs[static_cast<std::size_t>(i)], vs[static_cast<std::size_t>(j)]));
    }
  }
  if (d.has_labels()) {
    std::vector<std::string> labels;
    labels.reserve(vs.size());
    for (int v : vs) labels.push_back(d.labels()[static_cast<std::size_t>(v)]);
    out.set_labels(std::move(labels));
  }
  return out;
}

Digraph induced(const Digraph& d, const std::vector<int>& vertices) {
  return induced(d, std::span<const int>(vertices));
}

Digraph complete_digraph(int n) {
  Digraph d(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d.set_edge(i, j);
  }
  return d;
}

Digraph equality_digraph(int n) {
  Digraph d(n);
  for (int i = 0; i < n; ++i) d.set_edge(i, i);
  return d;
}

std::int64_t tuple_to_index(std::span<const int> digits, std::span<const int> radices) {
  if (digits.size() != radices.size()) {
    throw InputError("digit count does not match radix count");
  }
  std::int64_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= radices[i]) {
      throw InputError("digit " + std::to_string(digits[i]) + " out of range at position " +
                       std::to_string(i));
    }
    index = index * radices[i] + digits[i];
  }
  return index;
}

std::vector<int> index_to_tuple(std::int64_t index, std::span<const int> radices) {
  std::vector<int> digits(radices.size(), 0);
  for (std::size_t i = radices.size(); i-- > 0;) {
    digits[i] = static_cast<int>(index % radices[i]);
    index /= radices[i];
  }
  if (index != 0) throw InputError("tuple index out of range");
  return digits;
}

}  // namespace permprime
