#include "permprime/iso.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace permprime {

namespace {

// One refinement round over both graphs jointly: the new colour of a vertex is
// determined by its old colour plus the sorted multisets of out- and
// in-neighbour colours. Returns false once the colour histograms diverge.
bool refine_colors(const Digraph& a, const Digraph& b, std::vector<int>& ca,
                   std::vector<int>& cb) {
  const int n = a.size();
  using Signature = std::tuple<int, std::vector<int>, std::vector<int>>;

  auto signature = [n](const Digraph& d, const std::vector<int>& colors, int v) {
    std::vector<int> out;
    std::vector<int> in;
    for (int w = 0; w < n; ++w) {
      if (d.edge(v, w)) out.push_back(colors[static_cast<std::size_t>(w)]);
      if (d.edge(w, v)) in.push_back(colors[static_cast<std::size_t>(w)]);
    }
    std::sort(out.begin(), out.end());
    std::sort(in.begin(), in.end());
    return Signature{colors[static_cast<std::size_t>(v)], std::move(out), std::move(in)};
  };

  for (int round = 0; round < n + 1; ++round) {
    std::map<Signature, int> dictionary;
    std::vector<int> na(static_cast<std::size_t>(n));
    std::vector<int> nb(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      auto sig = signature(a, ca, v);
      auto [it, _] = dictionary.try_emplace(std::move(sig), static_cast<int>(dictionary.size()));
      na[static_cast<std::size_t>(v)] = it->second;
    }
    for (int v = 0; v < n; ++v) {
      auto sig = signature(b, cb, v);
      auto it = dictionary.find(sig);
      if (it == dictionary.end()) return false;
      nb[static_cast<std::size_t>(v)] = it->second;
    }

    std::vector<int> hist_a(dictionary.size(), 0);
    std::vector<int> hist_b(dictionary.size(), 0);
    for (int v = 0; v < n; ++v) {
      ++hist_a[static_cast<std::size_t>(na[static_cast<std::size_t>(v)])];
      ++hist_b[static_cast<std::size_t>(nb[static_cast<std::size_t>(v)])];
    }
    if (hist_a != hist_b) return false;

    const bool stable = std::equal(na.begin(), na.end(), ca.begin()) &&
                        std::equal(nb.begin(), nb.end(), cb.begin());
    ca = std::move(na);
    cb = std::move(nb);
    if (stable) break;
  }
  return true;
}

bool extend(const Digraph& a, const Digraph& b, const std::vector<int>& ca,
            const std::vector<int>& cb, std::vector<int>& mapping, std::vector<bool>& used,
            int v) {
  const int n = a.size();
  if (v == n) return true;
  for (int w = 0; w < n; ++w) {
    if (used[static_cast<std::size_t>(w)]) continue;
    if (ca[static_cast<std::size_t>(v)] != cb[static_cast<std::size_t>(w)]) continue;
    if (a.edge(v, v) != b.edge(w, w)) continue;
    bool ok = true;
    for (int u = 0; u < v; ++u) {
      const int mu = mapping[static_cast<std::size_t>(u)];
      if (a.edge(v, u) != b.edge(w, mu) || a.edge(u, v) != b.edge(mu, w)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    mapping[static_cast<std::size_t>(v)] = w;
    used[static_cast<std::size_t>(w)] = true;
    if (extend(a, b, ca, cb, mapping, used, v + 1)) return true;
    used[static_cast<std::size_t>(w)] = false;
  }
  return false;
}

}  // namespace

bool check_witness(const Digraph& a, const Digraph& b, const IsoWitness& witness) {
  const int n = a.size();
  if (b.size() != n || static_cast<int>(witness.mapping.size()) != n) return false;
  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  for (int v = 0; v < n; ++v) {
    const int w = witness.mapping[static_cast<std::size_t>(v)];
    if (w < 0 || w >= n || hit[static_cast<std::size_t>(w)]) return false;
    hit[static_cast<std::size_t>(w)] = true;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (a.edge(i, j) != b.edge(witness.mapping[static_cast<std::size_t>(i)],
                                 witness.mapping[static_cast<std::size_t>(j)])) {
        return false;
      }
    }
  }
  return true;
}

std::optional<IsoWitness> are_isomorphic(const Digraph& a, const Digraph& b) {
  const int n = a.size();
  if (b.size() != n) return std::nullopt;
  if (a.edge_count() != b.edge_count()) return std::nullopt;
  if (n == 0) return IsoWitness{{}};

  auto initial = [n](const Digraph& d, int v) {
    int out = 0;
    int in = 0;
    for (int w = 0; w < n; ++w) {
      if (d.edge(v, w)) ++out;
      if (d.edge(w, v)) ++in;
    }
    return std::tuple<int, int, bool>{out, in, d.edge(v, v)};
  };
  std::map<std::tuple<int, int, bool>, int> dictionary;
  std::vector<int> ca(static_cast<std::size_t>(n));
  std::vector<int> cb(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    auto [it, _] = dictionary.try_emplace(initial(a, v), static_cast<int>(dictionary.size()));
    ca[static_cast<std::size_t>(v)] = it->second;
  }
  for (int v = 0; v < n; ++v) {
    auto it = dictionary.find(initial(b, v));
    if (it == dictionary.end()) return std::nullopt;
    cb[static_cast<std::size_t>(v)] = it->second;
  }

  if (!refine_colors(a, b, ca, cb)) return std::nullopt;

  std::vector<int> mapping(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  if (!extend(a, b, ca, cb, mapping, used, 0)) return std::nullopt;
  return IsoWitness{std::move(mapping)};
}

}  // namespace permprime
