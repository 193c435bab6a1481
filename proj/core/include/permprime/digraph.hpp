#ifndef PERMPRIME_DIGRAPH_HPP
#define PERMPRIME_DIGRAPH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "permprime/caps.hpp"

namespace permprime {

// Finite directed graph on vertices 0..n-1, loops allowed, with an
// adjacency-matrix edge relation and optional display labels.
// operator== compares vertex count and edges only; labels are presentation
// metadata and never affect structural identity.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(int n);

  int size() const { return n_; }

  bool edge(int u, int v) const { return adj_[index(u, v)]; }
  void set_edge(int u, int v, bool present = true) { adj_[index(u, v)] = present; }

  std::int64_t edge_count() const;

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels);
  std::string label(int v) const;  // falls back to the vertex number

  bool operator==(const Digraph& other) const {
    return n_ == other.n_ && adj_ == other.adj_;
  }

 private:
  std::size_t index(int u, int v) const;

  int n_ = 0;
  std::vector<bool> adj_;
  std::vector<std::string> labels_;
};

struct PropertyFlags {
  bool reflexive = false;
  bool symmetric = false;
  bool transitive = false;
  bool complete = false;

  bool operator==(const PropertyFlags&) const = default;
};

// Weakly connected components. Blocks are ordered by smallest member and each
// block lists its vertices in ascending order; block_of[v] is v's block index.
struct ComponentPartition {
  std::vector<std::vector<int>> blocks;
  std::vector<int> block_of;
};

Digraph build_digraph(int n, std::span<const std::pair<int, int>> edges);
Digraph build_digraph(int n, std::initializer_list<std::pair<int, int>> edges);

PropertyFlags classify(const Digraph& d);

Digraph complement(const Digraph& d);
Digraph delete_vertex(const Digraph& d, int u);

// Vertices adjacent to every vertex in both directions (so a universal vertex
// always carries a loop).
std::vector<int> universal_vertices(const Digraph& d);
bool is_universal(const Digraph& d, int u);

// complement(delete_vertex(d, u)) for a universal vertex u.
Digraph star_reduct(const Digraph& d, int u);

// Direct product; vertex i encodes a tuple in row-major order (the last
// factor varies fastest) and (s, t) is an edge iff every coordinate pair is.
Digraph product(std::span<const Digraph> factors,
                std::size_t cap = kDefaultMaterializationCap);
Digraph product(std::initializer_list<Digraph> factors);

// Vertices of exponential(g, h) are the functions h -> g listed in
// lexicographic order of their value vectors (f(0) most significant), and
// f -> f' is an edge iff f(x) -> f'(y) in g for every edge x -> y of h.
// A zero-vertex exponent yields the single empty function, which has a loop.
Digraph exponential(const Digraph& g, const Digraph& h,
                    std::size_t cap = kDefaultMaterializationCap);

ComponentPartition components(const Digraph& d);

// Subdigraph induced by the given vertices, reindexed in ascending vertex
// order (duplicates rejected); labels of the selected vertices are kept.
Digraph induced(const Digraph& d, std::span<const int> vertices);
Digraph induced(const Digraph& d, const std::vector<int>& vertices);

Digraph complete_digraph(int n);
Digraph equality_digraph(int n);

// Row-major index helpers shared by product and exponential, exposed so
// callers can decode vertex indices. digits has one entry per position, each
// in [0, radix[i]).
std::int64_t tuple_to_index(std::span<const int> digits, std::span<const int> radices);
std::vector<int> index_to_tuple(std::int64_t index, std::span<const int> radices);

}  // namespace permprime

#endif
