#include "permprime/algebra.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "permprime/errors.hpp"

namespace permprime {

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<std::uint8_t>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (std::uint8_t b : v) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return h;
  }
};

using ElementIndex = std::unordered_map<std::vector<std::uint8_t>, int, VecHash>;

std::size_t checked_table_length(int universe, int arity) {
  std::size_t len = 1;
  for (int i = 0; i < arity; ++i) {
    len *= static_cast<std::size_t>(universe);
    if (len > (std::size_t{1} << 40)) {
      throw InputError("operation table too large");
    }
  }
  return len;
}

}  // namespace

void validate_algebra(const FiniteAlgebra& a) {
  if (a.size < 1 || a.size > 255) {
    throw InputError("algebra size must be between 1 and 255");
  }
  std::unordered_set<std::string> symbols;
  for (const Operation& op : a.operations) {
    if (op.symbol.empty()) throw InputError("operation symbol must be non-empty");
    if (!symbols.insert(op.symbol).second) {
      throw InputError("duplicate operation symbol '" + op.symbol + "'");
    }
    if (op.arity < 0) throw InputError("operation '" + op.symbol + "' has negative arity");
    const std::size_t expected = checked_table_length(a.size, op.arity);
    if (op.table.size() != expected) {
      throw InputError("operation '" + op.symbol + "' table has " +
                       std::to_string(op.table.size()) + " entries, expected " +
                       std::to_string(expected));
    }
    for (std::uint8_t value : op.table) {
      if (value >= a.size) {
        throw InputError("operation '" + op.symbol + "' table value " +
                         std::to_string(value) + " outside universe of size " +
                         std::to_string(a.size));
      }
    }
  }
}

std::size_t table_index(int universe, std::span<const std::uint8_t> args) {
  std::size_t index = 0;
  for (std::uint8_t arg : args) {
    if (arg >= universe) throw InputError("argument outside universe");
    index = index * static_cast<std::size_t>(universe) + arg;
  }
  return index;
}

std::uint8_t apply_operation(const FiniteAlgebra& a, int op, std::span<const std::uint8_t> args) {
  if (op < 0 || op >= static_cast<int>(a.operations.size())) {
    throw InputError("operation index out of range");
  }
  const Operation& operation = a.operations[static_cast<std::size_t>(op)];
  if (static_cast<int>(args.size()) != operation.arity) {
    throw InputError("operation '" + operation.symbol + "' expects " +
                     std::to_string(operation.arity) + " arguments");
  }
  return operation.table[table_index(a.size, args)];
}

std::uint8_t eval_term(const FiniteAlgebra& a, const Term& t,
                       std::span<const std::uint8_t> assignment) {
  if (t.is_variable()) {
    if (t.variable >= static_cast<int>(assignment.size())) {
      throw InputError("term variable " + std::to_string(t.variable) + " unassigned");
    }
    return assignment[static_cast<std::size_t>(t.variable)];
  }
  std::vector<std::uint8_t> args;
  args.reserve(t.children.size());
  for (const Term& child : t.children) args.push_back(eval_term(a, child, assignment));
  return apply_operation(a, t.op, args);
}

std::string format_term(const FiniteAlgebra& a, const Term& t,
                        std::span<const std::string> variable_names) {
  if (t.is_variable()) {
    if (t.variable >= static_cast<int>(variable_names.size())) {
      return "v" + std::to_string(t.variable);
    }
    return variable_names[static_cast<std::size_t>(t.variable)];
  }
  const Operation& op = a.operations.at(static_cast<std::size_t>(t.op));
  if (t.children.empty()) return op.symbol;
  std::string out = op.symbol + "(";
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_term(a, t.children[i], variable_names);
  }
  out += ")";
  return out;
}

std::vector<SubpowerElement> generate_subpower(
    const FiniteAlgebra& a, int index_size,
    const std::vector<std::vector<std::uint8_t>>& generators, std::size_t cap) {
  validate_algebra(a);
  if (index_size < 0) throw InputError("index size must be non-negative");
  for (const auto& g : generators) {
    if (static_cast<int>(g.size()) != index_size) {
      throw InputError("generator length " + std::to_string(g.size()) +
                       " does not match index size " + std::to_string(index_size));
    }
    for (std::uint8_t value : g) {
      if (value >= a.size) throw InputError("generator value outside universe");
    }
  }

  std::vector<SubpowerElement> elements;
  ElementIndex seen;

  auto add = [&](std::vector<std::uint8_t> coords, int generator, int op,
                 std::vector<int> children) {
    auto it = seen.find(coords);
    if (it != seen.end()) return;
    if (elements.size() >= cap) {
      throw ResourceError("subpower closure exceeded the cap of " + std::to_string(cap) +
                          " elements (partial count " + std::to_string(elements.size()) + ")");
    }
    const int index = static_cast<int>(elements.size());
    seen.emplace(coords, index);
    elements.push_back(SubpowerElement{std::move(coords), generator, op, std::move(children)});
  };

  for (std::size_t k = 0; k < generators.size(); ++k) {
    add(generators[k], static_cast<int>(k), -1, {});
  }
  for (std::size_t op = 0; op < a.operations.size(); ++op) {
    if (a.operations[op].arity != 0) continue;
    std::vector<std::uint8_t> coords(static_cast<std::size_t>(index_size),
                                     a.operations[op].table[0]);
    add(std::move(coords), -1, static_cast<int>(op), {});
  }

  std::size_t round_begin = 0;
  std::size_t round_end = elements.size();
  std::vector<std::uint8_t> scratch(static_cast<std::size_t>(index_size));
  std::vector<int> tuple;

  while (round_begin < round_end) {
    for (std::size_t op = 0; op < a.operations.size(); ++op) {
      const int arity = a.operations[op].arity;
      if (arity == 0) continue;
      const std::vector<std::uint8_t>& table = a.operations[op].table;
      // Argument tuples containing at least one element of the newest round,
      // partitioned by the first position holding such an element.
      for (int first_new = 0; first_new < arity; ++first_new) {
        tuple.assign(static_cast<std::size_t>(arity), 0);
        tuple[static_cast<std::size_t>(first_new)] = static_cast<int>(round_begin);
        bool done = false;
        if (first_new > 0 && round_begin == 0) done = true;
        while (!done) {
          for (int c = 0; c < index_size; ++c) {
            std::size_t idx = 0;
            for (int p = 0; p < arity; ++p) {
              idx = idx * static_cast<std::size_t>(a.size) +
                    elements[static_cast<std::size_t>(tuple[static_cast<std::size_t>(p)])]
                        .coords[static_cast<std::size_t>(c)];
            }
            scratch[static_cast<std::size_t>(c)] = table[idx];
          }
          add(scratch, -1, static_cast<int>(op), tuple);

          int p = arity - 1;
          for (; p >= 0; --p) {
            const std::size_t sp = static_cast<std::size_t>(p);
            const int low = (p == first_new) ? static_cast<int>(round_begin) : 0;
            const int high = (p < first_new) ? static_cast<int>(round_begin)
                                             : static_cast<int>(round_end);
            if (tuple[sp] + 1 < high) {
              ++tuple[sp];
              break;
            }
            tuple[sp] = low;
          }
          if (p < 0) done = true;
        }
      }
    }
    round_begin = round_end;
    round_end = elements.size();
  }
  return elements;
}

Term term_from_derivation(const std::vector<SubpowerElement>& elements, int index) {
  if (index < 0 || index >= static_cast<int>(elements.size())) {
    throw InputError("element index out of range");
  }
  const SubpowerElement& element = elements[static_cast<std::size_t>(index)];
  if (element.generator >= 0) {
    Term t;
    t.variable = element.generator;
    return t;
  }
  if (element.op < 0) throw InternalError("element has no derivation");
  Term t;
  t.op = element.op;
  t.children.reserve(element.children.size());
  for (int child : element.children) {
    t.children.push_back(term_from_derivation(elements, child));
  }
  return t;
}

CompatibilityResult is_compatible(const FiniteAlgebra& a, const Digraph& d) {
  validate_algebra(a);
  if (d.size() != a.size) {
    throw InputError("digraph on " + std::to_string(d.size()) +
                     " vertices does not match algebra of size " + std::to_string(a.size));
  }

  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < d.size(); ++u) {
    for (int v = 0; v < d.size(); ++v) {
      if (d.edge(u, v)) edges.emplace_back(u, v);
    }
  }

  for (std::size_t op = 0; op < a.operations.size(); ++op) {
    const int arity = a.operations[op].arity;
    if (arity > 0 && edges.empty()) continue;
    std::vector<int> pick(static_cast<std::size_t>(arity), 0);
    std::vector<std::uint8_t> xs(static_cast<std::size_t>(arity));
    std::vector<std::uint8_t> ys(static_cast<std::size_t>(arity));
    bool done = false;
    while (!done) {
      for (int p = 0; p < arity; ++p) {
        const auto& e = edges[static_cast<std::size_t>(pick[static_cast<std::size_t>(p)])];
        xs[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(e.first);
        ys[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(e.second);
      }
      const int fx = apply_operation(a, static_cast<int>(op), xs);
      const int fy = apply_operation(a, static_cast<int>(op), ys);
      if (!d.edge(fx, fy)) {
        CompatibilityWitness witness;
        witness.op_symbol = a.operations[op].symbol;
        for (int p = 0; p < arity; ++p) {
          witness.edges.push_back(edges[static_cast<std::size_t>(pick[static_cast<std::size_t>(p)])]);
        }
        witness.image = {fx, fy};
        return CompatibilityResult{false, std::move(witness)};
      }

      int p = arity - 1;
      for (; p >= 0; --p) {
        const std::size_t sp = static_cast<std::size_t>(p);
        if (pick[sp] + 1 < static_cast<int>(edges.size())) {
          ++pick[sp];
          break;
        }
        pick[sp] = 0;
      }
      if (p < 0) done = true;
    }
  }
  return CompatibilityResult{true, std::nullopt};
}

FreeAlgebra2 free_algebra_on_two(const FiniteAlgebra& a, std::size_t cap) {
  validate_algebra(a);
  const int n = a.size;
  const int coords = n * n;
  std::vector<std::uint8_t> p1(static_cast<std::size_t>(coords));
  std::vector<std::uint8_t> p2(static_cast<std::size_t>(coords));
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      p1[static_cast<std::size_t>(x * n + y)] = static_cast<std::uint8_t>(x);
      p2[static_cast<std::size_t>(x * n + y)] = static_cast<std::uint8_t>(y);
    }
  }
  const bool same = (p1 == p2);
  FreeAlgebra2 result;
  result.elements = generate_subpower(a, coords, {p1, p2}, cap);
  result.x_index = 0;
  result.y_index = same ? 0 : 1;
  return result;
}

FiniteAlgebra algebra_on_subpower(const FiniteAlgebra& a,
                                  const std::vector<SubpowerElement>& elements) {
  validate_algebra(a);
  if (elements.size() > 255) {
    throw ResourceError("subpower of size " + std::to_string(elements.size()) +
                        " too large to serve as a table-based universe");
  }
  ElementIndex seen;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    seen.emplace(elements[i].coords, static_cast<int>(i));
  }
  const int m = static_cast<int>(elements.size());
  const std::size_t coords =
      elements.empty() ? 0 : elements.front().coords.size();

  FiniteAlgebra out;
  out.size = m;
  for (const Operation& op : a.operations) {
    Operation induced;
    induced.symbol = op.symbol;
    induced.arity = op.arity;
    induced.table.resize(checked_table_length(m, op.arity));
    std::vector<int> pick(static_cast<std::size_t>(op.arity), 0);
    std::vector<std::uint8_t> args(static_cast<std::size_t>(op.arity));
    std::vector<std::uint8_t> value(coords);
    for (std::size_t entry = 0; entry < induced.table.size(); ++entry) {
      std::size_t rest = entry;
      for (int p = op.arity - 1; p >= 0; --p) {
        pick[static_cast<std::size_t>(p)] = static_cast<int>(rest % static_cast<std::size_t>(m));
        rest /= static_cast<std::size_t>(m);
      }
      for (std::size_t c = 0; c < coords; ++c) {
        for (int p = 0; p < op.arity; ++p) {
          args[static_cast<std::size_t>(p)] =
              elements[static_cast<std::size_t>(pick[static_cast<std::size_t>(p)])].coords[c];
        }
        value[c] = apply_operation(a, static_cast<int>(&op - a.operations.data()), args);
      }
      auto it = seen.find(value);
      if (it == seen.end()) {
        throw InternalError("element list is not closed under '" + op.symbol + "'");
      }
      induced.table[entry] = static_cast<std::uint8_t>(it->second);
    }
    out.operations.push_back(std::move(induced));
  }
  return out;
}

MaltsevDigraph maltsev_digraph(const FiniteAlgebra& a, std::size_t cap) {
  FreeAlgebra2 free2 = free_algebra_on_two(a, cap);
  const std::size_t coords = static_cast<std::size_t>(a.size) * static_cast<std::size_t>(a.size);

  ElementIndex free_index;
  for (std::size_t i = 0; i < free2.elements.size(); ++i) {
    free_index.emplace(free2.elements[i].coords, static_cast<int>(i));
  }

  const auto& x = free2.elements[static_cast<std::size_t>(free2.x_index)].coords;
  const auto& y = free2.elements[static_cast<std::size_t>(free2.y_index)].coords;
  auto concat = [](const std::vector<std::uint8_t>& s, const std::vector<std::uint8_t>& t) {
    std::vector<std::uint8_t> out(s);
    out.insert(out.end(), t.begin(), t.end());
    return out;
  };
  const auto pairs = generate_subpower(a, static_cast<int>(2 * coords),
                                       {concat(x, x), concat(x, y), concat(y, y)}, cap);

  Digraph graph(static_cast<int>(free2.elements.size()));
  for (const SubpowerElement& pair : pairs) {
    std::vector<std::uint8_t> first(pair.coords.begin(),
                                    pair.coords.begin() + static_cast<std::ptrdiff_t>(coords));
    std::vector<std::uint8_t> second(pair.coords.begin() + static_cast<std::ptrdiff_t>(coords),
                                     pair.coords.end());
    auto sit = free_index.find(first);
    auto tit = free_index.find(second);
    if (sit == free_index.end() || tit == free_index.end()) {
      throw InternalError("pair closure left the binary term functions");
    }
    graph.set_edge(sit->second, tit->second);
  }

  std::vector<std::string> labels;
  labels.reserve(free2.elements.size());
  const std::vector<std::string> names = {"x", "y"};
  for (std::size_t i = 0; i < free2.elements.size(); ++i) {
    labels.push_back(format_term(a, term_from_derivation(free2.elements, static_cast<int>(i)),
                                 names));
  }
  graph.set_labels(std::move(labels));

  return MaltsevDigraph{std::move(graph), free2.x_index, free2.y_index};
}

std::optional<Term> find_maltsev_term(const FiniteAlgebra& a, std::size_t cap) {
  validate_algebra(a);
  const int n = a.size;
  const int coords = n * n * n;
  std::vector<std::vector<std::uint8_t>> projections(
      3, std::vector<std::uint8_t>(static_cast<std::size_t>(coords)));
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      for (int z = 0; z < n; ++z) {
        const std::size_t c = static_cast<std::size_t>((x * n + y) * n + z);
        projections[0][c] = static_cast<std::uint8_t>(x);
        projections[1][c] = static_cast<std::uint8_t>(y);
        projections[2][c] = static_cast<std::uint8_t>(z);
      }
    }
  }
  const auto elements = generate_subpower(a, coords, projections, cap);

  auto is_maltsev = [n](const std::vector<std::uint8_t>& t) {
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (t[static_cast<std::size_t>((x * n + y) * n + y)] != x) return false;
        if (t[static_cast<std::size_t>((y * n + y) * n + x)] != x) return false;
      }
    }
    return true;
  };
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (is_maltsev(elements[i].coords)) {
      return term_from_derivation(elements, static_cast<int>(i));
    }
  }
  return std::nullopt;
}

CpVerdict is_congruence_permutable(const FiniteAlgebra& a, std::size_t cap) {
  MaltsevDigraph digraph = maltsev_digraph(a, cap);
  const bool symmetric = classify(digraph.graph).symmetric;
  std::optional<Term> term = find_maltsev_term(a, cap);
  if (symmetric != term.has_value()) {
    throw InternalError("term search and free-algebra digraph symmetry disagree");
  }
  CpVerdict verdict;
  verdict.permutable = symmetric;
  if (symmetric) {
    verdict.maltsev_term = std::move(term);
  } else {
    verdict.obstruction_digraph = std::move(digraph);
  }
  return verdict;
}

}  // namespace permprime
