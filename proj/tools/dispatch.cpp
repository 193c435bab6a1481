#include "dispatch.hpp"

#include <chrono>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "permprime/algebra.hpp"
#include "permprime/chain.hpp"
#include "permprime/digraph.hpp"
#include "permprime/errors.hpp"
#include "permprime/formats.hpp"
#include "permprime/iso.hpp"
#include "permprime/parallel.hpp"
#include "permprime/power.hpp"

namespace permprime::cli {

namespace {

struct Report {
  std::string verdict = "pass";
  std::vector<std::pair<std::string, std::string>> fields;

  void add(const std::string& key, const std::string& value) { fields.emplace_back(key, value); }
  void add_num(const std::string& key, std::int64_t value) {
    fields.emplace_back(key, std::to_string(value));
  }
  void add_bool(const std::string& key, bool value) {
    fields.emplace_back(key, value ? "true" : "false");
  }
};

void emit(const Report& report, const std::string& command, const std::string& format,
          std::int64_t elapsed_ms, std::ostream& out) {
  const bool structured = format == "structured";
  const char* sep = structured ? "=" : ": ";
  out << "command" << sep << command << "\n";
  out << "verdict" << sep << report.verdict << "\n";
  for (const auto& [key, value] : report.fields) {
    out << key << sep << value << "\n";
  }
  out << "elapsed_ms" << sep << elapsed_ms << "\n";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += " ";
    out += std::to_string(values[i]);
  }
  return out;
}

// One line per edge is unusable in a flat report, so inline digraphs swap the
// newlines of the file format for semicolons.
std::string flatten_digraph(const Digraph& d) {
  std::string text = serialize_digraph(d);
  for (char& c : text) {
    if (c == '\n') c = ';';
  }
  return text;
}

void add_digraph_result(Report& report, const Digraph& d, const std::string& output_path) {
  report.add_num("vertices", d.size());
  report.add_num("edges", d.edge_count());
  if (output_path.empty()) {
    report.add("result", flatten_digraph(d));
  } else {
    write_text_file(output_path, serialize_digraph(d));
    report.add("output", output_path);
  }
}

int pick_universal(const Digraph& d, int requested, const std::string& which) {
  if (requested >= 0) {
    if (requested >= d.size()) {
      throw InputError("--" + which + " " + std::to_string(requested) + " is out of range");
    }
    if (!is_universal(d, requested)) {
      throw InputError("--" + which + " " + std::to_string(requested) + " is not a universal vertex");
    }
    return requested;
  }
  const std::vector<int> univ = universal_vertices(d);
  if (univ.empty()) {
    throw InputError("the digraph for --" + which.substr(1) + " has no universal vertex");
  }
  return univ.front();
}

std::size_t env_cap(std::size_t fallback) {
  const char* raw = std::getenv("PERMPRIME_CAP");
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == nullptr || *end != '\0' || value == 0) {
    throw InputError(std::string("PERMPRIME_CAP must be a positive integer, got '") + raw + "'");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite digraph calculus and congruence-permutability toolkit"};
  app.require_subcommand(1);

  std::string format = "text";
  int threads = 0;
  std::size_t cap = env_cap(kDefaultMaterializationCap);
  std::size_t closure_cap = kDefaultClosureCap;
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--threads", threads, "Worker threads (0 = machine parallelism)");
  app.add_option("--cap", cap, "Materialization cap in vertices");
  app.add_option("--closure-cap", closure_cap, "Closure cap in elements");

  std::string file_a;
  std::string file_b;
  std::vector<std::string> file_list;
  std::string output_path;
  std::string x_path;
  int u1 = -1;
  int u2 = -1;
  int k = 1;
  int product_n = 2;

  const auto sub = [](CLI::App* parent, const std::string& name, const std::string& desc) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  CLI::App* dg = sub(&app, "dg", "Digraph calculus");
  dg->require_subcommand(1);
  CLI::App* dg_classify = sub(dg, "classify", "Report reflexive/symmetric/transitive/complete");
  dg_classify->add_option("file", file_a, "Digraph file")->required();
  CLI::App* dg_complement = sub(dg, "complement", "Complement digraph");
  dg_complement->add_option("file", file_a, "Digraph file")->required();
  dg_complement->add_option("-o,--output", output_path, "Write the result to a file");
  CLI::App* dg_product = sub(dg, "product", "Direct product of two or more digraphs");
  dg_product->add_option("files", file_list, "Digraph files")->expected(2, -1);
  dg_product->add_option("-o,--output", output_path, "Write the result to a file");
  CLI::App* dg_exp = sub(dg, "exp", "Exponential digraph G^H");
  dg_exp->add_option("base", file_a, "Digraph file for G")->required();
  dg_exp->add_option("exponent", file_b, "Digraph file for H")->required();
  dg_exp->add_option("-o,--output", output_path, "Write the result to a file");
  CLI::App* dg_components = sub(dg, "components", "Weakly connected components");
  dg_components->add_option("file", file_a, "Digraph file")->required();
  CLI::App* dg_universal = sub(dg, "universal", "List universal vertices");
  dg_universal->add_option("file", file_a, "Digraph file")->required();
  CLI::App* dg_iso = sub(dg, "iso", "Isomorphism test with witness");
  dg_iso->add_option("first", file_a, "Digraph file")->required();
  dg_iso->add_option("second", file_b, "Digraph file")->required();

  CLI::App* alg = sub(&app, "alg", "Finite algebra analysis");
  alg->require_subcommand(1);
  CLI::App* alg_compat = sub(alg, "compat", "Check digraph compatibility with an algebra");
  alg_compat->add_option("algebra", file_a, "Algebra file")->required();
  alg_compat->add_option("digraph", file_b, "Digraph file")->required();
  CLI::App* alg_free2 = sub(alg, "free2", "Binary term functions of the algebra");
  alg_free2->add_option("algebra", file_a, "Algebra file")->required();
  CLI::App* alg_maltsev = sub(alg, "maltsev", "Pair-subalgebra digraph on binary terms");
  alg_maltsev->add_option("algebra", file_a, "Algebra file")->required();
  alg_maltsev->add_option("-o,--output", output_path, "Write the digraph to a file");
  CLI::App* alg_cp = sub(alg, "cp", "Congruence permutability decision");
  alg_cp->add_option("algebra", file_a, "Algebra file")->required();

  CLI::App* verify = sub(&app, "verify", "Power-analysis verifications");
  verify->require_subcommand(1);
  CLI::App* verify_claim1 = sub(verify, "claim1", "Trace route vs direct power edges");
  verify_claim1->add_option("--g1", file_a, "Digraph file")->required();
  verify_claim1->add_option("--g2", file_b, "Digraph file")->required();
  verify_claim1->add_option("--u1", u1, "Universal vertex in G1 (default: lowest)");
  verify_claim1->add_option("--u2", u2, "Universal vertex in G2 (default: lowest)");
  verify_claim1->add_option("--k", k, "Power width")->required();
  CLI::App* verify_swap = sub(verify, "swap", "Transpose isomorphism of swapped power quotients");
  verify_swap->add_option("--g1", file_a, "Digraph file")->required();
  verify_swap->add_option("--g2", file_b, "Digraph file")->required();
  verify_swap->add_option("--u1", u1, "Universal vertex in G1 (default: lowest)");
  verify_swap->add_option("--u2", u2, "Universal vertex in G2 (default: lowest)");
  verify_swap->add_option("--k", k, "Power width")->required();

  CLI::App* chain = sub(&app, "chain", "Construction chain");
  chain->require_subcommand(1);
  CLI::App* chain_g1 = sub(chain, "g1", "Tuple stage over a reflexive digraph");
  chain_g1->add_option("file", file_a, "Digraph file")->required();
  chain_g1->add_option("-o,--output", output_path, "Write the result to a file");
  CLI::App* chain_g2 = sub(chain, "g2", "Function stage over the first non-complete component");
  chain_g2->add_option("file", file_a, "Digraph file")->required();
  chain_g2->add_option("-o,--output", output_path, "Write the result to a file");
  CLI::App* chain_verify = sub(chain, "verify", "Verify the whole pipeline");
  chain_verify->add_option("file", file_a, "Digraph file for the base digraph")->required();
  chain_verify->add_option("--x", x_path, "Digraph file for the exponent")->required();
  chain_verify->add_option("--n", product_n, "Factor size for the product-structure check");
  CLI::App* chain_obstruction = sub(chain, "obstruction", "Search for an obstruction triple");
  chain_obstruction->add_option("file", file_a, "Digraph file")->required();

  std::vector<std::string> argv_store = args;
  std::vector<char*> argv_ptrs;
  static char program_name[] = "permprime";
  argv_ptrs.push_back(program_name);
  for (std::string& s : argv_store) argv_ptrs.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv_ptrs.size()), argv_ptrs.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    err << app.help();
    return 2;
  }

  Report report;
  const std::string command = join(args, " ");
  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (dg_classify->parsed()) {
      const Digraph d = load_digraph(file_a);
      const PropertyFlags flags = classify(d);
      report.add_num("vertices", d.size());
      report.add_num("edges", d.edge_count());
      report.add_bool("reflexive", flags.reflexive);
      report.add_bool("symmetric", flags.symmetric);
      report.add_bool("transitive", flags.transitive);
      report.add_bool("complete", flags.complete);
    } else if (dg_complement->parsed()) {
      add_digraph_result(report, complement(load_digraph(file_a)), output_path);
    } else if (dg_product->parsed()) {
      std::vector<Digraph> factors;
      for (const std::string& f : file_list) factors.push_back(load_digraph(f));
      add_digraph_result(report, product(factors, cap), output_path);
    } else if (dg_exp->parsed()) {
      add_digraph_result(report, exponential(load_digraph(file_a), load_digraph(file_b), cap),
                         output_path);
    } else if (dg_components->parsed()) {
      const Digraph d = load_digraph(file_a);
      const ComponentPartition parts = components(d);
      report.add_num("vertices", d.size());
      report.add_num("components", static_cast<std::int64_t>(parts.blocks.size()));
      std::vector<int> sizes;
      for (const auto& block : parts.blocks) sizes.push_back(static_cast<int>(block.size()));
      report.add("sizes", join_ints(sizes));
      for (std::size_t b = 0; b < parts.blocks.size(); ++b) {
        report.add("block_" + std::to_string(b), join_ints(parts.blocks[b]));
      }
    } else if (dg_universal->parsed()) {
      const Digraph d = load_digraph(file_a);
      const std::vector<int> univ = universal_vertices(d);
      report.add_num("vertices", d.size());
      report.add_num("count", static_cast<std::int64_t>(univ.size()));
      report.add("universal", join_ints(univ));
    } else if (dg_iso->parsed()) {
      const Digraph a = load_digraph(file_a);
      const Digraph b = load_digraph(file_b);
      const auto witness = are_isomorphic(a, b);
      report.add_num("vertices_first", a.size());
      report.add_num("vertices_second", b.size());
      report.add_bool("isomorphic", witness.has_value());
      if (witness) {
        report.add("mapping", join_ints(witness->mapping));
      } else {
        report.verdict = "fail";
        code = 1;
      }
    } else if (alg_compat->parsed()) {
      const FiniteAlgebra a = load_algebra(file_a);
      const Digraph d = load_digraph(file_b);
      const CompatibilityResult result = is_compatible(a, d);
      report.add_num("universe", a.size);
      report.add_num("operations", static_cast<std::int64_t>(a.operations.size()));
      report.add_bool("compatible", result.compatible);
      if (!result.compatible) {
        report.verdict = "fail";
        code = 1;
        const CompatibilityWitness& w = *result.witness;
        report.add("witness_op", w.op_symbol);
        std::string edges;
        for (std::size_t i = 0; i < w.edges.size(); ++i) {
          if (i != 0) edges += " ";
          edges += "(" + std::to_string(w.edges[i].first) + "," +
                   std::to_string(w.edges[i].second) + ")";
        }
        report.add("witness_edges", edges);
        report.add("witness_image",
                   "(" + std::to_string(w.image.first) + "," + std::to_string(w.image.second) + ")");
      }
    } else if (alg_free2->parsed()) {
      const FiniteAlgebra a = load_algebra(file_a);
      const FreeAlgebra2 free2 = free_algebra_on_two(a, closure_cap);
      report.add_num("elements", static_cast<std::int64_t>(free2.elements.size()));
      report.add_num("x_index", free2.x_index);
      report.add_num("y_index", free2.y_index);
      if (free2.elements.size() <= 64) {
        const std::vector<std::string> names{"x", "y"};
        std::vector<std::string> terms;
        for (std::size_t i = 0; i < free2.elements.size(); ++i) {
          terms.push_back(
              format_term(a, term_from_derivation(free2.elements, static_cast<int>(i)), names));
        }
        report.add("terms", join(terms, "; "));
      }
    } else if (alg_maltsev->parsed()) {
      const FiniteAlgebra a = load_algebra(file_a);
      const MaltsevDigraph md = maltsev_digraph(a, closure_cap);
      const bool symmetric = classify(md.graph).symmetric;
      report.add_num("x_index", md.x_index);
      report.add_num("y_index", md.y_index);
      report.add_bool("symmetric", symmetric);
      add_digraph_result(report, md.graph, output_path);
      if (md.graph.size() <= 64) report.add("terms", join(md.graph.labels(), "; "));
      if (!symmetric) {
        report.verdict = "fail";
        code = 1;
      }
    } else if (alg_cp->parsed()) {
      const FiniteAlgebra a = load_algebra(file_a);
      const CpVerdict verdict = is_congruence_permutable(a, closure_cap);
      report.add_num("universe", a.size);
      report.add_bool("permutable", verdict.permutable);
      if (verdict.permutable) {
        const std::vector<std::string> names{"x", "y", "z"};
        report.add("maltsev_term", format_term(a, *verdict.maltsev_term, names));
      } else {
        report.verdict = "fail";
        code = 1;
        const Digraph& g = verdict.obstruction_digraph->graph;
        for (int i = 0; i < g.size() && report.fields.back().first != "witness_missing"; ++i) {
          for (int j = 0; j < g.size(); ++j) {
            if (g.edge(i, j) && !g.edge(j, i)) {
              report.add("witness_edge", g.label(i) + " -> " + g.label(j));
              report.add("witness_missing", g.label(j) + " -> " + g.label(i));
              break;
            }
          }
        }
      }
    } else if (verify_claim1->parsed()) {
      const Digraph g1 = load_digraph(file_a);
      const Digraph g2 = load_digraph(file_b);
      const int v1 = pick_universal(g1, u1, "u1");
      const int v2 = pick_universal(g2, u2, "u2");
      const PowerContext ctx = make_power_context(g1, v1, g2, v2, k);
      const Claim1Report cr = check_claim1(ctx, cap, resolve_thread_count(threads));
      report.add_num("u1", v1);
      report.add_num("u2", v2);
      report.add_num("k", k);
      report.add_num("vertices", cr.vertices);
      report.add_num("ordered_pairs", cr.ordered_pairs);
      report.add_num("mismatches", cr.mismatches);
      if (cr.first_mismatch) {
        report.add("first_mismatch", std::to_string(cr.first_mismatch->first) + " " +
                                         std::to_string(cr.first_mismatch->second));
      }
      if (!cr.ok()) {
        report.verdict = "fail";
        code = 1;
      }
    } else if (verify_swap->parsed()) {
      const Digraph g1 = load_digraph(file_a);
      const Digraph g2 = load_digraph(file_b);
      const int v1 = pick_universal(g1, u1, "u1");
      const int v2 = pick_universal(g2, u2, "u2");
      const SwapReport sr = verify_power_swap(g1, v1, g2, v2, k, cap);
      report.add_num("u1", v1);
      report.add_num("u2", v2);
      report.add_num("k", k);
      report.add_num("threshold", std::max(g1.size(), g2.size()) - 1);
      report.add_num("quotient_vertices", sr.quotient_vertices);
      report.add_num("ordered_pairs", sr.ordered_pairs);
      report.add_num("mismatches", sr.mismatches);
      report.add_bool("bijection", sr.bijection_ok);
      if (!sr.ok()) {
        report.verdict = "fail";
        code = 1;
      }
    } else if (chain_g1->parsed()) {
      const Digraph g1 = construct_g1(load_digraph(file_a), cap);
      const ComponentPartition parts = components(g1);
      report.add_num("components", static_cast<std::int64_t>(parts.blocks.size()));
      std::vector<int> sizes;
      for (const auto& block : parts.blocks) sizes.push_back(static_cast<int>(block.size()));
      report.add("sizes", join_ints(sizes));
      add_digraph_result(report, g1, output_path);
    } else if (chain_g2->parsed()) {
      const Digraph g1 = construct_g1(load_digraph(file_a), cap);
      const int r = first_noncomplete_component(g1);
      if (r < 0) {
        throw InputError("every component of the tuple stage is complete; nothing to choose");
      }
      const Digraph g2 = construct_g2(g1, r, cap);
      const ComponentPartition parts = components(g2);
      report.add_num("r_component", r);
      report.add_num("r_size",
                     static_cast<std::int64_t>(components(g1).blocks[static_cast<std::size_t>(r)].size()));
      report.add_num("components", static_cast<std::int64_t>(parts.blocks.size()));
      add_digraph_result(report, g2, output_path);
    } else if (chain_verify->parsed()) {
      const ChainReport cr = verify_chain(load_digraph(file_a), load_digraph(x_path), product_n, cap);
      report.add_num("g0_vertices", cr.g0_vertices);
      report.add_num("x_vertices", cr.x_vertices);
      report.add_num("product_n", cr.product_n);
      report.add_num("g1_vertices", cr.g1_vertices);
      report.add_num("g1_components", cr.g1_components);
      report.add_bool("g1_universal_per_component", cr.g1_universal_per_component);
      report.add_bool("g1_star_universal", cr.g1_star_universal);
      report.add_bool("g1_witness_nonedge", cr.g1_witness_nonedge);
      report.add_bool("g1_noncomplete_exists", cr.g1_noncomplete_exists);
      report.add_num("r_component", cr.r_component);
      report.add_num("r_size", cr.r_size);
      report.add("g2_vertices", cr.g2_vertices);
      report.add("g2_components", cr.g2_components);
      report.add_num("g2_classes", cr.g2_classes);
      report.add_bool("g2_counts_consistent", cr.g2_counts_consistent);
      report.add_bool("g2_universal_per_component", cr.g2_universal_per_component);
      report.add_bool("g2_complete_exists", cr.g2_complete_exists);
      report.add_bool("g2_noncomplete_exists", cr.g2_noncomplete_exists);
      report.add_bool("g2_r_copy_found", cr.g2_r_copy_found);
      report.add_bool("g2_clique_found", cr.g2_clique_found);
      report.add("g3_vertices", cr.g3_vertices);
      report.add("g3_components", cr.g3_components);
      report.add_bool("g3_components_are_powers", cr.g3_components_are_powers);
      report.add_bool("g3_noncomplete_exists", cr.g3_noncomplete_exists);
      report.add_bool("obstruction_found", cr.obstruction_found);
      report.add_num("obstruction_v", cr.obstruction.v);
      report.add_num("obstruction_u", cr.obstruction.u);
      report.add_num("obstruction_w", cr.obstruction.w);
      report.add_num("obstruction_component_size", cr.obstruction_component_size);
      report.add_bool("product_structure_ok", cr.product_structure_ok);
      report.add("product_components", cr.product_components);
      report.add_bool("materialized_checked", cr.materialized_checked);
      report.add_bool("materialized_ok", cr.materialized_ok);
      if (!cr.failure.empty()) report.add("failure", cr.failure);
      if (!cr.pass) {
        report.verdict = "fail";
        code = 1;
      }
    } else if (chain_obstruction->parsed()) {
      const Digraph d = load_digraph(file_a);
      const auto witness = find_obstruction(d);
      report.add_num("vertices", d.size());
      report.add_bool("found", witness.has_value());
      if (witness) {
        report.add_num("v", witness->v);
        report.add_num("u", witness->u);
        report.add_num("w", witness->w);
      } else {
        report.verdict = "fail";
        code = 1;
      }
    }
  } catch (const ResourceError& e) {
    report.verdict = "error";
    report.add("error", e.what());
    err << "error: " << e.what() << "\n";
    code = 3;
  } catch (const InputError& e) {
    report.verdict = "error";
    report.add("error", e.what());
    err << "error: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    report.verdict = "error";
    report.add("error", e.what());
    err << "error: " << e.what() << "\n";
    code = 1;
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  emit(report, command, format, elapsed.count(), out);
  return code;
}

}  // namespace permprime::cli
