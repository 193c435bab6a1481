#include "permprime/formats.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "permprime/errors.hpp"

namespace permprime {

namespace {

struct Token {
  std::string text;
  int line = 0;
};

// Splits into whitespace-separated tokens, dropping '#' comments and tracking
// 1-based line numbers.
std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  int line = 1;
  std::string current;
  int current_line = 0;
  bool in_comment = false;
  const auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back({current, current_line});
      current.clear();
    }
  };
  for (const char c : text) {
    if (c == '\n') {
      flush();
      in_comment = false;
      ++line;
      continue;
    }
    if (in_comment) continue;
    if (c == '#') {
      flush();
      in_comment = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (current.empty()) current_line = line;
    current.push_back(c);
  }
  flush();
  return tokens;
}

int parse_int(const Token& token, const std::string& what) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(token.text, &pos);
  } catch (const std::exception&) {
    throw ParseError(token.line, "expected " + what + ", got '" + token.text + "'");
  }
  if (pos != token.text.size()) {
    throw ParseError(token.line, "expected " + what + ", got '" + token.text + "'");
  }
  return value;
}

}  // namespace

Digraph parse_digraph(const std::string& text) {
  const std::vector<Token> tokens = tokenize(text);
  if (tokens.empty()) throw ParseError(1, "empty input; expected a 'digraph <n>' header");
  if (tokens[0].text != "digraph") {
    throw ParseError(tokens[0].line, "expected 'digraph' header, got '" + tokens[0].text + "'");
  }
  if (tokens.size() < 2) throw ParseError(tokens[0].line, "missing vertex count after 'digraph'");
  const int n = parse_int(tokens[1], "a vertex count");
  if (n < 0) throw ParseError(tokens[1].line, "vertex count must be non-negative");
  Digraph d(n);
  if ((tokens.size() - 2) % 2 != 0) {
    const Token& t = tokens.back();
    throw ParseError(t.line, "dangling token '" + t.text + "'; edges are 'u v' pairs");
  }
  for (std::size_t i = 2; i + 1 < tokens.size(); i += 2) {
    const int u = parse_int(tokens[i], "a vertex id");
    const int v = parse_int(tokens[i + 1], "a vertex id");
    if (u < 0 || u >= n) {
      throw ParseError(tokens[i].line, "vertex " + std::to_string(u) + " out of range (digraph has " +
                                           std::to_string(n) + " vertices)");
    }
    if (v < 0 || v >= n) {
      throw ParseError(tokens[i + 1].line, "vertex " + std::to_string(v) +
                                               " out of range (digraph has " + std::to_string(n) +
                                               " vertices)");
    }
    d.set_edge(u, v);
  }
  return d;
}

std::string serialize_digraph(const Digraph& d) {
  std::ostringstream out;
  out << "digraph " << d.size() << "\n";
  for (int u = 0; u < d.size(); ++u) {
    for (int v = 0; v < d.size(); ++v) {
      if (d.edge(u, v)) out << u << " " << v << "\n";
    }
  }
  return out.str();
}

FiniteAlgebra parse_algebra(const std::string& text) {
  const std::vector<Token> tokens = tokenize(text);
  if (tokens.empty()) throw ParseError(1, "empty input; expected an 'algebra <n>' header");
  if (tokens[0].text != "algebra") {
    throw ParseError(tokens[0].line, "expected 'algebra' header, got '" + tokens[0].text + "'");
  }
  if (tokens.size() < 2) throw ParseError(tokens[0].line, "missing universe size after 'algebra'");
  const int n = parse_int(tokens[1], "a universe size");
  if (n < 1 || n > 255) {
    throw ParseError(tokens[1].line, "universe size must be between 1 and 255");
  }

  FiniteAlgebra a;
  a.size = n;
  std::size_t i = 2;
  while (i < tokens.size()) {
    if (tokens[i].text != "op") {
      throw ParseError(tokens[i].line, "expected 'op <symbol> <arity>', got '" + tokens[i].text + "'");
    }
    if (i + 2 >= tokens.size()) {
      throw ParseError(tokens[i].line, "incomplete operation header");
    }
    Operation op;
    op.symbol = tokens[i + 1].text;
    const int header_line = tokens[i].line;
    op.arity = parse_int(tokens[i + 2], "an arity");
    if (op.arity < 0) throw ParseError(tokens[i + 2].line, "arity must be non-negative");
    for (const Operation& prev : a.operations) {
      if (prev.symbol == op.symbol) {
        throw ParseError(header_line, "duplicate operation symbol '" + op.symbol + "'");
      }
    }
    std::size_t entries = 1;
    for (int j = 0; j < op.arity; ++j) {
      entries *= static_cast<std::size_t>(n);
      if (entries > (std::size_t{1} << 40)) {
        throw ParseError(header_line, "operation '" + op.symbol + "' has an implausibly large table");
      }
    }
    i += 3;
    for (std::size_t e = 0; e < entries; ++e) {
      if (i >= tokens.size() || tokens[i].text == "op") {
        throw ParseError(i < tokens.size() ? tokens[i].line : tokens.back().line,
                         "operation '" + op.symbol + "' expects " + std::to_string(entries) +
                             " values, got " + std::to_string(e));
      }
      const int value = parse_int(tokens[i], "a table value");
      if (value < 0 || value >= n) {
        throw ParseError(tokens[i].line, "table value " + std::to_string(value) +
                                             " out of range (universe has " + std::to_string(n) +
                                             " elements)");
      }
      op.table.push_back(static_cast<std::uint8_t>(value));
      ++i;
    }
    a.operations.push_back(std::move(op));
  }
  validate_algebra(a);
  return a;
}

std::string serialize_algebra(const FiniteAlgebra& a) {
  std::ostringstream out;
  out << "algebra " << a.size << "\n";
  for (const Operation& op : a.operations) {
    out << "op " << op.symbol << " " << op.arity << "\n";
    for (std::size_t i = 0; i < op.table.size(); ++i) {
      out << (i == 0 ? "" : " ") << static_cast<int>(op.table[i]);
    }
    out << "\n";
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file '" + path + "' for writing");
  out << text;
}

Digraph load_digraph(const std::string& path) { return parse_digraph(read_text_file(path)); }

FiniteAlgebra load_algebra(const std::string& path) { return parse_algebra(read_text_file(path)); }

}  // namespace permprime
