#pragma once

#include <string>

#include "permprime/algebra.hpp"
#include "permprime/digraph.hpp"

namespace permprime {

// Digraph text format: first line "digraph <n>", then one "u v" edge per line
// (decimal, 0-based).  '#' starts a comment; blank lines are ignored.
// Serialization lists edges in row-major order.
Digraph parse_digraph(const std::string& text);
std::string serialize_digraph(const Digraph& d);

// Algebra text format: first line "algebra <n>", then for each operation a
// line "op <symbol> <arity>" followed by n^arity whitespace-separated values
// in lexicographic argument order (line breaks between values are allowed).
// '#' starts a comment.
FiniteAlgebra parse_algebra(const std::string& text);
std::string serialize_algebra(const FiniteAlgebra& a);

// Reads an entire file; throws InputError when it cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Digraph load_digraph(const std::string& path);
FiniteAlgebra load_algebra(const std::string& path);

}  // namespace permprime
