#pragma once

// Isomorphism and automorphism groups of block designs and semi-Latin
// squares, via coloured-graph encodings and canonical labelling.

#include <string>

#include "uslsq/canon.hpp"
#include "uslsq/design.hpp"
#include "uslsq/square.hpp"

namespace uslsq {

/// Treatment/block incidence graph. Treatments 0..v-1 have colour 0; each
/// distinct block is one vertex coloured by its multiplicity.
inline ColoredGraph design_graph(const BlockDesign& d) {
  ColoredGraph g(d.v(), 0);
  for (const auto& [blk, mult] : d.multiplicities()) {
    auto b = g.add_vertex(static_cast<std::uint32_t>(mult));
    for (int t : blk) g.add_edge(static_cast<std::uint32_t>(t - 1), b);
  }
  return g;
}

/// Rows and columns share colour 0 (vertices 0..2n-1), cells have colour 1
/// (2n + i*n + j), treatments colour 2. Cells join their row, their column
/// and their treatments, so automorphisms may swap rows with columns
/// wholesale but never mix them.
inline ColoredGraph square_graph(const SemiLatinSquare& s) {
  int n = s.n();
  ColoredGraph g(static_cast<std::size_t>(2 * n), 0);
  for (int c = 0; c < n * n; ++c) g.add_vertex(1);
  for (int t = 0; t < s.treatments(); ++t) g.add_vertex(2);
  std::uint32_t cell0 = 2 * n, treat0 = 2 * n + n * n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::uint32_t c = cell0 + i * n + j;
      g.add_edge(c, i);
      g.add_edge(c, n + j);
      for (int t : s.cell(i, j)) g.add_edge(c, treat0 + t - 1);
    }
  }
  return g;
}

inline Certificate design_certificate(const BlockDesign& d) { return canonical_form(design_graph(d)); }

inline Certificate square_certificate(const SemiLatinSquare& s) { return canonical_form(square_graph(s)); }

inline bool designs_are_isomorphic(const BlockDesign& a, const BlockDesign& b) {
  if (a.v() != b.v() || a.b() != b.b()) return false;
  return design_certificate(a) == design_certificate(b);
}

/// Row and column permutations, optional transposition and treatment renaming.
inline bool sls_are_isomorphic(const SemiLatinSquare& s, const SemiLatinSquare& t) {
  if (s.n() != t.n() || s.k() != t.k())
    throw Error("sls_are_isomorphic: parameter mismatch (" + std::to_string(s.n()) + "," + std::to_string(s.k()) +
                ") vs (" + std::to_string(t.n()) + "," + std::to_string(t.k()) + ")");
  return square_certificate(s) == square_certificate(t);
}

/// Number of treatment permutations mapping the block multiset onto itself.
inline BigInt aut_order(const BlockDesign& d) { return design_certificate(d).aut_order; }

/// Number of square automorphisms (row/column permutations, transposition
/// and renaming) fixing s.
inline BigInt aut_order(const SemiLatinSquare& s) { return square_certificate(s).aut_order; }

}  // namespace uslsq
