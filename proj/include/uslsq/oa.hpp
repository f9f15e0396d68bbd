#pragma once

// Orthogonal arrays from affine resolvable designs, and strength checks.

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "uslsq/design.hpp"
#include "uslsq/error.hpp"
#include "uslsq/resolution.hpp"

namespace uslsq {

struct OrthogonalArray {
  int rows = 0;     // N
  int columns = 0;  // r
  int symbols = 0;  // s; entries are 1..s
  std::vector<std::vector<int>> entries;

  bool operator==(const OrthogonalArray&) const = default;
};

/// One row per treatment, one column per parallel class; the entry is the
/// 1-based index of the block of that class containing the treatment, with
/// classes and blocks in sorted order.
inline OrthogonalArray to_orthogonal_array(const BlockDesign& d, const Resolution& res) {
  if (!is_affine_resolvable(d, res)) throw ValidationError("to_orthogonal_array: design is not affine resolvable");
  Resolution sorted = res;
  sorted.normalize();
  OrthogonalArray oa;
  oa.rows = d.v();
  oa.columns = static_cast<int>(sorted.classes.size());
  oa.symbols = static_cast<int>(sorted.classes.front().size());
  oa.entries.assign(oa.rows, std::vector<int>(oa.columns, 0));
  for (int c = 0; c < oa.columns; ++c)
    for (int bi = 0; bi < oa.symbols; ++bi)
      for (int t : sorted.classes[c][bi]) oa.entries[t - 1][c] = bi + 1;
  return oa;
}

/// Largest t such that every t columns show every t-tuple of symbols equally
/// often; 0 when even single columns are unbalanced.
inline int oa_strength(const OrthogonalArray& a) {
  if (a.symbols < 1 || a.rows % a.symbols != 0)
    throw Error("oa_strength: N = " + std::to_string(a.rows) + " is not divisible by s = " + std::to_string(a.symbols));
  for (const auto& row : a.entries) {
    if (static_cast<int>(row.size()) != a.columns) throw Error("oa_strength: ragged array");
    for (int x : row)
      if (x < 1 || x > a.symbols) throw Error("oa_strength: symbol " + std::to_string(x) + " out of range");
  }
  int best = 0;
  long long power = 1;
  for (int t = 1; t <= a.columns; ++t) {
    power *= a.symbols;
    if (a.rows % power != 0) break;
    long long want = a.rows / power;
    // enumerate t-subsets of columns
    std::vector<int> cols(t);
    for (int i = 0; i < t; ++i) cols[i] = i;
    bool ok = true;
    while (ok) {
      std::vector<long long> count(static_cast<std::size_t>(power), 0);
      for (const auto& row : a.entries) {
        long long key = 0;
        for (int c : cols) key = key * a.symbols + (row[c] - 1);
        ++count[static_cast<std::size_t>(key)];
      }
      for (long long x : count)
        if (x != want) ok = false;
      int i = t - 1;
      while (i >= 0 && cols[i] == a.columns - t + i) --i;
      if (i < 0) break;
      ++cols[i];
      for (int j = i + 1; j < t; ++j) cols[j] = cols[j - 1] + 1;
    }
    if (!ok) break;
    best = t;
  }
  return best;
}

/// Text format: "N r s" then N lines of r symbols.
inline void write_oa(std::ostream& os, const OrthogonalArray& a) {
  os << a.rows << ' ' << a.columns << ' ' << a.symbols << '\n';
  for (const auto& row : a.entries) {
    for (int c = 0; c < a.columns; ++c) os << (c ? " " : "") << row[c];
    os << '\n';
  }
}

inline OrthogonalArray read_oa(std::istream& is) {
  OrthogonalArray a;
  if (!(is >> a.rows >> a.columns >> a.symbols) || a.rows < 0 || a.columns < 1 || a.symbols < 1)
    throw Error("orthogonal array: bad header, expected \"N r s\"");
  a.entries.assign(a.rows, std::vector<int>(a.columns));
  for (int i = 0; i < a.rows; ++i)
    for (int c = 0; c < a.columns; ++c)
      if (!(is >> a.entries[i][c]))
        throw Error("orthogonal array: truncated at row " + std::to_string(i + 1));
  return a;
}

}  // namespace uslsq
