#pragma once

// Designs derived from a uniform square by adding row or column treatments:
// two affine resolvable designs and a BIBD.

#include <string>
#include <vector>

#include "uslsq/design.hpp"
#include "uslsq/resolution.hpp"
#include "uslsq/square.hpp"

namespace uslsq {

enum class Axis { kRows, kColumns };

inline int require_uniform(const SemiLatinSquare& s, const char* op) {
  auto rep = uniformity(s);
  if (!rep.uniform) throw ValidationError(std::string(op) + ": square is not uniform");
  return rep.mu;
}

/// The underlying design plus mu new treatments per row (kRows) or per column
/// (kColumns), each incident with the blocks of its line. Treatment
/// nk + i*mu + t (0-based line i, t = 1..mu) belongs to line i.
inline BlockDesign delta12(const SemiLatinSquare& s, Axis axis) {
  int mu = require_uniform(s, "delta12");
  int n = s.n(), base = s.treatments();
  std::vector<Block> blocks;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Block b = s.cell(i, j);
      int line = axis == Axis::kRows ? i : j;
      for (int t = 1; t <= mu; ++t) b.push_back(base + line * mu + t);
      blocks.push_back(std::move(b));
    }
  }
  return BlockDesign(base + n * mu, std::move(blocks));
}

/// The resolution of delta12(s, axis) whose classes are the lines of the
/// other axis.
inline Resolution delta12_resolution(const SemiLatinSquare& s, Axis axis) {
  auto d = delta12(s, axis);
  int mu = (d.v() - s.treatments()) / s.n();
  int n = s.n(), base = s.treatments();
  Resolution res;
  for (int line = 0; line < n; ++line) {
    std::vector<Block> cls;
    for (int x = 0; x < n; ++x) {
      int i = axis == Axis::kRows ? x : line;
      int j = axis == Axis::kRows ? line : x;
      Block b = s.cell(i, j);
      int own = axis == Axis::kRows ? i : j;
      for (int t = 1; t <= mu; ++t) b.push_back(base + own * mu + t);
      std::sort(b.begin(), b.end());
      cls.push_back(std::move(b));
    }
    res.classes.push_back(std::move(cls));
  }
  res.normalize();
  return res;
}

/// Add mu treatments per row and per column, then dualize: an
/// (n^2, mu n(n+1), mu(n+1), n, mu)-BIBD on the cells (cell (i,j) is
/// treatment i*n + j + 1).
inline BlockDesign delta3(const SemiLatinSquare& s) {
  int mu = require_uniform(s, "delta3");
  int n = s.n();
  std::vector<Block> blocks(s.treatments());
  for (int c = 0; c < n * n; ++c)
    for (int t : s.cells()[c]) blocks[t - 1].push_back(c + 1);
  for (int i = 0; i < n; ++i) {
    Block row, col;
    for (int x = 0; x < n; ++x) {
      row.push_back(i * n + x + 1);
      col.push_back(x * n + i + 1);
    }
    for (int t = 0; t < mu; ++t) blocks.push_back(row);
    for (int t = 0; t < mu; ++t) blocks.push_back(col);
  }
  return BlockDesign(n * n, std::move(blocks));
}

}  // namespace uslsq
