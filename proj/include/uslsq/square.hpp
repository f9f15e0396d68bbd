#pragma once

// Semi-Latin squares: validation, uniformity, inflation, superposition,
// transposition, underlying and dual designs, and the extended-border
// construction from n-1 MOLS of order n.

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "uslsq/algebra.hpp"
#include "uslsq/design.hpp"
#include "uslsq/error.hpp"

namespace uslsq {

struct Violation {
  enum class Kind { kCellSize, kOutOfRange, kRepeatedInRow, kMissingFromRow, kRepeatedInColumn, kMissingFromColumn };
  Kind kind;
  int treatment = 0;  // 1-based; 0 when not applicable
  int row = 0;        // 1-based
  int column = 0;     // 1-based; 0 for whole-row violations

  std::string describe() const {
    switch (kind) {
      case Kind::kCellSize:
        return "cell (" + std::to_string(row) + "," + std::to_string(column) + ") has wrong size";
      case Kind::kOutOfRange:
        return "treatment " + std::to_string(treatment) + " out of range in cell (" + std::to_string(row) + "," +
               std::to_string(column) + ")";
      case Kind::kRepeatedInRow:
        return "treatment " + std::to_string(treatment) + " repeated in row " + std::to_string(row);
      case Kind::kMissingFromRow:
        return "treatment " + std::to_string(treatment) + " missing from row " + std::to_string(row);
      case Kind::kRepeatedInColumn:
        return "treatment " + std::to_string(treatment) + " repeated in column " + std::to_string(column);
      case Kind::kMissingFromColumn:
        return "treatment " + std::to_string(treatment) + " missing from column " + std::to_string(column);
    }
    return {};
  }
};

class SquareValidationError : public ValidationError {
 public:
  explicit SquareValidationError(std::vector<Violation> v) : ValidationError(summary(v)), violations_(std::move(v)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summary(const std::vector<Violation>& v) {
    std::string s = "not a semi-Latin square: ";
    for (std::size_t i = 0; i < v.size() && i < 4; ++i) s += (i ? "; " : "") + v[i].describe();
    if (v.size() > 4) s += "; ... (" + std::to_string(v.size()) + " violations)";
    return s;
  }
  std::vector<Violation> violations_;
};

/// Every structural violation of an (n x n)/k semi-Latin square; empty when valid.
inline std::vector<Violation> square_violations(int n, int k, const std::vector<std::vector<int>>& cells) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  int v = n * k;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& c = cells[static_cast<std::size_t>(i) * n + j];
      if (static_cast<int>(c.size()) != k) out.push_back({K::kCellSize, 0, i + 1, j + 1});
      for (int t : c)
        if (t < 1 || t > v) out.push_back({K::kOutOfRange, t, i + 1, j + 1});
    }
  for (int line = 0; line < n; ++line) {
    std::vector<int> in_row(v + 1, 0), in_col(v + 1, 0);
    for (int x = 0; x < n; ++x) {
      for (int t : cells[static_cast<std::size_t>(line) * n + x])
        if (t >= 1 && t <= v) ++in_row[t];
      for (int t : cells[static_cast<std::size_t>(x) * n + line])
        if (t >= 1 && t <= v) ++in_col[t];
    }
    for (int t = 1; t <= v; ++t) {
      if (in_row[t] > 1) out.push_back({K::kRepeatedInRow, t, line + 1, 0});
      if (in_row[t] == 0) out.push_back({K::kMissingFromRow, t, line + 1, 0});
      if (in_col[t] > 1) out.push_back({K::kRepeatedInColumn, t, 0, line + 1});
      if (in_col[t] == 0) out.push_back({K::kMissingFromColumn, t, 0, line + 1});
    }
  }
  return out;
}

/// (n x n)/k semi-Latin square on treatments 1..nk. Cells are stored
/// row-major, each sorted ascending.
class SemiLatinSquare {
 public:
  /// Checks the row/column property and cell sizes; throws
  /// SquareValidationError listing every violation.
  static SemiLatinSquare validate(int n, int k, std::vector<std::vector<int>> cells) {
    if (n < 1 || k < 1) throw Error("square needs n >= 1 and k >= 1");
    if (static_cast<int>(cells.size()) != n * n)
      throw Error("expected " + std::to_string(n * n) + " cells, got " + std::to_string(cells.size()));
    for (auto& c : cells) std::sort(c.begin(), c.end());
    auto v = square_violations(n, k, cells);
    if (!v.empty()) throw SquareValidationError(std::move(v));
    return SemiLatinSquare(n, k, std::move(cells));
  }

  static SemiLatinSquare validate(int n, int k, const std::vector<std::vector<std::vector<int>>>& grid) {
    if (static_cast<int>(grid.size()) != n) throw Error("expected " + std::to_string(n) + " rows");
    std::vector<std::vector<int>> cells;
    for (const auto& row : grid) {
      if (static_cast<int>(row.size()) != n) throw Error("expected " + std::to_string(n) + " cells per row");
      for (const auto& c : row) cells.push_back(c);
    }
    return validate(n, k, std::move(cells));
  }

  static SemiLatinSquare from_latin(const LatinSquare& l) {
    int n = l.order();
    std::vector<std::vector<int>> cells;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cells.push_back({l.at(i, j) + 1});
    return SemiLatinSquare(n, 1, std::move(cells));
  }

  int n() const { return n_; }
  int k() const { return k_; }
  int treatments() const { return n_ * k_; }
  const std::vector<int>& cell(int i, int j) const { return cells_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<std::vector<int>>& cells() const { return cells_; }

  bool operator==(const SemiLatinSquare&) const = default;

 private:
  SemiLatinSquare(int n, int k, std::vector<std::vector<int>> cells) : n_(n), k_(k), cells_(std::move(cells)) {}

  int n_ = 0;
  int k_ = 0;
  std::vector<std::vector<int>> cells_;
};

struct CellPair {
  int row1, col1, row2, col2;  // 0-based
  int intersection;
};

struct UniformityReport {
  bool uniform = false;
  int mu = 0;
  // For a non-uniform square: a reference pair and a pair whose intersection
  // differs from it (or the reference alone if its intersection is 0).
  std::optional<CellPair> reference;
  std::optional<CellPair> witness;
};

/// Pairwise intersection sizes of cells, indexed [cell1 * n^2 + cell2].
inline std::vector<int> cell_intersections(const SemiLatinSquare& s) {
  int n = s.n();
  int cells = n * n;
  std::vector<std::vector<int>> where(s.treatments() + 1);
  for (int c = 0; c < cells; ++c)
    for (int t : s.cells()[c]) where[t].push_back(c);
  std::vector<int> inter(static_cast<std::size_t>(cells) * cells, 0);
  for (const auto& w : where)
    for (int a : w)
      for (int b : w) ++inter[static_cast<std::size_t>(a) * cells + b];
  return inter;
}

inline UniformityReport uniformity(const SemiLatinSquare& s) {
  int n = s.n();
  if (n <= 2) throw Error("uniformity needs n > 2, got n = " + std::to_string(n));
  auto inter = cell_intersections(s);
  int cells = n * n;
  UniformityReport rep;
  for (int a = 0; a < cells; ++a) {
    for (int b = a + 1; b < cells; ++b) {
      int ra = a / n, ca = a % n, rb = b / n, cb = b % n;
      if (ra == rb || ca == cb) continue;
      CellPair p{ra, ca, rb, cb, inter[static_cast<std::size_t>(a) * cells + b]};
      if (!rep.reference) {
        rep.reference = p;
        if (p.intersection == 0) return rep;
        continue;
      }
      if (p.intersection != rep.reference->intersection) {
        rep.witness = p;
        return rep;
      }
    }
  }
  rep.uniform = true;
  rep.mu = rep.reference->intersection;
  return rep;
}

/// s-fold inflation: treatment a becomes s(a-1)+1 .. s*a.
inline SemiLatinSquare inflate(const SemiLatinSquare& sq, int s) {
  if (s < 1) throw Error("inflation factor must be positive, got " + std::to_string(s));
  std::vector<std::vector<int>> cells;
  cells.reserve(sq.cells().size());
  for (const auto& c : sq.cells()) {
    std::vector<int> nc;
    nc.reserve(c.size() * s);
    for (int a : c)
      for (int i = 1; i <= s; ++i) nc.push_back(s * (a - 1) + i);
    cells.push_back(std::move(nc));
  }
  return SemiLatinSquare::validate(sq.n(), sq.k() * s, std::move(cells));
}

/// Cellwise union; part i's treatments are offset past those of parts 0..i-1.
inline SemiLatinSquare superpose(const std::vector<SemiLatinSquare>& parts) {
  if (parts.empty()) throw Error("superpose needs at least one square");
  int n = parts.front().n();
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(n) * n);
  int offset = 0, k = 0;
  for (const auto& p : parts) {
    if (p.n() != n)
      throw Error("superpose: side mismatch " + std::to_string(n) + " vs " + std::to_string(p.n()));
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (int t : p.cells()[c]) cells[c].push_back(t + offset);
    offset += p.treatments();
    k += p.k();
  }
  return SemiLatinSquare::validate(n, k, std::move(cells));
}

inline SemiLatinSquare transpose(const SemiLatinSquare& s) {
  int n = s.n();
  std::vector<std::vector<int>> cells;
  cells.reserve(s.cells().size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cells.push_back(s.cell(j, i));
  return SemiLatinSquare::validate(n, s.k(), std::move(cells));
}

/// The (nk, n^2, n, k)-design of cell contents.
inline BlockDesign underlying_design(const SemiLatinSquare& s) {
  return BlockDesign(s.treatments(), s.cells());
}

/// The (n^2, nk, k, n)-design on cells: cell (i,j) is treatment i*n + j + 1
/// (0-based i, j) and treatment a of s gives the block of cells containing a.
inline BlockDesign dual(const SemiLatinSquare& s) {
  std::vector<Block> blocks(s.treatments());
  int cells = s.n() * s.n();
  for (int c = 0; c < cells; ++c)
    for (int t : s.cells()[c]) blocks[t - 1].push_back(c + 1);
  return BlockDesign(cells, std::move(blocks));
}

/// Treatment numbering used by bar_s for the pair symbols.
///   (alpha, j) from square i <= n-2:  (i-1) n^2 + alpha n + j        (alpha in 0..n-1, j in 1..n)
///   (alpha, t) from square n-1:       (n-2) n^2 + alpha (n-2) + t    (t in 1..n-2)
struct BarSymbols {
  int n;
  int inflated(int i, int alpha, int j) const { return (i - 1) * n * n + alpha * n + j; }
  int last(int alpha, int t) const { return (n - 2) * n * n + alpha * (n - 2) + t; }
};

/// ((n+1) x (n+1))/(n(n-2)) uniform square with mu = n-2 built from n-1
/// MOLS of order n: inflate squares 1..n-2 n-fold over symbols (alpha, j) and
/// square n-1 (n-2)-fold, superpose, move the (alpha, j) symbol of column j
/// into the new border row and column, and fill the corner with square n-1's
/// symbols.
inline SemiLatinSquare bar_s(const std::vector<LatinSquare>& mols) {
  if (mols.empty()) throw Error("bar_s needs n-1 Latin squares");
  int n = mols.front().order();
  if (n < 3) throw Error("bar_s needs n >= 3, got " + std::to_string(n));
  if (static_cast<int>(mols.size()) != n - 1)
    throw Error("bar_s needs exactly " + std::to_string(n - 1) + " squares of order " + std::to_string(n) +
                ", got " + std::to_string(mols.size()));
  for (const auto& l : mols)
    if (l.order() != n) throw Error("bar_s: squares must share order " + std::to_string(n));
  for (std::size_t a = 0; a < mols.size(); ++a)
    for (std::size_t b = a + 1; b < mols.size(); ++b)
      if (!are_orthogonal(mols[a], mols[b]))
        throw Error("bar_s: squares " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                    " are not orthogonal");

  BarSymbols sym{n};
  int m = n + 1;
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(m) * m);
  auto at = [&](int i, int j) -> std::vector<int>& { return cells[static_cast<std::size_t>(i) * m + j]; };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      for (int i = 1; i <= n - 2; ++i) {
        int alpha = mols[i - 1].at(r, c);
        for (int j = 1; j <= n; ++j) {
          int t = sym.inflated(i, alpha, j);
          if (j == c + 1) {
            at(r, n).push_back(t);
            at(n, c).push_back(t);
          } else {
            at(r, c).push_back(t);
          }
        }
      }
      int gamma = mols[n - 2].at(r, c);
      for (int t = 1; t <= n - 2; ++t) at(r, c).push_back(sym.last(gamma, t));
    }
  }
  for (int gamma = 0; gamma < n; ++gamma)
    for (int t = 1; t <= n - 2; ++t) at(n, n).push_back(sym.last(gamma, t));
  return SemiLatinSquare::validate(m, n * (n - 2), std::move(cells));
}

}  // namespace uslsq
