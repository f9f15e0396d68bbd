#pragma once

// Block designs on treatments 1..v: concurrence, PV-aberration vectors,
// the eta_0 lower bound and inflation structure, BIBD recognition, duals.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uslsq/error.hpp"

namespace uslsq {

using Block = std::vector<int>;

struct DesignParams {
  int v = 0;
  int b = 0;
  int r = 0;
  int k = 0;
  bool operator==(const DesignParams&) const = default;
};

inline std::string to_string(const DesignParams& p) {
  return "(" + std::to_string(p.v) + "," + std::to_string(p.b) + "," + std::to_string(p.r) + "," +
         std::to_string(p.k) + ")";
}

/// Binary block design: a multiset of blocks over treatments 1..v. Each
/// block is kept sorted and the block list is kept sorted, so equal designs
/// compare equal and repeated blocks are adjacent.
class BlockDesign {
 public:
  BlockDesign() = default;

  BlockDesign(int v, std::vector<Block> blocks) : v_(v), blocks_(std::move(blocks)) {
    if (v < 1) throw Error("design needs v >= 1, got " + std::to_string(v));
    for (auto& blk : blocks_) {
      std::sort(blk.begin(), blk.end());
      for (std::size_t i = 0; i < blk.size(); ++i) {
        if (blk[i] < 1 || blk[i] > v)
          throw Error("treatment " + std::to_string(blk[i]) + " outside 1.." + std::to_string(v));
        if (i > 0 && blk[i] == blk[i - 1])
          throw Error("treatment " + std::to_string(blk[i]) + " repeated within a block");
      }
    }
    std::sort(blocks_.begin(), blocks_.end());
  }

  int v() const { return v_; }
  int b() const { return static_cast<int>(blocks_.size()); }
  const std::vector<Block>& blocks() const { return blocks_; }

  std::vector<int> replications() const {
    std::vector<int> rep(v_, 0);
    for (const auto& blk : blocks_)
      for (int t : blk) ++rep[t - 1];
    return rep;
  }

  /// (v,b,r,k) when every block has size k and every treatment lies in r blocks.
  std::optional<DesignParams> params() const {
    if (blocks_.empty()) return std::nullopt;
    int k = static_cast<int>(blocks_.front().size());
    for (const auto& blk : blocks_)
      if (static_cast<int>(blk.size()) != k) return std::nullopt;
    auto rep = replications();
    int r = rep.front();
    for (int x : rep)
      if (x != r) return std::nullopt;
    return DesignParams{v_, b(), r, k};
  }

  DesignParams require_params(const std::string& op) const {
    auto p = params();
    if (!p) throw Error(op + ": design is not equireplicate with constant block size");
    return *p;
  }

  /// Distinct blocks with their multiplicities, in sorted block order.
  std::vector<std::pair<Block, int>> multiplicities() const {
    std::vector<std::pair<Block, int>> out;
    for (const auto& blk : blocks_) {
      if (!out.empty() && out.back().first == blk)
        ++out.back().second;
      else
        out.emplace_back(blk, 1);
    }
    return out;
  }

  bool operator==(const BlockDesign&) const = default;

 private:
  int v_ = 0;
  std::vector<Block> blocks_;
};

/// Symmetric v x v matrix of pair concurrences, indexed by treatment - 1.
class ConcurrenceMatrix {
 public:
  explicit ConcurrenceMatrix(int v) : v_(v), a_(static_cast<std::size_t>(v) * v, 0) {}
  int v() const { return v_; }
  int at(int i, int j) const { return a_[static_cast<std::size_t>(i) * v_ + j]; }
  int& at(int i, int j) { return a_[static_cast<std::size_t>(i) * v_ + j]; }

 private:
  int v_;
  std::vector<int> a_;
};

inline ConcurrenceMatrix concurrence_matrix(const BlockDesign& d) {
  ConcurrenceMatrix lam(d.v());
  for (const auto& blk : d.blocks()) {
    for (std::size_t x = 0; x < blk.size(); ++x) {
      for (std::size_t y = 0; y < blk.size(); ++y) ++lam.at(blk[x] - 1, blk[y] - 1);
    }
  }
  return lam;
}

/// eta_i = number of unordered pairs of distinct treatments with concurrence i,
/// for i = 0..r.
struct EtaVector {
  std::vector<std::int64_t> counts;

  std::size_t size() const { return counts.size(); }
  std::int64_t operator[](std::size_t i) const { return counts[i]; }
  bool operator==(const EtaVector&) const = default;
};

inline std::string to_string(const EtaVector& e) {
  std::string s = "(";
  for (std::size_t i = 0; i < e.counts.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e.counts[i]);
  }
  return s + ")";
}

inline EtaVector eta(const BlockDesign& d) {
  auto p = d.require_params("eta");
  auto lam = concurrence_matrix(d);
  EtaVector e{std::vector<std::int64_t>(p.r + 1, 0)};
  for (int i = 0; i < d.v(); ++i)
    for (int j = i + 1; j < d.v(); ++j) ++e.counts[lam.at(i, j)];
  return e;
}

/// Lexicographic comparison; smaller means smaller PV aberration.
inline std::strong_ordering eta_compare(const EtaVector& a, const EtaVector& b) {
  if (a.size() != b.size())
    throw Error("eta vectors have different lengths " + std::to_string(a.size()) + " and " +
                std::to_string(b.size()));
  return std::lexicographical_compare_three_way(a.counts.begin(), a.counts.end(), b.counts.begin(),
                                                b.counts.end());
}

inline bool eta_less(const EtaVector& a, const EtaVector& b) { return eta_compare(a, b) < 0; }

/// Exact rational with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  bool operator==(const Rational&) const = default;
  std::strong_ordering operator<=>(const Rational& o) const {
    return static_cast<__int128>(num) * o.den <=> static_cast<__int128>(o.num) * den;
  }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline std::string to_string(const Rational& q) {
  return q.den == 1 ? std::to_string(q.num) : std::to_string(q.num) + "/" + std::to_string(q.den);
}

/// v(v - k - (r-1)(k - mu)) / 2, the least possible eta_0 of a design in which
/// distinct non-disjoint blocks all meet in mu treatments.
inline Rational eta0_lower_bound(std::int64_t v, std::int64_t b, std::int64_t r, std::int64_t k,
                                 std::int64_t mu) {
  (void)b;
  return Rational(v * (v - k - (r - 1) * (k - mu)), 2);
}

/// The common intersection size of all pairs of distinct, non-disjoint
/// blocks, or nullopt when two such pairs differ (or no such pair exists).
inline std::optional<int> nondisjoint_intersection(const BlockDesign& d) {
  auto mults = d.multiplicities();
  std::optional<int> mu;
  std::vector<int> mark(d.v() + 1, -1);
  for (std::size_t i = 0; i < mults.size(); ++i) {
    for (int t : mults[i].first) mark[t] = static_cast<int>(i);
    for (std::size_t j = i + 1; j < mults.size(); ++j) {
      int c = 0;
      for (int t : mults[j].first) c += mark[t] == static_cast<int>(i);
      if (c == 0) continue;
      if (mu && *mu != c) return std::nullopt;
      mu = c;
    }
  }
  return mu;
}

struct Inflation {
  int mu = 0;
  BlockDesign quotient;
  // Treatment classes of mutual concurrence r, ordered by least member.
  std::vector<std::vector<int>> classes;
};

/// Recognises d as a mu-fold inflation (mu >= 2) by grouping treatments whose
/// concurrence equals r. Returns the maximal such mu and the quotient design on
/// class representatives, or nullopt.
inline std::optional<Inflation> detect_inflation(const BlockDesign& d) {
  auto p = d.require_params("detect_inflation");
  auto lam = concurrence_matrix(d);
  int v = d.v();
  std::vector<int> cls(v, -1);
  std::vector<std::vector<int>> classes;
  for (int a = 0; a < v; ++a) {
    if (cls[a] >= 0) continue;
    cls[a] = static_cast<int>(classes.size());
    classes.push_back({a + 1});
    for (int b = a + 1; b < v; ++b) {
      if (lam.at(a, b) == p.r) {
        if (cls[b] >= 0) return std::nullopt;  // concurrence r not transitive
        cls[b] = cls[a];
        classes.back().push_back(b + 1);
      }
    }
  }
  int mu = static_cast<int>(classes.front().size());
  if (mu < 2) return std::nullopt;
  for (const auto& c : classes)
    if (static_cast<int>(c.size()) != mu) return std::nullopt;
  // Every block must be a union of whole classes.
  std::vector<Block> qblocks;
  for (const auto& blk : d.blocks()) {
    std::map<int, int> hits;
    for (int t : blk) ++hits[cls[t - 1]];
    Block q;
    for (auto [c, h] : hits) {
      if (h != mu) return std::nullopt;
      q.push_back(c + 1);
    }
    qblocks.push_back(std::move(q));
  }
  return Inflation{mu, BlockDesign(static_cast<int>(classes.size()), std::move(qblocks)),
                   std::move(classes)};
}

/// lambda when every pair of distinct treatments has the same concurrence.
inline std::optional<int> is_bibd(const BlockDesign& d) {
  auto p = d.params();
  if (!p || p->k <= 1 || p->k >= p->v) return std::nullopt;
  auto lam = concurrence_matrix(d);
  int l = lam.at(0, 1);
  for (int i = 0; i < d.v(); ++i)
    for (int j = i + 1; j < d.v(); ++j)
      if (lam.at(i, j) != l) return std::nullopt;
  return l;
}

/// Dual design: treatment i is the i-th block of d (in stored order); the
/// block for treatment t of d lists the blocks containing t.
inline BlockDesign design_dual(const BlockDesign& d) {
  std::vector<Block> blocks(d.v());
  for (int i = 0; i < d.b(); ++i)
    for (int t : d.blocks()[i]) blocks[t - 1].push_back(i + 1);
  return BlockDesign(d.b(), std::move(blocks));
}

}  // namespace uslsq
