#pragma once

// Resolutions (parallel classes) and affine resolvability.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uslsq/design.hpp"
#include "uslsq/error.hpp"

namespace uslsq {

/// A partition of a design's block multiset into parallel classes. Each class
/// is sorted and the classes are sorted, so equal resolutions compare equal.
struct Resolution {
  std::vector<std::vector<Block>> classes;

  void normalize() {
    for (auto& c : classes) std::sort(c.begin(), c.end());
    std::sort(classes.begin(), classes.end());
  }
  bool operator==(const Resolution&) const = default;
};

/// Searches for a resolution by exact cover: each class starts with the first
/// unused block, then repeatedly covers the point with the fewest remaining
/// candidate blocks. Copies of a repeated block are interchangeable.
inline std::optional<Resolution> find_resolution(const BlockDesign& d) {
  auto p = d.require_params("find_resolution");
  if (p.k >= p.v || p.r <= 1 || p.v % p.k != 0)
    throw Error("find_resolution needs k < v, r > 1 and k | v; got " + to_string(p));
  auto mults = d.multiplicities();
  int nb = static_cast<int>(mults.size());
  int per_class = p.v / p.k;
  std::vector<int> left(nb);
  std::vector<std::vector<int>> on_point(p.v + 1);
  for (int i = 0; i < nb; ++i) {
    left[i] = mults[i].second;
    for (int t : mults[i].first) on_point[t].push_back(i);
  }
  std::vector<char> covered(p.v + 1, 0);
  std::vector<int> current;
  std::vector<std::vector<int>> done;

  auto fits = [&](int blk) {
    for (int t : mults[blk].first)
      if (covered[t]) return false;
    return true;
  };
  auto place = [&](int blk, char val) {
    for (int t : mults[blk].first) covered[t] = val;
    left[blk] += val ? -1 : 1;
  };

  std::function<bool()> go = [&]() -> bool {
    if (static_cast<int>(current.size()) == per_class) {
      done.push_back(current);
      auto saved = current;
      current.clear();
      std::fill(covered.begin(), covered.end(), 0);
      if (static_cast<int>(done.size()) == p.r) return true;
      if (go()) return true;
      current = saved;
      done.pop_back();
      std::fill(covered.begin(), covered.end(), 0);
      for (int blk : current)
        for (int t : mults[blk].first) covered[t] = 1;
      return false;
    }
    if (current.empty()) {
      int first = 0;
      while (first < nb && left[first] == 0) ++first;
      if (first == nb) return false;
      place(first, 1);
      current.push_back(first);
      bool ok = go();
      if (ok) return true;
      current.pop_back();
      place(first, 0);
      return false;
    }
    int best_point = -1;
    std::size_t best_count = 0;
    for (int t = 1; t <= p.v; ++t) {
      if (covered[t]) continue;
      std::size_t cnt = 0;
      for (int blk : on_point[t])
        if (left[blk] > 0 && fits(blk)) ++cnt;
      if (cnt == 0) return false;
      if (best_point < 0 || cnt < best_count) {
        best_point = t;
        best_count = cnt;
      }
    }
    for (int blk : on_point[best_point]) {
      if (left[blk] == 0 || !fits(blk)) continue;
      place(blk, 1);
      current.push_back(blk);
      if (go()) return true;
      current.pop_back();
      place(blk, 0);
    }
    return false;
  };

  if (!go()) return std::nullopt;
  Resolution res;
  for (const auto& cls : done) {
    std::vector<Block> c;
    for (int blk : cls) c.push_back(mults[blk].first);
    res.classes.push_back(std::move(c));
  }
  res.normalize();
  return res;
}

/// Throws ValidationError unless res partitions d's blocks into classes that
/// each partition the treatments.
inline void check_resolution(const BlockDesign& d, const Resolution& res) {
  std::vector<Block> all;
  for (std::size_t c = 0; c < res.classes.size(); ++c) {
    std::vector<int> seen(d.v() + 1, 0);
    for (const auto& blk : res.classes[c]) {
      for (int t : blk) {
        if (t < 1 || t > d.v()) throw ValidationError("resolution: treatment out of range");
        ++seen[t];
      }
      all.push_back(blk);
    }
    for (int t = 1; t <= d.v(); ++t)
      if (seen[t] != 1)
        throw ValidationError("resolution: class " + std::to_string(c + 1) + " covers treatment " +
                              std::to_string(t) + " " + std::to_string(seen[t]) + " times");
  }
  for (auto& b : all) std::sort(b.begin(), b.end());
  std::sort(all.begin(), all.end());
  if (all != d.blocks()) throw ValidationError("resolution: classes do not use exactly the blocks of the design");
}

/// mu when every two blocks from different classes meet in mu > 0 treatments.
inline std::optional<int> is_affine_resolvable(const BlockDesign& d, const Resolution& res) {
  check_resolution(d, res);
  std::optional<int> mu;
  std::vector<int> mark(d.v() + 1, 0);
  int stamp = 0;
  for (std::size_t c1 = 0; c1 < res.classes.size(); ++c1) {
    for (const auto& b1 : res.classes[c1]) {
      ++stamp;
      for (int t : b1) mark[t] = stamp;
      for (std::size_t c2 = c1 + 1; c2 < res.classes.size(); ++c2) {
        for (const auto& b2 : res.classes[c2]) {
          int x = 0;
          for (int t : b2) x += mark[t] == stamp;
          if (x == 0 || (mu && *mu != x)) return std::nullopt;
          mu = x;
        }
      }
    }
  }
  return mu;
}

}  // namespace uslsq
