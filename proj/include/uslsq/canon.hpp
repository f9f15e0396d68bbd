#pragma once

// Canonical labelling of vertex-coloured graphs by individualisation and
// equitable refinement, with automorphism and trace pruning. Produces a
// byte-stable certificate, a generating set of the automorphism group and
// the group order.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "uslsq/error.hpp"

namespace uslsq {

using BigInt = boost::multiprecision::cpp_int;
using Permutation = std::vector<std::uint32_t>;

/// Undirected simple graph with an ordered vertex colouring. Colour classes
/// are ordered by colour key; isomorphisms must preserve keys.
class ColoredGraph {
 public:
  ColoredGraph() = default;
  explicit ColoredGraph(std::size_t n, std::uint32_t color = 0) : color_(n, color), adj_(n) {}

  std::uint32_t add_vertex(std::uint32_t color) {
    color_.push_back(color);
    adj_.emplace_back();
    return static_cast<std::uint32_t>(color_.size() - 1);
  }
  void set_color(std::uint32_t v, std::uint32_t c) { color_[v] = c; }
  void add_edge(std::uint32_t u, std::uint32_t v) {
    if (u == v) throw Error("coloured graph: loops are not allowed");
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  // Sorts adjacency lists and drops repeated edges.
  void finalize() {
    for (auto& a : adj_) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
  }

  std::size_t size() const { return color_.size(); }
  std::uint32_t color(std::uint32_t v) const { return color_[v]; }
  const std::vector<std::uint32_t>& colors() const { return color_; }
  const std::vector<std::uint32_t>& neighbors(std::uint32_t v) const { return adj_[v]; }
  bool adjacent(std::uint32_t u, std::uint32_t v) const {
    return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
  }

 private:
  std::vector<std::uint32_t> color_;
  std::vector<std::vector<std::uint32_t>> adj_;
};

struct Certificate {
  std::vector<std::uint8_t> bytes;
  BigInt aut_order = 1;
  Permutation labeling;  // vertex -> canonical position
  std::vector<Permutation> generators;

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
      s.push_back(digits[b >> 4]);
      s.push_back(digits[b & 15]);
    }
    return s;
  }
  bool operator==(const Certificate& o) const { return bytes == o.bytes; }
};

namespace detail {

struct Partition {
  std::vector<std::uint32_t> lab;   // position -> vertex
  std::vector<std::uint32_t> pos;   // vertex -> position
  std::vector<std::uint32_t> cell;  // vertex -> start of its cell
  std::vector<std::uint32_t> len;   // cell start -> length
  std::uint32_t cells = 0;
};

using Trace = std::vector<std::uint32_t>;

inline int compare(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  auto c = std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

class Canonizer {
 public:
  explicit Canonizer(const ColoredGraph& g) : g_(g), n_(static_cast<std::uint32_t>(g.size())) {
    count_.assign(n_, 0);
    in_queue_.assign(n_, 0);
  }

  Certificate run() {
    Partition p = initial_partition();
    std::vector<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < n_; s += p.len[s]) queue.push_back(s);
    Trace t;
    refine(p, queue, t);
    cur_trace_.assign(1, t);
    eqf_.assign(1, 1);
    cmp_.assign(1, 0);
    path_.clear();
    visit(p, 0);

    Certificate cert;
    cert.labeling.assign(n_, 0);
    for (std::uint32_t i = 0; i < n_; ++i) cert.labeling[best_lab_[i]] = i;
    cert.generators = gens_;
    cert.aut_order = 1;
    for (auto o : orbit_sizes_) cert.aut_order *= o;
    encode(cert);
    return cert;
  }

 private:
  Partition initial_partition() const {
    Partition p;
    p.lab.resize(n_);
    std::iota(p.lab.begin(), p.lab.end(), 0u);
    std::stable_sort(p.lab.begin(), p.lab.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return g_.color(a) < g_.color(b); });
    p.pos.resize(n_);
    p.cell.resize(n_);
    p.len.assign(n_, 0);
    std::uint32_t start = 0;
    for (std::uint32_t i = 0; i < n_; ++i) {
      p.pos[p.lab[i]] = i;
      if (i > 0 && g_.color(p.lab[i]) != g_.color(p.lab[i - 1])) {
        p.len[start] = i - start;
        start = i;
        ++p.cells;
      }
      p.cell[p.lab[i]] = start;
    }
    if (n_ > 0) {
      p.len[start] = n_ - start;
      ++p.cells;
    }
    return p;
  }

  // Refines p to the coarsest equitable partition finer than it, splitting
  // with the cells in `queue` first. Appends a label-invariant trace.
  void refine(Partition& p, const std::vector<std::uint32_t>& initial, Trace& trace) {
    std::deque<std::uint32_t> queue(initial.begin(), initial.end());
    for (auto s : queue) in_queue_[s] = 1;
    std::vector<std::uint32_t> members, affected, frag_start;
    while (!queue.empty()) {
      std::uint32_t w = queue.front();
      queue.pop_front();
      in_queue_[w] = 0;
      if (p.cells == n_) continue;
      members.assign(p.lab.begin() + w, p.lab.begin() + w + p.len[w]);
      touched_.clear();
      for (auto x : members)
        for (auto y : g_.neighbors(x))
          if (count_[y]++ == 0) touched_.push_back(y);
      affected.clear();
      for (auto y : touched_) affected.push_back(p.cell[y]);
      std::sort(affected.begin(), affected.end());
      affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
      for (auto c : affected) {
        std::uint32_t len = p.len[c];
        if (len == 1) continue;
        auto first = p.lab.begin() + c, last = first + len;
        std::sort(first, last, [&](std::uint32_t a, std::uint32_t b) {
          return count_[a] != count_[b] ? count_[a] < count_[b] : a < b;
        });
        for (std::uint32_t i = c; i < c + len; ++i) p.pos[p.lab[i]] = i;
        if (count_[*first] == count_[*(last - 1)]) continue;
        frag_start.clear();
        for (std::uint32_t i = c; i < c + len; ++i)
          if (i == c || count_[p.lab[i]] != count_[p.lab[i - 1]]) frag_start.push_back(i);
        trace.push_back(c);
        trace.push_back(static_cast<std::uint32_t>(frag_start.size()));
        std::uint32_t largest = 0, largest_len = 0;
        for (std::size_t f = 0; f < frag_start.size(); ++f) {
          std::uint32_t fs = frag_start[f];
          std::uint32_t fe = f + 1 < frag_start.size() ? frag_start[f + 1] : c + len;
          p.len[fs] = fe - fs;
          for (std::uint32_t i = fs; i < fe; ++i) p.cell[p.lab[i]] = fs;
          trace.push_back(count_[p.lab[fs]]);
          trace.push_back(fe - fs);
          if (fe - fs > largest_len) {
            largest_len = fe - fs;
            largest = fs;
          }
        }
        p.cells += static_cast<std::uint32_t>(frag_start.size()) - 1;
        bool whole = in_queue_[c] != 0;
        for (auto fs : frag_start) {
          if (in_queue_[fs]) continue;
          if (!whole && fs == largest) continue;
          in_queue_[fs] = 1;
          queue.push_back(fs);
        }
      }
      for (auto y : touched_) count_[y] = 0;
    }
    trace.push_back(p.cells);
  }

  void individualize(Partition& p, std::uint32_t v) {
    std::uint32_t c = p.cell[v], len = p.len[c];
    std::uint32_t at = p.pos[v], other = p.lab[c];
    std::swap(p.lab[c], p.lab[at]);
    p.pos[v] = c;
    p.pos[other] = at;
    p.len[c] = 1;
    p.len[c + 1] = len - 1;
    for (std::uint32_t i = c + 1; i < c + len; ++i) p.cell[p.lab[i]] = c + 1;
    ++p.cells;
  }

  std::uint32_t target_cell(const Partition& p) const {
    std::uint32_t best = n_, best_len = n_ + 1;
    for (std::uint32_t s = 0; s < n_; s += p.len[s])
      if (p.len[s] > 1 && p.len[s] < best_len) {
        best = s;
        best_len = p.len[s];
      }
    return best;
  }

  std::vector<std::uint32_t> code_of(const Partition& p) const {
    std::vector<std::uint32_t> code;
    std::vector<std::uint32_t> nb;
    for (std::uint32_t i = 0; i < n_; ++i) {
      nb.clear();
      for (auto y : g_.neighbors(p.lab[i]))
        if (p.pos[y] > i) nb.push_back(p.pos[y]);
      std::sort(nb.begin(), nb.end());
      for (auto q : nb) {
        code.push_back(i);
        code.push_back(q);
      }
    }
    return code;
  }

  // Orbit roots of the group generated by the generators fixing
  // path_[0..level) pointwise.
  std::vector<std::uint32_t> orbits(std::size_t level, const std::vector<std::uint32_t>& fixed) const {
    std::vector<std::uint32_t> parent(n_);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& g : gens_) {
      bool fixes = true;
      for (std::size_t i = 0; i < level && fixes; ++i) fixes = g[fixed[i]] == fixed[i];
      if (!fixes) continue;
      for (std::uint32_t x = 0; x < n_; ++x) {
        auto a = find(x), b = find(g[x]);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
    for (std::uint32_t x = 0; x < n_; ++x) parent[x] = find(x);
    return parent;
  }

  static std::size_t common_prefix(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                                   std::size_t limit) {
    std::size_t i = 0;
    while (i < limit && i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    return i;
  }

  void add_generator(const Partition& p, const Permutation& other_lab) {
    Permutation g(n_);
    for (std::uint32_t i = 0; i < n_; ++i) g[other_lab[i]] = p.lab[i];
    bool identity = true;
    for (std::uint32_t i = 0; i < n_ && identity; ++i) identity = g[i] == i;
    if (!identity) gens_.push_back(std::move(g));
  }

  void set_best(const Partition& p, std::vector<std::uint32_t> code, std::size_t level) {
    best_code_ = std::move(code);
    best_lab_ = p.lab;
    best_trace_.assign(cur_trace_.begin(), cur_trace_.begin() + level + 1);
    best_path_.assign(path_.begin(), path_.begin() + level);
    for (std::size_t i = 0; i <= level; ++i) cmp_[i] = 0;
  }

  std::size_t leaf(const Partition& p, std::size_t level) {
    auto code = code_of(p);
    if (!have_first_) {
      have_first_ = true;
      first_code_ = code;
      first_lab_ = p.lab;
      first_trace_.assign(cur_trace_.begin(), cur_trace_.begin() + level + 1);
      first_path_.assign(path_.begin(), path_.begin() + level);
      orbit_sizes_.assign(level, 1);
      set_best(p, std::move(code), level);
      return level;
    }
    if (eqf_[level] && code == first_code_) {
      add_generator(p, first_lab_);
      return common_prefix(path_, first_path_, level);
    }
    if (cmp_[level] == 0) {
      int c = compare(code, best_code_);
      if (c == 0) {
        add_generator(p, best_lab_);
        return common_prefix(path_, best_path_, level);
      }
      if (c < 0) set_best(p, std::move(code), level);
    } else if (cmp_[level] < 0) {
      set_best(p, std::move(code), level);
    }
    return level;
  }

  std::size_t visit(const Partition& p, std::size_t level) {
    if (p.cells == n_) return leaf(p, level);
    std::uint32_t tc = target_cell(p);
    std::vector<std::uint32_t> members(p.lab.begin() + tc, p.lab.begin() + tc + p.len[tc]);
    std::sort(members.begin(), members.end());
    if (path_.size() <= level) path_.resize(level + 1);
    if (cur_trace_.size() <= level + 1) {
      cur_trace_.resize(level + 2);
      eqf_.resize(level + 2);
      cmp_.resize(level + 2);
    }
    bool on_first = !have_first_ || common_prefix(path_, first_path_, level) == level;

    std::vector<std::uint32_t> done;
    std::vector<std::uint32_t> roots;
    std::size_t roots_gens = static_cast<std::size_t>(-1);
    for (auto w : members) {
      if (!done.empty()) {
        if (roots_gens != gens_.size()) {
          roots = orbits(level, path_);
          roots_gens = gens_.size();
        }
        bool seen = false;
        for (auto u : done) seen = seen || roots[u] == roots[w];
        if (seen) continue;
      }
      done.push_back(w);
      Partition child = p;
      individualize(child, w);
      Trace t{tc, p.len[tc]};
      refine(child, {child.cell[w]}, t);
      path_[level] = w;
      char eqf = 1;
      int cmp = 0;
      if (have_first_) {
        eqf = eqf_[level] && level + 1 < first_trace_.size() && t == first_trace_[level + 1];
        if (cmp_[level] != 0)
          cmp = cmp_[level];
        else
          cmp = level + 1 < best_trace_.size() ? compare(t, best_trace_[level + 1]) : 1;
        if (!eqf && cmp > 0) continue;
      }
      cur_trace_[level + 1] = std::move(t);
      eqf_[level + 1] = eqf;
      cmp_[level + 1] = cmp;
      std::size_t j = visit(child, level + 1);
      if (j < level) return j;
    }
    if (on_first && level < first_path_.size()) {
      auto r = orbits(level, first_path_);
      std::uint64_t size = 0;
      for (std::uint32_t x = 0; x < n_; ++x) size += r[x] == r[first_path_[level]];
      orbit_sizes_[level] = size;
    }
    return level;
  }

  void encode(Certificate& cert) const {
    auto put = [&](std::uint32_t x) {
      for (int i = 0; i < 4; ++i) cert.bytes.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    };
    put(n_);
    // colour classes in order, with sizes
    std::vector<std::pair<std::uint32_t, std::uint32_t>> classes;
    std::vector<std::uint32_t> keys(g_.colors());
    std::sort(keys.begin(), keys.end());
    for (auto k : keys) {
      if (!classes.empty() && classes.back().first == k)
        ++classes.back().second;
      else
        classes.emplace_back(k, 1);
    }
    put(static_cast<std::uint32_t>(classes.size()));
    for (auto [k, s] : classes) {
      put(k);
      put(s);
    }
    put(static_cast<std::uint32_t>(best_code_.size() / 2));
    for (auto x : best_code_) put(x);
  }

  const ColoredGraph& g_;
  std::uint32_t n_;
  std::vector<std::uint32_t> count_, touched_;
  std::vector<char> in_queue_;

  bool have_first_ = false;
  std::vector<Trace> first_trace_, best_trace_, cur_trace_;
  std::vector<std::uint32_t> first_path_, best_path_, path_;
  Permutation first_lab_, best_lab_;
  std::vector<std::uint32_t> first_code_, best_code_;
  std::vector<int> cmp_;
  std::vector<char> eqf_;
  std::vector<Permutation> gens_;
  std::vector<std::uint64_t> orbit_sizes_;
};

}  // namespace detail

/// Canonical form of g: equal certificates exactly when the graphs are
/// isomorphic by a colour-key preserving bijection.
inline Certificate canonical_form(const ColoredGraph& g) {
  ColoredGraph copy = g;
  copy.finalize();
  return detail::Canonizer(copy).run();
}

}  // namespace uslsq
