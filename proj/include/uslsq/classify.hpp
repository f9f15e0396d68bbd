#pragma once

// Classification of uniform (n x n)/(mu(n-1)) semi-Latin squares through the
// block multisets of their duals: designs on the vertices of the Hamming
// graph H(2,n) whose blocks are size-n co-cliques (permutation supports) of
// multiplicity at most mu, covering every non-edge exactly mu times.
//
// A symmetry-reduced seed phase walks the top of the search tree, pruning
// children that are equivalent under the stabiliser in Aut(H(2,n)) of the
// current node, until the partial solution has trivial stabiliser. Each
// seed is then extended independently. Solutions are deduplicated by their
// canonical image under Aut(H(2,n)); each class is then checked against the
// certificate of its dual design.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "uslsq/canon.hpp"
#include "uslsq/design.hpp"
#include "uslsq/isomorph.hpp"
#include "uslsq/square.hpp"

namespace uslsq {

/// H(2,n): vertex (i,j) (0-based) has id i*n + j; distinct vertices are
/// adjacent iff they share a coordinate.
class HammingGraph {
 public:
  explicit HammingGraph(int n) : n_(n) {
    if (n < 2) throw Error("Hamming graph needs n >= 2");
    int v = n * n;
    nonedge_id_.assign(static_cast<std::size_t>(v) * v, -1);
    for (int a = 0; a < v; ++a)
      for (int b = a + 1; b < v; ++b)
        if (!adjacent(a, b)) {
          int id = static_cast<int>(nonedges_.size());
          nonedge_id_[static_cast<std::size_t>(a) * v + b] = nonedge_id_[static_cast<std::size_t>(b) * v + a] = id;
          nonedges_.emplace_back(a, b);
        }
  }
  int n() const { return n_; }
  int vertices() const { return n_ * n_; }
  bool adjacent(int a, int b) const { return a != b && (a / n_ == b / n_ || a % n_ == b % n_); }
  int degree(int a) const {
    int d = 0;
    for (int b = 0; b < vertices(); ++b) d += adjacent(a, b);
    return d;
  }
  const std::vector<std::pair<int, int>>& nonedges() const { return nonedges_; }
  int nonedge(int a, int b) const { return nonedge_id_[static_cast<std::size_t>(a) * vertices() + b]; }

 private:
  int n_;
  std::vector<std::pair<int, int>> nonedges_;
  std::vector<int> nonedge_id_;
};

/// A size-n co-clique of H(2,n): the cells (i, perm[i]).
struct CoCliqueBlock {
  std::vector<int> perm;

  std::vector<int> vertices() const {
    std::vector<int> v;
    int n = static_cast<int>(perm.size());
    for (int i = 0; i < n; ++i) v.push_back(i * n + perm[i]);
    return v;
  }
  bool operator==(const CoCliqueBlock&) const = default;
  auto operator<=>(const CoCliqueBlock&) const = default;
};

/// All n! size-n co-cliques, lexicographic by permutation.
inline std::vector<CoCliqueBlock> cocliques(int n) {
  if (n < 2) throw Error("cocliques needs n >= 2");
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<CoCliqueBlock> out;
  do out.push_back({p});
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Index of a permutation in lexicographic order.
inline int perm_rank(const std::vector<int>& p) {
  int n = static_cast<int>(p.size());
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j) smaller += p[j] < p[i];
    rank = rank * (n - i) + smaller;
  }
  return rank;
}

/// (block index into cocliques(n), multiplicity), sorted by block index.
using PartialSolution = std::vector<std::pair<int, int>>;

struct SeedTask {
  PartialSolution partial;
  // (block, multiplicity) pairs the extension may add; no block of `partial`.
  std::vector<std::pair<int, int>> pool;
};

struct SeedPolicy {
  // Depth 0 means: stop where the partial solution has trivial stabiliser.
  // A positive depth emits every node at that depth instead.
  int fixed_depth = 0;
  bool use_symmetry = true;

  static SeedPolicy trivial_stabilizer() { return {}; }
  static SeedPolicy naive() { return {-1, false}; }  // a single seed: the root
};

/// Shared tables for one (n, mu) search.
class ClassifyContext {
 public:
  ClassifyContext(int n, int mu) : n_(n), mu_(mu), graph_(n), blocks_(cocliques(n)) {
    if (n < 3 || mu < 1) throw Error("classification needs n >= 3 and mu >= 1");
    for (const auto& b : blocks_) {
      auto vs = b.vertices();
      std::vector<int> ne;
      for (std::size_t x = 0; x < vs.size(); ++x)
        for (std::size_t y = x + 1; y < vs.size(); ++y) ne.push_back(graph_.nonedge(vs[x], vs[y]));
      block_nonedges_.push_back(std::move(ne));
    }
    nonedge_blocks_.resize(graph_.nonedges().size());
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
      for (int e : block_nonedges_[b]) nonedge_blocks_[e].push_back(b);
    vertex_blocks_.resize(static_cast<std::size_t>(n) * n);
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
      for (int v : blocks_[b].vertices()) vertex_blocks_[v].push_back(b);
    if (n <= 7) {
      std::size_t size = 1;
      for (int i = 0; i < n; ++i) size *= n;
      rank_table_.assign(size, -1);
      for (int b = 0; b < block_count(); ++b) rank_table_[code(blocks_[b].perm.data())] = b;
    }
  }

  int n() const { return n_; }
  int mu() const { return mu_; }
  const HammingGraph& graph() const { return graph_; }
  const std::vector<CoCliqueBlock>& blocks() const { return blocks_; }
  const std::vector<int>& block_nonedges(int b) const { return block_nonedges_[b]; }
  const std::vector<int>& nonedge_blocks(int e) const { return nonedge_blocks_[e]; }
  const std::vector<int>& vertex_blocks(int v) const { return vertex_blocks_[v]; }
  int block_count() const { return static_cast<int>(blocks_.size()); }

  /// Block index of the permutation p[0..n).
  int rank(const int* p) const {
    if (!rank_table_.empty()) return rank_table_[code(p)];
    return perm_rank(std::vector<int>(p, p + n_));
  }
  int nonedge_count() const { return static_cast<int>(graph_.nonedges().size()); }

  /// Dual design on the n^2 cells (cell id + 1) with one block per copy.
  BlockDesign dual_design(const PartialSolution& s) const {
    std::vector<Block> bl;
    for (auto [b, m] : s) {
      Block blk;
      for (int v : blocks_[b].vertices()) blk.push_back(v + 1);
      for (int c = 0; c < m; ++c) bl.push_back(blk);
    }
    return BlockDesign(n_ * n_, std::move(bl));
  }

  /// The square whose dual is s: copy number t (in block order) of the
  /// blocks becomes treatment t + 1.
  SemiLatinSquare square(const PartialSolution& s) const {
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(n_) * n_);
    int t = 0;
    for (auto [b, m] : s)
      for (int c = 0; c < m; ++c) {
        ++t;
        for (int v : blocks_[b].vertices()) cells[v].push_back(t);
      }
    return SemiLatinSquare::validate(n_, mu_ * (n_ - 1), std::move(cells));
  }

  /// Every non-edge covered exactly mu times by the blocks of s.
  bool is_solution(const PartialSolution& s) const {
    std::vector<int> cover(nonedge_count(), 0);
    for (auto [b, m] : s) {
      if (m < 1 || m > mu_) return false;
      for (int e : block_nonedges_[b]) cover[e] += m;
    }
    for (int c : cover)
      if (c != mu_) return false;
    return true;
  }

  /// Image of block b under an automorphism of H(2,n) given as a permutation
  /// of the 2n lines (rows 0..n-1, columns n..2n-1).
  int image(int b, const std::vector<std::uint32_t>& lines) const {
    const auto& p = blocks_[b].perm;
    std::vector<int> q(n_);
    bool swap = lines[0] >= static_cast<std::uint32_t>(n_);
    for (int i = 0; i < n_; ++i) {
      if (!swap)
        q[lines[i]] = static_cast<int>(lines[n_ + p[i]]) - n_;
      else
        q[lines[n_ + p[i]]] = static_cast<int>(lines[i]) - n_;
    }
    return rank(q.data());
  }

 private:
  std::size_t code(const int* p) const {
    std::size_t c = 0;
    for (int i = 0; i < n_; ++i) c = c * n_ + static_cast<std::size_t>(p[i]);
    return c;
  }


  int n_, mu_;
  HammingGraph graph_;
  std::vector<CoCliqueBlock> blocks_;
  std::vector<std::vector<int>> block_nonedges_;
  std::vector<std::vector<int>> nonedge_blocks_;
  std::vector<std::vector<int>> vertex_blocks_;
  std::vector<int> rank_table_;
};

namespace detail {

/// Mutable search state: residual coverage per non-edge and a status per
/// block (0 open, -1 excluded, m > 0 chosen with multiplicity m).
class SearchState {
 public:
  SearchState(const ClassifyContext& ctx, std::vector<int> caps)
      : ctx_(ctx),
        residual_(ctx.nonedge_count(), ctx.mu()),
        status_(ctx.block_count(), 0),
        cap_(std::move(caps)),
        maxm_(ctx.block_count(), 0),
        degree_(static_cast<std::size_t>(ctx.n()) * ctx.n(), 0) {
    for (int b = 0; b < ctx.block_count(); ++b)
      if (cap_[b] > 0) live_.push_back(b);
  }

  const ClassifyContext& ctx() const { return ctx_; }
  int status(int b) const { return status_[b]; }
  int cap(int b) const { return cap_[b]; }

  bool can_add(int b, int m) const {
    if (status_[b] != 0 || m > cap_[b]) return false;
    for (int e : ctx_.block_nonedges(b))
      if (residual_[e] < m) return false;
    return true;
  }
  void add(int b, int m) {
    status_[b] = m;
    for (int e : ctx_.block_nonedges(b)) residual_[e] -= m;
    const auto& p = ctx_.blocks()[b].perm;
    for (int i = 0; i < ctx_.n(); ++i) degree_[i * ctx_.n() + p[i]] += m;
  }
  void remove(int b) {
    int m = status_[b];
    status_[b] = 0;
    for (int e : ctx_.block_nonedges(b)) residual_[e] += m;
    const auto& p = ctx_.blocks()[b].perm;
    for (int i = 0; i < ctx_.n(); ++i) degree_[i * ctx_.n() + p[i]] -= m;
  }
  void exclude(int b) { status_[b] = -1; }
  void reopen(int b) { status_[b] = 0; }

  PartialSolution chosen() const {
    PartialSolution p;
    for (int b = 0; b < ctx_.block_count(); ++b)
      if (status_[b] > 0) p.emplace_back(b, status_[b]);
    return p;
  }
  std::vector<int> excluded() const {
    std::vector<int> x;
    for (int b = 0; b < ctx_.block_count(); ++b)
      if (status_[b] < 0) x.push_back(b);
    return x;
  }

  enum class Verdict { kInfeasible, kComplete, kBranch };

  /// Computes per-block usable multiplicity and picks the non-edge with the
  /// fewest usable blocks. Infeasible when some non-edge's residual exceeds
  /// the summed usable multiplicity of its open blocks.
  Verdict analyze(int& branch_nonedge) {
    for (int b : live_) {
      if (status_[b] != 0) {
        maxm_[b] = 0;
        continue;
      }
      int m = cap_[b];
      for (int e : ctx_.block_nonedges(b)) m = std::min(m, residual_[e]);
      maxm_[b] = m;
    }
    int best = -1, best_count = 0;
    bool open = false;
    for (int e = 0; e < ctx_.nonedge_count(); ++e) {
      if (residual_[e] == 0) continue;
      open = true;
      int count = 0, supply = 0;
      for (int b : ctx_.nonedge_blocks(e))
        if (maxm_[b] > 0) {
          ++count;
          supply += maxm_[b];
        }
      if (supply < residual_[e]) return Verdict::kInfeasible;
      if (best < 0 || count < best_count) {
        best = e;
        best_count = count;
      }
    }
    if (!open) return Verdict::kComplete;
    // each vertex lies in exactly mu(n-1) blocks
    const int degree = ctx_.mu() * (ctx_.n() - 1);
    for (int v = 0; v < ctx_.n() * ctx_.n(); ++v) {
      int supply = 0;
      for (int b : ctx_.vertex_blocks(v)) supply += maxm_[b];
      if (degree_[v] + supply < degree) return Verdict::kInfeasible;
    }
    branch_nonedge = best;
    return Verdict::kBranch;
  }

  int usable(int b) const { return maxm_[b]; }

  /// Candidate blocks (usable, containing e) in index order with their usable
  /// multiplicities, captured before branching changes the state.
  std::vector<std::pair<int, int>> candidates(int e) const {
    std::vector<std::pair<int, int>> c;
    for (int b : ctx_.nonedge_blocks(e))
      if (maxm_[b] > 0) c.emplace_back(b, maxm_[b]);
    return c;
  }

  std::vector<std::pair<int, int>> pool() const {
    std::vector<std::pair<int, int>> p;
    for (int b = 0; b < ctx_.block_count(); ++b)
      for (int m = 1; m <= maxm_[b]; ++m) p.emplace_back(b, m);
    return p;
  }

 private:
  const ClassifyContext& ctx_;
  std::vector<int> residual_;
  std::vector<int> status_;
  std::vector<int> cap_;
  std::vector<int> maxm_;
  std::vector<int> degree_;
  std::vector<int> live_;
};

/// Coloured graph whose automorphisms restricted to the 2n line vertices are
/// the elements of Aut(H(2,n)) fixing the chosen blocks (with multiplicity),
/// the excluded blocks, and the non-edge `marked` (when >= 0).
inline ColoredGraph stabilizer_graph(const ClassifyContext& ctx, const PartialSolution& chosen,
                                     const std::vector<int>& excluded, int marked) {
  int n = ctx.n();
  ColoredGraph g(static_cast<std::size_t>(2 * n), 0);
  std::uint32_t cell0 = 2 * n;
  for (int c = 0; c < n * n; ++c) g.add_vertex(1);
  if (marked >= 0) {
    auto [a, b] = ctx.graph().nonedges()[marked];
    g.set_color(cell0 + a, 2);
    g.set_color(cell0 + b, 2);
  }
  for (int c = 0; c < n * n; ++c) {
    g.add_edge(cell0 + c, c / n);
    g.add_edge(cell0 + c, n + c % n);
  }
  auto attach = [&](int b, std::uint32_t color) {
    auto x = g.add_vertex(color);
    for (int v : ctx.blocks()[b].vertices()) g.add_edge(x, cell0 + v);
  };
  for (auto [b, m] : chosen) attach(b, 10 + m);
  for (int b : excluded) attach(b, 5);
  return g;
}

}  // namespace detail

inline bool has_trivial_stabilizer(const ClassifyContext& ctx, const PartialSolution& p) {
  return canonical_form(detail::stabilizer_graph(ctx, p, {}, -1)).aut_order == 1;
}

/// Symmetry-reduced seeds. Every isomorphism class of solutions has a
/// representative that extends some seed's partial solution by pairs from its
/// pool. A seed whose partial solution is already complete has an empty pool.
inline std::vector<SeedTask> seed_phase(const ClassifyContext& ctx, SeedPolicy policy = {}) {
  std::vector<SeedTask> seeds;
  detail::SearchState st(ctx, std::vector<int>(ctx.block_count(), ctx.mu()));

  std::function<void(int)> go = [&](int depth) {
    int e = -1;
    auto verdict = st.analyze(e);
    if (verdict == detail::SearchState::Verdict::kInfeasible) return;
    if (verdict == detail::SearchState::Verdict::kComplete) {
      seeds.push_back({st.chosen(), {}});
      return;
    }
    bool stop = false;
    if (policy.fixed_depth < 0)
      stop = true;
    else if (policy.fixed_depth > 0)
      stop = depth == policy.fixed_depth;
    else
      stop = depth > 0 && has_trivial_stabilizer(ctx, st.chosen());
    if (stop) {
      seeds.push_back({st.chosen(), st.pool()});
      return;
    }
    auto cands = st.candidates(e);
    std::vector<int> root(cands.size());
    std::iota(root.begin(), root.end(), 0);
    if (policy.use_symmetry) {
      auto cert = canonical_form(detail::stabilizer_graph(ctx, st.chosen(), st.excluded(), e));
      std::map<int, int> where;
      for (std::size_t i = 0; i < cands.size(); ++i) where[cands[i].first] = static_cast<int>(i);
      std::function<int(int)> find = [&](int x) { return root[x] == x ? x : root[x] = find(root[x]); };
      for (const auto& gen : cert.generators) {
        for (std::size_t i = 0; i < cands.size(); ++i) {
          auto it = where.find(ctx.image(cands[i].first, gen));
          if (it == where.end()) throw Error("seed phase: stabiliser does not preserve candidates");
          int a = find(static_cast<int>(i)), b = find(it->second);
          if (a != b) root[std::max(a, b)] = std::min(a, b);
        }
      }
      for (std::size_t i = 0; i < cands.size(); ++i) root[i] = find(static_cast<int>(i));
    }
    std::vector<int> excluded_here;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      auto [b, maxm] = cands[i];
      if (root[i] == static_cast<int>(i)) {
        for (int m = maxm; m >= 1; --m) {
          if (!st.can_add(b, m)) continue;
          st.add(b, m);
          go(depth + 1);
          st.remove(b);
        }
      }
      st.exclude(b);
      excluded_here.push_back(b);
    }
    for (int b : excluded_here) st.reopen(b);
  };
  go(0);
  return seeds;
}

/// All completions of task.partial by pairs from task.pool that cover every
/// non-edge exactly mu times. Each multiset is produced once.
inline void extend(const ClassifyContext& ctx, const SeedTask& task,
                   const std::function<void(const PartialSolution&)>& emit) {
  std::vector<int> caps(ctx.block_count(), 0);
  for (auto [b, m] : task.pool) caps[b] = std::max(caps[b], m);
  for (auto [b, m] : task.partial) caps[b] = std::max(caps[b], m);
  detail::SearchState st(ctx, caps);
  for (auto [b, m] : task.partial) {
    if (!st.can_add(b, m)) return;
    st.add(b, m);
  }
  for (auto [b, m] : task.partial) caps[b] = 0;

  std::function<void()> go = [&] {
    int e = -1;
    auto verdict = st.analyze(e);
    if (verdict == detail::SearchState::Verdict::kInfeasible) return;
    if (verdict == detail::SearchState::Verdict::kComplete) {
      emit(st.chosen());
      return;
    }
    auto cands = st.candidates(e);
    std::vector<int> excluded_here;
    for (auto [b, maxm] : cands) {
      for (int m = maxm; m >= 1; --m) {
        st.add(b, m);
        go();
        st.remove(b);
      }
      st.exclude(b);
      excluded_here.push_back(b);
    }
    for (int b : excluded_here) st.reopen(b);
  };
  go();
}

inline std::vector<PartialSolution> extend(const ClassifyContext& ctx, const SeedTask& task) {
  std::vector<PartialSolution> out;
  extend(ctx, task, [&](const PartialSolution& s) { out.push_back(s); });
  return out;
}

/// Canonical image of a solution under Aut(H(2,n)) and the order of its
/// stabiliser there (which is Aut of the dual design).
struct SolutionForm {
  PartialSolution canon;
  std::uint64_t stabilizer = 0;
  bool transposing = false;  // some automorphism interchanges rows and columns
};

/// Exact minimal image: some block of least invariant is sent to the identity
/// permutation, then the remaining diagonal action (conjugation) is searched
/// only over conjugators sending a chosen cycle class to a fixed
/// representative. Images are compared as arrays indexed by block, holding
/// the multiplicity or mu + 1 when absent; for multisets of equal size this
/// orders them like their sorted (block, multiplicity) lists.
inline SolutionForm canonical_solution(const ClassifyContext& ctx, const PartialSolution& s) {
  const int n = ctx.n();
  const std::size_t d = s.size();
  const int radix = ctx.mu() + 1;
  std::vector<int> perm(d * n), mult(d);
  for (std::size_t x = 0; x < d; ++x) {
    const auto& p = ctx.blocks()[s[x].first].perm;
    std::copy(p.begin(), p.end(), perm.begin() + x * n);
    mult[x] = s[x].second;
  }
  // Invariant of a block: its multiplicity and the histogram of
  // (agreement, multiplicity) over the other blocks.
  std::vector<std::vector<int>> at_cell(static_cast<std::size_t>(n) * n);
  for (std::size_t x = 0; x < d; ++x)
    for (int i = 0; i < n; ++i) at_cell[i * n + perm[x * n + i]].push_back(static_cast<int>(x));
  const std::size_t width = static_cast<std::size_t>(n + 1) * radix + 1;
  std::vector<int> inv(d * width, 0), shared(d, 0);
  for (std::size_t a = 0; a < d; ++a) {
    int* v = &inv[a * width];
    v[0] = -mult[a];
    for (int i = 0; i < n; ++i)
      for (int b : at_cell[i * n + perm[a * n + i]]) ++shared[b];
    for (std::size_t b = 0; b < d; ++b) {
      if (b != a) ++v[1 + shared[b] * radix + mult[b]];
      shared[b] = 0;
    }
  }
  std::size_t lo = 0;
  for (std::size_t a = 1; a < d; ++a)
    if (std::lexicographical_compare(&inv[a * width], &inv[a * width] + width, &inv[lo * width],
                                     &inv[lo * width] + width))
      lo = a;
  std::vector<std::size_t> anchors;
  for (std::size_t a = 0; a < d; ++a)
    if (std::equal(&inv[a * width], &inv[a * width] + width, &inv[lo * width])) anchors.push_back(a);

  // Representative of the conjugacy class of t (cycles sorted by length,
  // written as consecutive runs) and the order of its centraliser.
  std::vector<int> lens, rep(n);
  std::vector<char> seen(n);
  auto cycle_class = [&](const int* t, std::uint64_t& z) {
    lens.clear();
    std::fill(seen.begin(), seen.end(), 0);
    for (int i = 0; i < n; ++i) {
      if (seen[i]) continue;
      int l = 0;
      for (int j = i; !seen[j]; j = t[j]) seen[j] = 1, ++l;
      lens.push_back(l);
    }
    std::sort(lens.begin(), lens.end());
    int at = 0;
    std::uint64_t same = 0;
    z = 1;
    for (std::size_t x = 0; x < lens.size(); ++x) {
      int l = lens[x];
      for (int i = 0; i < l; ++i) rep[at + i] = at + (i + 1) % l;
      at += l;
      same = x > 0 && lens[x - 1] == l ? same + 1 : 1;
      z *= static_cast<std::uint64_t>(l) * same;
    }
    return ctx.rank(rep.data());
  };

  const std::size_t nb = ctx.blocks().size();
  std::vector<std::uint8_t> best(nb), cand(nb, static_cast<std::uint8_t>(radix));
  std::vector<int> touched(d);
  std::uint64_t count = 0;
  std::vector<int> q(d * n), tau(d * n), img(n), ainv(n), cls(d);
  std::vector<std::uint64_t> zs(d);
  int t = 0;
  bool reached[2] = {false, false};
  auto consider = [&](const int* r) {
    for (std::size_t e = 0; e < d; ++e) {
      for (int i = 0; i < n; ++i) img[r[i]] = r[tau[e * n + i]];
      touched[e] = ctx.rank(img.data());
      cand[touched[e]] = static_cast<std::uint8_t>(mult[e]);
    }
    int c = count == 0 ? -1 : std::memcmp(cand.data(), best.data(), nb);
    if (c < 0) {
      best = cand;
      count = 1;
      reached[0] = reached[1] = false;
      reached[t] = true;
    } else if (c == 0) {
      ++count;
      reached[t] = true;
    }
    for (int x : touched) cand[x] = static_cast<std::uint8_t>(radix);
  };

  for (t = 0; t < 2; ++t) {
    for (std::size_t x = 0; x < d; ++x)
      for (int i = 0; i < n; ++i) {
        if (t == 0)
          q[x * n + i] = perm[x * n + i];
        else
          q[x * n + perm[x * n + i]] = i;
      }
    for (auto a : anchors) {
      for (int i = 0; i < n; ++i) ainv[q[a * n + i]] = i;
      for (std::size_t c = 0; c < d; ++c)
        for (int i = 0; i < n; ++i) tau[c * n + i] = ainv[q[c * n + i]];
      if (d == 1) {
        for (const auto& blk : ctx.blocks()) consider(blk.perm.data());
        continue;
      }
      // The class minimising (number of conjugators, representative).
      std::map<int, std::uint64_t> members;
      for (std::size_t c = 0; c < d; ++c) {
        if (c == a) continue;
        cls[c] = cycle_class(&tau[c * n], zs[c]);
        members[cls[c]] += zs[c];
      }
      int chosen = -1;
      std::uint64_t cost = 0;
      for (auto [k, z] : members)
        if (chosen < 0 || z < cost) {
          chosen = k;
          cost = z;
        }
      const int* target = ctx.blocks()[chosen].perm.data();
      for (std::size_t c = 0; c < d; ++c) {
        if (c == a || cls[c] != chosen) continue;
        for (const auto& blk : ctx.blocks()) {
          const int* r = blk.perm.data();
          bool ok = true;
          for (int i = 0; i < n && ok; ++i) ok = target[r[i]] == r[tau[c * n + i]];
          if (ok) consider(r);
        }
      }
    }
  }
  SolutionForm f;
  for (std::size_t x = 0; x < nb; ++x)
    if (best[x] != radix) f.canon.emplace_back(static_cast<int>(x), best[x]);
  f.stabilizer = count;
  f.transposing = reached[0] && reached[1];
  return f;
}

struct ClassRecord {
  PartialSolution solution;  // canonical form under Aut(H(2,n))
  SemiLatinSquare square;
  EtaVector eta;
  BigInt aut_square;
  BigInt aut_dual;
  bool transposing = false;  // has an automorphism interchanging rows and columns
  std::string certificate;   // hex certificate of the dual design
};

struct ClassifyStats {
  std::size_t seeds = 0;
  std::uint64_t solutions = 0;
  double seconds = 0;
};

/// Per-seed result: solution count and the canonical forms met.
struct SeedResult {
  std::uint64_t solutions = 0;
  std::set<PartialSolution> classes;
  double seconds = 0;
};

inline SeedResult run_seed(const ClassifyContext& ctx, const SeedTask& task) {
  auto t0 = std::chrono::steady_clock::now();
  SeedResult r;
  extend(ctx, task, [&](const PartialSolution& s) {
    ++r.solutions;
    r.classes.insert(canonical_solution(ctx, s).canon);
  });
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Runs run_seed over seeds[first, last) with `workers` threads; calls
/// on_done(index, result) under a lock as each seed finishes.
inline void run_seeds(const ClassifyContext& ctx, const std::vector<SeedTask>& seeds, std::size_t first,
                      std::size_t last, int workers,
                      const std::function<void(std::size_t, SeedResult&&)>& on_done,
                      const std::function<bool(std::size_t)>& skip = {}) {
  std::atomic<std::size_t> next{first};
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= last) return;
      if (skip && skip(i)) continue;
      auto r = run_seed(ctx, seeds[i]);
      std::lock_guard<std::mutex> lock(mu);
      on_done(i, std::move(r));
    }
  };
  workers = std::max(1, workers);
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

/// Builds the class list from merged canonical forms, sorted by (eta,
/// certificate). The dual-design certificates must be pairwise distinct and
/// their group orders must match the stabilisers found by canonical_solution.
inline std::vector<ClassRecord> build_records(const ClassifyContext& ctx, const std::set<PartialSolution>& merged) {
  std::vector<ClassRecord> out;
  for (const auto& sol : merged) {
    auto form = canonical_solution(ctx, sol);
    if (form.canon != sol) throw Error("classification: merged solution is not in canonical form");
    auto sq = ctx.square(sol);
    auto dualc = design_certificate(ctx.dual_design(sol));
    if (dualc.aut_order != form.stabilizer)
      throw Error("classification: dual automorphism order " + dualc.aut_order.str() +
                  " disagrees with stabiliser order " + std::to_string(form.stabilizer));
    // Square automorphisms: a dual automorphism with any renaming of the
    // treatments that share a dual block.
    BigInt aut_sq = dualc.aut_order;
    for (auto [b, m] : sol)
      for (int f = 2; f <= m; ++f) aut_sq *= f;
    out.push_back(
        ClassRecord{sol, sq, eta(underlying_design(sq)), aut_sq, dualc.aut_order, form.transposing, dualc.hex()});
  }
  std::sort(out.begin(), out.end(), [](const ClassRecord& a, const ClassRecord& b) {
    auto c = eta_compare(a.eta, b.eta);
    if (c != 0) return c < 0;
    return a.certificate < b.certificate;
  });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].certificate == out[i - 1].certificate)
      throw Error("classification: two canonical forms share a dual certificate");
  return out;
}

struct ClassifyOptions {
  int workers = 1;
  SeedPolicy policy = SeedPolicy::trivial_stabilizer();
};

/// One representative per isomorphism class of uniform (n x n)/(mu(n-1))
/// squares, sorted by (eta, certificate).
inline std::vector<ClassRecord> classify_uniform(int n, int mu, const ClassifyOptions& opt = {},
                                                 ClassifyStats* stats = nullptr) {
  auto t0 = std::chrono::steady_clock::now();
  ClassifyContext ctx(n, mu);
  auto seeds = seed_phase(ctx, opt.policy);
  std::set<PartialSolution> merged;
  std::uint64_t total = 0;
  run_seeds(ctx, seeds, 0, seeds.size(), opt.workers, [&](std::size_t, SeedResult&& r) {
    total += r.solutions;
    merged.merge(r.classes);
  });
  auto records = build_records(ctx, merged);
  if (stats) {
    stats->seeds = seeds.size();
    stats->solutions = total;
    stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return records;
}

}  // namespace uslsq
