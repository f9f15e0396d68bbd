#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_support.hpp"
#include "uslsq/classify.hpp"
#include "uslsq/isomorph.hpp"

namespace uslsq {
namespace {

TEST(Hamming, DegreesAndNonEdges) {
  for (int n = 2; n <= 6; ++n) {
    HammingGraph h(n);
    EXPECT_EQ(h.vertices(), n * n);
    for (int a = 0; a < n * n; ++a) EXPECT_EQ(h.degree(a), 2 * (n - 1));
    EXPECT_EQ(static_cast<int>(h.nonedges().size()), n * n * (n - 1) * (n - 1) / 2);
    for (std::size_t e = 0; e < h.nonedges().size(); ++e) {
      auto [a, b] = h.nonedges()[e];
      EXPECT_FALSE(h.adjacent(a, b));
      EXPECT_EQ(h.nonedge(a, b), static_cast<int>(e));
      EXPECT_EQ(h.nonedge(b, a), static_cast<int>(e));
    }
  }
}

TEST(CoCliques, AreMaximumIndependentSets) {
  EXPECT_EQ(cocliques(3).size(), 6u);
  EXPECT_EQ(cocliques(5).size(), 120u);
  for (int n = 3; n <= 5; ++n) {
    HammingGraph h(n);
    auto bs = cocliques(n);
    EXPECT_TRUE(std::is_sorted(bs.begin(), bs.end()));
    for (std::size_t i = 0; i < bs.size(); ++i) {
      EXPECT_EQ(perm_rank(bs[i].perm), static_cast<int>(i));
      auto vs = bs[i].vertices();
      for (int a : vs)
        for (int b : vs) EXPECT_FALSE(h.adjacent(a, b));
    }
  }
  // Brute force over all 3-subsets of H(2,3).
  HammingGraph h(3);
  int count = 0;
  for (int a = 0; a < 9; ++a)
    for (int b = a + 1; b < 9; ++b)
      for (int c = b + 1; c < 9; ++c) count += !h.adjacent(a, b) && !h.adjacent(a, c) && !h.adjacent(b, c);
  EXPECT_EQ(count, 6);
}

// The 2 (n!)^2 automorphisms of H(2,n) acting on blocks, computed without the
// library's image routine: cell (i, j) goes to (rows[i], cols[j]), then is
// transposed if t.
std::vector<std::vector<int>> block_actions(int n) {
  auto blocks = cocliques(n);
  std::vector<std::vector<int>> out;
  std::vector<int> rows(n), cols(n);
  std::iota(rows.begin(), rows.end(), 0);
  do {
    std::iota(cols.begin(), cols.end(), 0);
    do {
      for (int t = 0; t < 2; ++t) {
        std::vector<int> act;
        for (const auto& b : blocks) {
          std::vector<int> q(n);
          for (int i = 0; i < n; ++i) {
            int r = rows[i], c = cols[b.perm[i]];
            if (t) q[c] = r;
            else q[r] = c;
          }
          auto it = std::find(blocks.begin(), blocks.end(), CoCliqueBlock{q});
          act.push_back(static_cast<int>(it - blocks.begin()));
        }
        out.push_back(std::move(act));
      }
    } while (std::next_permutation(cols.begin(), cols.end()));
  } while (std::next_permutation(rows.begin(), rows.end()));
  return out;
}

PartialSolution act_on(const std::vector<int>& act, const PartialSolution& s) {
  PartialSolution img;
  for (auto [b, m] : s) img.emplace_back(act[b], m);
  std::sort(img.begin(), img.end());
  return img;
}

struct Oracle {
  std::size_t solutions = 0;
  std::set<PartialSolution> orbit_minima;
  std::set<std::string> certificates;
};

Oracle naive_classification(int n, int mu) {
  ClassifyContext ctx(n, mu);
  auto seeds = seed_phase(ctx, SeedPolicy::naive());
  EXPECT_EQ(seeds.size(), 1u);
  auto actions = block_actions(n);
  Oracle o;
  for (const auto& seed : seeds)
    for (const auto& s : extend(ctx, seed)) {
      EXPECT_TRUE(ctx.is_solution(s));
      ++o.solutions;
      PartialSolution best = s;
      for (const auto& a : actions) best = std::min(best, act_on(a, s));
      if (o.orbit_minima.insert(best).second) o.certificates.insert(design_certificate(ctx.dual_design(best)).hex());
    }
  return o;
}

// Every solution on a tiny case, by trying all multiplicity vectors.
std::size_t exhaustive_solution_count(int n, int mu) {
  ClassifyContext ctx(n, mu);
  int nb = ctx.block_count();
  std::size_t count = 0;
  std::vector<int> m(nb, 0);
  for (;;) {
    PartialSolution s;
    for (int b = 0; b < nb; ++b)
      if (m[b]) s.emplace_back(b, m[b]);
    count += ctx.is_solution(s);
    int i = 0;
    while (i < nb && m[i] == mu) m[i++] = 0;
    if (i == nb) break;
    ++m[i];
  }
  return count;
}

struct Case {
  int n, mu;
};

void PrintTo(const Case& c, std::ostream* os) { *os << "(" << c.n << "," << c.mu << ")"; }

class OracleEquivalence : public ::testing::TestWithParam<Case> {};

TEST_P(OracleEquivalence, SymmetricSearchMatchesNaiveSearch) {
  auto [n, mu] = GetParam();
  auto oracle = naive_classification(n, mu);
  if (n == 3) {
    EXPECT_EQ(oracle.solutions, exhaustive_solution_count(n, mu));
  }
  EXPECT_EQ(oracle.certificates.size(), oracle.orbit_minima.size());
  auto records = classify_uniform(n, mu);
  std::set<std::string> found;
  for (const auto& r : records) found.insert(r.certificate);
  EXPECT_EQ(found.size(), records.size());
  EXPECT_EQ(found, oracle.certificates);
}

INSTANTIATE_TEST_SUITE_P(Small, OracleEquivalence, ::testing::Values(Case{3, 1}, Case{3, 2}, Case{4, 1}, Case{4, 2}),
                         [](const auto& info) {
                           return "n" + std::to_string(info.param.n) + "mu" + std::to_string(info.param.mu);
                         });

TEST(Classify, KnownClassCounts) {
  EXPECT_EQ(classify_uniform(3, 1).size(), 1u);
  EXPECT_EQ(classify_uniform(3, 2).size(), 1u);
  EXPECT_EQ(classify_uniform(4, 1).size(), 1u);
  EXPECT_EQ(classify_uniform(5, 1).size(), 1u);
  EXPECT_EQ(classify_uniform(5, 2).size(), 10u);
  EXPECT_EQ(classify_uniform(6, 1).size(), 0u);
}

// Automorphisms of the square that do not transpose: rows and columns get
// distinct colours.
BigInt non_transposing_aut(const SemiLatinSquare& s) {
  auto g = square_graph(s);
  for (int j = 0; j < s.n(); ++j) g.set_color(s.n() + j, 3);
  return canonical_form(g).aut_order;
}

class RecordConsistency : public ::testing::TestWithParam<Case> {};

TEST_P(RecordConsistency, FieldsMatchIndependentComputation) {
  auto [n, mu] = GetParam();
  auto records = classify_uniform(n, mu);
  ClassifyContext ctx(n, mu);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    EXPECT_TRUE(ctx.is_solution(r.solution));
    auto u = uniformity(r.square);
    EXPECT_TRUE(u.uniform);
    EXPECT_EQ(u.mu, mu);
    EXPECT_EQ(r.eta, eta(underlying_design(r.square)));
    EXPECT_EQ(r.aut_square, aut_order(r.square));
    EXPECT_EQ(r.aut_dual, aut_order(dual(r.square)));
    EXPECT_EQ(r.certificate, design_certificate(dual(r.square)).hex());
    EXPECT_EQ(r.transposing, aut_order(r.square) == 2 * non_transposing_aut(r.square));
    if (i > 0) {
      EXPECT_FALSE(eta_less(r.eta, records[i - 1].eta));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Small, RecordConsistency, ::testing::Values(Case{3, 2}, Case{4, 2}, Case{5, 2}),
                         [](const auto& info) {
                           return "n" + std::to_string(info.param.n) + "mu" + std::to_string(info.param.mu);
                         });

TEST(Classify, OutputIndependentOfWorkerCount) {
  std::vector<std::vector<ClassRecord>> runs;
  for (int w : {1, 2, 4}) runs.push_back(classify_uniform(5, 2, {w, SeedPolicy::trivial_stabilizer()}));
  for (std::size_t i = 1; i < runs.size(); ++i) {
    ASSERT_EQ(runs[i].size(), runs[0].size());
    for (std::size_t j = 0; j < runs[0].size(); ++j) {
      EXPECT_EQ(runs[i][j].solution, runs[0][j].solution);
      EXPECT_EQ(runs[i][j].certificate, runs[0][j].certificate);
      EXPECT_EQ(runs[i][j].square.cells(), runs[0][j].square.cells());
    }
  }
}

TEST(Classify, SeedsWithOpenPoolHaveTrivialStabilizer) {
  ClassifyContext ctx(5, 2);
  auto seeds = seed_phase(ctx);
  EXPECT_FALSE(seeds.empty());
  for (const auto& s : seeds) {
    if (s.pool.empty()) {
      EXPECT_TRUE(ctx.is_solution(s.partial));
    } else {
      EXPECT_TRUE(has_trivial_stabilizer(ctx, s.partial));
    }
  }
}

TEST(Classify, FixedDepthSeedsGiveSameClasses) {
  ClassifyOptions opt;
  opt.policy = SeedPolicy{2, true};
  auto a = classify_uniform(4, 2, opt);
  auto b = classify_uniform(4, 2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].certificate, b[i].certificate);
}

TEST(CanonicalSolution, InvariantUnderHammingAutomorphisms) {
  ClassifyContext ctx(5, 2);
  auto seeds = seed_phase(ctx);
  auto actions = block_actions(5);
  std::mt19937 rng(9);
  std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
  int checked = 0;
  for (std::size_t i = 0; i < seeds.size() && checked < 60; i += 7) {
    for (const auto& s : extend(ctx, seeds[i])) {
      auto f = canonical_solution(ctx, s);
      EXPECT_TRUE(ctx.is_solution(f.canon));
      EXPECT_EQ(BigInt(f.stabilizer), aut_order(ctx.dual_design(s)));
      for (int t = 0; t < 5; ++t) EXPECT_EQ(canonical_solution(ctx, act_on(actions[pick(rng)], s)).canon, f.canon);
      if (++checked >= 60) break;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Classify, RejectsBadParameters) {
  EXPECT_THROW(ClassifyContext(2, 1), Error);
  EXPECT_THROW(ClassifyContext(4, 0), Error);
}

TEST(Classify, SquareAndDualDesignCorrespond) {
  ClassifyContext ctx(4, 2);
  for (const auto& r : classify_uniform(4, 2)) {
    EXPECT_TRUE(designs_are_isomorphic(dual(r.square), ctx.dual_design(r.solution)));
    EXPECT_EQ(r.square.k(), 2 * 3);
  }
}

}  // namespace
}  // namespace uslsq
