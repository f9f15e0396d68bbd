#include <gtest/gtest.h>

#include "uslsq/algebra.hpp"

namespace uslsq {
namespace {

class FieldAxioms : public ::testing::TestWithParam<int> {};

TEST_P(FieldAxioms, TablesFormAField) {
  int q = GetParam();
  auto f = finite_field(q);
  ASSERT_EQ(f.order(), q);
  int p = f.characteristic();
  int m = f.degree();
  int pm = 1;
  for (int i = 0; i < m; ++i) pm *= p;
  EXPECT_EQ(pm, q);
  for (int a = 0; a < q; ++a) {
    EXPECT_EQ(f.add(a, 0), a);
    EXPECT_EQ(f.mul(a, 1), a);
    EXPECT_EQ(f.mul(a, 0), 0);
    EXPECT_EQ(f.add(a, f.neg(a)), 0);
    if (a) {
      EXPECT_EQ(f.mul(a, f.inv(a)), 1);
    }
    for (int b = 0; b < q; ++b) {
      EXPECT_EQ(f.add(a, b), f.add(b, a));
      EXPECT_EQ(f.mul(a, b), f.mul(b, a));
      if (a && b) {
        EXPECT_NE(f.mul(a, b), 0);
      }
      for (int c = 0; c < q; ++c) {
        EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        EXPECT_EQ(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
      }
    }
  }
}

TEST_P(FieldAxioms, MultiplicativeGroupIsCyclic) {
  int q = GetParam();
  auto f = finite_field(q);
  bool found = false;
  for (int g = 1; g < q && !found; ++g) {
    int x = 1, order = 0;
    do {
      x = f.mul(x, g);
      ++order;
    } while (x != 1);
    found = order == q - 1;
  }
  EXPECT_TRUE(found);
}

INSTANTIATE_TEST_SUITE_P(SmallOrders, FieldAxioms, ::testing::Values(2, 3, 4, 5, 7, 8, 9, 16, 25, 27));

TEST(FiniteField, RejectsNonPrimePowers) {
  for (int q : {0, 1, 6, 10, 12, 15})
    EXPECT_THROW(finite_field(q), Error) << q;
}

TEST(FiniteField, SameOrderGivesSameTables) { EXPECT_TRUE(finite_field(9) == finite_field(9)); }

TEST(PrimePower, Decomposes) {
  EXPECT_EQ(prime_power(8), std::make_pair(2, 3));
  EXPECT_EQ(prime_power(49), std::make_pair(7, 2));
  EXPECT_EQ(prime_power(13), std::make_pair(13, 1));
  EXPECT_FALSE(prime_power(12));
}

class BoseMols : public ::testing::TestWithParam<int> {};

TEST_P(BoseMols, PairwiseOrthogonalLatinSquares) {
  int q = GetParam();
  auto ls = bose_mols(q);
  ASSERT_EQ(static_cast<int>(ls.size()), q - 1);
  for (const auto& l : ls) {
    ASSERT_EQ(l.order(), q);
    for (int i = 0; i < q; ++i) {
      std::vector<int> row(q, 0), col(q, 0);
      for (int j = 0; j < q; ++j) {
        ++row[l.at(i, j)];
        ++col[l.at(j, i)];
      }
      EXPECT_EQ(std::count(row.begin(), row.end(), 1), q);
      EXPECT_EQ(std::count(col.begin(), col.end(), 1), q);
    }
  }
  for (std::size_t a = 0; a < ls.size(); ++a)
    for (std::size_t b = a + 1; b < ls.size(); ++b) EXPECT_TRUE(are_orthogonal(ls[a], ls[b]));
}

INSTANTIATE_TEST_SUITE_P(PrimePowers, BoseMols, ::testing::Values(3, 4, 5, 7, 8, 9));

TEST(LatinSquare, RejectsNonLatinGrid) {
  EXPECT_THROW(LatinSquare::from_grid({{0, 1}, {0, 1}}), Error);
  EXPECT_THROW(LatinSquare::from_grid({{0, 2}, {1, 0}}), Error);
}

TEST(LatinSquare, OrthogonalityDetectsRepeatedPairs) {
  auto a = LatinSquare::from_grid({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}});
  EXPECT_FALSE(are_orthogonal(a, a));
}

}  // namespace
}  // namespace uslsq
