#include <gtest/gtest.h>

#include <cmath>

#include "coopsim/rng.hpp"
#include "coopsim/simplex.hpp"

using namespace coopsim::simplex;

TEST(Simplex, SingleUpperBound) {
  Problem p{{1.0}, {{{{0, 1.0}}, Sense::less_equal, 3.0}}};
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_DOUBLE_EQ(s.x[0], 3.0);
  EXPECT_DOUBLE_EQ(s.objective, 3.0);
}

TEST(Simplex, DetectsInfeasible) {
  Problem p{{1.0}, {{{{0, 1.0}}, Sense::less_equal, 1.0}, {{{0, 1.0}}, Sense::greater_equal, 2.0}}};
  EXPECT_EQ(solve(p).status, Status::infeasible);
}

TEST(Simplex, DetectsUnbounded) {
  Problem p{{1.0, 0.0}, {{{{0, 1.0}, {1, -1.0}}, Sense::less_equal, 1.0}}};
  EXPECT_EQ(solve(p).status, Status::unbounded);
}

TEST(Simplex, TextbookTwoVariable) {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
  Problem p{{3.0, 5.0},
            {{{{0, 1.0}}, Sense::less_equal, 4.0},
             {{{1, 2.0}}, Sense::less_equal, 12.0},
             {{{0, 3.0}, {1, 2.0}}, Sense::less_equal, 18.0}}};
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, 36.0, 1e-9);
  EXPECT_NEAR(s.x[0], 2.0, 1e-9);
  EXPECT_NEAR(s.x[1], 6.0, 1e-9);
}

TEST(Simplex, EqualityAndNegativeRhs) {
  // max -x - y, x + y = 2, x - y <= -1  ->  value -2 with y >= 1.5
  Problem p{{-1.0, -1.0},
            {{{{0, 1.0}, {1, 1.0}}, Sense::equal, 2.0}, {{{0, 1.0}, {1, -1.0}}, Sense::less_equal, -1.0}}};
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, -2.0, 1e-12);
  EXPECT_LE(max_violation(p, s.x), 1e-12);
}

TEST(Simplex, RedundantEqualityRows) {
  Problem p{{1.0, 1.0},
            {{{{0, 1.0}, {1, 1.0}}, Sense::equal, 1.0},
             {{{0, 2.0}, {1, 2.0}}, Sense::equal, 2.0},
             {{{0, 1.0}}, Sense::less_equal, 0.25}}};
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

TEST(Simplex, DegenerateCyclingExample) {
  // Beale's example cycles under naive Dantzig pricing without an anti-cycling rule.
  Problem p{{0.75, -150.0, 0.02, -6.0},
            {{{{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, Sense::less_equal, 0.0},
             {{{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, Sense::less_equal, 0.0},
             {{{2, 1.0}}, Sense::less_equal, 1.0}}};
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, 0.05, 1e-9);
}

TEST(Simplex, Deterministic) {
  Problem p{{1.0, 1.0, 1.0},
            {{{{0, 1.0}, {1, 1.0}}, Sense::less_equal, 1.0},
             {{{1, 1.0}, {2, 1.0}}, Sense::less_equal, 1.0},
             {{{0, 1.0}, {2, 1.0}}, Sense::less_equal, 1.0}}};
  const auto a = solve(p), b = solve(p);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.pivots, b.pivots);
  EXPECT_NEAR(a.objective, 1.5, 1e-12);
}

TEST(Simplex, RejectsUnknownColumn) {
  Problem p{{1.0}, {{{{1, 1.0}}, Sense::less_equal, 1.0}}};
  EXPECT_THROW(solve(p), std::out_of_range);
}

TEST(Simplex, RandomFeasibleProblems) {
  // x0 is feasible by construction; the optimum must satisfy every row and beat it.
  coopsim::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(10), m = 1 + rng.uniform_int(12);
    std::vector<double> x0(n);
    for (auto& v : x0) v = rng.uniform01();
    Problem p;
    p.objective.resize(n);
    for (auto& c : p.objective) c = rng.uniform01() - 0.3;
    for (std::size_t i = 0; i < m; ++i) {
      Row row;
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (rng.bernoulli(0.6)) {
          const double a = std::round((rng.uniform01() * 4 - 1) * 4) / 4;  // coarse values make ties
          row.terms.push_back({j, a});
          lhs += a * x0[j];
        }
      const auto kind = rng.uniform_int(4);
      row.sense = kind == 0 ? Sense::greater_equal : kind == 1 ? Sense::equal : Sense::less_equal;
      row.rhs = row.sense == Sense::equal ? lhs : row.sense == Sense::greater_equal ? lhs - rng.uniform01() : lhs + rng.uniform01();
      p.rows.push_back(std::move(row));
    }
    Row box;  // keeps the problem bounded
    for (std::size_t j = 0; j < n; ++j) box.terms.push_back({j, 1.0});
    box.rhs = static_cast<double>(n);
    p.rows.push_back(box);

    const auto s = solve(p);
    ASSERT_EQ(s.status, Status::optimal) << trial;
    EXPECT_LE(max_violation(p, s.x), 1e-9) << trial;
    double at_x0 = 0.0;
    for (std::size_t j = 0; j < n; ++j) at_x0 += p.objective[j] * x0[j];
    EXPECT_GE(s.objective, at_x0 - 1e-9) << trial;
  }
}
