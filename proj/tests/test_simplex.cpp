#include "mrav/simplex.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mrav;

namespace {
LinearProgram lp2(std::initializer_list<double> c) {
  LinearProgram lp;
  lp.c = Eigen::Map<const VecX>(c.begin(), static_cast<Eigen::Index>(c.size()));
  return lp;
}
}  // namespace

TEST(Simplex, TextbookMaximum) {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
  auto lp = lp2({3, 5});
  lp.a_ub = (MatX(3, 2) << 1, 0, 0, 2, 3, 2).finished();
  lp.b_ub = (VecX(3) << 4, 12, 18).finished();
  const auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 36.0, 1e-10);
  EXPECT_NEAR(r.x[0], 2.0, 1e-10);
  EXPECT_NEAR(r.x[1], 6.0, 1e-10);
}

TEST(Simplex, EqualityAndNegativeRhs) {
  // max x + y, x + 2y = 4, -x <= -1 -> x = 4, y = 0
  auto lp = lp2({1, 1});
  lp.a_eq = (MatX(1, 2) << 1, 2).finished();
  lp.b_eq = VecX::Constant(1, 4);
  lp.a_ub = (MatX(1, 2) << -1, 0).finished();
  lp.b_ub = VecX::Constant(1, -1);
  const auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 4.0, 1e-10);
}

TEST(Simplex, Infeasible) {
  auto lp = lp2({1});
  lp.a_eq = (MatX(1, 1) << 1).finished();
  lp.b_eq = VecX::Constant(1, -1);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Infeasible);
}

TEST(Simplex, Unbounded) {
  auto lp = lp2({1, 0});
  lp.a_ub = (MatX(1, 2) << -1, 1).finished();
  lp.b_ub = VecX::Constant(1, 1);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(Simplex, RedundantEqualities) {
  auto lp = lp2({1, 2, 0});
  lp.a_eq = (MatX(2, 3) << 1, 1, 1, 2, 2, 2).finished();
  lp.b_eq = (VecX(2) << 1, 2).finished();
  const auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-10);
}

TEST(Simplex, DimensionMismatchThrows) {
  auto lp = lp2({1, 1});
  lp.a_ub = MatX::Ones(1, 3);
  lp.b_ub = VecX::Ones(1);
  EXPECT_THROW(solve_lp(lp), InputError);
}

TEST(Simplex, DegenerateCycleProne) {
  // Beale's cycling example; Dantzig pricing alone cycles.
  auto lp = lp2({0.75, -150, 0.02, -6});
  lp.a_ub = (MatX(3, 4) << 0.25, -60, -0.04, 9, 0.5, -90, -0.02, 3, 0, 0, 1, 0).finished();
  lp.b_ub = (VecX(3) << 0, 0, 1).finished();
  const auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 0.05, 1e-10);
}

TEST(Simplex, BoxLpsAgainstClosedForm) {
  // max c.x over the box 0 <= x <= b has value sum max(c_i, 0) b_i
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + k % 8;
    LinearProgram lp;
    lp.c = VecX::NullaryExpr(n, [&] { return u(rng); });
    lp.a_ub = MatX::Identity(n, n);
    lp.b_ub = VecX::NullaryExpr(n, [&] { return 1.0 + u(rng); });
    const auto r = solve_lp(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.objective, lp.c.cwiseMax(0.0).dot(lp.b_ub), 1e-10);
  }
}
