#include "linconj/lp.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace linconj;

namespace {

LinearProgram box_program(Eigen::VectorXd c, Eigen::MatrixXd a, Eigen::VectorXd b, double lo, double hi) {
  LinearProgram lp;
  const auto v = c.size();
  lp.objective = std::move(c);
  lp.eq_matrix = std::move(a);
  lp.eq_rhs = std::move(b);
  lp.lower = Eigen::VectorXd::Constant(v, lo);
  lp.upper = Eigen::VectorXd::Constant(v, hi);
  return lp;
}

// Oracle: enumerate every basic solution (choice of basis plus lower/upper
// assignment of the rest) and keep the best feasible one.
std::optional<double> vertex_optimum(const LinearProgram& lp) {
  const int v = static_cast<int>(lp.num_vars());
  const int r = static_cast<int>(lp.num_rows());
  std::optional<double> best;
  for (unsigned mask = 0; mask < (1u << v); ++mask) {
    if (__builtin_popcount(mask) != r) continue;
    std::vector<int> basic, nonbasic;
    for (int j = 0; j < v; ++j) ((mask >> j) & 1u ? basic : nonbasic).push_back(j);
    Eigen::MatrixXd b(r, r);
    for (int k = 0; k < r; ++k) b.col(k) = lp.eq_matrix.col(basic[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    if (lu.rank() < r) continue;
    const int nn = static_cast<int>(nonbasic.size());
    for (unsigned side = 0; side < (1u << nn); ++side) {
      Eigen::VectorXd x(v);
      for (int k = 0; k < nn; ++k) {
        const int j = nonbasic[static_cast<std::size_t>(k)];
        x(j) = (side >> k) & 1u ? lp.upper(j) : lp.lower(j);
      }
      Eigen::VectorXd rhs = lp.eq_rhs;
      for (int j : nonbasic) rhs -= lp.eq_matrix.col(j) * x(j);
      const Eigen::VectorXd xb = lu.solve(rhs);
      bool ok = true;
      for (int k = 0; k < r; ++k) {
        const int j = basic[static_cast<std::size_t>(k)];
        x(j) = xb(k);
        ok = ok && x(j) >= lp.lower(j) - 1e-9 && x(j) <= lp.upper(j) + 1e-9;
      }
      if (!ok) continue;
      const double val = lp.objective.dot(x);
      if (!best || val > *best) best = val;
    }
  }
  return best;
}

LinearProgram random_program(std::mt19937& rng) {
  std::uniform_int_distribution<int> vars(2, 7);
  std::uniform_int_distribution<int> coef(-3, 3);
  const int v = vars(rng);
  const int r = std::uniform_int_distribution<int>(1, std::min(4, v - 1))(rng);
  while (true) {
    Eigen::MatrixXd a(r, v);
    Eigen::VectorXd c(v), lo(v), hi(v);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < v; ++j) a(i, j) = coef(rng);
    if (Eigen::FullPivLU<Eigen::MatrixXd>(a).rank() < r) continue;
    for (int j = 0; j < v; ++j) {
      c(j) = coef(rng);
      lo(j) = std::uniform_int_distribution<int>(-2, 0)(rng);
      hi(j) = lo(j) + std::uniform_int_distribution<int>(0, 3)(rng);
    }
    // Half of the programs get a right-hand side from a point inside the box.
    Eigen::VectorXd b(r);
    if (std::bernoulli_distribution(0.5)(rng)) {
      Eigen::VectorXd p(v);
      for (int j = 0; j < v; ++j) p(j) = std::uniform_real_distribution<double>(lo(j), hi(j))(rng);
      b = a * p;
    } else {
      for (int i = 0; i < r; ++i) b(i) = coef(rng);
    }
    LinearProgram lp;
    lp.objective = c;
    lp.eq_matrix = a;
    lp.eq_rhs = b;
    lp.lower = lo;
    lp.upper = hi;
    return lp;
  }
}

}  // namespace

TEST(Simplex, NoRowsPicksBestBound) {
  auto lp = box_program(Eigen::Vector3d(1, -1, 0), Eigen::MatrixXd(0, 3), Eigen::VectorXd(0), 0, 2);
  const auto out = solve(lp);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.value, 2.0, 1e-12);
  EXPECT_NEAR(out.point(0), 2.0, 1e-12);
  EXPECT_NEAR(out.point(1), 0.0, 1e-12);
}

TEST(Simplex, SimpleEquality) {
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  auto lp = box_program(Eigen::Vector2d(1, 2), a, Eigen::VectorXd::Constant(1, 1.0), 0, 1);
  const auto out = solve(lp);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.value, 2.0, 1e-9);
  EXPECT_NEAR(out.point(1), 1.0, 1e-9);
}

TEST(Simplex, DetectsInfeasibility) {
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  auto lp = box_program(Eigen::Vector2d(1, 1), a, Eigen::VectorXd::Constant(1, 3.0), 0, 1);
  EXPECT_EQ(solve(lp).status, LpStatus::Infeasible);
  EXPECT_FALSE(feasible(lp));
}

TEST(Simplex, HomogeneousZeroRhs) {
  Eigen::MatrixXd a(1, 3);
  a << 1, -2, 1;
  auto lp = box_program(Eigen::Vector3d(0, 1, 0), a, Eigen::VectorXd::Zero(1), 0, 1);
  const auto out = solve(lp);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.value, 1.0, 1e-9);
}

TEST(Simplex, RejectsMalformedPrograms) {
  auto lp = box_program(Eigen::Vector2d(1, 1), Eigen::MatrixXd::Ones(1, 2), Eigen::VectorXd::Ones(1), 0, 1);
  lp.upper(0) = -1;
  EXPECT_THROW(solve(lp), std::invalid_argument);
  lp.upper(0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(solve(lp), std::invalid_argument);
  lp.upper(0) = 1;
  lp.eq_rhs = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(solve(lp), std::invalid_argument);
}

TEST(Simplex, MatchesVertexEnumerationOnRandomPrograms) {
  std::mt19937 rng(20240611);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto lp = random_program(rng);
    const auto oracle = vertex_optimum(lp);
    const auto out = solve(lp);
    if (!oracle) {
      EXPECT_EQ(out.status, LpStatus::Infeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_TRUE(out.optimal()) << "trial " << trial;
    ++optimal;
    EXPECT_NEAR(out.value, *oracle, 1e-6) << "trial " << trial;
    EXPECT_LT((lp.eq_matrix * out.point - lp.eq_rhs).lpNorm<Eigen::Infinity>(), 1e-7);
    EXPECT_TRUE((out.point.array() >= lp.lower.array() - 1e-9).all());
    EXPECT_TRUE((out.point.array() <= lp.upper.array() + 1e-9).all());
  }
  EXPECT_GT(optimal, 100);
  EXPECT_GT(infeasible, 20);
}

TEST(Simplex, Deterministic) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto lp = random_program(rng);
    const auto a = solve(lp);
    const auto b = solve(lp);
    EXPECT_EQ(a.status, b.status);
    if (a.optimal()) EXPECT_EQ(a.point, b.point);
  }
}

TEST(Simplex, CountsSolves) {
  SimplexSolver s;
  auto lp = box_program(Eigen::Vector2d(1, 1), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), 0, 1);
  s.solve(lp);
  s.feasible(lp);
  EXPECT_EQ(s.solves(), 2u);
}

TEST(Simplex, LongDoublePrecision) {
  BasicLinearProgram<long double> lp;
  lp.objective = Eigen::Matrix<long double, 2, 1>(1, 2);
  lp.eq_matrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>::Ones(1, 2);
  lp.eq_rhs = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Constant(1, 1.5L);
  lp.lower = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Zero(2);
  lp.upper = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Ones(2);
  const auto out = BoundedSimplex<long double>().solve(lp);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(static_cast<double>(out.value), 2.5, 1e-12);
}
