#include "dpshdg/linalg.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>
#include <sstream>

using namespace dpshdg;

namespace {

Eigen::MatrixXd to_dense(const SparseMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      d(i, j) = m.get(i, j);
    }
  }
  return d;
}

SparseMatrix from_dense(const Eigen::MatrixXd& d) {
  std::vector<Triplet> t;
  for (Index i = 0; i < d.rows(); ++i) {
    for (Index j = 0; j < d.cols(); ++j) {
      if (d(i, j) != 0.0) {
        t.push_back({i, j, d(i, j)});
      }
    }
  }
  return SparseMatrix::from_triplets(static_cast<Index>(d.rows()), static_cast<Index>(d.cols()), t);
}

}  // namespace

TEST(SparseMatrix, AssemblyMatchesDenseAccumulation) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> idx(0, 49);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(50, 50);
  std::vector<Triplet> t;
  for (int n = 0; n < 2000; ++n) {
    const Triplet e{idx(rng), idx(rng), val(rng)};
    oracle(e.row, e.col) += e.value;
    t.push_back(e);
  }
  const SparseMatrix m = SparseMatrix::from_triplets(50, 50, t);
  EXPECT_LT((to_dense(m) - oracle).cwiseAbs().maxCoeff(), 1e-14);

  std::vector<double> x(50);
  for (double& v : x) {
    v = val(rng);
  }
  const std::vector<double> y = m.multiply(x);
  const Eigen::VectorXd yo = oracle * Eigen::Map<Eigen::VectorXd>(x.data(), 50);
  for (int i = 0; i < 50; ++i) {
    EXPECT_NEAR(y[i], yo[i], 1e-13);
  }
  EXPECT_LT((to_dense(m.transpose()) - oracle.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(m.symmetry_defect(),
              (oracle - oracle.transpose()).cwiseAbs().maxCoeff() / oracle.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SparseMatrix, RejectsOutOfRange) {
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{0, 2, 1.0}}), std::out_of_range);
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{-1, 0, 1.0}}), std::out_of_range);
}

TEST(SparseMatrix, CoordinateDump) {
  const SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{0, 1, 2.5}, {1, 0, -1.0}});
  std::ostringstream os;
  m.write_coordinate(os);
  std::istringstream is(os.str());
  int i = 0, j = 0;
  double v = 0.0;
  ASSERT_TRUE(is >> i >> j >> v);
  EXPECT_EQ(i, 0);
  EXPECT_EQ(j, 1);
  EXPECT_EQ(v, 2.5);
}

TEST(DirectSolve, SaddlePoint2x2) {
  // [[2, 1], [1, 0]] x = [3, 1]  ->  x = (1, 1); zero diagonal needs pivoting.
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}});
  SolveReport rep;
  const auto x = solve_direct(a, {3.0, 1.0}, &rep);
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  EXPECT_LT(rep.relative_residual, 1e-15);
  EXPECT_EQ(rep.unknowns, 2);
}

TEST(DirectSolve, RandomSpd) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  Eigen::MatrixXd g(100, 100);
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      g(i, j) = n(rng);
    }
  }
  const Eigen::MatrixXd spd = g * g.transpose() + 100.0 * Eigen::MatrixXd::Identity(100, 100);
  std::vector<double> b(100);
  for (double& v : b) {
    v = n(rng);
  }
  SolveReport rep;
  solve_direct(from_dense(spd), b, &rep);
  EXPECT_LE(rep.relative_residual, 1e-11);
}

TEST(DirectSolve, RecoversKnownSolution) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // Indefinite, nonsymmetric, well conditioned.
  const int n = 80;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = (i % 2 == 0 ? 4.0 : -4.0) + u(rng);
    a(i, (i + 7) % n) = u(rng);
    a((i + 3) % n, i) = u(rng);
  }
  Eigen::VectorXd x0(n);
  for (int i = 0; i < n; ++i) {
    x0[i] = u(rng);
  }
  const Eigen::VectorXd b = a * x0;
  const auto x = solve_direct(from_dense(a), std::vector<double>(b.data(), b.data() + n));
  EXPECT_LT((Eigen::Map<const Eigen::VectorXd>(x.data(), n) - x0).norm() / x0.norm(), 1e-8);
}

TEST(DirectSolve, ConditionEstimate) {
  const SparseMatrix a = SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 1e-6}, {2, 2, 2.0}});
  SolveReport rep;
  solve_direct(a, {1.0, 1.0, 1.0}, &rep);
  // Exact 1-norm reciprocal condition number: 1e-6 / 2.
  EXPECT_NEAR(rep.reciprocal_condition, 5e-7, 1e-12);
}

TEST(DirectSolve, SingularThrows) {
  const SparseMatrix a = SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  EXPECT_THROW(solve_direct(a, {1.0, 2.0, 3.0}), std::runtime_error);
}

TEST(DirectSolve, ShapeErrors) {
  const SparseMatrix a = SparseMatrix::from_triplets(2, 3, {{0, 0, 1.0}});
  EXPECT_THROW(solve_direct(a, {1.0, 1.0}), std::invalid_argument);
  const SparseMatrix sq = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  EXPECT_THROW(solve_direct(sq, {1.0}), std::invalid_argument);
}
