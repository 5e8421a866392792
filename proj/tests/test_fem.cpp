#include "dpshdg/fem.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dpshdg;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// Integral of x^a y^b over the reference triangle.
double monomial_tri(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

}  // namespace

TEST(Quadrature, SegmentExactness) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d = 0; d <= kMaxQuadDegree; ++d) {
    const QuadRule<1> r = quad_seg(d);
    std::vector<double> c(d + 1);
    double exact = 0.0;
    for (int i = 0; i <= d; ++i) {
      c[i] = u(rng);
      exact += c[i] / (i + 1);
    }
    double approx = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
      double v = 0.0;
      for (int i = d; i >= 0; --i) {
        v = v * r.points[q] + c[i];
      }
      approx += r.weights[q] * v;
    }
    EXPECT_NEAR(approx, exact, 1e-13 * std::max(1.0, std::abs(exact))) << "degree " << d;
  }
}

TEST(Quadrature, TriangleExactness) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d = 0; d <= kMaxQuadDegree; ++d) {
    const QuadRule<2> r = quad_tri(d);
    double exact = 0.0;
    double approx = 0.0;
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        const double c = u(rng);
        exact += c * monomial_tri(a, b);
        for (std::size_t q = 0; q < r.size(); ++q) {
          approx += c * r.weights[q] * std::pow(r.points[q].x(), a) * std::pow(r.points[q].y(), b);
        }
      }
    }
    EXPECT_NEAR(approx, exact, 1e-13 * std::max(1.0, std::abs(exact))) << "degree " << d;
    for (const Vec2& p : r.points) {
      EXPECT_GE(p.x(), 0.0);
      EXPECT_GE(p.y(), 0.0);
      EXPECT_LE(p.x() + p.y(), 1.0 + 1e-15);
    }
  }
}

TEST(Quadrature, RejectsUnsupportedDegree) {
  EXPECT_THROW(quad_tri(-1), std::invalid_argument);
  EXPECT_THROW(quad_seg(kMaxQuadDegree + 1), std::invalid_argument);
}

TEST(Basis, TriangleOrthonormal) {
  for (int k = 0; k <= kMaxBasisDegree; ++k) {
    const TriBasis basis(k);
    ASSERT_EQ(basis.size(), TriBasis::dimension(k));
    const QuadRule<2> r = quad_tri(2 * k);
    const BasisTable t = basis.tabulate(r.points);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (std::size_t q = 0; q < r.size(); ++q) {
      const auto row = t.values.row(static_cast<Eigen::Index>(q));
      mass += r.weights[q] * row.transpose() * row;
    }
    // Orthonormal with respect to the reference triangle of area 1/2, scaled to unit mass.
    EXPECT_LT((mass - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff(), 1e-12)
        << "degree " << k;
  }
}

TEST(Basis, TriangleGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.45);
  for (int k = 1; k <= kMaxBasisDegree; ++k) {
    const TriBasis basis(k);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec2 p(u(rng), u(rng));
      const double h = 1e-6;
      const Eigen::MatrixX2d g = basis.gradients(p);
      const Eigen::VectorXd dx = (basis.values(p + Vec2(h, 0)) - basis.values(p - Vec2(h, 0))) / (2 * h);
      const Eigen::VectorXd dy = (basis.values(p + Vec2(0, h)) - basis.values(p - Vec2(0, h))) / (2 * h);
      EXPECT_LT((g.col(0) - dx).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LT((g.col(1) - dy).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(Basis, SegmentOrthonormal) {
  for (int k = 0; k <= kMaxBasisDegree; ++k) {
    const SegBasis basis(k);
    const QuadRule<1> r = quad_seg(2 * k);
    const Eigen::MatrixXd t = basis.tabulate(r.points);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (std::size_t q = 0; q < r.size(); ++q) {
      const auto row = t.row(static_cast<Eigen::Index>(q));
      mass += r.weights[q] * row.transpose() * row;
    }
    EXPECT_LT((mass - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(AffineMap, RoundTripAndOrientation) {
  const AffineMap m = physical_map({Point(0.2, 0.1), Point(1.0, 0.3), Point(0.4, 0.9)});
  EXPECT_GT(m.det, 0.0);
  const Vec2 ref(0.3, 0.2);
  EXPECT_LT((m.to_reference(m.to_physical(ref)) - ref).norm(), 1e-15);
  EXPECT_LT((m.to_physical(Vec2(1, 0)) - Point(1.0, 0.3)).norm(), 1e-15);
  EXPECT_THROW(physical_map({Point(0, 0), Point(0, 1), Point(1, 0)}), std::invalid_argument);
}
