#include "dpshdg/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dpshdg {

namespace {

// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  auto legendre = [n](double z, double& dp) {
    double p0 = 1.0;
    double p1 = z;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    return p1;
  };
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dz = legendre(z, dp) / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        break;
      }
    }
    legendre(z, dp);
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

void check_degree(int d) {
  if (d < 0 || d > kMaxQuadDegree) {
    throw std::invalid_argument("quadrature degree " + std::to_string(d) + " outside [0, " +
                                std::to_string(kMaxQuadDegree) + "]");
  }
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) {
    r *= i;
  }
  return r;
}

}  // namespace

QuadRule<1> quad_seg(int d) {
  check_degree(d);
  const int n = d / 2 + 1;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(n, x, w);
  QuadRule<1> rule;
  rule.exactness = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    rule.points.push_back(0.5 * (x[i] + 1.0));
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

QuadRule<2> quad_tri(int d) {
  check_degree(d);
  // The collapsed map (u, v) -> (u (1 - v), v) has Jacobian (1 - v), which
  // raises the degree in v by one.
  const int n = (d + 3) / 2;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(n, x, w);
  QuadRule<2> rule;
  rule.exactness = 2 * n - 2;
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (x[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (x[j] + 1.0);
      rule.points.emplace_back(u * (1.0 - v), v);
      rule.weights.push_back(0.25 * w[i] * w[j] * (1.0 - v));
    }
  }
  return rule;
}

TriBasis::TriBasis(int degree) : degree_(degree) {
  if (degree < 0 || degree > kMaxBasisDegree) {
    throw std::invalid_argument("unsupported triangle basis degree " + std::to_string(degree));
  }
  for (int total = 0; total <= degree; ++total) {
    for (int b = 0; b <= total; ++b) {
      exponents_.push_back({total - b, b});
    }
  }
  const int n = size();
  // Exact reference mass matrix of monomials: int x^a y^b = a! b! / (a + b + 2)!.
  // It is badly conditioned at higher degree, so factorize in extended precision.
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatL mass(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int a = exponents_[i][0] + exponents_[j][0];
      const int b = exponents_[i][1] + exponents_[j][1];
      mass(i, j) = static_cast<long double>(factorial(a)) * factorial(b) / factorial(a + b + 2);
    }
  }
  Eigen::LLT<MatL> llt(mass);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("monomial mass matrix is not positive definite");
  }
  const MatL lower = llt.matrixL();
  coefficients_ = lower.triangularView<Eigen::Lower>().solve(MatL::Identity(n, n)).cast<double>();
}

Eigen::VectorXd TriBasis::values(const Vec2& ref) const {
  const int n = size();
  Eigen::VectorXd mono(n);
  for (int j = 0; j < n; ++j) {
    mono[j] = std::pow(ref.x(), exponents_[j][0]) * std::pow(ref.y(), exponents_[j][1]);
  }
  return coefficients_ * mono;
}

Eigen::MatrixX2d TriBasis::gradients(const Vec2& ref) const {
  const int n = size();
  Eigen::MatrixX2d mono(n, 2);
  for (int j = 0; j < n; ++j) {
    const int a = exponents_[j][0];
    const int b = exponents_[j][1];
    mono(j, 0) = a == 0 ? 0.0 : a * std::pow(ref.x(), a - 1) * std::pow(ref.y(), b);
    mono(j, 1) = b == 0 ? 0.0 : b * std::pow(ref.x(), a) * std::pow(ref.y(), b - 1);
  }
  return coefficients_ * mono;
}

BasisTable TriBasis::tabulate(std::span<const Vec2> refs) const {
  const auto np = static_cast<Eigen::Index>(refs.size());
  BasisTable t;
  t.values.resize(np, size());
  t.dx.resize(np, size());
  t.dy.resize(np, size());
  for (Eigen::Index q = 0; q < np; ++q) {
    t.values.row(q) = values(refs[q]).transpose();
    const Eigen::MatrixX2d g = gradients(refs[q]);
    t.dx.row(q) = g.col(0).transpose();
    t.dy.row(q) = g.col(1).transpose();
  }
  return t;
}

SegBasis::SegBasis(int degree) : degree_(degree) {
  if (degree < 0 || degree > kMaxBasisDegree) {
    throw std::invalid_argument("unsupported segment basis degree " + std::to_string(degree));
  }
}

Eigen::VectorXd SegBasis::values(double s) const {
  Eigen::VectorXd v(size());
  const double z = 2.0 * s - 1.0;
  double p0 = 1.0;
  double p1 = z;
  for (int i = 0; i <= degree_; ++i) {
    double p = 0.0;
    if (i == 0) {
      p = 1.0;
    } else if (i == 1) {
      p = z;
    } else {
      p = ((2.0 * i - 1.0) * z * p1 - (i - 1.0) * p0) / i;
      p0 = p1;
      p1 = p;
    }
    v[i] = std::sqrt(2.0 * i + 1.0) * p;
  }
  return v;
}

Eigen::MatrixXd SegBasis::tabulate(std::span<const double> s) const {
  Eigen::MatrixXd t(static_cast<Eigen::Index>(s.size()), size());
  for (std::size_t q = 0; q < s.size(); ++q) {
    t.row(static_cast<Eigen::Index>(q)) = values(s[q]).transpose();
  }
  return t;
}

AffineMap physical_map(const std::array<Point, 3>& v) {
  AffineMap m;
  m.origin = v[0];
  m.jacobian.col(0) = v[1] - v[0];
  m.jacobian.col(1) = v[2] - v[0];
  m.det = m.jacobian.determinant();
  const double scale = std::max((v[1] - v[0]).squaredNorm(), (v[2] - v[0]).squaredNorm());
  if (!(m.det > 1e-14 * scale)) {
    throw std::invalid_argument("degenerate or clockwise triangle (det = " + std::to_string(m.det) + ")");
  }
  m.inverse_transpose = m.jacobian.inverse().transpose();
  return m;
}

}  // namespace dpshdg
