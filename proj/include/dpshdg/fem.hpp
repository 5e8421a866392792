#pragma once

#include "dpshdg/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace dpshdg {

/// Quadrature rule on the reference segment [0,1] (Dim = 1) or the reference
/// triangle {x, y >= 0, x + y <= 1} (Dim = 2).
template <int Dim>
struct QuadRule {
  using Coord = std::conditional_t<Dim == 1, double, Vec2>;
  std::vector<Coord> points;
  std::vector<double> weights;
  int exactness = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre rule on [0,1] exact for polynomials of degree `d`.
QuadRule<1> quad_seg(int d);

/// Collapsed (Duffy) Gauss-Legendre rule on the reference triangle exact for
/// polynomials of total degree `d`.
QuadRule<2> quad_tri(int d);

inline constexpr int kMaxQuadDegree = 20;
inline constexpr int kMaxBasisDegree = 4;

/// Values and reference gradients of a basis at a set of points, one row per point.
struct BasisTable {
  Eigen::MatrixXd values;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

/// L2-orthonormal basis of P_k on the reference triangle, obtained by
/// orthonormalising the monomials x^a y^b (a + b <= k) against the exact
/// reference mass matrix.
class TriBasis {
 public:
  explicit TriBasis(int degree);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int size() const { return static_cast<int>(exponents_.size()); }

  static int dimension(int degree) { return (degree + 1) * (degree + 2) / 2; }

  [[nodiscard]] Eigen::VectorXd values(const Vec2& ref) const;
  /// Row i holds the reference gradient of basis function i.
  [[nodiscard]] Eigen::MatrixX2d gradients(const Vec2& ref) const;
  [[nodiscard]] BasisTable tabulate(std::span<const Vec2> refs) const;

 private:
  int degree_;
  std::vector<std::array<int, 2>> exponents_;
  Eigen::MatrixXd coefficients_;  // basis_i = sum_j coefficients_(i, j) * monomial_j
};

/// Orthonormal Legendre basis of P_k on [0,1].
class SegBasis {
 public:
  explicit SegBasis(int degree);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int size() const { return degree_ + 1; }
  [[nodiscard]] Eigen::VectorXd values(double s) const;
  [[nodiscard]] Eigen::MatrixXd tabulate(std::span<const double> s) const;

 private:
  int degree_;
};

/// x = origin + jacobian * xi, mapping the reference triangle onto a cell.
struct AffineMap {
  Mat2 jacobian = Mat2::Identity();
  Vec2 origin = Vec2::Zero();
  double det = 1.0;
  Mat2 inverse_transpose = Mat2::Identity();

  [[nodiscard]] Point to_physical(const Vec2& ref) const { return origin + jacobian * ref; }
  [[nodiscard]] Vec2 to_reference(const Point& x) const {
    return inverse_transpose.transpose() * (x - origin);
  }
  [[nodiscard]] Vec2 push_gradient(const Vec2& ref_grad) const { return inverse_transpose * ref_grad; }
};

/// Throws std::invalid_argument for degenerate or clockwise triangles.
AffineMap physical_map(const std::array<Point, 3>& vertices);

}  // namespace dpshdg
