#pragma once

#include "dpshdg/forms.hpp"
#include "dpshdg/mesh.hpp"
#include "dpshdg/spaces.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dpshdg {

using GradientFn = std::function<Mat2(const Point&)>;               ///< (i, j) = d u_i / d x_j
using HessianFn = std::function<std::array<Mat2, 2>(const Point&)>;  ///< per component

/// Closed-form fields with hand-coded derivatives.
struct ExactSolution {
  VectorFn u_s, u_d, u_m;
  ScalarFn p_s, p_d, p_m;
  GradientFn grad_u_s, grad_u_d, grad_u_m;
  VectorFn grad_p_s, grad_p_d, grad_p_m;
  HessianFn hess_u_s;
};

struct ManufacturedProblem {
  ExactSolution exact;
  SourceSet sources;
  UniformParams params;
};

/// Smooth manufactured solution on the split unit square (Stokes on y > 1/2)
/// with the residual sources of every equation computed from the closed forms.
ManufacturedProblem example1(const UniformParams& params);

/// Default coefficients: mu = kappa_f = kappa_m = 1, sigma = 1/2 and
/// alpha = mu sqrt(kappa_f) (1 + 4 pi^2) / 2.
UniformParams example1_params();

/// Exact velocity trace on BoundaryS, exact trace pressures on BoundaryD, no mean rows.
BoundaryConditionSet example1_boundary(const ExactSolution& exact);

/// Elementwise L2 projection of the exact fields (facet traces included).
FieldSolution interpolate(const Mesh& mesh, const DofLayout& layout, const ExactSolution& exact);

struct ErrorReport {
  Index cells = 0;
  double h_max = 0.0;
  double u_s = 0.0;       ///< |u_h - u|, Omega^s
  double p_s = 0.0;
  double grad_u_s = 0.0;  ///< broken |grad(u_h - u)|, Omega^s
  double div_u_s = 0.0;   ///< |div u_h|, Omega^s
  double u_d = 0.0;
  double p_d = 0.0;
  double div_u_d = 0.0;   ///< |div(u_h - u)|, Omega^d
  double phi = 0.0;       ///< microfracture mass balance residual
  double u_m = 0.0;
  double p_m = 0.0;
  double div_u_m = 0.0;
  double phi_m = 0.0;     ///< matrix mass balance residual

  static std::string csv_header();
  [[nodiscard]] std::string csv_row() const;
};

ErrorReport compute_errors(const FieldSolution& solution, const ExactSolution& exact, const Mesh& mesh,
                           const DofLayout& layout, const PhysicalParams& params, const SourceSet& sources);

struct RateColumn {
  std::string name;
  std::vector<double> errors;
  std::vector<double> rates;  ///< rates[i] between level i and i+1; NaN if undefined
};

struct RateTable {
  std::vector<Index> cells;
  std::vector<double> h;
  std::vector<RateColumn> columns;

  [[nodiscard]] const RateColumn& column(const std::string& name) const;
  /// Header `cells,<name>,<name>_rate,...`; the first row leaves rates empty.
  void write_csv(std::ostream& out) const;
};

/// rate = log(e_i / e_{i+1}) / log(h_i / h_{i+1}). Throws for fewer than two reports.
RateTable rates(const std::vector<ErrorReport>& reports);

/// Per-region subsets of the full rate table (Stokes, microfractures, matrix).
RateTable stokes_table(const RateTable& full);
RateTable fracture_table(const RateTable& full);
RateTable matrix_table(const RateTable& full);

/// Residual r = A x - b of the discrete equations at the interpolated exact
/// solution, tested against random unit vectors: the root mean square of
/// |r . v| over v_i = xi_i / sqrt(m_i) / |xi| with xi standard normal and m_i
/// the squared L2 norm of basis function i (2|K| on cells, |F| on facets).
/// The mean is computed in closed form. Essential DOFs are skipped.
double consistency_residual(const SaddleSystem& system, const Mesh& mesh, const DofLayout& layout,
                            const FieldSolution& interpolant);

}  // namespace dpshdg
