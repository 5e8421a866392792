#pragma once

#include "dpshdg/forms.hpp"
#include "dpshdg/mesh.hpp"
#include "dpshdg/spaces.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace dpshdg {

/// Residuals of the discrete mass balances and normal-flux continuity.
/// Each residual comes with the scale it is judged against. Divergences are
/// differences of large derivatives, so their scales use |grad u_h| rather
/// than |div u_h|.
struct ConservationReport {
  double div_stokes = 0.0;        ///< |div u_h|, Omega^s
  double fracture_balance = 0.0;  ///< |sigma kappa_m (p_h - p_h^m) + div u_h - P g|, Omega^d
  double matrix_balance = 0.0;    ///< |sigma kappa_m (p_h^m - p_h) + div u_h^m - P g_m|, Omega^d
  double jump_u = 0.0;            ///< max facet |[u_h . n]| away from the interface
  double interface_flux = 0.0;    ///< max facet |(u_h - ubar_h) . n| on the interface, both sides
  double jump_u_m = 0.0;          ///< max facet |[u_h^m . n]| over dual facets

  double scale_div = 0.0;     ///< |grad u_h|, Omega^s
  double scale_fracture = 0.0;  ///< |sigma kappa_m (p_h - p_h^m)| + |grad u_h| + |P g|, Omega^d
  double scale_matrix = 0.0;    ///< same with u_h^m and P g_m
  double scale_velocity = 0.0;  ///< |u_h|, Omega
  double scale_matrix_velocity = 0.0;

  /// Every residual <= tol * (1 + its scale).
  [[nodiscard]] bool passes(double tol) const;

  static std::string csv_header();
  [[nodiscard]] std::string csv_row() const;
};

/// Jump maxima are taken over facets whose trace pressure is a free unknown,
/// since only there the discrete equations enforce flux continuity.
ConservationReport conservation(const FieldSolution& solution, const Mesh& mesh, const DofLayout& layout,
                                const PhysicalParams& params, const SourceSet& sources);

struct PointValues {
  Vec2 u = Vec2::Zero();
  double p = 0.0;
  Vec2 u_m = Vec2::Zero();  ///< zero on Stokes cells
  double p_m = 0.0;
};

/// Discrete fields of `cell` at the physical point x.
PointValues evaluate(const FieldSolution& solution, const Mesh& mesh, const DofLayout& layout, Index cell,
                     const Point& x);

/// Per-cell averages.
std::vector<PointValues> cell_means(const FieldSolution& solution, const Mesh& mesh, const DofLayout& layout);

/// Writes a legacy ASCII VTK unstructured grid at `vtk_path` (vertex averages
/// as POINT_DATA, centroid values as CELL_DATA) and a CSV of per-cell means at
/// the same path with extension `.csv` (header `cell,x,y,ux,uy,p,umx,umy,pm`).
/// Throws std::runtime_error when a file cannot be written.
void export_fields(const FieldSolution& solution, const Mesh& mesh, const DofLayout& layout,
                   const std::filesystem::path& vtk_path);

}  // namespace dpshdg
