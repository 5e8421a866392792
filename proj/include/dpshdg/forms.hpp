#pragma once

#include "dpshdg/fem.hpp"
#include "dpshdg/linalg.hpp"
#include "dpshdg/mesh.hpp"
#include "dpshdg/spaces.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

namespace dpshdg {

struct UniformParams {
  double mu = 1.0;
  double kappa_f = 1.0;
  double kappa_m = 1.0;
  double sigma = 0.5;
  double alpha = 1.0;
};

/// Physical coefficients. Permeabilities are stored per cell; entries of
/// Stokes cells are ignored.
struct PhysicalParams {
  double mu = 1.0;
  double sigma = 0.5;
  double alpha = 1.0;
  std::vector<double> kappa_f;
  std::vector<double> kappa_m;

  static PhysicalParams uniform(const Mesh& mesh, const UniformParams& p);
  [[nodiscard]] double kf(Index cell) const { return kappa_f[cell]; }
  [[nodiscard]] double km(Index cell) const { return kappa_m[cell]; }
  /// Throws std::invalid_argument for non-positive or mis-sized coefficients.
  void validate(const Mesh& mesh) const;
};

/// Right-hand-side data; empty functions are zero.
struct SourceSet {
  VectorFn f;                   ///< Stokes momentum, Omega^s
  VectorFn f_d;                 ///< microfracture momentum, Omega^d
  VectorFn f_m;                 ///< matrix momentum, Omega^d
  VectorFn interface_traction;  ///< tested against the velocity trace on Gamma^I
  ScalarFn g;                   ///< microfracture mass, Omega^d
  ScalarFn g_m;                 ///< matrix mass, Omega^d
};

/// Dense local matrix; entry (i, j) is the form evaluated at trial function
/// cols[j] and test function rows[i].
struct LocalBlock {
  Eigen::MatrixXd matrix;
  std::vector<Index> rows;
  std::vector<Index> cols;
};

/// Basis data at the cell quadrature points of one cell.
struct CellEval {
  AffineMap map;
  Eigen::MatrixXd phi;   ///< P_k values, point x basis
  Eigen::MatrixXd dphix; ///< physical d/dx
  Eigen::MatrixXd dphiy; ///< physical d/dy
  Eigen::MatrixXd psi;   ///< P_{k-1} values
  Eigen::VectorXd weights;
  std::vector<Point> points;
};

/// Basis data at the quadrature points of one local edge, seen from one cell.
struct FacetEval {
  Index facet = -1;
  Vec2 normal = Vec2::Zero();  ///< outward normal of the cell
  double length = 0.0;
  Eigen::MatrixXd phi;
  Eigen::MatrixXd dphix;
  Eigen::MatrixXd dphiy;
  Eigen::MatrixXd psi;
  Eigen::MatrixXd trace;  ///< facet P_k basis in the facet parameter
  Eigen::VectorXd weights;
  std::vector<Point> points;
};

/// Shared read-only state for the local kernels: bases, quadrature tables and
/// the problem description.
class KernelContext {
 public:
  KernelContext(const Mesh& mesh, const DofLayout& layout, const PhysicalParams& params,
                const DiscretizationParams& disc);

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const DofLayout& layout() const { return *layout_; }
  [[nodiscard]] const PhysicalParams& params() const { return *params_; }
  [[nodiscard]] const DiscretizationParams& disc() const { return disc_; }
  [[nodiscard]] int degree() const { return disc_.k; }

  [[nodiscard]] CellEval cell(Index c) const;
  [[nodiscard]] FacetEval facet(Index c, int local_edge) const;
  /// Facet data in the facet's own parameter (no cell basis).
  [[nodiscard]] FacetEval trace(Index facet) const;

 private:
  const Mesh* mesh_;
  const DofLayout* layout_;
  const PhysicalParams* params_;
  DiscretizationParams disc_;
  TriBasis basis_;
  TriBasis pressure_basis_;
  QuadRule<2> cell_rule_;
  QuadRule<1> facet_rule_;
  BasisTable cell_table_;
  Eigen::MatrixXd cell_pressure_values_;
  Eigen::MatrixXd trace_values_;
  std::array<std::array<BasisTable, 2>, 3> edge_tables_;      // [local edge][reversed]
  std::array<std::array<Eigen::MatrixXd, 2>, 3> edge_pressure_;
};

enum class FlowField { Stokes, Fracture, Matrix };

/// Stokes form over (u|_K, ubar on the three facets).
LocalBlock kernel_ahs(const KernelContext& ctx, Index cell);
/// (kappa_f^{-1} u, v)_K.
LocalBlock kernel_ahd(const KernelContext& ctx, Index cell);
/// (kappa_m^{-1} u^m, v^m)_K.
LocalBlock kernel_ahm(const KernelContext& ctx, Index cell);
/// Tangential slip term on an Interface facet, over ubar|_F.
LocalBlock kernel_ahI(const KernelContext& ctx, Index facet);
/// b(q, v) with rows (q|_K, qbar on the three facets) and columns v|_K.
LocalBlock kernel_bh(const KernelContext& ctx, Index cell, FlowField field);
/// -<pbar^j, vbar . n^j> on an Interface facet: [0] for j = s, [1] for j = d.
std::array<LocalBlock, 2> kernel_bhI(const KernelContext& ctx, Index facet);
/// -<pbar^s, vbar . n> on a BoundaryS facet.
LocalBlock kernel_bh_outer(const KernelContext& ctx, Index facet);
/// sigma kappa_m (p^m - p, q^m - q)_K over (p|_K, p^m|_K).
LocalBlock kernel_ch(const KernelContext& ctx, Index cell);

struct SaddleSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

/// Global system with essential DOFs lifted (identity rows, data moved to the
/// right-hand side) and mean-value constraint rows appended.
SaddleSystem assemble(const Mesh& mesh, const DofLayout& layout, const PhysicalParams& params,
                      const DiscretizationParams& disc, const SourceSet& sources);

/// Visits every local block of the scheme. `scale` is -1 for c_h, and
/// `mirror` marks off-diagonal blocks whose transpose also enters the matrix.
using BlockVisitor = std::function<void(const LocalBlock& block, double scale, bool mirror)>;
void visit_blocks(const KernelContext& ctx, const BlockVisitor& visit);

/// Right-hand side before lifting.
std::vector<double> assemble_load(const KernelContext& ctx, const SourceSet& sources);

/// Static condensation onto facet DOFs and constraint multipliers.
struct CondensedSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  std::vector<Index> global_dofs;    ///< reduced index -> full index
  std::vector<Index> reduced_index;  ///< full index -> reduced index, -1 for cell DOFs

  struct CellRecovery {
    std::vector<Index> interior;
    std::vector<Index> exterior;
    Eigen::MatrixXd coupling;  ///< K_II^{-1} K_IG
    Eigen::VectorXd offset;    ///< K_II^{-1} b_I
  };
  std::vector<CellRecovery> cells;
};

/// Throws std::runtime_error naming the cell when a local interior block is singular.
CondensedSystem condense(const SaddleSystem& system, const DofLayout& layout);
std::vector<double> recover(const CondensedSystem& condensed, const std::vector<double>& reduced);

struct SolveOutcome {
  FieldSolution solution;
  SolveReport report;
  Index global_unknowns = 0;
};

SolveOutcome solve(const SaddleSystem& system, const DofLayout& layout, bool condensed);

}  // namespace dpshdg
