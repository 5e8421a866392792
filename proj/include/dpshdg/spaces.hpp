#pragma once

#include "dpshdg/mesh.hpp"
#include "dpshdg/types.hpp"

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace dpshdg {

struct DiscretizationParams {
  int k = 2;
  double beta = 40.0;

  /// Degree k with the default interior penalty beta = 10 k^2.
  static DiscretizationParams with_degree(int k) { return {k, 10.0 * k * k}; }
  void validate() const;
};

/// The eight discrete fields, in global block order.
enum class Field : int { U, UBar, UM, P, PBarS, PBarD, PM, PBarM };
inline constexpr int kNumFields = 8;

std::string_view to_string(Field f);

/// Stokes condition on BoundaryS facets.
struct StokesBoundary {
  enum class Kind { Dirichlet, TractionFree };
  Kind kind = Kind::Dirichlet;
  VectorFn velocity;  ///< Dirichlet trace data; empty means zero.
};

/// Condition for one porous field (microfracture or matrix) on BoundaryD facets:
/// either an essential trace pressure or the weak zero normal flux.
struct DualBoundary {
  ScalarFn trace_pressure;
  bool weak_zero_flux = true;

  [[nodiscard]] bool prescribes_pressure() const { return static_cast<bool>(trace_pressure); }
  static DualBoundary pressure(ScalarFn p) { return {std::move(p), false}; }
};

struct BoundaryConditionSet {
  StokesBoundary stokes;
  DualBoundary fracture;
  DualBoundary matrix;
  bool mean_zero_pressure = false;         ///< append row  (p, 1)_Omega = 0
  bool mean_zero_matrix_pressure = false;  ///< append row  (p^m, 1)_Omega^d = 0

  /// u = 0 on Gamma^s, zero normal fluxes on Gamma^d, both mean-zero rows.
  static BoundaryConditionSet homogeneous();
  /// Throws std::invalid_argument when a boundary has zero or two conditions.
  void validate() const;
};

/// Global numbering of every field block followed by the constraint rows.
///
/// Cell DOFs of vector fields are stored component-major (x coefficients
/// then y coefficients); facet DOFs use the orthonormal Legendre basis in the
/// facet parameter running from `Facet::vertices[0]` to `vertices[1]`.
class DofLayout {
 public:
  DofLayout() = default;

  [[nodiscard]] int degree() const { return k_; }
  [[nodiscard]] Index num_cells() const { return static_cast<Index>(dual_cell_.size()); }
  /// Scalar P_k cell basis size.
  [[nodiscard]] int cell_scalar_size() const { return nk_; }
  /// Vector P_k cell block size.
  [[nodiscard]] int cell_vector_size() const { return 2 * nk_; }
  /// Scalar P_{k-1} pressure block size.
  [[nodiscard]] int cell_pressure_size() const { return nq_; }
  /// Scalar P_k facet block size.
  [[nodiscard]] int facet_scalar_size() const { return k_ + 1; }
  [[nodiscard]] int facet_vector_size() const { return 2 * (k_ + 1); }

  [[nodiscard]] Index offset(Field f) const { return offsets_[static_cast<int>(f)]; }
  [[nodiscard]] Index count(Field f) const { return counts_[static_cast<int>(f)]; }
  [[nodiscard]] Index num_field_dofs() const { return num_field_dofs_; }
  [[nodiscard]] Index total() const { return total_; }
  [[nodiscard]] Index num_constraints() const { return total_ - num_field_dofs_; }

  /// First global DOF of the block, or -1 when the entity does not carry the field.
  [[nodiscard]] Index u(Index cell) const { return offset(Field::U) + cell * cell_vector_size(); }
  [[nodiscard]] Index p(Index cell) const { return offset(Field::P) + cell * cell_pressure_size(); }
  [[nodiscard]] Index um(Index cell) const;
  [[nodiscard]] Index pm(Index cell) const;
  [[nodiscard]] Index ubar(Index facet) const;
  [[nodiscard]] Index pbar_s(Index facet) const;
  [[nodiscard]] Index pbar_d(Index facet) const;
  [[nodiscard]] Index pbar_m(Index facet) const;

  /// Constraint rows; -1 when inactive.
  [[nodiscard]] Index mean_p_row() const { return mean_p_row_; }
  [[nodiscard]] Index mean_pm_row() const { return mean_pm_row_; }

  [[nodiscard]] bool is_essential(Index dof) const { return essential_[dof] != 0; }
  [[nodiscard]] const std::vector<Index>& essential_dofs() const { return essential_list_; }
  /// Prescribed values (meaningful only at essential DOFs; zero elsewhere).
  [[nodiscard]] const std::vector<double>& essential_values() const { return essential_values_; }

  /// True for DOFs eliminated cell-by-cell under static condensation
  /// (u, u^m, p, p^m).
  [[nodiscard]] bool is_cell_dof(Index dof) const { return owner_cell(dof) >= 0; }
  /// Owning cell of a cell DOF, -1 for facet DOFs and constraints.
  [[nodiscard]] Index owner_cell(Index dof) const;
  /// All cell DOFs of `cell`: u, then u^m, p, p^m where present.
  [[nodiscard]] std::vector<Index> cell_dofs(Index cell) const;

  friend DofLayout build_layout(const Mesh&, const DiscretizationParams&, const BoundaryConditionSet&);

 private:
  int k_ = 0;
  int nk_ = 0;
  int nq_ = 0;
  std::array<Index, kNumFields> offsets_{};
  std::array<Index, kNumFields> counts_{};
  Index num_field_dofs_ = 0;
  Index total_ = 0;
  Index mean_p_row_ = -1;
  Index mean_pm_row_ = -1;
  std::vector<Index> dual_cell_;    // cell -> index among T^d, -1 for Stokes cells
  std::vector<Index> dual_cells_;   // index among T^d -> cell
  std::vector<Index> stokes_facet_; // facet -> index among F^s, or -1
  std::vector<Index> dual_facet_;   // facet -> index among F^d, or -1
  std::vector<char> essential_;
  std::vector<Index> essential_list_;
  std::vector<double> essential_values_;
};

DofLayout build_layout(const Mesh& mesh, const DiscretizationParams& params, const BoundaryConditionSet& bcs);

/// L2 projection of scalar data onto the facet's P_k trace basis.
std::vector<double> project_on_facet(const Mesh& mesh, Index facet, int k, const ScalarFn& g);

struct SparseRow {
  std::vector<Index> cols;
  std::vector<double> values;
};

/// Row r with r . coefficients = integral of the field (p over Omega, or p^m over Omega^d).
SparseRow mean_constraint_row(const Mesh& mesh, const DofLayout& layout, Field field);

/// Coefficients of all fields in DofLayout order (constraint multipliers last).
class FieldSolution {
 public:
  FieldSolution() = default;
  explicit FieldSolution(const DofLayout& layout)
      : offsets_(), counts_(), coefficients_(static_cast<std::size_t>(layout.total()), 0.0) {
    for (int f = 0; f < kNumFields; ++f) {
      offsets_[f] = layout.offset(static_cast<Field>(f));
      counts_[f] = layout.count(static_cast<Field>(f));
    }
  }
  FieldSolution(const DofLayout& layout, std::vector<double> coefficients);

  [[nodiscard]] std::span<const double> field(Field f) const {
    return std::span<const double>(coefficients_).subspan(offsets_[static_cast<int>(f)],
                                                          counts_[static_cast<int>(f)]);
  }
  [[nodiscard]] std::span<double> field(Field f) {
    return std::span<double>(coefficients_).subspan(offsets_[static_cast<int>(f)],
                                                    counts_[static_cast<int>(f)]);
  }
  [[nodiscard]] const std::vector<double>& coefficients() const { return coefficients_; }
  [[nodiscard]] std::vector<double>& coefficients() { return coefficients_; }

 private:
  std::array<Index, kNumFields> offsets_{};
  std::array<Index, kNumFields> counts_{};
  std::vector<double> coefficients_;
};

}  // namespace dpshdg
