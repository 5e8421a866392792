#pragma once

#include "dpshdg/types.hpp"

#include <iosfwd>
#include <vector>

namespace dpshdg {

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix with sorted, duplicate-free columns per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  /// Empty rows x cols matrix.
  SparseMatrix(Index rows, Index cols);

  /// Sums duplicates; throws std::out_of_range for indices outside the shape.
  static SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& triplets);
  /// Build from an already sorted and deduplicated CSR pattern.
  static SparseMatrix from_csr(Index rows, Index cols, std::vector<Index> row_ptr,
                               std::vector<Index> col_idx, std::vector<double> values);

  [[nodiscard]] Index rows() const { return rows_; }
  [[nodiscard]] Index cols() const { return cols_; }
  [[nodiscard]] Index nnz() const { return static_cast<Index>(values_.size()); }

  [[nodiscard]] const std::vector<Index>& row_ptr() const { return row_ptr_; }
  [[nodiscard]] const std::vector<Index>& col_idx() const { return col_idx_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] std::vector<double>& values() { return values_; }

  /// Entry (i, j), zero when not stored.
  [[nodiscard]] double get(Index i, Index j) const;
  /// Pointer to the stored entry (i, j) or nullptr.
  double* find(Index i, Index j);

  [[nodiscard]] std::vector<double> multiply(const std::vector<double>& x) const;
  [[nodiscard]] SparseMatrix transpose() const;
  /// max |A - A^T| / max |A|.
  [[nodiscard]] double symmetry_defect() const;

  /// `i j value` lines, zero-based.
  void write_coordinate(std::ostream& out) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

struct SolveReport {
  double relative_residual = 0.0;
  double reciprocal_condition = 0.0;  ///< 1-norm estimate (Hager/Higham)
  double factor_nnz = 0.0;            ///< nonzeros in L and U
  double seconds = 0.0;
  Index unknowns = 0;
};

/// Supernodal sparse LU with partial pivoting and COLAMD ordering. Throws std::runtime_error for a
/// singular matrix or a residual above `tolerance`.
std::vector<double> solve_direct(const SparseMatrix& a, const std::vector<double>& b,
                                 SolveReport* report = nullptr, double tolerance = 1e-9);

double norm2(const std::vector<double>& v);

}  // namespace dpshdg
