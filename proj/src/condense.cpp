#include "dpshdg/forms.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dpshdg {

CondensedSystem condense(const SaddleSystem& system, const DofLayout& layout) {
  const SparseMatrix& a = system.matrix;
  const Index n = a.rows();
  CondensedSystem out;
  out.reduced_index.assign(static_cast<std::size_t>(n), -1);
  for (Index d = 0; d < n; ++d) {
    if (!layout.is_cell_dof(d)) {
      out.reduced_index[d] = static_cast<Index>(out.global_dofs.size());
      out.global_dofs.push_back(d);
    }
  }
  const Index m = static_cast<Index>(out.global_dofs.size());

  // Interior/exterior index sets per cell.
  const Index num_cells = layout.num_cells();
  out.cells.resize(static_cast<std::size_t>(num_cells));
  for (Index c = 0; c < num_cells; ++c) {
    auto& rec = out.cells[c];
    rec.interior = layout.cell_dofs(c);
    for (Index i : rec.interior) {
      for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
        const Index j = a.col_idx()[p];
        if (!layout.is_cell_dof(j)) {
          rec.exterior.push_back(j);
        } else if (layout.owner_cell(j) != c) {
          throw std::logic_error("cell DOFs of cells " + std::to_string(c) + " and " +
                                 std::to_string(layout.owner_cell(j)) + " are coupled");
        }
      }
    }
    std::sort(rec.exterior.begin(), rec.exterior.end());
    rec.exterior.erase(std::unique(rec.exterior.begin(), rec.exterior.end()), rec.exterior.end());
  }

  // Pattern of the Schur complement.
  std::vector<std::vector<Index>> pattern(static_cast<std::size_t>(m));
  for (Index r = 0; r < m; ++r) {
    const Index g = out.global_dofs[r];
    for (Index p = a.row_ptr()[g]; p < a.row_ptr()[g + 1]; ++p) {
      const Index j = out.reduced_index[a.col_idx()[p]];
      if (j >= 0) {
        pattern[r].push_back(j);
      }
    }
  }
  for (const auto& rec : out.cells) {
    for (Index gi : rec.exterior) {
      auto& row = pattern[out.reduced_index[gi]];
      for (Index gj : rec.exterior) {
        row.push_back(out.reduced_index[gj]);
      }
    }
  }
  std::vector<Index> row_ptr(static_cast<std::size_t>(m) + 1, 0);
  std::vector<Index> col_idx;
  for (Index r = 0; r < m; ++r) {
    auto& row = pattern[r];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    col_idx.insert(col_idx.end(), row.begin(), row.end());
    row_ptr[r + 1] = static_cast<Index>(col_idx.size());
    std::vector<Index>().swap(row);
  }
  pattern.clear();
  std::vector<double> values(col_idx.size(), 0.0);
  out.matrix = SparseMatrix::from_csr(m, m, std::move(row_ptr), std::move(col_idx), std::move(values));
  out.rhs.resize(static_cast<std::size_t>(m));

  for (Index r = 0; r < m; ++r) {
    const Index g = out.global_dofs[r];
    out.rhs[r] = system.rhs[g];
    for (Index p = a.row_ptr()[g]; p < a.row_ptr()[g + 1]; ++p) {
      const Index j = out.reduced_index[a.col_idx()[p]];
      if (j >= 0) {
        *out.matrix.find(r, j) += a.values()[p];
      }
    }
  }

  for (Index c = 0; c < num_cells; ++c) {
    auto& rec = out.cells[c];
    const auto ni = static_cast<Eigen::Index>(rec.interior.size());
    const auto ne = static_cast<Eigen::Index>(rec.exterior.size());
    Eigen::MatrixXd kii(ni, ni);
    Eigen::MatrixXd kie(ni, ne);
    Eigen::MatrixXd kei(ne, ni);
    Eigen::VectorXd bi(ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
      const Index gi = rec.interior[i];
      bi[i] = system.rhs[gi];
      for (Eigen::Index j = 0; j < ni; ++j) {
        kii(i, j) = a.get(gi, rec.interior[j]);
      }
      for (Eigen::Index j = 0; j < ne; ++j) {
        kie(i, j) = a.get(gi, rec.exterior[j]);
        kei(j, i) = a.get(rec.exterior[j], gi);
      }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kii);
    if (!(lu.rcond() > 1e-13)) {
      throw std::runtime_error("static condensation: interior block of cell " + std::to_string(c) +
                               " is singular (rcond " + std::to_string(lu.rcond()) + ")");
    }
    rec.coupling = lu.solve(kie);
    rec.offset = lu.solve(bi);
    const Eigen::MatrixXd schur = kei * rec.coupling;
    const Eigen::VectorXd shift = kei * rec.offset;
    for (Eigen::Index i = 0; i < ne; ++i) {
      const Index ri = out.reduced_index[rec.exterior[i]];
      out.rhs[ri] -= shift[i];
      for (Eigen::Index j = 0; j < ne; ++j) {
        *out.matrix.find(ri, out.reduced_index[rec.exterior[j]]) -= schur(i, j);
      }
    }
  }
  return out;
}

std::vector<double> recover(const CondensedSystem& condensed, const std::vector<double>& reduced) {
  if (reduced.size() != condensed.global_dofs.size()) {
    throw std::invalid_argument("recover: reduced vector length mismatch");
  }
  std::vector<double> x(condensed.reduced_index.size(), 0.0);
  for (std::size_t r = 0; r < reduced.size(); ++r) {
    x[condensed.global_dofs[r]] = reduced[r];
  }
  for (const auto& rec : condensed.cells) {
    Eigen::VectorXd xe(static_cast<Eigen::Index>(rec.exterior.size()));
    for (std::size_t j = 0; j < rec.exterior.size(); ++j) {
      xe[static_cast<Eigen::Index>(j)] = x[rec.exterior[j]];
    }
    const Eigen::VectorXd xi = rec.offset - rec.coupling * xe;
    for (std::size_t i = 0; i < rec.interior.size(); ++i) {
      x[rec.interior[i]] = xi[static_cast<Eigen::Index>(i)];
    }
  }
  return x;
}

SolveOutcome solve(const SaddleSystem& system, const DofLayout& layout, bool condensed) {
  SolveOutcome out;
  if (!condensed) {
    auto x = solve_direct(system.matrix, system.rhs, &out.report);
    out.solution = FieldSolution(layout, std::move(x));
    out.global_unknowns = system.matrix.rows();
    return out;
  }
  const auto start = std::chrono::steady_clock::now();
  const CondensedSystem reduced = condense(system, layout);
  const auto xr = solve_direct(reduced.matrix, reduced.rhs, &out.report);
  auto x = recover(reduced, xr);
  // Report the residual of the full system.
  const auto ax = system.matrix.multiply(x);
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r2 += (ax[i] - system.rhs[i]) * (ax[i] - system.rhs[i]);
  }
  const double bn = norm2(system.rhs);
  out.report.relative_residual = bn > 0.0 ? std::sqrt(r2) / bn : std::sqrt(r2);
  out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.global_unknowns = reduced.matrix.rows();
  out.solution = FieldSolution(layout, std::move(x));
  return out;
}

}  // namespace dpshdg
