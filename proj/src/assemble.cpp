#include "dpshdg/forms.hpp"

#include <algorithm>

namespace dpshdg {

void visit_blocks(const KernelContext& ctx, const BlockVisitor& visit) {
  const Mesh& mesh = ctx.mesh();
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell(c).subdomain == Subdomain::Stokes) {
      visit(kernel_ahs(ctx, c), 1.0, false);
      visit(kernel_bh(ctx, c, FlowField::Stokes), 1.0, true);
    } else {
      visit(kernel_ahd(ctx, c), 1.0, false);
      visit(kernel_ahm(ctx, c), 1.0, false);
      visit(kernel_bh(ctx, c, FlowField::Fracture), 1.0, true);
      visit(kernel_bh(ctx, c, FlowField::Matrix), 1.0, true);
      visit(kernel_ch(ctx, c), -1.0, false);
    }
  }
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const FacetClass kind = mesh.facet(f).kind;
    if (kind == FacetClass::Interface) {
      visit(kernel_ahI(ctx, f), 1.0, false);
      const auto blocks = kernel_bhI(ctx, f);
      visit(blocks[0], 1.0, true);
      visit(blocks[1], 1.0, true);
    } else if (kind == FacetClass::BoundaryS) {
      visit(kernel_bh_outer(ctx, f), 1.0, true);
    }
  }
}

namespace {

void add_vector_load(const CellEval& ce, const VectorFn& f, Index first, int nk, double sign,
                     std::vector<double>& rhs) {
  if (!f) {
    return;
  }
  for (Eigen::Index q = 0; q < ce.weights.size(); ++q) {
    const Vec2 value = sign * ce.weights[q] * f(ce.points[q]);
    for (int j = 0; j < nk; ++j) {
      rhs[first + j] += value.x() * ce.phi(q, j);
      rhs[first + nk + j] += value.y() * ce.phi(q, j);
    }
  }
}

void add_scalar_load(const CellEval& ce, const ScalarFn& g, Index first, double sign, std::vector<double>& rhs) {
  if (!g) {
    return;
  }
  for (Eigen::Index q = 0; q < ce.weights.size(); ++q) {
    const double value = sign * ce.weights[q] * g(ce.points[q]);
    for (Eigen::Index j = 0; j < ce.psi.cols(); ++j) {
      rhs[first + j] += value * ce.psi(q, j);
    }
  }
}

}  // namespace

std::vector<double> assemble_load(const KernelContext& ctx, const SourceSet& sources) {
  const Mesh& mesh = ctx.mesh();
  const DofLayout& layout = ctx.layout();
  const int nk = layout.cell_scalar_size();
  std::vector<double> rhs(static_cast<std::size_t>(layout.total()), 0.0);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellEval ce = ctx.cell(c);
    if (mesh.cell(c).subdomain == Subdomain::Stokes) {
      add_vector_load(ce, sources.f, layout.u(c), nk, 1.0, rhs);
    } else {
      add_vector_load(ce, sources.f_d, layout.u(c), nk, 1.0, rhs);
      add_vector_load(ce, sources.f_m, layout.um(c), nk, 1.0, rhs);
      add_scalar_load(ce, sources.g, layout.p(c), -1.0, rhs);
      add_scalar_load(ce, sources.g_m, layout.pm(c), -1.0, rhs);
    }
  }
  if (sources.interface_traction) {
    const int nt = layout.facet_scalar_size();
    for (Index f = 0; f < mesh.num_facets(); ++f) {
      if (mesh.facet(f).kind != FacetClass::Interface) {
        continue;
      }
      const FacetEval fe = ctx.trace(f);
      const Index first = layout.ubar(f);
      for (Eigen::Index q = 0; q < fe.weights.size(); ++q) {
        const Vec2 h = fe.weights[q] * sources.interface_traction(fe.points[q]);
        for (int i = 0; i < nt; ++i) {
          rhs[first + i] += h.x() * fe.trace(q, i);
          rhs[first + nt + i] += h.y() * fe.trace(q, i);
        }
      }
    }
  }
  return rhs;
}

SaddleSystem assemble(const Mesh& mesh, const DofLayout& layout, const PhysicalParams& params,
                      const DiscretizationParams& disc, const SourceSet& sources) {
  const KernelContext ctx(mesh, layout, params, disc);
  const Index n = layout.total();

  std::vector<SparseRow> constraints;
  std::vector<Index> constraint_rows;
  if (layout.mean_p_row() >= 0) {
    constraints.push_back(mean_constraint_row(mesh, layout, Field::P));
    constraint_rows.push_back(layout.mean_p_row());
  }
  if (layout.mean_pm_row() >= 0) {
    constraints.push_back(mean_constraint_row(mesh, layout, Field::PM));
    constraint_rows.push_back(layout.mean_pm_row());
  }

  // Pass 1: sparsity pattern. Entries in essential rows or columns are dropped;
  // essential rows keep only their diagonal.
  std::vector<std::vector<Index>> pattern(static_cast<std::size_t>(n));
  auto insert = [&](const std::vector<Index>& rows, const std::vector<Index>& cols) {
    for (Index r : rows) {
      if (layout.is_essential(r)) {
        continue;
      }
      auto& row = pattern[r];
      for (Index c : cols) {
        if (!layout.is_essential(c)) {
          row.push_back(c);
        }
      }
    }
  };
  visit_blocks(ctx, [&](const LocalBlock& b, double, bool mirror) {
    insert(b.rows, b.cols);
    if (mirror) {
      insert(b.cols, b.rows);
    }
  });
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    insert({constraint_rows[i]}, constraints[i].cols);
    insert(constraints[i].cols, {constraint_rows[i]});
  }
  for (Index d : layout.essential_dofs()) {
    pattern[d].push_back(d);
  }

  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> col_idx;
  for (Index i = 0; i < n; ++i) {
    auto& row = pattern[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    col_idx.insert(col_idx.end(), row.begin(), row.end());
    row_ptr[i + 1] = static_cast<Index>(col_idx.size());
    std::vector<Index>().swap(row);
  }
  pattern.clear();
  pattern.shrink_to_fit();

  std::vector<double> values(col_idx.size(), 0.0);
  SaddleSystem sys;
  sys.matrix = SparseMatrix::from_csr(n, n, std::move(row_ptr), std::move(col_idx), std::move(values));
  sys.rhs = assemble_load(ctx, sources);
  const std::vector<double>& g = layout.essential_values();

  // Pass 2: values, lifting essential columns into the right-hand side.
  auto add = [&](Index r, Index c, double v) {
    if (layout.is_essential(r)) {
      return;
    }
    if (layout.is_essential(c)) {
      sys.rhs[r] -= v * g[c];
      return;
    }
    *sys.matrix.find(r, c) += v;
  };
  visit_blocks(ctx, [&](const LocalBlock& b, double scale, bool mirror) {
    for (std::size_t i = 0; i < b.rows.size(); ++i) {
      for (std::size_t j = 0; j < b.cols.size(); ++j) {
        const double v = scale * b.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        add(b.rows[i], b.cols[j], v);
        if (mirror) {
          add(b.cols[j], b.rows[i], v);
        }
      }
    }
  });
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    for (std::size_t j = 0; j < constraints[i].cols.size(); ++j) {
      add(constraint_rows[i], constraints[i].cols[j], constraints[i].values[j]);
      add(constraints[i].cols[j], constraint_rows[i], constraints[i].values[j]);
    }
  }
  for (Index d : layout.essential_dofs()) {
    *sys.matrix.find(d, d) = 1.0;
    sys.rhs[d] = g[d];
  }
  return sys;
}

}  // namespace dpshdg
