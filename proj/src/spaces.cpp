#include "dpshdg/spaces.hpp"

#include "dpshdg/fem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpshdg {

void DiscretizationParams::validate() const {
  if (k < 1 || k > kMaxBasisDegree) {
    throw std::invalid_argument("polynomial degree k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(kMaxBasisDegree) + "]");
  }
  if (!(beta > 0.0)) {
    throw std::invalid_argument("penalty parameter beta must be positive");
  }
}

std::string_view to_string(Field f) {
  switch (f) {
    case Field::U: return "u";
    case Field::UBar: return "ubar";
    case Field::UM: return "um";
    case Field::P: return "p";
    case Field::PBarS: return "pbar_s";
    case Field::PBarD: return "pbar_d";
    case Field::PM: return "pm";
    case Field::PBarM: return "pbar_m";
  }
  return "?";
}

BoundaryConditionSet BoundaryConditionSet::homogeneous() {
  BoundaryConditionSet bcs;
  bcs.mean_zero_pressure = true;
  bcs.mean_zero_matrix_pressure = true;
  return bcs;
}

void BoundaryConditionSet::validate() const {
  if (stokes.kind == StokesBoundary::Kind::TractionFree && stokes.velocity) {
    throw std::invalid_argument("BoundaryS: traction-free outflow cannot also prescribe a velocity");
  }
  auto check = [](const DualBoundary& b, const char* name) {
    if (b.prescribes_pressure() && b.weak_zero_flux) {
      throw std::invalid_argument(std::string("BoundaryD: conflicting conditions for ") + name +
                                  " (trace pressure and zero normal flux)");
    }
    if (!b.prescribes_pressure() && !b.weak_zero_flux) {
      throw std::invalid_argument(std::string("BoundaryD: no condition for ") + name);
    }
  };
  check(fracture, "microfracture field");
  check(matrix, "matrix field");
}

Index DofLayout::um(Index cell) const {
  const Index d = dual_cell_[cell];
  return d < 0 ? -1 : offset(Field::UM) + d * cell_vector_size();
}

Index DofLayout::pm(Index cell) const {
  const Index d = dual_cell_[cell];
  return d < 0 ? -1 : offset(Field::PM) + d * cell_pressure_size();
}

Index DofLayout::ubar(Index facet) const {
  const Index s = stokes_facet_[facet];
  return s < 0 ? -1 : offset(Field::UBar) + s * facet_vector_size();
}

Index DofLayout::pbar_s(Index facet) const {
  const Index s = stokes_facet_[facet];
  return s < 0 ? -1 : offset(Field::PBarS) + s * facet_scalar_size();
}

Index DofLayout::pbar_d(Index facet) const {
  const Index d = dual_facet_[facet];
  return d < 0 ? -1 : offset(Field::PBarD) + d * facet_scalar_size();
}

Index DofLayout::pbar_m(Index facet) const {
  const Index d = dual_facet_[facet];
  return d < 0 ? -1 : offset(Field::PBarM) + d * facet_scalar_size();
}

Index DofLayout::owner_cell(Index dof) const {
  auto in = [&](Field f) { return dof >= offset(f) && dof < offset(f) + count(f); };
  if (in(Field::U)) {
    return (dof - offset(Field::U)) / cell_vector_size();
  }
  if (in(Field::P)) {
    return (dof - offset(Field::P)) / cell_pressure_size();
  }
  if (in(Field::UM)) {
    return dual_cells_[(dof - offset(Field::UM)) / cell_vector_size()];
  }
  if (in(Field::PM)) {
    return dual_cells_[(dof - offset(Field::PM)) / cell_pressure_size()];
  }
  return -1;
}

std::vector<Index> DofLayout::cell_dofs(Index cell) const {
  std::vector<Index> dofs;
  auto append = [&dofs](Index first, int n) {
    for (int i = 0; first >= 0 && i < n; ++i) {
      dofs.push_back(first + i);
    }
  };
  append(u(cell), cell_vector_size());
  append(um(cell), cell_vector_size());
  append(p(cell), cell_pressure_size());
  append(pm(cell), cell_pressure_size());
  return dofs;
}

std::vector<double> project_on_facet(const Mesh& mesh, Index facet, int k, const ScalarFn& g) {
  const Facet& f = mesh.facet(facet);
  const Point& a = mesh.points()[f.vertices[0]];
  const Point& b = mesh.points()[f.vertices[1]];
  const SegBasis basis(k);
  const QuadRule<1> rule = quad_seg(2 * k + 2);
  std::vector<double> coeffs(static_cast<std::size_t>(k + 1), 0.0);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = rule.points[q];
    const double value = g(a + s * (b - a));
    const Eigen::VectorXd phi = basis.values(s);
    for (int i = 0; i <= k; ++i) {
      coeffs[i] += rule.weights[q] * value * phi[i];
    }
  }
  return coeffs;
}

DofLayout build_layout(const Mesh& mesh, const DiscretizationParams& params, const BoundaryConditionSet& bcs) {
  params.validate();
  bcs.validate();

  DofLayout l;
  l.k_ = params.k;
  l.nk_ = TriBasis::dimension(params.k);
  l.nq_ = TriBasis::dimension(params.k - 1);

  l.dual_cell_.assign(static_cast<std::size_t>(mesh.num_cells()), -1);
  Index n_dual_cells = 0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell(c).subdomain == Subdomain::Dual) {
      l.dual_cell_[c] = n_dual_cells++;
      l.dual_cells_.push_back(c);
    }
  }

  l.stokes_facet_.assign(static_cast<std::size_t>(mesh.num_facets()), -1);
  l.dual_facet_.assign(static_cast<std::size_t>(mesh.num_facets()), -1);
  Index n_stokes_facets = 0;
  Index n_dual_facets = 0;
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const FacetClass kind = mesh.facet(f).kind;
    if (kind == FacetClass::InteriorS || kind == FacetClass::BoundaryS || kind == FacetClass::Interface) {
      l.stokes_facet_[f] = n_stokes_facets++;
    }
    if (kind == FacetClass::InteriorD || kind == FacetClass::BoundaryD || kind == FacetClass::Interface) {
      l.dual_facet_[f] = n_dual_facets++;
    }
  }

  const Index nc = mesh.num_cells();
  auto set = [&](Field f, Index count) { l.counts_[static_cast<int>(f)] = count; };
  set(Field::U, nc * l.cell_vector_size());
  set(Field::UBar, n_stokes_facets * l.facet_vector_size());
  set(Field::UM, n_dual_cells * l.cell_vector_size());
  set(Field::P, nc * l.cell_pressure_size());
  set(Field::PBarS, n_stokes_facets * l.facet_scalar_size());
  set(Field::PBarD, n_dual_facets * l.facet_scalar_size());
  set(Field::PM, n_dual_cells * l.cell_pressure_size());
  set(Field::PBarM, n_dual_facets * l.facet_scalar_size());

  Index next = 0;
  for (int f = 0; f < kNumFields; ++f) {
    l.offsets_[f] = next;
    next += l.counts_[f];
  }
  l.num_field_dofs_ = next;
  if (bcs.mean_zero_pressure) {
    l.mean_p_row_ = next++;
  }
  if (bcs.mean_zero_matrix_pressure) {
    if (n_dual_cells == 0) {
      throw std::invalid_argument("matrix mean-zero constraint requested on a mesh without dual cells");
    }
    l.mean_pm_row_ = next++;
  }
  l.total_ = next;

  l.essential_.assign(static_cast<std::size_t>(l.total_), 0);
  l.essential_values_.assign(static_cast<std::size_t>(l.total_), 0.0);
  auto prescribe = [&](Index first, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Index dof = first + static_cast<Index>(i);
      l.essential_[dof] = 1;
      l.essential_values_[dof] = values[i];
      l.essential_list_.push_back(dof);
    }
  };

  const int nt = l.facet_scalar_size();
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const FacetClass kind = mesh.facet(f).kind;
    if (kind == FacetClass::BoundaryS && bcs.stokes.kind == StokesBoundary::Kind::Dirichlet) {
      std::vector<double> values(static_cast<std::size_t>(2 * nt), 0.0);
      if (bcs.stokes.velocity) {
        const auto& vel = bcs.stokes.velocity;
        const auto ux = project_on_facet(mesh, f, l.k_, [&](const Point& x) { return vel(x).x(); });
        const auto uy = project_on_facet(mesh, f, l.k_, [&](const Point& x) { return vel(x).y(); });
        std::copy(ux.begin(), ux.end(), values.begin());
        std::copy(uy.begin(), uy.end(), values.begin() + nt);
      }
      prescribe(l.ubar(f), values);
    }
    if (kind == FacetClass::BoundaryD) {
      if (bcs.fracture.prescribes_pressure()) {
        prescribe(l.pbar_d(f), project_on_facet(mesh, f, l.k_, bcs.fracture.trace_pressure));
      }
      if (bcs.matrix.prescribes_pressure()) {
        prescribe(l.pbar_m(f), project_on_facet(mesh, f, l.k_, bcs.matrix.trace_pressure));
      }
    }
  }
  return l;
}

SparseRow mean_constraint_row(const Mesh& mesh, const DofLayout& layout, Field field) {
  if (field != Field::P && field != Field::PM) {
    throw std::invalid_argument("mean constraint is defined for p and p^m only");
  }
  const int nq = layout.cell_pressure_size();
  const TriBasis basis(layout.degree() - 1);
  const QuadRule<2> rule = quad_tri(layout.degree() - 1);
  Eigen::VectorXd ref_integrals = Eigen::VectorXd::Zero(nq);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    ref_integrals += rule.weights[q] * basis.values(rule.points[q]);
  }

  SparseRow row;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const Index first = field == Field::P ? layout.p(c) : layout.pm(c);
    if (first < 0) {
      continue;
    }
    const double det = 2.0 * mesh.area(c);
    for (int i = 0; i < nq; ++i) {
      const double v = det * ref_integrals[i];
      if (std::abs(v) > 1e-13 * det) {
        row.cols.push_back(first + i);
        row.values.push_back(v);
      }
    }
  }
  return row;
}

FieldSolution::FieldSolution(const DofLayout& layout, std::vector<double> coefficients)
    : FieldSolution(layout) {
  if (coefficients.size() != coefficients_.size()) {
    throw std::invalid_argument("coefficient vector length " + std::to_string(coefficients.size()) +
                                " does not match layout total " + std::to_string(coefficients_.size()));
  }
  coefficients_ = std::move(coefficients);
}

}  // namespace dpshdg
