#include "dpshdg/forms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dpshdg {

namespace {

const std::array<Vec2, 3> kRefVertices = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

std::vector<Index> range(Index first, int n) {
  std::vector<Index> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    r[i] = first + i;
  }
  return r;
}

void append_range(std::vector<Index>& out, Index first, int n) {
  for (int i = 0; i < n; ++i) {
    out.push_back(first + i);
  }
}

}  // namespace

PhysicalParams PhysicalParams::uniform(const Mesh& mesh, const UniformParams& p) {
  PhysicalParams out;
  out.mu = p.mu;
  out.sigma = p.sigma;
  out.alpha = p.alpha;
  out.kappa_f.assign(static_cast<std::size_t>(mesh.num_cells()), p.kappa_f);
  out.kappa_m.assign(static_cast<std::size_t>(mesh.num_cells()), p.kappa_m);
  return out;
}

void PhysicalParams::validate(const Mesh& mesh) const {
  if (!(mu > 0.0) || !(sigma > 0.0) || !(alpha > 0.0)) {
    throw std::invalid_argument("mu, sigma and alpha must be positive");
  }
  if (static_cast<Index>(kappa_f.size()) != mesh.num_cells() ||
      static_cast<Index>(kappa_m.size()) != mesh.num_cells()) {
    throw std::invalid_argument("permeability arrays must have one entry per cell");
  }
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell(c).subdomain == Subdomain::Dual && (!(kappa_f[c] > 0.0) || !(kappa_m[c] > 0.0))) {
      throw std::invalid_argument("non-positive permeability on cell " + std::to_string(c));
    }
  }
}

KernelContext::KernelContext(const Mesh& mesh, const DofLayout& layout, const PhysicalParams& params,
                             const DiscretizationParams& disc)
    : mesh_(&mesh),
      layout_(&layout),
      params_(&params),
      disc_(disc),
      basis_(disc.k),
      pressure_basis_(disc.k - 1),
      cell_rule_(quad_tri(2 * disc.k + 2)),
      facet_rule_(quad_seg(2 * disc.k + 2)) {
  disc.validate();
  params.validate(mesh);
  if (layout.degree() != disc.k) {
    throw std::invalid_argument("layout degree differs from discretization degree");
  }
  cell_table_ = basis_.tabulate(cell_rule_.points);
  cell_pressure_values_ = pressure_basis_.tabulate(cell_rule_.points).values;
  trace_values_ = SegBasis(disc.k).tabulate(facet_rule_.points);
  for (int e = 0; e < 3; ++e) {
    const Vec2& a = kRefVertices[(e + 1) % 3];
    const Vec2& b = kRefVertices[(e + 2) % 3];
    for (int rev = 0; rev < 2; ++rev) {
      std::vector<Vec2> refs;
      for (double s : facet_rule_.points) {
        refs.push_back(rev == 0 ? Vec2(a + s * (b - a)) : Vec2(b + s * (a - b)));
      }
      edge_tables_[e][rev] = basis_.tabulate(refs);
      edge_pressure_[e][rev] = pressure_basis_.tabulate(refs).values;
    }
  }
}

CellEval KernelContext::cell(Index c) const {
  CellEval ev;
  ev.map = physical_map(mesh_->cell_points(c));
  const Mat2& it = ev.map.inverse_transpose;
  ev.phi = cell_table_.values;
  ev.dphix = it(0, 0) * cell_table_.dx + it(0, 1) * cell_table_.dy;
  ev.dphiy = it(1, 0) * cell_table_.dx + it(1, 1) * cell_table_.dy;
  ev.psi = cell_pressure_values_;
  const auto nq = static_cast<Eigen::Index>(cell_rule_.size());
  ev.weights.resize(nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    ev.weights[q] = cell_rule_.weights[q] * ev.map.det;
    ev.points.push_back(ev.map.to_physical(cell_rule_.points[q]));
  }
  return ev;
}

FacetEval KernelContext::trace(Index facet) const {
  const Facet& f = mesh_->facet(facet);
  const Point& a = mesh_->points()[f.vertices[0]];
  const Point& b = mesh_->points()[f.vertices[1]];
  FacetEval ev;
  ev.facet = facet;
  ev.normal = f.normal;
  ev.length = (b - a).norm();
  ev.trace = trace_values_;
  const auto nq = static_cast<Eigen::Index>(facet_rule_.size());
  ev.weights.resize(nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    ev.weights[q] = facet_rule_.weights[q] * ev.length;
    ev.points.push_back(a + facet_rule_.points[q] * (b - a));
  }
  return ev;
}

FacetEval KernelContext::facet(Index c, int local_edge) const {
  const Index fi = mesh_->cell_facet(c, local_edge);
  const Facet& f = mesh_->facet(fi);
  FacetEval ev = trace(fi);
  if (f.sides[0].cell != c) {
    ev.normal = -ev.normal;
  }
  const int rev = f.vertices[0] == mesh_->cell(c).vertices[(local_edge + 1) % 3] ? 0 : 1;
  const BasisTable& t = edge_tables_[local_edge][rev];
  const Mat2 it = physical_map(mesh_->cell_points(c)).inverse_transpose;
  ev.phi = t.values;
  ev.dphix = it(0, 0) * t.dx + it(0, 1) * t.dy;
  ev.dphiy = it(1, 0) * t.dx + it(1, 1) * t.dy;
  ev.psi = edge_pressure_[local_edge][rev];
  return ev;
}

LocalBlock kernel_ahs(const KernelContext& ctx, Index cell) {
  const Mesh& mesh = ctx.mesh();
  const DofLayout& layout = ctx.layout();
  if (mesh.cell(cell).subdomain != Subdomain::Stokes) {
    throw std::invalid_argument("kernel_ahs: cell " + std::to_string(cell) + " is not a Stokes cell");
  }
  const int nk = layout.cell_scalar_size();
  const int nu = layout.cell_vector_size();
  const int nt = layout.facet_scalar_size();
  const int nb = layout.facet_vector_size();
  const int n = nu + 3 * nb;
  const double mu = ctx.params().mu;
  const double penalty = 2.0 * ctx.disc().beta * mu / mesh.h(cell);

  LocalBlock blk;
  blk.rows = range(layout.u(cell), nu);
  for (int e = 0; e < 3; ++e) {
    append_range(blk.rows, layout.ubar(mesh.cell_facet(cell, e)), nb);
  }
  blk.cols = blk.rows;
  blk.matrix = Eigen::MatrixXd::Zero(n, n);

  // (2 mu eps(u), eps(v)) with eps stored as (e11, e22, sqrt2 e12).
  const CellEval ce = ctx.cell(cell);
  const double r2 = std::numbers::sqrt2 / 2.0;
  Eigen::MatrixXd strain(3, nu);
  for (Eigen::Index q = 0; q < ce.weights.size(); ++q) {
    strain.setZero();
    for (int j = 0; j < nk; ++j) {
      strain(0, j) = ce.dphix(q, j);
      strain(2, j) = r2 * ce.dphiy(q, j);
      strain(1, nk + j) = ce.dphiy(q, j);
      strain(2, nk + j) = r2 * ce.dphix(q, j);
    }
    blk.matrix.topLeftCorner(nu, nu).noalias() += 2.0 * mu * ce.weights[q] * strain.transpose() * strain;
  }

  Eigen::MatrixXd traction(2, n);
  Eigen::MatrixXd jump(2, n);
  for (int e = 0; e < 3; ++e) {
    const FacetEval fe = ctx.facet(cell, e);
    const double nx = fe.normal.x();
    const double ny = fe.normal.y();
    const int off = nu + e * nb;
    for (Eigen::Index q = 0; q < fe.weights.size(); ++q) {
      traction.setZero();
      jump.setZero();
      for (int j = 0; j < nk; ++j) {
        const double dx = fe.dphix(q, j);
        const double dy = fe.dphiy(q, j);
        traction(0, j) = dx * nx + 0.5 * dy * ny;
        traction(1, j) = 0.5 * dy * nx;
        traction(0, nk + j) = 0.5 * dx * ny;
        traction(1, nk + j) = 0.5 * dx * nx + dy * ny;
        jump(0, j) = fe.phi(q, j);
        jump(1, nk + j) = fe.phi(q, j);
      }
      for (int i = 0; i < nt; ++i) {
        jump(0, off + i) = -fe.trace(q, i);
        jump(1, off + nt + i) = -fe.trace(q, i);
      }
      const double w = fe.weights[q];
      const Eigen::MatrixXd jt = jump.transpose() * traction;
      blk.matrix.noalias() -= 2.0 * mu * w * (jt + jt.transpose());
      blk.matrix.noalias() += penalty * w * jump.transpose() * jump;
    }
  }
  return blk;
}

namespace {

LocalBlock weighted_vector_mass(const KernelContext& ctx, Index cell, Index first, double coefficient) {
  const int nk = ctx.layout().cell_scalar_size();
  const CellEval ce = ctx.cell(cell);
  const Eigen::MatrixXd mass = ce.phi.transpose() * ce.weights.asDiagonal() * ce.phi;
  LocalBlock blk;
  blk.rows = range(first, 2 * nk);
  blk.cols = blk.rows;
  blk.matrix = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
  blk.matrix.topLeftCorner(nk, nk) = coefficient * mass;
  blk.matrix.bottomRightCorner(nk, nk) = coefficient * mass;
  return blk;
}

void require_dual(const Mesh& mesh, Index cell, const char* who) {
  if (mesh.cell(cell).subdomain != Subdomain::Dual) {
    throw std::invalid_argument(std::string(who) + ": cell " + std::to_string(cell) + " is not a dual cell");
  }
}

void require_facet(const Mesh& mesh, Index facet, FacetClass kind, const char* who) {
  if (mesh.facet(facet).kind != kind) {
    throw std::invalid_argument(std::string(who) + ": facet " + std::to_string(facet) + " is " +
                                std::string(to_string(mesh.facet(facet).kind)));
  }
}

// sign * <qbar, vbar . n> over one facet, rows qbar (nt), cols vbar (2 nt).
Eigen::MatrixXd trace_normal_block(const FacetEval& fe, const Vec2& n, double sign) {
  const auto nt = fe.trace.cols();
  const Eigen::MatrixXd mass = fe.trace.transpose() * fe.weights.asDiagonal() * fe.trace;
  Eigen::MatrixXd m(nt, 2 * nt);
  m.leftCols(nt) = sign * n.x() * mass;
  m.rightCols(nt) = sign * n.y() * mass;
  return m;
}

}  // namespace

LocalBlock kernel_ahd(const KernelContext& ctx, Index cell) {
  require_dual(ctx.mesh(), cell, "kernel_ahd");
  return weighted_vector_mass(ctx, cell, ctx.layout().u(cell), 1.0 / ctx.params().kf(cell));
}

LocalBlock kernel_ahm(const KernelContext& ctx, Index cell) {
  require_dual(ctx.mesh(), cell, "kernel_ahm");
  return weighted_vector_mass(ctx, cell, ctx.layout().um(cell), 1.0 / ctx.params().km(cell));
}

LocalBlock kernel_ahI(const KernelContext& ctx, Index facet) {
  const Mesh& mesh = ctx.mesh();
  require_facet(mesh, facet, FacetClass::Interface, "kernel_ahI");
  const PhysicalParams& p = ctx.params();
  const Index dual_cell = mesh.facet(facet).sides[1].cell;
  const double coefficient = p.alpha * p.mu / std::sqrt(p.kf(dual_cell));
  const FacetEval fe = ctx.trace(facet);
  const Vec2 t(-fe.normal.y(), fe.normal.x());
  const int nt = ctx.layout().facet_scalar_size();
  const Eigen::MatrixXd mass = fe.trace.transpose() * fe.weights.asDiagonal() * fe.trace;

  LocalBlock blk;
  blk.rows = range(ctx.layout().ubar(facet), 2 * nt);
  blk.cols = blk.rows;
  blk.matrix.resize(2 * nt, 2 * nt);
  for (int c = 0; c < 2; ++c) {
    for (int d = 0; d < 2; ++d) {
      blk.matrix.block(c * nt, d * nt, nt, nt) = coefficient * t[c] * t[d] * mass;
    }
  }
  return blk;
}

LocalBlock kernel_bh(const KernelContext& ctx, Index cell, FlowField field) {
  const Mesh& mesh = ctx.mesh();
  const DofLayout& layout = ctx.layout();
  const bool stokes = mesh.cell(cell).subdomain == Subdomain::Stokes;
  if (stokes != (field == FlowField::Stokes)) {
    throw std::invalid_argument("kernel_bh: field does not live on cell " + std::to_string(cell));
  }
  const int nk = layout.cell_scalar_size();
  const int nu = layout.cell_vector_size();
  const int nq = layout.cell_pressure_size();
  const int nt = layout.facet_scalar_size();

  LocalBlock blk;
  blk.rows = range(field == FlowField::Matrix ? layout.pm(cell) : layout.p(cell), nq);
  for (int e = 0; e < 3; ++e) {
    const Index f = mesh.cell_facet(cell, e);
    const Index first = field == FlowField::Stokes   ? layout.pbar_s(f)
                        : field == FlowField::Fracture ? layout.pbar_d(f)
                                                       : layout.pbar_m(f);
    append_range(blk.rows, first, nt);
  }
  blk.cols = range(field == FlowField::Matrix ? layout.um(cell) : layout.u(cell), nu);
  blk.matrix = Eigen::MatrixXd::Zero(nq + 3 * nt, nu);

  // -(q, div v)_K
  const CellEval ce = ctx.cell(cell);
  const Eigen::MatrixXd wpsi = ce.weights.asDiagonal() * ce.psi;
  blk.matrix.block(0, 0, nq, nk) = -wpsi.transpose() * ce.dphix;
  blk.matrix.block(0, nk, nq, nk) = -wpsi.transpose() * ce.dphiy;

  // <qbar, v . n>_dK
  for (int e = 0; e < 3; ++e) {
    const FacetEval fe = ctx.facet(cell, e);
    const Eigen::MatrixXd m = fe.trace.transpose() * fe.weights.asDiagonal() * fe.phi;
    blk.matrix.block(nq + e * nt, 0, nt, nk) = fe.normal.x() * m;
    blk.matrix.block(nq + e * nt, nk, nt, nk) = fe.normal.y() * m;
  }
  return blk;
}

std::array<LocalBlock, 2> kernel_bhI(const KernelContext& ctx, Index facet) {
  require_facet(ctx.mesh(), facet, FacetClass::Interface, "kernel_bhI");
  const DofLayout& layout = ctx.layout();
  const int nt = layout.facet_scalar_size();
  const FacetEval fe = ctx.trace(facet);
  std::array<LocalBlock, 2> out;
  out[0].rows = range(layout.pbar_s(facet), nt);
  out[0].cols = range(layout.ubar(facet), 2 * nt);
  out[0].matrix = trace_normal_block(fe, fe.normal, -1.0);
  out[1].rows = range(layout.pbar_d(facet), nt);
  out[1].cols = out[0].cols;
  out[1].matrix = trace_normal_block(fe, -fe.normal, -1.0);
  return out;
}

LocalBlock kernel_bh_outer(const KernelContext& ctx, Index facet) {
  require_facet(ctx.mesh(), facet, FacetClass::BoundaryS, "kernel_bh_outer");
  const DofLayout& layout = ctx.layout();
  const int nt = layout.facet_scalar_size();
  const FacetEval fe = ctx.trace(facet);
  LocalBlock blk;
  blk.rows = range(layout.pbar_s(facet), nt);
  blk.cols = range(layout.ubar(facet), 2 * nt);
  blk.matrix = trace_normal_block(fe, fe.normal, -1.0);
  return blk;
}

LocalBlock kernel_ch(const KernelContext& ctx, Index cell) {
  require_dual(ctx.mesh(), cell, "kernel_ch");
  const DofLayout& layout = ctx.layout();
  const int nq = layout.cell_pressure_size();
  const CellEval ce = ctx.cell(cell);
  const double s = ctx.params().sigma * ctx.params().km(cell);
  const Eigen::MatrixXd mass = s * (ce.psi.transpose() * ce.weights.asDiagonal() * ce.psi);
  LocalBlock blk;
  blk.rows = range(layout.p(cell), nq);
  append_range(blk.rows, layout.pm(cell), nq);
  blk.cols = blk.rows;
  blk.matrix.resize(2 * nq, 2 * nq);
  blk.matrix << mass, -mass, -mass, mass;
  return blk;
}

}  // namespace dpshdg
