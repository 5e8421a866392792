#include "dpshdg/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dpshdg {

bool ConservationReport::passes(double tol) const {
  return div_stokes <= tol * (1.0 + scale_div) && fracture_balance <= tol * (1.0 + scale_fracture) &&
         matrix_balance <= tol * (1.0 + scale_matrix) && jump_u <= tol * (1.0 + scale_velocity) &&
         interface_flux <= tol * (1.0 + scale_velocity) && jump_u_m <= tol * (1.0 + scale_matrix_velocity);
}

std::string ConservationReport::csv_header() {
  return "div_stokes,fracture_balance,matrix_balance,jump_u,interface_flux,jump_u_m,"
         "scale_div,scale_fracture,scale_matrix,scale_velocity,scale_matrix_velocity";
}

std::string ConservationReport::csv_row() const {
  std::ostringstream os;
  os << std::setprecision(6) << div_stokes << ',' << fracture_balance << ',' << matrix_balance << ',' << jump_u
     << ',' << interface_flux << ',' << jump_u_m << ',' << scale_div << ',' << scale_fracture << ','
     << scale_matrix << ',' << scale_velocity << ',' << scale_matrix_velocity;
  return os.str();
}

namespace {

// Normal component of the cell velocity block starting at `first` at every
// quadrature point of the facet.
Eigen::VectorXd normal_flux(const FacetEval& fe, const std::vector<double>& x, Index first, int nk,
                            const Vec2& n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(fe.weights.size());
  for (Eigen::Index q = 0; q < out.size(); ++q) {
    double ux = 0.0;
    double uy = 0.0;
    for (int j = 0; j < nk; ++j) {
      ux += x[first + j] * fe.phi(q, j);
      uy += x[first + nk + j] * fe.phi(q, j);
    }
    out[q] = ux * n.x() + uy * n.y();
  }
  return out;
}

Eigen::VectorXd trace_flux(const FacetEval& fe, const std::vector<double>& x, Index first, int nt,
                           const Vec2& n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(fe.weights.size());
  for (Eigen::Index q = 0; q < out.size(); ++q) {
    double ux = 0.0;
    double uy = 0.0;
    for (int i = 0; i < nt; ++i) {
      ux += x[first + i] * fe.trace(q, i);
      uy += x[first + nt + i] * fe.trace(q, i);
    }
    out[q] = ux * n.x() + uy * n.y();
  }
  return out;
}

double facet_norm(const FacetEval& fe, const Eigen::VectorXd& v) {
  return std::sqrt(fe.weights.dot(v.cwiseAbs2()));
}

// Squared broken H1 seminorm of a vector field on one cell.
double grad_norm2(const CellEval& ce, const Eigen::Ref<const Eigen::VectorXd>& ux,
                  const Eigen::Ref<const Eigen::VectorXd>& uy) {
  const Eigen::VectorXd gx = ce.dphix * ux;
  const Eigen::VectorXd gy = ce.dphiy * ux;
  const Eigen::VectorXd hx = ce.dphix * uy;
  const Eigen::VectorXd hy = ce.dphiy * uy;
  return ce.weights.dot(gx.cwiseAbs2() + gy.cwiseAbs2() + hx.cwiseAbs2() + hy.cwiseAbs2());
}

}  // namespace

ConservationReport conservation(const FieldSolution& solution, const Mesh& mesh, const DofLayout& layout,
                                const PhysicalParams& params, const SourceSet& sources) {
  const KernelContext ctx(mesh, layout, params, DiscretizationParams::with_degree(layout.degree()));
  const auto& x = solution.coefficients();
  const int nk = layout.cell_scalar_size();
  const int nq = layout.cell_pressure_size();
  const int nt = layout.facet_scalar_size();
  ConservationReport r;

  double s_div = 0.0;
  double s_frac[3] = {0.0, 0.0, 0.0};
  double s_mat[3] = {0.0, 0.0, 0.0};
  double s_vel = 0.0;
  double s_mvel = 0.0;

  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellEval ce = ctx.cell(c);
    const bool stokes = mesh.cell(c).subdomain == Subdomain::Stokes;
    const Index u0 = layout.u(c);
    const Index m0 = layout.um(c);
    const Eigen::Map<const Eigen::VectorXd> ux(&x[u0], nk);
    const Eigen::Map<const Eigen::VectorXd> uy(&x[u0 + nk], nk);
    const Eigen::VectorXd div = ce.dphix * ux + ce.dphiy * uy;
    const Eigen::VectorXd vx = ce.phi * ux;
    const Eigen::VectorXd vy = ce.phi * uy;
    s_vel += ce.weights.dot(vx.cwiseAbs2() + vy.cwiseAbs2());
    if (stokes) {
      r.div_stokes += ce.weights.dot(div.cwiseAbs2());
      s_div += grad_norm2(ce, ux, uy);
      continue;
    }
    const Eigen::Map<const Eigen::VectorXd> mx(&x[m0], nk);
    const Eigen::Map<const Eigen::VectorXd> my(&x[m0 + nk], nk);
    const Eigen::VectorXd mdiv = ce.dphix * mx + ce.dphiy * my;
    const Eigen::VectorXd wx = ce.phi * mx;
    const Eigen::VectorXd wy = ce.phi * my;
    s_mvel += ce.weights.dot(wx.cwiseAbs2() + wy.cwiseAbs2());
    const Eigen::VectorXd p = ce.psi * Eigen::Map<const Eigen::VectorXd>(&x[layout.p(c)], nq);
    const Eigen::VectorXd pm = ce.psi * Eigen::Map<const Eigen::VectorXd>(&x[layout.pm(c)], nq);
    const double s = params.sigma * params.km(c);

    auto projected = [&](const ScalarFn& g) {
      Eigen::VectorXd gq = Eigen::VectorXd::Zero(ce.weights.size());
      if (g) {
        for (Eigen::Index q = 0; q < gq.size(); ++q) {
          gq[q] = g(ce.points[q]);
        }
      }
      const Eigen::VectorXd coeffs = ce.psi.transpose() * ce.weights.asDiagonal() * gq / ce.map.det;
      return Eigen::VectorXd(ce.psi * coeffs);
    };
    const Eigen::VectorXd pg = projected(sources.g);
    const Eigen::VectorXd pgm = projected(sources.g_m);
    const Eigen::VectorXd exch = s * (p - pm);
    r.fracture_balance += ce.weights.dot((exch + div - pg).cwiseAbs2());
    r.matrix_balance += ce.weights.dot((-exch + mdiv - pgm).cwiseAbs2());
    s_frac[0] += ce.weights.dot(exch.cwiseAbs2());
    s_frac[1] += grad_norm2(ce, ux, uy);
    s_frac[2] += ce.weights.dot(pg.cwiseAbs2());
    s_mat[0] += ce.weights.dot(exch.cwiseAbs2());
    s_mat[1] += grad_norm2(ce, mx, my);
    s_mat[2] += ce.weights.dot(pgm.cwiseAbs2());
  }
  r.div_stokes = std::sqrt(r.div_stokes);
  r.fracture_balance = std::sqrt(r.fracture_balance);
  r.matrix_balance = std::sqrt(r.matrix_balance);
  r.scale_div = std::sqrt(s_div);
  r.scale_fracture = std::sqrt(s_frac[0]) + std::sqrt(s_frac[1]) + std::sqrt(s_frac[2]);
  r.scale_matrix = std::sqrt(s_mat[0]) + std::sqrt(s_mat[1]) + std::sqrt(s_mat[2]);
  r.scale_velocity = std::sqrt(s_vel);
  r.scale_matrix_velocity = std::sqrt(s_mvel);

  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const Facet& facet = mesh.facet(f);
    const Vec2& n = facet.normal;
    const Index c0 = facet.sides[0].cell;
    const Index c1 = facet.sides[1].cell;
    const FacetEval f0 = ctx.facet(c0, facet.sides[0].local_edge);
    const bool stokes_side = facet.kind == FacetClass::InteriorS || facet.kind == FacetClass::BoundaryS;

    if (facet.kind == FacetClass::Interface) {
      const FacetEval f1 = ctx.facet(c1, facet.sides[1].local_edge);
      const Eigen::VectorXd bar = trace_flux(f0, x, layout.ubar(f), nt, n);
      const double s_side = facet_norm(f0, normal_flux(f0, x, layout.u(c0), nk, n) - bar);
      const double d_side = facet_norm(f1, normal_flux(f1, x, layout.u(c1), nk, n) - bar);
      r.interface_flux = std::max({r.interface_flux, s_side, d_side});
    } else {
      const Index mult = stokes_side ? layout.pbar_s(f) : layout.pbar_d(f);
      if (!layout.is_essential(mult)) {
        Eigen::VectorXd jump = normal_flux(f0, x, layout.u(c0), nk, n);
        if (c1 >= 0) {
          jump -= normal_flux(ctx.facet(c1, facet.sides[1].local_edge), x, layout.u(c1), nk, n);
        } else if (stokes_side) {
          jump -= trace_flux(f0, x, layout.ubar(f), nt, n);
        }
        r.jump_u = std::max(r.jump_u, facet_norm(f0, jump));
      }
    }

    const Index mult_m = layout.pbar_m(f);
    if (mult_m >= 0 && !layout.is_essential(mult_m)) {
      Eigen::VectorXd jump;
      if (facet.kind == FacetClass::Interface) {
        const FacetEval f1 = ctx.facet(c1, facet.sides[1].local_edge);
        jump = normal_flux(f1, x, layout.um(c1), nk, n);
      } else {
        jump = normal_flux(f0, x, layout.um(c0), nk, n);
        if (c1 >= 0) {
          jump -= normal_flux(ctx.facet(c1, facet.sides[1].local_edge), x, layout.um(c1), nk, n);
        }
      }
      r.jump_u_m = std::max(r.jump_u_m, facet_norm(f0, jump));
    }
  }
  return r;
}

PointValues evaluate(const FieldSolution& solution, const Mesh& mesh, const DofLayout& layout, Index cell,
                     const Point& x) {
  const auto& coeffs = solution.coefficients();
  const int k = layout.degree();
  const AffineMap map = physical_map(mesh.cell_points(cell));
  const Vec2 ref = map.to_reference(x);
  const Eigen::VectorXd phi = TriBasis(k).values(ref);
  const Eigen::VectorXd psi = TriBasis(k - 1).values(ref);
  const int nk = layout.cell_scalar_size();
  const int nq = layout.cell_pressure_size();
  auto vec = [&](Index first) {
    return Vec2(phi.dot(Eigen::Map<const Eigen::VectorXd>(&coeffs[first], nk)),
                phi.dot(Eigen::Map<const Eigen::VectorXd>(&coeffs[first + nk], nk)));
  };
  auto scal = [&](Index first) { return psi.dot(Eigen::Map<const Eigen::VectorXd>(&coeffs[first], nq)); };
  PointValues v;
  v.u = vec(layout.u(cell));
  v.p = scal(layout.p(cell));
  if (layout.um(cell) >= 0) {
    v.u_m = vec(layout.um(cell));
    v.p_m = scal(layout.pm(cell));
  }
  return v;
}

std::vector<PointValues> cell_means(const FieldSolution& solution, const Mesh& mesh, const DofLayout& layout) {
  const int k = layout.degree();
  const QuadRule<2> rule = quad_tri(k);
  std::vector<PointValues> out(static_cast<std::size_t>(mesh.num_cells()));
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const AffineMap map = physical_map(mesh.cell_points(c));
    PointValues mean;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      // Reference weights sum to 1/2.
      const double w = 2.0 * rule.weights[q];
      const PointValues v = evaluate(solution, mesh, layout, c, map.to_physical(rule.points[q]));
      mean.u += w * v.u;
      mean.p += w * v.p;
      mean.u_m += w * v.u_m;
      mean.p_m += w * v.p_m;
    }
    out[c] = mean;
  }
  return out;
}

void export_fields(const FieldSolution& solution, const Mesh& mesh, const DofLayout& layout,
                   const std::filesystem::path& vtk_path) {
  const Index np = mesh.num_points();
  const Index nc = mesh.num_cells();

  // Vertex averages over adjacent cells; matrix fields over dual cells only.
  std::vector<PointValues> nodal(static_cast<std::size_t>(np));
  std::vector<int> count(static_cast<std::size_t>(np), 0);
  std::vector<int> count_m(static_cast<std::size_t>(np), 0);
  std::vector<PointValues> centre(static_cast<std::size_t>(nc));
  for (Index c = 0; c < nc; ++c) {
    const bool dual = mesh.cell(c).subdomain == Subdomain::Dual;
    for (Index v : mesh.cell(c).vertices) {
      const PointValues pv = evaluate(solution, mesh, layout, c, mesh.points()[v]);
      nodal[v].u += pv.u;
      nodal[v].p += pv.p;
      ++count[v];
      if (dual) {
        nodal[v].u_m += pv.u_m;
        nodal[v].p_m += pv.p_m;
        ++count_m[v];
      }
    }
    centre[c] = evaluate(solution, mesh, layout, c, mesh.centroid(c));
  }
  for (Index v = 0; v < np; ++v) {
    if (count[v] > 0) {
      nodal[v].u /= count[v];
      nodal[v].p /= count[v];
    }
    if (count_m[v] > 0) {
      nodal[v].u_m /= count_m[v];
      nodal[v].p_m /= count_m[v];
    }
  }

  std::ofstream vtk(vtk_path);
  if (!vtk) {
    throw std::runtime_error("cannot write " + vtk_path.string());
  }
  vtk << std::setprecision(12);
  vtk << "# vtk DataFile Version 3.0\n"
      << "dps-hdg fields\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  vtk << "POINTS " << np << " double\n";
  for (const Point& p : mesh.points()) {
    vtk << p.x() << ' ' << p.y() << " 0\n";
  }
  vtk << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (const Cell& c : mesh.cells()) {
    vtk << "3 " << c.vertices[0] << ' ' << c.vertices[1] << ' ' << c.vertices[2] << '\n';
  }
  vtk << "CELL_TYPES " << nc << '\n';
  for (Index c = 0; c < nc; ++c) {
    vtk << "5\n";
  }

  auto write_vectors = [&](const char* name, const std::vector<PointValues>& vals, Vec2 PointValues::*field) {
    vtk << "VECTORS " << name << " double\n";
    for (const auto& v : vals) {
      vtk << (v.*field).x() << ' ' << (v.*field).y() << " 0\n";
    }
  };
  auto write_scalars = [&](const char* name, const std::vector<PointValues>& vals, double PointValues::*field) {
    vtk << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const auto& v : vals) {
      vtk << v.*field << '\n';
    }
  };
  vtk << "POINT_DATA " << np << '\n';
  write_vectors("u", nodal, &PointValues::u);
  write_scalars("p", nodal, &PointValues::p);
  write_vectors("u_m", nodal, &PointValues::u_m);
  write_scalars("p_m", nodal, &PointValues::p_m);
  vtk << "CELL_DATA " << nc << '\n';
  write_vectors("u_centroid", centre, &PointValues::u);
  write_scalars("p_centroid", centre, &PointValues::p);
  write_vectors("u_m_centroid", centre, &PointValues::u_m);
  write_scalars("p_m_centroid", centre, &PointValues::p_m);
  vtk << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (const Cell& c : mesh.cells()) {
    vtk << (c.subdomain == Subdomain::Stokes ? 0 : 1) << '\n';
  }
  if (!vtk) {
    throw std::runtime_error("error while writing " + vtk_path.string());
  }

  std::filesystem::path csv_path = vtk_path;
  csv_path.replace_extension(".csv");
  std::ofstream csv(csv_path);
  if (!csv) {
    throw std::runtime_error("cannot write " + csv_path.string());
  }
  csv << "cell,x,y,ux,uy,p,umx,umy,pm\n" << std::setprecision(17);
  const auto means = cell_means(solution, mesh, layout);
  for (Index c = 0; c < nc; ++c) {
    const Point x = mesh.centroid(c);
    const auto& m = means[c];
    csv << c << ',' << x.x() << ',' << x.y() << ',' << m.u.x() << ',' << m.u.y() << ',' << m.p << ','
        << m.u_m.x() << ',' << m.u_m.y() << ',' << m.p_m << '\n';
  }
  if (!csv) {
    throw std::runtime_error("error while writing " + csv_path.string());
  }
}

}  // namespace dpshdg
