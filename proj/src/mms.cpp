#include "dpshdg/mms.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dpshdg {

namespace {

constexpr double kPi = std::numbers::pi;

Mat2 make_mat(double a, double b, double c, double d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

}  // namespace

UniformParams example1_params() {
  UniformParams p;
  p.mu = 1.0;
  p.kappa_f = 1.0;
  p.kappa_m = 1.0;
  p.sigma = 0.5;
  p.alpha = p.mu * std::sqrt(p.kappa_f) * (1.0 + 4.0 * kPi * kPi) / 2.0;
  return p;
}

ManufacturedProblem example1(const UniformParams& params) {
  const double mu = params.mu;
  const double kf = params.kappa_f;
  const double km = params.kappa_m;
  const double sigma = params.sigma;
  const double alpha = params.alpha;

  // u^s_x amplitude fixed by div u^s = 0 and the slip condition on y = 1/2.
  const double a = -1.0 / (2.0 * kPi * kPi);
  const double cs = (kf * mu - 2.0) / (kf * kPi);
  const double cd = -2.0 / (kf * kPi);
  const double cm = 1.0 / (km * kPi);

  ExactSolution ex;
  ex.u_s = [=](const Point& x) {
    const double e = std::exp(x.y() / 2.0);
    return Vec2(a * std::sin(kPi * x.x()) * e, std::cos(kPi * x.x()) * e / kPi);
  };
  ex.grad_u_s = [=](const Point& x) {
    const double e = std::exp(x.y() / 2.0);
    const double s = std::sin(kPi * x.x());
    const double c = std::cos(kPi * x.x());
    return make_mat(a * kPi * c * e, 0.5 * a * s * e, -s * e, c * e / (2.0 * kPi));
  };
  ex.hess_u_s = [=](const Point& x) {
    const double e = std::exp(x.y() / 2.0);
    const double s = std::sin(kPi * x.x());
    const double c = std::cos(kPi * x.x());
    const double hx_xy = 0.5 * a * kPi * c * e;
    const double hy_xy = -0.5 * s * e;
    return std::array<Mat2, 2>{make_mat(-a * kPi * kPi * s * e, hx_xy, hx_xy, 0.25 * a * s * e),
                               make_mat(-kPi * c * e, hy_xy, hy_xy, c * e / (4.0 * kPi))};
  };
  ex.p_s = [=](const Point& x) { return cs * std::cos(kPi * x.x()) * std::exp(x.y() / 2.0); };
  ex.grad_p_s = [=](const Point& x) {
    const double e = std::exp(x.y() / 2.0);
    return Vec2(-cs * kPi * std::sin(kPi * x.x()) * e, 0.5 * cs * std::cos(kPi * x.x()) * e);
  };

  ex.u_d = [](const Point& x) {
    const double e = std::exp(x.y() / 2.0);
    return Vec2(-2.0 * std::sin(kPi * x.x()) * e, std::cos(kPi * x.x()) * e / kPi);
  };
  ex.grad_u_d = [](const Point& x) {
    const double e = std::exp(x.y() / 2.0);
    const double s = std::sin(kPi * x.x());
    const double c = std::cos(kPi * x.x());
    return make_mat(-2.0 * kPi * c * e, -s * e, -s * e, c * e / (2.0 * kPi));
  };
  ex.p_d = [=](const Point& x) { return cd * std::cos(kPi * x.x()) * std::exp(x.y() / 2.0); };
  ex.grad_p_d = [=](const Point& x) {
    const double e = std::exp(x.y() / 2.0);
    return Vec2(-cd * kPi * std::sin(kPi * x.x()) * e, 0.5 * cd * std::cos(kPi * x.x()) * e);
  };

  ex.u_m = [](const Point& x) {
    return Vec2(-std::sin(kPi * x.x()) * std::cos(2.0 * kPi * x.y()),
                -2.0 * std::cos(kPi * x.x()) * std::sin(2.0 * kPi * x.y()));
  };
  ex.grad_u_m = [](const Point& x) {
    const double s = std::sin(kPi * x.x());
    const double c = std::cos(kPi * x.x());
    const double s2 = std::sin(2.0 * kPi * x.y());
    const double c2 = std::cos(2.0 * kPi * x.y());
    return make_mat(-kPi * c * c2, 2.0 * kPi * s * s2, 2.0 * kPi * s * s2, -4.0 * kPi * c * c2);
  };
  ex.p_m = [=](const Point& x) { return cm * std::cos(kPi * x.x()) * std::cos(2.0 * kPi * x.y()); };
  ex.grad_p_m = [=](const Point& x) {
    return Vec2(-cm * kPi * std::sin(kPi * x.x()) * std::cos(2.0 * kPi * x.y()),
                -2.0 * cm * kPi * std::cos(kPi * x.x()) * std::sin(2.0 * kPi * x.y()));
  };

  ManufacturedProblem out;
  out.params = params;
  out.exact = ex;
  SourceSet& src = out.sources;
  // -div(2 mu eps(u)) + grad p = -mu (lap u + grad div u) + grad p
  src.f = [ex, mu](const Point& x) {
    const auto h = ex.hess_u_s(x);
    const Vec2 lap(h[0].trace(), h[1].trace());
    const Vec2 grad_div(h[0](0, 0) + h[1](0, 1), h[0](0, 1) + h[1](1, 1));
    return Vec2(-mu * (lap + grad_div) + ex.grad_p_s(x));
  };
  src.f_d = [ex, kf](const Point& x) { return Vec2(ex.u_d(x) / kf + ex.grad_p_d(x)); };
  src.f_m = [ex, km](const Point& x) { return Vec2(ex.u_m(x) / km + ex.grad_p_m(x)); };
  src.g = [ex, sigma, km](const Point& x) {
    return ex.grad_u_d(x).trace() + sigma * km * (ex.p_d(x) - ex.p_m(x));
  };
  src.g_m = [ex, sigma, km](const Point& x) {
    return ex.grad_u_m(x).trace() + sigma * km * (ex.p_m(x) - ex.p_d(x));
  };
  // Residual of the interface conditions on y = 1/2 with n = n^s = (0, -1).
  src.interface_traction = [ex, mu, alpha, kf](const Point& x) {
    const Vec2 n(0.0, -1.0);
    const Vec2 t(1.0, 0.0);
    const Mat2 g = ex.grad_u_s(x);
    const Mat2 eps = 0.5 * (g + g.transpose());
    const Vec2 u = ex.u_s(x);
    return Vec2(2.0 * mu * eps * n + (ex.p_d(x) - ex.p_s(x)) * n + alpha * mu / std::sqrt(kf) * u.dot(t) * t);
  };
  return out;
}

BoundaryConditionSet example1_boundary(const ExactSolution& exact) {
  BoundaryConditionSet bcs;
  bcs.stokes.kind = StokesBoundary::Kind::Dirichlet;
  bcs.stokes.velocity = exact.u_s;
  bcs.fracture = DualBoundary::pressure(exact.p_d);
  bcs.matrix = DualBoundary::pressure(exact.p_m);
  return bcs;
}

FieldSolution interpolate(const Mesh& mesh, const DofLayout& layout, const ExactSolution& exact) {
  FieldSolution sol(layout);
  auto& x = sol.coefficients();
  const int k = layout.degree();
  const TriBasis basis(k);
  const TriBasis pbasis(k - 1);
  const QuadRule<2> rule = quad_tri(2 * k + 2);
  const BasisTable phi = basis.tabulate(rule.points);
  const BasisTable psi = pbasis.tabulate(rule.points);
  const int nk = layout.cell_scalar_size();
  const int nq = layout.cell_pressure_size();

  auto project_vector = [&](const AffineMap& map, const VectorFn& f, Index first) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 v = rule.weights[q] * f(map.to_physical(rule.points[q]));
      for (int j = 0; j < nk; ++j) {
        x[first + j] += v.x() * phi.values(static_cast<Eigen::Index>(q), j);
        x[first + nk + j] += v.y() * phi.values(static_cast<Eigen::Index>(q), j);
      }
    }
  };
  auto project_scalar = [&](const AffineMap& map, const ScalarFn& f, Index first) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double v = rule.weights[q] * f(map.to_physical(rule.points[q]));
      for (int j = 0; j < nq; ++j) {
        x[first + j] += v * psi.values(static_cast<Eigen::Index>(q), j);
      }
    }
  };

  // The physical mass matrix of the orthonormal reference basis is det * I,
  // so reference-weight moments are already the coefficients.
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const AffineMap map = physical_map(mesh.cell_points(c));
    if (mesh.cell(c).subdomain == Subdomain::Stokes) {
      project_vector(map, exact.u_s, layout.u(c));
      project_scalar(map, exact.p_s, layout.p(c));
    } else {
      project_vector(map, exact.u_d, layout.u(c));
      project_scalar(map, exact.p_d, layout.p(c));
      project_vector(map, exact.u_m, layout.um(c));
      project_scalar(map, exact.p_m, layout.pm(c));
    }
  }

  const int nt = layout.facet_scalar_size();
  auto put = [&](Index first, const std::vector<double>& v) {
    for (int i = 0; i < nt; ++i) {
      x[first + i] = v[i];
    }
  };
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (layout.ubar(f) >= 0) {
      put(layout.ubar(f), project_on_facet(mesh, f, k, [&](const Point& p) { return exact.u_s(p).x(); }));
      put(layout.ubar(f) + nt, project_on_facet(mesh, f, k, [&](const Point& p) { return exact.u_s(p).y(); }));
      put(layout.pbar_s(f), project_on_facet(mesh, f, k, exact.p_s));
    }
    if (layout.pbar_d(f) >= 0) {
      put(layout.pbar_d(f), project_on_facet(mesh, f, k, exact.p_d));
      put(layout.pbar_m(f), project_on_facet(mesh, f, k, exact.p_m));
    }
  }
  return sol;
}

std::string ErrorReport::csv_header() {
  return "cells,h_max,u_s,p_s,grad_u_s,div_u_s,u_d,p_d,div_u_d,phi,u_m,p_m,div_u_m,phi_m";
}

std::string ErrorReport::csv_row() const {
  std::ostringstream os;
  os << std::setprecision(10) << cells << ',' << h_max << ',' << u_s << ',' << p_s << ',' << grad_u_s << ','
     << div_u_s << ',' << u_d << ',' << p_d << ',' << div_u_d << ',' << phi << ',' << u_m << ',' << p_m << ','
     << div_u_m << ',' << phi_m;
  return os.str();
}

ErrorReport compute_errors(const FieldSolution& solution, const ExactSolution& exact, const Mesh& mesh,
                           const DofLayout& layout, const PhysicalParams& params, const SourceSet& sources) {
  const KernelContext ctx(mesh, layout, params, DiscretizationParams::with_degree(layout.degree()));
  const auto& x = solution.coefficients();
  const int nk = layout.cell_scalar_size();
  const int nq = layout.cell_pressure_size();

  ErrorReport r;
  r.cells = mesh.num_cells();
  r.h_max = mesh.h_max();

  struct Local {
    Vec2 u;
    Mat2 grad;
    double p;
  };
  auto eval = [&](const CellEval& ce, Eigen::Index q, Index ufirst, Index pfirst) {
    Local l{Vec2::Zero(), Mat2::Zero(), 0.0};
    for (int j = 0; j < nk; ++j) {
      const double cx = x[ufirst + j];
      const double cy = x[ufirst + nk + j];
      l.u += Vec2(cx, cy) * ce.phi(q, j);
      l.grad(0, 0) += cx * ce.dphix(q, j);
      l.grad(0, 1) += cx * ce.dphiy(q, j);
      l.grad(1, 0) += cy * ce.dphix(q, j);
      l.grad(1, 1) += cy * ce.dphiy(q, j);
    }
    for (int j = 0; j < nq; ++j) {
      l.p += x[pfirst + j] * ce.psi(q, j);
    }
    return l;
  };
  // Elementwise L2 projection of g onto P_{k-1}, evaluated at the cell points.
  auto project = [&](const CellEval& ce, const ScalarFn& g) {
    Eigen::VectorXd values = Eigen::VectorXd::Zero(ce.weights.size());
    if (!g) {
      return values;
    }
    Eigen::VectorXd gq(ce.weights.size());
    for (Eigen::Index q = 0; q < gq.size(); ++q) {
      gq[q] = g(ce.points[q]);
    }
    const Eigen::VectorXd coeffs = ce.psi.transpose() * ce.weights.asDiagonal() * gq / ce.map.det;
    return Eigen::VectorXd(ce.psi * coeffs);
  };

  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellEval ce = ctx.cell(c);
    if (mesh.cell(c).subdomain == Subdomain::Stokes) {
      for (Eigen::Index q = 0; q < ce.weights.size(); ++q) {
        const Point& pt = ce.points[q];
        const double w = ce.weights[q];
        const Local l = eval(ce, q, layout.u(c), layout.p(c));
        r.u_s += w * (l.u - exact.u_s(pt)).squaredNorm();
        r.p_s += w * std::pow(l.p - exact.p_s(pt), 2);
        r.grad_u_s += w * (l.grad - exact.grad_u_s(pt)).squaredNorm();
        r.div_u_s += w * std::pow(l.grad.trace(), 2);
      }
      continue;
    }
    const double s = params.sigma * params.km(c);
    const Eigen::VectorXd pg = project(ce, sources.g);
    const Eigen::VectorXd pgm = project(ce, sources.g_m);
    for (Eigen::Index q = 0; q < ce.weights.size(); ++q) {
      const Point& pt = ce.points[q];
      const double w = ce.weights[q];
      const Local d = eval(ce, q, layout.u(c), layout.p(c));
      const Local m = eval(ce, q, layout.um(c), layout.pm(c));
      r.u_d += w * (d.u - exact.u_d(pt)).squaredNorm();
      r.p_d += w * std::pow(d.p - exact.p_d(pt), 2);
      r.div_u_d += w * std::pow(d.grad.trace() - exact.grad_u_d(pt).trace(), 2);
      r.phi += w * std::pow(s * (d.p - m.p) + d.grad.trace() - pg[q], 2);
      r.u_m += w * (m.u - exact.u_m(pt)).squaredNorm();
      r.p_m += w * std::pow(m.p - exact.p_m(pt), 2);
      r.div_u_m += w * std::pow(m.grad.trace() - exact.grad_u_m(pt).trace(), 2);
      r.phi_m += w * std::pow(s * (m.p - d.p) + m.grad.trace() - pgm[q], 2);
    }
  }
  for (double* v : {&r.u_s, &r.p_s, &r.grad_u_s, &r.div_u_s, &r.u_d, &r.p_d, &r.div_u_d, &r.phi, &r.u_m,
                    &r.p_m, &r.div_u_m, &r.phi_m}) {
    *v = std::sqrt(*v);
  }
  return r;
}

const RateColumn& RateTable::column(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) {
      return c;
    }
  }
  throw std::out_of_range("rate table has no column " + name);
}

void RateTable::write_csv(std::ostream& out) const {
  out << "cells,h";
  for (const auto& c : columns) {
    out << ',' << c.name << ',' << c.name << "_rate";
  }
  out << '\n' << std::setprecision(6);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out << cells[i] << ',' << h[i];
    for (const auto& c : columns) {
      out << ',' << c.errors[i] << ',';
      if (i > 0) {
        out << c.rates[i - 1];
      }
    }
    out << '\n';
  }
}

RateTable rates(const std::vector<ErrorReport>& reports) {
  if (reports.size() < 2) {
    throw std::invalid_argument("rates need at least two refinement levels");
  }
  RateTable t;
  for (const auto& r : reports) {
    t.cells.push_back(r.cells);
    t.h.push_back(r.h_max);
  }
  const std::vector<std::pair<std::string, double ErrorReport::*>> fields = {
      {"u_s", &ErrorReport::u_s},         {"p_s", &ErrorReport::p_s},   {"grad_u_s", &ErrorReport::grad_u_s},
      {"div_u_s", &ErrorReport::div_u_s}, {"u_d", &ErrorReport::u_d},   {"p_d", &ErrorReport::p_d},
      {"div_u_d", &ErrorReport::div_u_d}, {"phi", &ErrorReport::phi},   {"u_m", &ErrorReport::u_m},
      {"p_m", &ErrorReport::p_m},         {"div_u_m", &ErrorReport::div_u_m}, {"phi_m", &ErrorReport::phi_m}};
  for (const auto& [name, member] : fields) {
    RateColumn col;
    col.name = name;
    for (const auto& r : reports) {
      col.errors.push_back(r.*member);
    }
    for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
      const double e0 = col.errors[i];
      const double e1 = col.errors[i + 1];
      const double h0 = t.h[i];
      const double h1 = t.h[i + 1];
      if (e0 > 0.0 && e1 > 0.0 && h0 != h1) {
        col.rates.push_back(std::log(e0 / e1) / std::log(h0 / h1));
      } else {
        col.rates.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    t.columns.push_back(std::move(col));
  }
  return t;
}

namespace {

RateTable subset(const RateTable& full, std::initializer_list<const char*> names) {
  RateTable t;
  t.cells = full.cells;
  t.h = full.h;
  for (const char* n : names) {
    t.columns.push_back(full.column(n));
  }
  return t;
}

}  // namespace

RateTable stokes_table(const RateTable& full) { return subset(full, {"u_s", "p_s", "grad_u_s", "div_u_s"}); }
RateTable fracture_table(const RateTable& full) { return subset(full, {"u_d", "p_d", "div_u_d", "phi"}); }
RateTable matrix_table(const RateTable& full) { return subset(full, {"u_m", "p_m", "div_u_m", "phi_m"}); }

double consistency_residual(const SaddleSystem& system, const Mesh& mesh, const DofLayout& layout,
                            const FieldSolution& interpolant) {
  const auto ax = system.matrix.multiply(interpolant.coefficients());
  const Index n = layout.num_field_dofs();

  // Squared L2 norm of each basis function: 2|K| on cells, |F| on facets.
  std::vector<double> measure(static_cast<std::size_t>(n), 0.0);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    for (Index d : layout.cell_dofs(c)) {
      measure[d] = 2.0 * mesh.area(c);
    }
  }
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const double len = facet_geometry(mesh, f).length;
    for (Index first : {layout.ubar(f), layout.pbar_s(f), layout.pbar_d(f), layout.pbar_m(f)}) {
      if (first < 0) {
        continue;
      }
      const int size = first == layout.ubar(f) ? layout.facet_vector_size() : layout.facet_scalar_size();
      for (int i = 0; i < size; ++i) {
        measure[first + i] = len;
      }
    }
  }

  // E[(r . v)^2 / |xi|^2] for v_i = xi_i / sqrt(measure_i), xi iid standard normal,
  // is sum(r_i^2 / measure_i) / N; evaluated exactly instead of sampled.
  double sum = 0.0;
  Index free = 0;
  for (Index i = 0; i < n; ++i) {
    if (layout.is_essential(i)) {
      continue;
    }
    const double r = ax[i] - system.rhs[i];
    sum += r * r / measure[i];
    ++free;
  }
  return free > 0 ? std::sqrt(sum / static_cast<double>(free)) : 0.0;
}

}  // namespace dpshdg
