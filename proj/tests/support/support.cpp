#include "support.hpp"

#include "dpshdg/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace dpshdg::testing {

Mesh perturbed_mesh(Geometry geometry, int n, double amplitude, std::mt19937_64& rng) {
  const Mesh base = build_structured(geometry, n);
  std::vector<bool> on_boundary(static_cast<std::size_t>(base.num_points()), false);
  for (const Facet& f : base.facets()) {
    if (f.on_boundary()) {
      on_boundary[f.vertices[0]] = true;
      on_boundary[f.vertices[1]] = true;
    }
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double delta = amplitude / n;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Point> pts = base.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!on_boundary[i]) {
        pts[i] += delta * Vec2(u(rng), u(rng));
      }
    }
    try {
      return Mesh(pts, base.cells());
    } catch (const std::invalid_argument&) {
      // inverted cell, draw again
    }
  }
  throw std::runtime_error("perturbed_mesh: no valid perturbation found");
}

PhysicalParams random_params(const Mesh& mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 3.0);
  PhysicalParams p;
  p.mu = u(rng);
  p.sigma = u(rng);
  p.alpha = u(rng);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    p.kappa_f.push_back(u(rng));
    p.kappa_m.push_back(u(rng));
  }
  return p;
}

double relative_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return INFINITY;
  }
  if (a.size() == 0) {
    return 0.0;
  }
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

Eigen::MatrixXd dense(const SparseMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index q = m.row_ptr()[i]; q < m.row_ptr()[i + 1]; ++q) {
      d(i, m.col_idx()[q]) += m.values()[q];
    }
  }
  return d;
}

namespace {

struct DofInfo {
  Field field = Field::U;
  Index entity = -1;
  int local = 0;
  int comp = 0;
};

std::vector<DofInfo> dof_table(const Mesh& mesh, const DofLayout& layout) {
  std::vector<DofInfo> t(static_cast<std::size_t>(layout.total()));
  const int nk = layout.cell_scalar_size();
  const int nq = layout.cell_pressure_size();
  const int nt = layout.facet_scalar_size();
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i < 2 * nk; ++i) {
      t[layout.u(c) + i] = {Field::U, c, i % nk, i / nk};
      if (layout.um(c) >= 0) {
        t[layout.um(c) + i] = {Field::UM, c, i % nk, i / nk};
      }
    }
    for (int i = 0; i < nq; ++i) {
      t[layout.p(c) + i] = {Field::P, c, i, 0};
      if (layout.pm(c) >= 0) {
        t[layout.pm(c) + i] = {Field::PM, c, i, 0};
      }
    }
  }
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    for (int i = 0; i < nt; ++i) {
      if (layout.ubar(f) >= 0) {
        t[layout.ubar(f) + i] = {Field::UBar, f, i, 0};
        t[layout.ubar(f) + nt + i] = {Field::UBar, f, i, 1};
        t[layout.pbar_s(f) + i] = {Field::PBarS, f, i, 0};
      }
      if (layout.pbar_d(f) >= 0) {
        t[layout.pbar_d(f) + i] = {Field::PBarD, f, i, 0};
        t[layout.pbar_m(f) + i] = {Field::PBarM, f, i, 0};
      }
    }
  }
  return t;
}

// Pointwise evaluation of basis functions identified by DOF.
class Evaluator {
 public:
  Evaluator(const Mesh& mesh, int k) : mesh_(mesh), vb_(k), pb_(k - 1), tb_(k) {}

  // Cell part of a vector field (U or UM) on `cell`.
  [[nodiscard]] Vec2 vec(const DofInfo& d, Field f, Index cell, const Point& x) const {
    Vec2 v = Vec2::Zero();
    if (d.field == f && d.entity == cell) {
      v[d.comp] = vb_.values(reference(cell, x))(d.local);
    }
    return v;
  }
  [[nodiscard]] Mat2 grad(const DofInfo& d, Field f, Index cell, const Point& x) const {
    Mat2 g = Mat2::Zero();
    if (d.field == f && d.entity == cell) {
      const Eigen::MatrixX2d rg = vb_.gradients(reference(cell, x));
      const Mat2 jac = jacobian(cell);
      const Vec2 phys = jac.inverse().transpose() * Vec2(rg(d.local, 0), rg(d.local, 1));
      g.row(d.comp) = phys.transpose();
    }
    return g;
  }
  [[nodiscard]] double scalar(const DofInfo& d, Field f, Index cell, const Point& x) const {
    if (d.field == f && d.entity == cell) {
      return pb_.values(reference(cell, x))(d.local);
    }
    return 0.0;
  }
  [[nodiscard]] double trace(const DofInfo& d, Field f, Index facet, const Point& x) const {
    if (d.field != f || d.entity != facet) {
      return 0.0;
    }
    const Facet& fc = mesh_.facet(facet);
    const Point& a = mesh_.points()[fc.vertices[0]];
    const Point& b = mesh_.points()[fc.vertices[1]];
    const double s = (x - a).dot(b - a) / (b - a).squaredNorm();
    return tb_.values(s)(d.local);
  }
  [[nodiscard]] Vec2 trace_vec(const DofInfo& d, Index facet, const Point& x) const {
    Vec2 v = Vec2::Zero();
    v[d.comp] = trace(d, Field::UBar, facet, x);
    return v;
  }

  [[nodiscard]] Mat2 jacobian(Index cell) const {
    const auto p = mesh_.cell_points(cell);
    Mat2 j;
    j.col(0) = p[1] - p[0];
    j.col(1) = p[2] - p[0];
    return j;
  }
  [[nodiscard]] Vec2 reference(Index cell, const Point& x) const {
    return jacobian(cell).inverse() * (x - mesh_.cell_points(cell)[0]);
  }

 private:
  const Mesh& mesh_;
  TriBasis vb_;
  TriBasis pb_;
  SegBasis tb_;
};

struct Sample {
  Point x;
  double w;
};

std::vector<Sample> cell_samples(const Mesh& mesh, Index cell, int degree) {
  const auto p = mesh.cell_points(cell);
  const double jac = std::abs((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
  const QuadRule<2> r = quad_tri(degree);
  std::vector<Sample> out;
  for (std::size_t q = 0; q < r.size(); ++q) {
    out.push_back({p[0] + r.points[q].x() * (p[1] - p[0]) + r.points[q].y() * (p[2] - p[0]), r.weights[q] * jac});
  }
  return out;
}

struct Edge {
  Index facet;
  Vec2 normal;  // outward of the cell
  std::vector<Sample> samples;
};

Edge cell_edge(const Mesh& mesh, Index cell, int e, int degree) {
  const auto p = mesh.cell_points(cell);
  const Point a = p[(e + 1) % 3];
  const Point b = p[(e + 2) % 3];
  const Vec2 d = b - a;
  Edge out{mesh.cell_facet(cell, e), Vec2(d.y(), -d.x()) / d.norm(), {}};
  const QuadRule<1> r = quad_seg(degree);
  for (std::size_t q = 0; q < r.size(); ++q) {
    out.samples.push_back({a + r.points[q] * d, r.weights[q] * d.norm()});
  }
  return out;
}

Mat2 sym(const Mat2& g) { return 0.5 * (g + g.transpose()); }

}  // namespace

Eigen::MatrixXd oracle_block(const Mesh& mesh, const DofLayout& layout, const PhysicalParams& params,
                             const DiscretizationParams& disc, OracleForm form, Index entity,
                             const std::vector<Index>& rows, const std::vector<Index>& cols) {
  const int k = disc.k;
  const int deg = 2 * k + 4;
  const std::vector<DofInfo> table = dof_table(mesh, layout);
  const Evaluator ev(mesh, k);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(cols.size()));

  auto for_entries = [&](const auto& value) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value(table[rows[i]], table[cols[j]]);
      }
    }
  };

  // Interface / boundary facets: the geometric normal seen from sides[0].
  auto facet_edge = [&](Index facet) {
    const FacetSide& s = mesh.facet(facet).sides[0];
    return cell_edge(mesh, s.cell, s.local_edge, deg);
  };

  switch (form) {
    case OracleForm::Ahs: {
      const Index c = entity;
      const auto p = mesh.cell_points(c);
      const double hk = std::max({(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[2] - p[0]).norm()});
      const double mu = params.mu;
      const double pen = 2.0 * disc.beta * mu / hk;
      for_entries([&](const DofInfo& v, const DofInfo& u) {
        double s = 0.0;
        for (const Sample& q : cell_samples(mesh, c, deg)) {
          s += q.w * 2.0 * mu * (sym(ev.grad(u, Field::U, c, q.x)).cwiseProduct(sym(ev.grad(v, Field::U, c, q.x)))).sum();
        }
        for (int e = 0; e < 3; ++e) {
          const Edge ed = cell_edge(mesh, c, e, deg);
          for (const Sample& q : ed.samples) {
            const Vec2 ju = ev.vec(u, Field::U, c, q.x) - (u.field == Field::UBar && u.entity == ed.facet
                                                               ? ev.trace_vec(u, ed.facet, q.x)
                                                               : Vec2::Zero());
            const Vec2 jv = ev.vec(v, Field::U, c, q.x) - (v.field == Field::UBar && v.entity == ed.facet
                                                               ? ev.trace_vec(v, ed.facet, q.x)
                                                               : Vec2::Zero());
            const Vec2 tu = sym(ev.grad(u, Field::U, c, q.x)) * ed.normal;
            const Vec2 tv = sym(ev.grad(v, Field::U, c, q.x)) * ed.normal;
            s += q.w * (pen * ju.dot(jv) - 2.0 * mu * tu.dot(jv) - 2.0 * mu * tv.dot(ju));
          }
        }
        return s;
      });
      break;
    }
    case OracleForm::Ahd:
    case OracleForm::Ahm: {
      const Index c = entity;
      const Field f = form == OracleForm::Ahd ? Field::U : Field::UM;
      const double coef = form == OracleForm::Ahd ? 1.0 / params.kappa_f[c] : 1.0 / params.kappa_m[c];
      for_entries([&](const DofInfo& v, const DofInfo& u) {
        double s = 0.0;
        for (const Sample& q : cell_samples(mesh, c, deg)) {
          s += q.w * coef * ev.vec(u, f, c, q.x).dot(ev.vec(v, f, c, q.x));
        }
        return s;
      });
      break;
    }
    case OracleForm::AhI: {
      const Edge ed = facet_edge(entity);
      const Index dual = mesh.facet(entity).sides[1].cell;
      const double coef = params.alpha * params.mu / std::sqrt(params.kappa_f[dual]);
      const Vec2 t(-ed.normal.y(), ed.normal.x());
      for_entries([&](const DofInfo& v, const DofInfo& u) {
        double s = 0.0;
        for (const Sample& q : ed.samples) {
          s += q.w * coef * ev.trace_vec(u, entity, q.x).dot(t) * ev.trace_vec(v, entity, q.x).dot(t) *
               (u.field == Field::UBar && v.field == Field::UBar ? 1.0 : 0.0);
        }
        return s;
      });
      break;
    }
    case OracleForm::BhStokes:
    case OracleForm::BhFracture:
    case OracleForm::BhMatrix: {
      const Index c = entity;
      const Field vf = form == OracleForm::BhMatrix ? Field::UM : Field::U;
      const Field qf = form == OracleForm::BhMatrix ? Field::PM : Field::P;
      const Field tf = form == OracleForm::BhStokes     ? Field::PBarS
                       : form == OracleForm::BhFracture ? Field::PBarD
                                                        : Field::PBarM;
      for_entries([&](const DofInfo& q, const DofInfo& v) {
        double s = 0.0;
        for (const Sample& pt : cell_samples(mesh, c, deg)) {
          s -= pt.w * ev.scalar(q, qf, c, pt.x) * ev.grad(v, vf, c, pt.x).trace();
        }
        for (int e = 0; e < 3; ++e) {
          const Edge ed = cell_edge(mesh, c, e, deg);
          for (const Sample& pt : ed.samples) {
            s += pt.w * ev.trace(q, tf, ed.facet, pt.x) * ev.vec(v, vf, c, pt.x).dot(ed.normal);
          }
        }
        return s;
      });
      break;
    }
    case OracleForm::BhIStokes:
    case OracleForm::BhIDual:
    case OracleForm::BhOuter: {
      const Edge ed = facet_edge(entity);
      const Field tf = form == OracleForm::BhIDual ? Field::PBarD : Field::PBarS;
      const Vec2 n = form == OracleForm::BhIDual ? Vec2(-ed.normal) : ed.normal;
      for_entries([&](const DofInfo& q, const DofInfo& v) {
        double s = 0.0;
        for (const Sample& pt : ed.samples) {
          const Vec2 vb = v.field == Field::UBar ? ev.trace_vec(v, entity, pt.x) : Vec2::Zero();
          s -= pt.w * ev.trace(q, tf, entity, pt.x) * vb.dot(n);
        }
        return s;
      });
      break;
    }
    case OracleForm::Ch: {
      const Index c = entity;
      const double coef = params.sigma * params.kappa_m[c];
      for_entries([&](const DofInfo& q, const DofInfo& p) {
        double s = 0.0;
        for (const Sample& pt : cell_samples(mesh, c, deg)) {
          const double dp = ev.scalar(p, Field::PM, c, pt.x) - ev.scalar(p, Field::P, c, pt.x);
          const double dq = ev.scalar(q, Field::PM, c, pt.x) - ev.scalar(q, Field::P, c, pt.x);
          s += pt.w * coef * dp * dq;
        }
        return s;
      });
      break;
    }
  }
  return out;
}

}  // namespace dpshdg::testing

namespace dpshdg::testing {

std::vector<OracleResult> compare_kernels(int k, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const DiscretizationParams disc = DiscretizationParams::with_degree(k);
  std::vector<OracleResult> results;
  auto record = [&](const std::string& name, double diff) {
    for (OracleResult& r : results) {
      if (r.kernel == name) {
        ++r.samples;
        r.max_difference = std::max(r.max_difference, diff);
        return;
      }
    }
    results.push_back({name, 1, diff});
  };
  auto check = [&](const std::string& name, const Mesh& m, const DofLayout& l, const PhysicalParams& p,
                   OracleForm form, Index entity, const LocalBlock& b) {
    record(name, relative_difference(b.matrix, oracle_block(m, l, p, disc, form, entity, b.rows, b.cols)));
  };

  // A fresh perturbed mesh and coefficient set for every sample; both
  // geometries so that boundary facets of each kind appear.
  for (int s = 0; s < samples; ++s) {
    const Geometry g = s % 2 == 0 ? Geometry::UnitSquareSplit : Geometry::HorizontalWellbore;
    const Mesh mesh = perturbed_mesh(g, 4, 0.2, rng);
    const PhysicalParams params = random_params(mesh, rng);
    BoundaryConditionSet bcs = BoundaryConditionSet::homogeneous();
    bcs.stokes.kind = StokesBoundary::Kind::TractionFree;
    const DofLayout layout = build_layout(mesh, disc, bcs);
    const KernelContext ctx(mesh, layout, params, disc);

    auto pick = [&](auto pred, Index count) {
      std::vector<Index> ids;
      for (Index i = 0; i < count; ++i) {
        if (pred(i)) {
          ids.push_back(i);
        }
      }
      return ids.at(std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng));
    };
    const Index sc = pick([&](Index c) { return mesh.cell(c).subdomain == Subdomain::Stokes; }, mesh.num_cells());
    const Index dc = pick([&](Index c) { return mesh.cell(c).subdomain == Subdomain::Dual; }, mesh.num_cells());
    const Index fi = pick([&](Index f) { return mesh.facet(f).kind == FacetClass::Interface; }, mesh.num_facets());
    const Index fb = pick([&](Index f) { return mesh.facet(f).kind == FacetClass::BoundaryS; }, mesh.num_facets());

    check("a_h^s", mesh, layout, params, OracleForm::Ahs, sc, kernel_ahs(ctx, sc));
    check("a_h^d", mesh, layout, params, OracleForm::Ahd, dc, kernel_ahd(ctx, dc));
    check("a_h^m", mesh, layout, params, OracleForm::Ahm, dc, kernel_ahm(ctx, dc));
    check("a_h^I", mesh, layout, params, OracleForm::AhI, fi, kernel_ahI(ctx, fi));
    check("b_h stokes", mesh, layout, params, OracleForm::BhStokes, sc, kernel_bh(ctx, sc, FlowField::Stokes));
    check("b_h fracture", mesh, layout, params, OracleForm::BhFracture, dc, kernel_bh(ctx, dc, FlowField::Fracture));
    check("b_h matrix", mesh, layout, params, OracleForm::BhMatrix, dc, kernel_bh(ctx, dc, FlowField::Matrix));
    const auto bi = kernel_bhI(ctx, fi);
    check("b_h^I stokes", mesh, layout, params, OracleForm::BhIStokes, fi, bi[0]);
    check("b_h^I dual", mesh, layout, params, OracleForm::BhIDual, fi, bi[1]);
    check("b_h boundary", mesh, layout, params, OracleForm::BhOuter, fb, kernel_bh_outer(ctx, fb));
    check("c_h", mesh, layout, params, OracleForm::Ch, dc, kernel_ch(ctx, dc));
  }
  return results;
}

}  // namespace dpshdg::testing

namespace dpshdg::testing {

std::vector<DerivativeCheck> derivative_oracle(const ExactSolution& ex, int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  std::vector<DerivativeCheck> out;
  auto record = [&](const std::string& name, double hand, double fd) {
    const double err = std::abs(hand - fd) / std::max(1.0, std::abs(hand));
    for (DerivativeCheck& c : out) {
      if (c.name == name) {
        c.max_error = std::max(c.max_error, err);
        return;
      }
    }
    out.push_back({name, err});
  };
  auto vector_field = [&](const std::string& name, const VectorFn& f, const GradientFn& g, const Point& x) {
    const Mat2 hand = g(x);
    for (int j = 0; j < 2; ++j) {
      Vec2 step = Vec2::Zero();
      step[j] = h;
      const Vec2 fd = (f(x + step) - f(x - step)) / (2.0 * h);
      for (int i = 0; i < 2; ++i) {
        record(name, hand(i, j), fd[i]);
      }
    }
  };
  auto scalar_field = [&](const std::string& name, const ScalarFn& f, const VectorFn& g, const Point& x) {
    const Vec2 hand = g(x);
    for (int j = 0; j < 2; ++j) {
      Vec2 step = Vec2::Zero();
      step[j] = h;
      record(name, hand[j], (f(x + step) - f(x - step)) / (2.0 * h));
    }
  };
  for (int p = 0; p < points; ++p) {
    const Point x(u(rng), u(rng));
    vector_field("grad u_s", ex.u_s, ex.grad_u_s, x);
    vector_field("grad u_d", ex.u_d, ex.grad_u_d, x);
    vector_field("grad u_m", ex.u_m, ex.grad_u_m, x);
    scalar_field("grad p_s", ex.p_s, ex.grad_p_s, x);
    scalar_field("grad p_d", ex.p_d, ex.grad_p_d, x);
    scalar_field("grad p_m", ex.p_m, ex.grad_p_m, x);
    // Second derivatives of u_s against differences of the hand-coded gradient.
    const auto hess = ex.hess_u_s(x);
    for (int j = 0; j < 2; ++j) {
      Vec2 step = Vec2::Zero();
      step[j] = h;
      const Mat2 fd = (ex.grad_u_s(x + step) - ex.grad_u_s(x - step)) / (2.0 * h);
      for (int i = 0; i < 2; ++i) {
        for (int l = 0; l < 2; ++l) {
          record("hess u_s", hess[i](l, j), fd(i, l));
        }
      }
    }
  }
  return out;
}

}  // namespace dpshdg::testing
