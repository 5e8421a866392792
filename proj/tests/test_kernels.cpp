#include "support/support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <set>

using namespace dpshdg;
using namespace dpshdg::testing;

class KernelOracle : public ::testing::TestWithParam<int> {};

TEST_P(KernelOracle, MatchesBruteForceQuadrature) {
  const int k = GetParam();
  const auto results = compare_kernels(k, 6, 100 + k);
  ASSERT_EQ(results.size(), 11u);
  for (const OracleResult& r : results) {
    EXPECT_LE(r.max_difference, 1e-12) << r.kernel << " k=" << k;
  }
}

INSTANTIATE_TEST_SUITE_P(Degrees, KernelOracle, ::testing::Values(1, 2, 3));

namespace {

struct Fixture {
  Mesh mesh;
  PhysicalParams params;
  DiscretizationParams disc;
  DofLayout layout;
};

Fixture make(int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Fixture f;
  f.mesh = perturbed_mesh(Geometry::UnitSquareSplit, 4, 0.2, rng);
  f.params = random_params(f.mesh, rng);
  f.disc = DiscretizationParams::with_degree(k);
  f.layout = build_layout(f.mesh, f.disc, BoundaryConditionSet::homogeneous());
  return f;
}

}  // namespace

TEST(Kernels, StokesBlockCoversCellAndFacets) {
  const Fixture f = make(2, 1);
  const KernelContext ctx(f.mesh, f.layout, f.params, f.disc);
  for (Index c = 0; c < f.mesh.num_cells(); ++c) {
    if (f.mesh.cell(c).subdomain != Subdomain::Stokes) {
      continue;
    }
    const LocalBlock b = kernel_ahs(ctx, c);
    std::set<Index> expected;
    for (int i = 0; i < f.layout.cell_vector_size(); ++i) {
      expected.insert(f.layout.u(c) + i);
    }
    for (int e = 0; e < 3; ++e) {
      for (int i = 0; i < f.layout.facet_vector_size(); ++i) {
        expected.insert(f.layout.ubar(f.mesh.cell_facet(c, e)) + i);
      }
    }
    EXPECT_EQ(std::set<Index>(b.rows.begin(), b.rows.end()), expected);
    EXPECT_EQ(b.rows, b.cols);
  }
}

TEST(Kernels, StokesBlockSymmetricPositiveSemidefinite) {
  for (int k = 1; k <= 3; ++k) {
    const Fixture f = make(k, 2 + k);
    const KernelContext ctx(f.mesh, f.layout, f.params, f.disc);
    std::mt19937_64 rng(k);
    for (Index c = 0; c < f.mesh.num_cells(); ++c) {
      if (f.mesh.cell(c).subdomain != Subdomain::Stokes) {
        continue;
      }
      const Eigen::MatrixXd a = kernel_ahs(ctx, c).matrix;
      EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff()) << "cell " << c;
      // 100 random local vectors.
      std::normal_distribution<double> n;
      for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd v(a.rows());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
          v[i] = n(rng);
        }
        EXPECT_GE(v.dot(a * v), -1e-10 * a.norm() * v.squaredNorm());
      }
    }
  }
}

TEST(Kernels, DarcyMassesArePositiveDefinite) {
  const Fixture f = make(2, 9);
  const KernelContext ctx(f.mesh, f.layout, f.params, f.disc);
  for (Index c = 0; c < f.mesh.num_cells(); ++c) {
    if (f.mesh.cell(c).subdomain != Subdomain::Dual) {
      continue;
    }
    for (const LocalBlock& b : {kernel_ahd(ctx, c), kernel_ahm(ctx, c)}) {
      const Eigen::LLT<Eigen::MatrixXd> llt(b.matrix);
      EXPECT_EQ(llt.info(), Eigen::Success);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kernel_ch(ctx, c).matrix);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12 * es.eigenvalues().cwiseAbs().maxCoeff());
  }
}

TEST(Kernels, DivergenceOfConstantsVanishes) {
  // b_h(q, v) for v constant: -(q, div v) = 0 and sum over facets of <1, v.n> = 0.
  const Fixture f = make(2, 4);
  const KernelContext ctx(f.mesh, f.layout, f.params, f.disc);
  for (Index c = 0; c < f.mesh.num_cells(); ++c) {
    const FlowField field = f.mesh.cell(c).subdomain == Subdomain::Stokes ? FlowField::Stokes : FlowField::Fracture;
    const LocalBlock b = kernel_bh(ctx, c, field);
    const int nk = f.layout.cell_scalar_size();
    const int nq = f.layout.cell_pressure_size();
    const int nt = f.layout.facet_scalar_size();
    // Constant x-velocity: coefficient of the constant orthonormal mode only.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(b.matrix.cols());
    v[0] = 1.0;
    const Eigen::VectorXd r = b.matrix * v;
    EXPECT_LT(r.head(nq).cwiseAbs().maxCoeff(), 1e-12);
    double flux = 0.0;
    for (int e = 0; e < 3; ++e) {
      // The constant facet mode is 1, so this is the flux through facet e.
      flux += r[nq + e * nt];
    }
    EXPECT_NEAR(flux, 0.0, 1e-12);
    (void)nk;
  }
}

TEST(Kernels, RejectWrongEntities) {
  const Fixture f = make(1, 5);
  const KernelContext ctx(f.mesh, f.layout, f.params, f.disc);
  Index stokes = -1, dual = -1, interior = -1;
  for (Index c = 0; c < f.mesh.num_cells(); ++c) {
    (f.mesh.cell(c).subdomain == Subdomain::Stokes ? stokes : dual) = c;
  }
  for (Index i = 0; i < f.mesh.num_facets(); ++i) {
    if (f.mesh.facet(i).kind == FacetClass::InteriorS) {
      interior = i;
    }
  }
  EXPECT_THROW(kernel_ahs(ctx, dual), std::invalid_argument);
  EXPECT_THROW(kernel_ahd(ctx, stokes), std::invalid_argument);
  EXPECT_THROW(kernel_ch(ctx, stokes), std::invalid_argument);
  EXPECT_THROW(kernel_bh(ctx, stokes, FlowField::Matrix), std::invalid_argument);
  EXPECT_THROW(kernel_ahI(ctx, interior), std::invalid_argument);
  EXPECT_THROW(kernel_bh_outer(ctx, interior), std::invalid_argument);
}
