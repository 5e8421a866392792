#pragma once

#include "dpshdg/forms.hpp"
#include "dpshdg/mesh.hpp"
#include "dpshdg/spaces.hpp"

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

namespace dpshdg::testing {

/// Structured mesh with interior vertices moved by up to `amplitude` times the
/// grid spacing. Boundary vertices stay put; orientation is preserved.
Mesh perturbed_mesh(Geometry geometry, int n, double amplitude, std::mt19937_64& rng);

/// Random positive coefficients, permeabilities varying per cell.
PhysicalParams random_params(const Mesh& mesh, std::mt19937_64& rng);

enum class OracleForm { Ahs, Ahd, Ahm, AhI, BhStokes, BhFracture, BhMatrix, BhIStokes, BhIDual, BhOuter, Ch };

/// Entries of the form on `entity` (cell or facet) for the given row (test)
/// and column (trial) DOFs, by direct quadrature of the defining integral
/// with every basis function evaluated pointwise from its global DOF.
Eigen::MatrixXd oracle_block(const Mesh& mesh, const DofLayout& layout, const PhysicalParams& params,
                             const DiscretizationParams& disc, OracleForm form, Index entity,
                             const std::vector<Index>& rows, const std::vector<Index>& cols);

/// Largest |a - b| relative to max(1, |b|_max).
double relative_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Dense copy of a sparse matrix.
Eigen::MatrixXd dense(const SparseMatrix& m);

}  // namespace dpshdg::testing

namespace dpshdg::testing {

struct OracleResult {
  std::string kernel;
  int samples = 0;
  double max_difference = 0.0;
};

/// Compares every local kernel with `oracle_block` on `samples` randomly chosen
/// cells or facets of perturbed meshes with random coefficients.
std::vector<OracleResult> compare_kernels(int k, int samples, std::uint64_t seed);

}  // namespace dpshdg::testing

#include "dpshdg/mms.hpp"

namespace dpshdg::testing {

struct DerivativeCheck {
  std::string name;
  double max_error = 0.0;  ///< max |hand - FD| / max(1, |hand|)
};

/// Central differences (step 1e-5) of every exact field against its
/// hand-coded derivative at `points` random points of the unit square.
std::vector<DerivativeCheck> derivative_oracle(const ExactSolution& exact, int points, std::uint64_t seed);

}  // namespace dpshdg::testing
