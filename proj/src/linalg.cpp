#include "dpshdg/linalg.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dpshdg {

SparseMatrix::SparseMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::out_of_range("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                              ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    ++m.row_ptr_[t.row + 1];
  }
  std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());

  // Bucket by row (stable), then sort each row by column and merge duplicates.
  std::vector<Index> cols_tmp(triplets.size());
  std::vector<double> vals_tmp(triplets.size());
  std::vector<Index> fill(m.row_ptr_.begin(), m.row_ptr_.end() - 1);
  for (const Triplet& t : triplets) {
    cols_tmp[fill[t.row]] = t.col;
    vals_tmp[fill[t.row]] = t.value;
    ++fill[t.row];
  }

  std::vector<Index> new_ptr(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<std::pair<Index, double>> row;
  for (Index i = 0; i < rows; ++i) {
    row.clear();
    for (Index p = m.row_ptr_[i]; p < m.row_ptr_[i + 1]; ++p) {
      row.emplace_back(cols_tmp[p], vals_tmp[p]);
    }
    std::stable_sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t q = 0; q < row.size(); ++q) {
      if (q > 0 && row[q].first == row[q - 1].first) {
        m.values_.back() += row[q].second;
      } else {
        m.col_idx_.push_back(row[q].first);
        m.values_.push_back(row[q].second);
      }
    }
    new_ptr[i + 1] = static_cast<Index>(m.col_idx_.size());
  }
  m.row_ptr_ = std::move(new_ptr);
  return m;
}

SparseMatrix SparseMatrix::from_csr(Index rows, Index cols, std::vector<Index> row_ptr,
                                    std::vector<Index> col_idx, std::vector<double> values) {
  if (static_cast<Index>(row_ptr.size()) != rows + 1 || col_idx.size() != values.size() ||
      row_ptr.back() != static_cast<Index>(values.size())) {
    throw std::invalid_argument("inconsistent CSR arrays");
  }
  SparseMatrix m(rows, cols);
  m.row_ptr_ = std::move(row_ptr);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);
  return m;
}

double SparseMatrix::get(Index i, Index j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values_[it - col_idx_.begin()] : 0.0;
}

double* SparseMatrix::find(Index i, Index j) {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? &values_[it - col_idx_.begin()] : nullptr;
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
  if (static_cast<Index>(x.size()) != cols_) {
    throw std::invalid_argument("multiply: vector length mismatch");
  }
  std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      s += values_[p] * x[col_idx_[p]];
    }
    y[i] = s;
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  for (Index c : col_idx_) {
    ++t.row_ptr_[c + 1];
  }
  std::partial_sum(t.row_ptr_.begin(), t.row_ptr_.end(), t.row_ptr_.begin());
  t.col_idx_.resize(col_idx_.size());
  t.values_.resize(values_.size());
  std::vector<Index> fill(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const Index dst = fill[col_idx_[p]]++;
      t.col_idx_[dst] = i;
      t.values_[dst] = values_[p];
    }
  }
  return t;
}

double SparseMatrix::symmetry_defect() const {
  double scale = 0.0;
  for (double v : values_) {
    scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) {
    return 0.0;
  }
  double defect = 0.0;
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      defect = std::max(defect, std::abs(values_[p] - get(col_idx_[p], i)));
    }
  }
  return defect / scale;
}

void SparseMatrix::write_coordinate(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      out << i << ' ' << col_idx_[p] << ' ' << values_[p] << '\n';
    }
  }
  out.precision(old_precision);
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) {
    s += x * x;
  }
  return std::sqrt(s);
}

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using LU = Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>>;

EigenSparse to_eigen(const SparseMatrix& a) {
  // CSR of A read as CSC is A^T.
  const Eigen::Map<const EigenSparse> at(a.cols(), a.rows(), static_cast<Index>(a.values().size()),
                                         a.row_ptr().data(), a.col_idx().data(), a.values().data());
  return at.transpose();
}

double norm1(const EigenSparse& a) {
  double best = 0.0;
  for (int j = 0; j < a.outerSize(); ++j) {
    double s = 0.0;
    for (EigenSparse::InnerIterator it(a, j); it; ++it) {
      s += std::abs(it.value());
    }
    best = std::max(best, s);
  }
  return best;
}

// Lower bound on |A^-1|_1, Higham's refinement of Hager's method.
double inverse_norm1(LU& lu, Index n) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  double estimate = 0.0;
  Index last = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXd y = lu.solve(x);
    estimate = y.lpNorm<1>();
    const Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Eigen::VectorXd z = lu.transpose().solve(xi);
    Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x) || j == last) {
      break;
    }
    last = j;
    x.setZero();
    x(j) = 1.0;
  }
  Eigen::VectorXd alt(n);
  for (Index i = 0; i < n; ++i) {
    alt(i) = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + static_cast<double>(i) / std::max<Index>(n - 1, 1));
  }
  const double alt_est = 2.0 * lu.solve(alt).lpNorm<1>() / (3.0 * n);
  return std::max(estimate, alt_est);
}

}  // namespace

std::vector<double> solve_direct(const SparseMatrix& a, const std::vector<double>& b, SolveReport* report,
                                 double tolerance) {
  const Index n = a.rows();
  if (a.cols() != n) {
    throw std::invalid_argument("solve_direct: matrix is not square");
  }
  if (static_cast<Index>(b.size()) != n) {
    throw std::invalid_argument("solve_direct: right-hand side length mismatch");
  }
  const auto start = std::chrono::steady_clock::now();

  EigenSparse m = to_eigen(a);
  m.makeCompressed();
  LU lu;
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("singular matrix (" + lu.lastErrorMessage() +
                             "): check boundary conditions and mean-zero constraints");
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  Eigen::VectorXd sol = lu.solve(rhs);
  const double bnorm = norm2(b);
  double rel = (m * sol - rhs).norm() / (bnorm > 0.0 ? bnorm : 1.0);
  // Iterative refinement; the penalty and mass blocks differ by orders of magnitude.
  for (int step = 0; step < 3 && rel > 0.0; ++step) {
    const Eigen::VectorXd candidate = sol + lu.solve(rhs - m * sol);
    const double r = (m * candidate - rhs).norm() / (bnorm > 0.0 ? bnorm : 1.0);
    if (!(r < 0.5 * rel)) {
      break;
    }
    sol = candidate;
    rel = r;
  }
  std::vector<double> x(sol.data(), sol.data() + n);
  const double anorm = norm1(m);
  const double rcond = n > 0 && anorm > 0.0 ? 1.0 / (anorm * inverse_norm1(lu, n)) : 0.0;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (report != nullptr) {
    *report = {rel, rcond, static_cast<double>(lu.nnzL() + lu.nnzU()), seconds, n};
  }
  if (!(rel <= tolerance)) {
    throw std::runtime_error("direct solve residual " + std::to_string(rel) + " above tolerance " +
                             std::to_string(tolerance) + " (rcond " + std::to_string(rcond) + ")");
  }
  return x;
}

}  // namespace dpshdg
