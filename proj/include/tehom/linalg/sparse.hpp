#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#ifdef TEHOM_HAVE_SUITESPARSE
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tehom/error.hpp"

namespace tehom {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using VectorX = Eigen::VectorXd;

/// Compresses triplets into a matrix; repeated (i, j) pairs are summed.
inline SparseMatrix assemble(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& entries) {
  for (const auto& t : entries) {
    require(t.row() >= 0 && t.row() < rows && t.col() >= 0 && t.col() < cols,
            ErrorKind::InvalidParameter, "triplet index out of range");
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

inline bool is_symmetric(const SparseMatrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const SparseMatrix t = m.transpose();
  const double scale = std::max(1.0, m.norm());
  return (m - t).norm() <= tol * scale;
}

/// Sparse LU of a square matrix, reused across solves: UMFPACK when built
/// with SuiteSparse, Eigen's COLAMD-ordered LU otherwise.
class DirectSolver {
 public:
  explicit DirectSolver(const SparseMatrix& m) : rows_(m.rows()), matrix_(m) {
    require(m.rows() == m.cols(), ErrorKind::InvalidParameter, "direct solve needs a square matrix");
    lu_.compute(matrix_);
    require(lu_.info() == Eigen::Success, ErrorKind::FactorizationFailure, "sparse LU failed");
  }

  VectorX solve(const VectorX& rhs) const {
    require(rhs.size() == rows_, ErrorKind::InvalidParameter, "rhs size mismatch");
    VectorX x = lu_.solve(rhs);
    require(x.allFinite(), ErrorKind::FactorizationFailure, "non-finite solution");
    return x;
  }

  double relative_residual(const VectorX& x, const VectorX& rhs) const {
    const double denom = std::max(rhs.norm(), 1e-300);
    return (matrix_ * x - rhs).norm() / denom;
  }

 private:
  Eigen::Index rows_;
  SparseMatrix matrix_;
#ifdef TEHOM_HAVE_SUITESPARSE
  Eigen::UmfPackLU<SparseMatrix> lu_;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
#endif
};

inline VectorX solve_direct(const SparseMatrix& m, const VectorX& rhs, double tol = 1e-9) {
  const DirectSolver solver(m);
  const VectorX x = solver.solve(rhs);
  const double r = solver.relative_residual(x, rhs);
  require(r <= tol, ErrorKind::FactorizationFailure,
          "relative residual " + std::to_string(r) + " above tolerance");
  return x;
}

}  // namespace tehom
