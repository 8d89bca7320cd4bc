#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "tehom/error.hpp"

namespace tehom {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct DenseSVD {
  Eigen::VectorXd singular_values;  // descending
  CMatrix u;
  CMatrix v;

  CMatrix reconstruct() const { return u * singular_values.asDiagonal() * v.adjoint(); }
};

/// Thin SVD by Jacobi rotations; sizes up to 512 in either dimension.
inline DenseSVD svd_dense(const CMatrix& a) {
  require(a.rows() <= 512 && a.cols() <= 512, ErrorKind::InvalidParameter, "svd_dense limited to 512x512");
  require(a.allFinite(), ErrorKind::InvalidParameter, "svd_dense needs finite input");
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

}  // namespace tehom
