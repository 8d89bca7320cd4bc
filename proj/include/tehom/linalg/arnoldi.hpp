#pragma once

// Shift-invert Arnoldi for K x = lambda M x with M possibly indefinite.
//
// The iteration runs on OP = (K - sigma M)^{-1} M with the plain Euclidean
// inner product; no M-orthogonality is assumed, which is what makes it safe
// for the transmission pencils. Restarts are implicit with exact shifts, in
// complex arithmetic so conjugate Ritz pairs need no special handling.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include "tehom/linalg/sparse.hpp"

namespace tehom {

struct EigenResult {
  std::complex<double> lambda;
  bool is_real = false;
  bool converged = false;
  VectorX vector;  // real eigenvector, unit norm (real part after phase fix)
  double residual = 0.0;  // ||K x - lambda M x|| / ||x||

  double value() const { return lambda.real(); }
};

struct ArnoldiOptions {
  int krylov_dim = 0;  // 0 = max(2 count + 10, 20)
  int max_restarts = 500;
  double tol = 1e-12;  // Ritz estimate relative to |mu|
  double real_tol = 1e-6;  // |Im lambda| <= real_tol |lambda| counts as real
  unsigned seed = 12345;
};

namespace detail {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline double pencil_residual(const SparseMatrix& k, const SparseMatrix& m, const CVector& x,
                              std::complex<double> lambda) {
  const VectorX xr = x.real();
  const VectorX xi = x.imag();
  const VectorX kr = k * xr, ki = k * xi, mr = m * xr, mi = m * xi;
  CVector r(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const std::complex<double> kx(kr[i], ki[i]);
    const std::complex<double> mx(mr[i], mi[i]);
    r[i] = kx - lambda * mx;
  }
  return r.norm() / std::max(x.norm(), 1e-300);
}

}  // namespace detail

struct RitzPairs {
  Eigen::VectorXcd values;  // descending modulus
  Eigen::MatrixXcd vectors;  // unit norm columns
  std::vector<char> converged;
};

/// Implicitly restarted Arnoldi for the `count` eigenvalues of largest
/// modulus of a real linear operator of size n.
template <typename Apply>
RitzPairs arnoldi_largest(const Apply& apply, Eigen::Index n, int count, const ArnoldiOptions& opts = {},
                          const VectorX* start = nullptr) {
  using detail::CMatrix;
  using detail::CVector;
  require(count >= 1, ErrorKind::InvalidParameter, "eigenvalue count must be positive");
  count = static_cast<int>(std::min<Eigen::Index>(count, n));
  int dim = opts.krylov_dim > 0 ? opts.krylov_dim : std::max(2 * count + 10, 20);
  dim = static_cast<int>(std::min<Eigen::Index>(dim, n));
  const int keep = std::min(dim - 1, std::max(count, (dim + count) / 2));

  // real input stays real through the restarts as long as the shifts are
  // real, which halves the work for symmetric-definite problems
  auto op = [&](const CVector& v) {
    CVector out(n);
    out.real() = apply(VectorX(v.real()));
    if (v.imag().isZero(0.0)) {
      out.imag().setZero();
    } else {
      out.imag() = apply(VectorX(v.imag()));
    }
    return out;
  };

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto random_vector = [&]() {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
    return v;
  };

  CMatrix v = CMatrix::Zero(n, dim + 1);
  CMatrix h = CMatrix::Zero(dim + 1, dim);
  {
    CVector v0 = random_vector();
    if (start && start->size() == n && start->norm() > 0.0) {
      // a warm start keeps a little noise so no wanted direction is missing
      v0 = start->cast<std::complex<double>>() / start->norm() + 1e-3 * v0 / v0.norm();
    }
    v.col(0) = v0 / v0.norm();
  }

  // Orthogonalizes w against the first `cols` basis vectors (two passes).
  auto orthogonalize = [&](CVector& w, int cols, CVector* coeffs) {
    for (int pass = 0; pass < 2; ++pass) {
      const CVector c = v.leftCols(cols).adjoint() * w;
      w -= v.leftCols(cols) * c;
      if (coeffs) coeffs->head(cols) += c;
    }
  };

  auto extend = [&](int from) {
    for (int j = from; j < dim; ++j) {
      CVector w = op(v.col(j));
      const double wnorm = w.norm();
      CVector c = CVector::Zero(j + 1);
      orthogonalize(w, j + 1, &c);
      h.col(j).head(j + 1) = c;
      const double beta = w.norm();
      if (beta <= 1e-13 * std::max(wnorm, 1e-300)) {
        // invariant subspace; continue with a fresh direction and a zero coupling
        w = random_vector();
        orthogonalize(w, j + 1, nullptr);
        v.col(j + 1) = w / w.norm();
        h(j + 1, j) = 0.0;
        continue;
      }
      h(j + 1, j) = beta;
      v.col(j + 1) = w / beta;
    }
  };

  extend(0);

  RitzPairs out;
  Eigen::ComplexEigenSolver<CMatrix> ces;
  for (int restart = 0;; ++restart) {
    const CMatrix hm = h.topLeftCorner(dim, dim);
    ces.compute(hm, true);
    CVector mu = ces.eigenvalues();
    for (int i = 0; i < dim; ++i) {
      if (std::abs(mu[i].imag()) <= 1e-14 * std::abs(mu[i])) mu[i] = mu[i].real();
    }
    std::vector<int> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(mu[a]) > std::abs(mu[b]); });

    const double beta = std::abs(h(dim, dim - 1));
    auto done = [&](int idx) {
      return dim == n || beta * std::abs(ces.eigenvectors()(dim - 1, idx)) <= opts.tol * std::abs(mu[idx]);
    };
    bool all_converged = true;
    for (int i = 0; i < count; ++i) all_converged = all_converged && done(order[i]);

    if (all_converged || restart >= opts.max_restarts || dim == n) {
      out.values.resize(count);
      out.vectors.resize(n, count);
      out.converged.resize(count);
      for (int i = 0; i < count; ++i) {
        const int idx = order[i];
        out.values[i] = mu[idx];
        CVector x = v.leftCols(dim) * ces.eigenvectors().col(idx);
        out.vectors.col(i) = x / x.norm();
        out.converged[i] = done(idx);
      }
      return out;
    }

    // implicit restart: exact shifts at the unwanted Ritz values
    CMatrix hq = hm;
    CMatrix q = CMatrix::Identity(dim, dim);
    for (int i = keep; i < dim; ++i) {
      const std::complex<double> s = mu[order[i]];
      Eigen::HouseholderQR<CMatrix> qr(hq - s * CMatrix::Identity(dim, dim));
      const CMatrix qi = qr.householderQ();
      hq = qi.adjoint() * hq * qi;
      for (int c = 0; c < dim; ++c)
        for (int r = c + 2; r < dim; ++r) hq(r, c) = 0.0;
      q = q * qi;
    }
    const CVector f_old = v.col(dim) * h(dim, dim - 1);
    CVector f = v.leftCols(dim) * q.col(keep) * hq(keep, keep - 1) + f_old * q(dim - 1, keep - 1);
    const CMatrix vk = v.leftCols(dim) * q.leftCols(keep);
    v.leftCols(keep) = vk;
    h.setZero();
    h.topLeftCorner(keep, keep) = hq.topLeftCorner(keep, keep);
    orthogonalize(f, keep, nullptr);
    const double fnorm = f.norm();
    if (fnorm <= 1e-300) {
      f = random_vector();
      orthogonalize(f, keep, nullptr);
      v.col(keep) = f / f.norm();
      h(keep, keep - 1) = 0.0;
    } else {
      v.col(keep) = f / fnorm;
      h(keep, keep - 1) = fnorm;
    }
    extend(keep);
  }
}

/// `count` eigenvalues of K x = lambda M x nearest `shift`, ordered by
/// distance to the shift. Entries with `converged == false` ran out of
/// restarts and should not be trusted.
inline std::vector<EigenResult> eig_shift_invert(const SparseMatrix& k, const SparseMatrix& m, double shift,
                                                 int count, const ArnoldiOptions& opts = {}) {
  require(k.rows() == k.cols() && m.rows() == m.cols() && k.rows() == m.rows(), ErrorKind::InvalidParameter,
          "pencil matrices must be square and of equal size");
  require(count >= 1, ErrorKind::InvalidParameter, "eigenvalue count must be positive");
  const Eigen::Index n = k.rows();

  const SparseMatrix shifted = k - shift * m;
  const DirectSolver solver(shifted);
  {
    const VectorX probe = VectorX::Ones(n);
    const VectorX x = solver.solve(probe);
    require(solver.relative_residual(x, probe) <= 1e-9 && x.norm() <= 1e13 * std::max(1.0, shifted.norm()) * probe.norm(),
            ErrorKind::FactorizationFailure, "K - shift M is numerically singular at shift " + std::to_string(shift));
  }
  const RitzPairs ritz = arnoldi_largest([&](const VectorX& x) { return solver.solve(m * x); }, n, count, opts);

  std::vector<EigenResult> results;
  for (Eigen::Index i = 0; i < ritz.values.size(); ++i) {
    EigenResult r;
    const std::complex<double> mui = ritz.values[i];
    r.lambda = std::abs(mui) > 0.0 ? shift + 1.0 / mui : std::complex<double>(INFINITY, 0.0);
    r.converged = ritz.converged[i];
    r.is_real = std::abs(r.lambda.imag()) <= opts.real_tol * std::abs(r.lambda);
    detail::CVector x = ritz.vectors.col(i);
    Eigen::Index big = 0;
    x.cwiseAbs().maxCoeff(&big);
    x *= std::conj(x[big]) / std::abs(x[big]);
    if (r.is_real) {
      r.lambda = {r.lambda.real(), 0.0};
      r.vector = x.real();
      r.vector /= r.vector.norm();
      r.residual = (k * r.vector - r.lambda.real() * (m * r.vector)).norm();
    } else {
      r.vector = x.real();
      r.residual = detail::pencil_residual(k, m, x, r.lambda);
    }
    results.push_back(std::move(r));
  }
  std::stable_sort(results.begin(), results.end(), [&](const EigenResult& a, const EigenResult& b) {
    return std::abs(a.lambda - shift) < std::abs(b.lambda - shift);
  });
  return results;
}

}  // namespace tehom
