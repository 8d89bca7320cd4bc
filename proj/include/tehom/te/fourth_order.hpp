#pragma once

// A = I branch. With u = w - v and tau = k^2, real transmission eigenvalues
// are the fixed points lambda_j(tau) = tau of the symmetric pencils
//   n > 1:  A_tau(u, p) = (1/(n-1) (Lap u + tau u), Lap p + tau p) + tau^2 (u, p)
//   n < 1:  A_tau(u, p) = (1/(1-n) (Lap u + tau n u), Lap p + tau n p) + tau^2 (n u, p)
//   B(u, p) = (grad u, grad p),   A_tau u = lambda B u  on H^2_0.
// Lap u is the mixed P1 variable sigma with (sigma, q) = -(grad u, grad q)
// for every q, so u = 0 is strong and du/dn = 0 is natural. The mass on the
// left of that relation is lumped, which keeps A_tau sparse.

#include <Eigen/SparseCholesky>
#ifdef TEHOM_HAVE_SUITESPARSE
#include <Eigen/CholmodSupport>
#endif

#include <algorithm>
#include <cmath>
#include <vector>

#include "tehom/fem.hpp"
#include "tehom/linalg/arnoldi.hpp"
#include "tehom/te/types.hpp"

namespace tehom {

/// A_tau = p0 + tau p1 + tau^2 p2, all three on one sparsity pattern.
struct FourthOrderSystem {
  SparseMatrix p0, p1, p2;
  SparseMatrix b;
  bool index_above_one = true;
  int size() const { return static_cast<int>(b.rows()); }

  SparseMatrix a_tau(double tau) const {
    SparseMatrix a = p0;
    const Eigen::Index nnz = a.nonZeros();
    double* v = a.valuePtr();
    const double *v1 = p1.valuePtr(), *v2 = p2.valuePtr();
    for (Eigen::Index i = 0; i < nnz; ++i) v[i] += tau * v1[i] + tau * tau * v2[i];
    return a;
  }
};

inline void check_fourth_order_regime(const CoefficientField& field, bool allow_voids) {
  require(field.isotropic_identity(), ErrorKind::RegimeError, "the fixed-point solver needs A = I");
  const Bounds b = field.bounds();
  const bool strict = b.n_min > 1.0 || b.n_max < 1.0;
  const bool touching = allow_voids && !field.unit_index() && (b.n_min >= 1.0 || b.n_max <= 1.0);
  require(strict || touching, ErrorKind::RegimeError,
          "the fixed-point solver needs n_min > 1 or n_max < 1 (got [" + std::to_string(b.n_min) + ", " +
              std::to_string(b.n_max) + "])");
}

namespace detail {

/// Gives every matrix the union pattern so their value arrays line up.
inline void share_pattern(std::vector<SparseMatrix*> mats) {
  SparseMatrix u = *mats[0];
  for (std::size_t i = 1; i < mats.size(); ++i) u += *mats[i];
  for (SparseMatrix* m : mats) {
    std::vector<Triplet> e;
    e.reserve(u.nonZeros());
    for (int c = 0; c < u.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(u, c); it; ++it) e.emplace_back(it.row(), it.col(), 0.0);
    for (int c = 0; c < m->outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(*m, c); it; ++it) e.emplace_back(it.row(), it.col(), it.value());
    SparseMatrix out(u.rows(), u.cols());
    out.setFromTriplets(e.begin(), e.end());
    out.makeCompressed();
    *m = std::move(out);
  }
}

}  // namespace detail

inline FourthOrderSystem assemble_fourth_order(const TriangleMesh& mesh, const CoefficientField& field,
                                               bool allow_voids = false, double void_cap = 1e3, int levels = 0) {
  check_fourth_order_regime(field, allow_voids);
  require(void_cap > 0.0, ErrorKind::InvalidParameter, "void cap must be positive");
  const Bounds bd = field.bounds();
  const bool above = bd.n_min >= 1.0 && bd.n_max > 1.0;
  const Quadrature rule = quadrature_for(field.kind());
  const ScalarFn n = scalar_fn(field);
  const ScalarFn weight = [&](const Vec2& x) {
    const double gap = std::abs(n(x) - 1.0);
    return gap * void_cap <= 1.0 ? void_cap : 1.0 / gap;
  };

  const InteriorMap map = interior_map(mesh);
  const SparseMatrix e = embedding(mesh, map);
  const SparseMatrix s = assemble_stiffness(mesh);
  const VectorX lumped = lumped_mass(mesh);
  const SparseMatrix c = assemble_mass(mesh, weight, rule, levels);

  // L = -M_L^{-1} S E maps interior u to the nodal Laplacian on all vertices
  SparseMatrix l = SparseMatrix(-(lumped.cwiseInverse().asDiagonal() * s) * e);
  SparseMatrix g1 = e;
  SparseMatrix tail;
  if (above) {
    tail = SparseMatrix(e.transpose() * assemble_mass(mesh) * e);
  } else {
    const SparseMatrix mn = assemble_mass(mesh, n, rule, levels);
    const VectorX nbar = (mn * VectorX::Ones(mesh.num_dofs)).cwiseQuotient(lumped);
    g1 = SparseMatrix(nbar.asDiagonal() * e);
    tail = SparseMatrix(e.transpose() * mn * e);
  }

  FourthOrderSystem sys;
  sys.index_above_one = above;
  const SparseMatrix cl = c * l;
  const SparseMatrix cg1 = c * g1;
  sys.p0 = SparseMatrix(l.transpose() * cl);
  sys.p1 = SparseMatrix(l.transpose() * cg1);
  sys.p1 = SparseMatrix(sys.p1 + SparseMatrix(sys.p1.transpose()));
  sys.p2 = SparseMatrix(g1.transpose() * cg1) + tail;
  sys.b = SparseMatrix(e.transpose() * s * e);
  detail::share_pattern({&sys.p0, &sys.p1, &sys.p2});
  return sys;
}

/// tau -> the `count` smallest eigenvalues of A_tau u = lambda B u,
/// ascending. Each call warm-starts from the previous lowest eigenvector.
class FixedPointCurves {
 public:
  FixedPointCurves(FourthOrderSystem sys, int count) : sys_(std::move(sys)), count_(count) {
    chol_.analyzePattern(sys_.p0);
  }

  std::vector<double> operator()(double tau) {
    chol_.factorize(sys_.a_tau(tau));
    require(chol_.info() == Eigen::Success, ErrorKind::FactorizationFailure,
            "A_tau is not positive definite at tau " + std::to_string(tau));
    ArnoldiOptions ao;
    ao.tol = 1e-11;
    const VectorX* start = warm_.size() == sys_.size() ? &warm_ : nullptr;
    const RitzPairs ritz = arnoldi_largest([&](const VectorX& x) { return VectorX(chol_.solve(sys_.b * x)); },
                                           sys_.size(), count_, ao, start);
    std::vector<double> lambda;
    for (Eigen::Index i = 0; i < ritz.values.size(); ++i) lambda.push_back(1.0 / ritz.values[i].real());
    std::sort(lambda.begin(), lambda.end());
    warm_ = ritz.vectors.col(0).real();
    if (warm_.norm() == 0.0) warm_.resize(0);
    ++evaluations_;
    return lambda;
  }

  int evaluations() const { return evaluations_; }

 private:
  FourthOrderSystem sys_;
  int count_;
#ifdef TEHOM_HAVE_SUITESPARSE
  Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> chol_;
#else
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> chol_;
#endif
  VectorX warm_;
  int evaluations_ = 0;
};

/// Fixed points of the eigenvalue curves in [k_min^2, k_max^2]: a scan on
/// `opts.scan_steps` intervals, each sign change of g_j = lambda_j - tau
/// polished by Illinois-modified secant steps.
inline TEResult solve_fixed_point(FourthOrderSystem sys, double k_min, double k_max, int count,
                                  const TEOptions& opts) {
  require(opts.scan_steps >= 1 && opts.curves >= 1, ErrorKind::InvalidParameter,
          "fixed-point search needs positive scan steps and curve count");
  FixedPointCurves curves(std::move(sys), opts.curves);
  const double t0 = k_min * k_min, t1 = k_max * k_max;
  TEResult out;
  out.method = TEMethod::FixedPoint4th;

  std::vector<std::pair<double, double>> roots;  // (tau, |g|)
  double ta = t0;
  std::vector<double> la = curves(ta);
  for (int step = 1; step <= opts.scan_steps; ++step) {
    const double tb = t0 + (t1 - t0) * step / opts.scan_steps;
    const std::vector<double> lb = curves(tb);
    const std::size_t nj = std::min(la.size(), lb.size());
    std::size_t found_here = 0;
    for (std::size_t j = 0; j < nj; ++j) {
      double xa = ta, ga = la[j] - ta, xb = tb, gb = lb[j] - tb;
      if (ga == 0.0 || (ga < 0.0) == (gb < 0.0)) continue;
      bool converged = false;
      double x = xb, gx = gb;
      int side = 0;
      for (int it = 0; it < 50; ++it) {
        x = (xa * gb - xb * ga) / (gb - ga);
        gx = curves(x)[j] - x;
        if (std::abs(gx) <= 1e-9 * x || std::abs(xb - xa) <= 1e-10 * x) {
          converged = true;
          break;
        }
        if ((gx < 0.0) == (gb < 0.0)) {
          xb = x;
          gb = gx;
          if (side == -1) ga *= 0.5;
          side = -1;
        } else {
          xa = x;
          ga = gx;
          if (side == 1) gb *= 0.5;
          side = 1;
        }
      }
      if (!converged) {
        out.warnings.push_back("secant did not converge on curve " + std::to_string(j + 1) + " near k = " +
                               std::to_string(std::sqrt(x)));
        continue;
      }
      roots.emplace_back(x, std::abs(gx));
      ++found_here;
    }
    ta = tb;
    la = lb;
    if (found_here > 0) {
      std::sort(roots.begin(), roots.end());
      std::size_t distinct = 0;
      for (std::size_t i = 0; i < roots.size(); ++i)
        if (i == 0 || roots[i].first - roots[i - 1].first > 1e-6 * roots[i].first) ++distinct;
      if (static_cast<int>(distinct) >= count) break;
    }
  }

  std::sort(roots.begin(), roots.end());
  for (const auto& [tau, g] : roots) {
    const double k = std::sqrt(tau);
    if (k <= k_min || k >= k_max) continue;
    if (!out.eigenvalues.empty() && tau - out.eigenvalues.back() * out.eigenvalues.back() <= 1e-6 * tau) continue;
    if (static_cast<int>(out.eigenvalues.size()) == count) break;
    out.eigenvalues.push_back(k);
    out.residuals.push_back(g);
  }
  out.shortfall = static_cast<int>(out.eigenvalues.size()) < count;
  if (out.eigenvalues.empty()) out.warnings.push_back("no fixed point in the window");
  return out;
}

inline TEResult solve_te_4th(const TEQuery& q, const TEOptions& opts = {}) {
  q.validate();
  check_fourth_order_regime(q.field, opts.allow_voids);
  const TriangleMesh mesh = mesh_for(q.domain, q.field, opts);
  TEResult out = solve_fixed_point(assemble_fourth_order(mesh, q.field, opts.allow_voids, opts.void_cap,
                                                         opts.quadrature_levels), q.k_min,
                                   q.k_max, q.count, opts);
  out.h = mesh.h;
  return out;
}

}  // namespace tehom
