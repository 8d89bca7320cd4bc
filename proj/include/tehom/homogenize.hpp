#pragma once

// Periodic cell problem
//   find psi_i in H^1_#(Y), mean zero:  (A grad psi_i, grad phi) = (A e_i, grad phi)
// and the effective coefficients
//   A_h = int_Y A (I - grad psi),   n_h = int_Y n.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "tehom/coeffs.hpp"
#include "tehom/fem.hpp"
#include "tehom/linalg/sparse.hpp"
#include "tehom/mesh.hpp"

namespace tehom {

struct CellSolution {
  std::array<VectorX, 2> psi;  // nodal values indexed by periodic dof
  TriangleMesh mesh;
  double residual = 0.0;  // max relative residual of the two solves
  bool mean_zero = false;
  Quadrature rule = Quadrature::EdgeMidpoint;
};

struct EffectiveMedium {
  Mat2 a_h;
  double n_h = 0.0;
  Mat2 voigt;
  Mat2 reuss;
};

inline CellSolution solve_cell(const CoefficientField& field, const TriangleMesh& mesh) {
  require(mesh.periodic(), ErrorKind::InvalidParameter, "solve_cell needs a periodic cell mesh");
  CellSolution sol;
  sol.mesh = mesh;
  sol.rule = quadrature_for(field.kind());
  // cell coordinates: the field is sampled at period one
  const TensorFn a = tensor_fn(at_unit_period(field));
  const SparseMatrix k = assemble_stiffness(mesh, a, sol.rule);
  const VectorX w = lumped_mass(mesh);
  const int n = mesh.num_dofs;

  // bordered system [K w; w^T 0] enforcing int psi = 0
  std::vector<Triplet> entries;
  entries.reserve(k.nonZeros() + 2 * n);
  for (int c = 0; c < k.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(k, c); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i) {
    entries.emplace_back(i, n, w[i]);
    entries.emplace_back(n, i, w[i]);
  }
  const SparseMatrix bordered = assemble(n + 1, n + 1, entries);
  const DirectSolver solver(bordered);

  std::array<VectorX, 2> rhs{VectorX::Zero(n + 1), VectorX::Zero(n + 1)};
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e = element(mesh, t);
    Mat2 avg = Mat2::Zero();
    for (const auto& [x, phi] : quadrature_points(e, sol.rule)) avg += a(x);
    avg /= 3.0;
    for (int i = 0; i < 2; ++i) {
      const Eigen::Vector3d local = e.area * e.grads.transpose() * avg.col(i);
      for (int j = 0; j < 3; ++j) rhs[i][e.dofs[j]] += local[j];
    }
  }
  sol.mean_zero = true;
  for (int i = 0; i < 2; ++i) {
    const VectorX x = solver.solve(rhs[i]);
    const double scale = std::max(rhs[i].norm(), 1e-14);
    const double r = (bordered * x - rhs[i]).norm() / scale;
    require(r <= 1e-9, ErrorKind::FactorizationFailure, "cell problem residual too large");
    sol.residual = std::max(sol.residual, r);
    sol.psi[i] = x.head(n);
    if (std::abs(w.dot(sol.psi[i])) > 1e-10) sol.mean_zero = false;
  }
  return sol;
}

inline EffectiveMedium effective_tensor(const CoefficientField& field, const CellSolution& cell) {
  const TriangleMesh& mesh = cell.mesh;
  const TensorFn a = tensor_fn(at_unit_period(field));
  // The discrete problem sees the per-triangle average of A, so the
  // arithmetic and harmonic bounds are taken of that same average.
  Mat2 ah = Mat2::Zero(), voigt = Mat2::Zero(), inv = Mat2::Zero();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e = element(mesh, t);
    Mat2 avg = Mat2::Zero();
    for (const auto& [x, phi] : quadrature_points(e, cell.rule)) avg += a(x);
    avg /= 3.0;
    Mat2 grad_psi;  // column i = grad psi_i
    for (int i = 0; i < 2; ++i) {
      Eigen::Vector3d nodal(cell.psi[i][e.dofs[0]], cell.psi[i][e.dofs[1]], cell.psi[i][e.dofs[2]]);
      grad_psi.col(i) = e.grads * nodal;
    }
    ah += e.area * avg * (Mat2::Identity() - grad_psi);
    voigt += e.area * avg;
    inv += e.area * avg.inverse();
  }
  EffectiveMedium out;
  out.a_h = 0.5 * (ah + ah.transpose());
  out.n_h = mean_n(field.n);
  out.voigt = 0.5 * (voigt + voigt.transpose());
  out.reuss = inv.inverse();
  out.reuss = 0.5 * (out.reuss + out.reuss.transpose());
  return out;
}

inline EffectiveMedium homogenize(const CoefficientField& field, int divisions) {
  const TriangleMesh mesh = unit_cell_mesh(divisions, true);
  return effective_tensor(field, solve_cell(field, mesh));
}

/// First-order corrector w_1 = -psi(y) . grad w at cell point y.
inline double corrector(const CellSolution& cell, const Vec2& grad_w, const Vec2& y) {
  const Vec2 yc = wrap_to_cell(y);
  const auto [t, bary] = locate_in_grid(cell.mesh, yc);
  const double p1 = interpolate(cell.mesh, cell.psi[0], t, bary);
  const double p2 = interpolate(cell.mesh, cell.psi[1], t, bary);
  return -(p1 * grad_w.x() + p2 * grad_w.y());
}

/// Smallest of xi.(a_h - reuss)xi and xi.(voigt - a_h)xi over random unit
/// directions; nonnegative when the sandwich holds.
inline double sandwich_margin(const EffectiveMedium& em, int samples = 100, unsigned seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  double margin = 1e300;
  for (int s = 0; s < samples; ++s) {
    const double th = u(rng);
    const Vec2 xi(std::cos(th), std::sin(th));
    margin = std::min(margin, xi.dot((em.a_h - em.reuss) * xi));
    margin = std::min(margin, xi.dot((em.voigt - em.a_h) * xi));
  }
  return margin;
}

}  // namespace tehom
