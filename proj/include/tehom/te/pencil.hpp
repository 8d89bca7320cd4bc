#pragma once

// Two-field pencil on X(D) = {(w, v) in H^1 x H^1 : w - v in H^1_0}:
//   (A grad w, grad p) - (grad v, grad q) = k^2 [(n w, p) - (v, q)].
// The unknowns are w on every vertex and v on interior vertices; the
// boundary values of v are those of w.

#include <algorithm>
#include <cmath>
#include <mutex>

#include "tehom/fem.hpp"
#include "tehom/linalg/arnoldi.hpp"
#include "tehom/te/types.hpp"

namespace tehom {

struct PencilX {
  SparseMatrix k;
  SparseMatrix m;
  int num_w = 0;  // all vertices
  int num_v = 0;  // interior vertices
};

/// Accepts a_min > 1 or a_max < 1; with allow_voids the bound may be
/// attained (phases where A = I).
inline void check_pencil_regime(const CoefficientField& field, bool allow_voids) {
  const Bounds b = field.bounds();
  const bool strict = b.a_min > 1.0 || b.a_max < 1.0;
  const bool touching = allow_voids && !field.isotropic_identity() && (b.a_min >= 1.0 || b.a_max <= 1.0);
  require(strict || touching, ErrorKind::RegimeError,
          "the two-field pencil needs a_min > 1 or a_max < 1 (got [" + std::to_string(b.a_min) + ", " +
              std::to_string(b.a_max) + "])");
}

inline PencilX assemble_pencil_X(const TriangleMesh& mesh, const CoefficientField& field, bool allow_voids = false,
                                 int levels = 0) {
  check_pencil_regime(field, allow_voids);
  const Quadrature rule = quadrature_for(field.kind());
  const SparseMatrix sa = assemble_stiffness(mesh, tensor_fn(field), rule, levels);
  const SparseMatrix mn = assemble_mass(mesh, scalar_fn(field), rule, levels);
  const SparseMatrix s = assemble_stiffness(mesh);
  const SparseMatrix m0 = assemble_mass(mesh);
  const InteriorMap map = interior_map(mesh);
  const int nw = mesh.num_dofs;
  const int nv = static_cast<int>(map.interior.size());

  // T: (w, v_I) -> (w, v) with v = w on the boundary
  std::vector<Triplet> t;
  for (int i = 0; i < nw; ++i) {
    t.emplace_back(i, i, 1.0);
    if (map.position[i] < 0) {
      t.emplace_back(nw + i, i, 1.0);
    } else {
      t.emplace_back(nw + i, nw + map.position[i], 1.0);
    }
  }
  const SparseMatrix tm = assemble(2 * nw, nw + nv, t);

  auto block_diag = [&](const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<Triplet> e;
    e.reserve(a.nonZeros() + b.nonZeros());
    for (int c = 0; c < a.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(a, c); it; ++it) e.emplace_back(it.row(), it.col(), it.value());
    for (int c = 0; c < b.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(b, c); it; ++it) e.emplace_back(nw + it.row(), nw + it.col(), -it.value());
    return assemble(2 * nw, 2 * nw, e);
  };

  PencilX p;
  p.k = SparseMatrix(tm.transpose() * block_diag(sa, s) * tm);
  p.m = SparseMatrix(tm.transpose() * block_diag(mn, m0) * tm);
  p.num_w = nw;
  p.num_v = nv;
  return p;
}

/// Real eigenvalues of K x = k^2 M x with k in (k_min, k_max) from a shift
/// sweep over the window; Ritz values are merged and de-duplicated.
inline TEResult solve_pencil_sweep(const PencilX& p, double k_min, double k_max, int count, const TEOptions& opts) {
  require(opts.shift_step > 0.0 && opts.ritz_per_shift >= 1, ErrorKind::InvalidParameter,
          "shift sweep needs a positive step and Ritz count");
  const int shifts = std::max(1, static_cast<int>(std::ceil((k_max - k_min) / opts.shift_step))) + 1;
  std::vector<std::vector<EigenResult>> found(shifts);
  std::vector<std::string> warnings;
  std::mutex lock;
  parallel_for(shifts, thread_count(opts), [&](int s) {
    const double ks = std::min(k_min + s * opts.shift_step, k_max);
    double sigma = ks * ks;
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        found[s] = eig_shift_invert(p.k, p.m, sigma, opts.ritz_per_shift);
        return;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::FactorizationFailure) throw;
        sigma *= 1.0 + 1e-7 * (attempt + 1);
      }
    }
    std::lock_guard<std::mutex> g(lock);
    warnings.push_back("pencil singular near shift k = " + std::to_string(ks));
  });

  std::vector<std::pair<double, double>> ks;  // (k, residual)
  const double scale = std::max(1.0, p.k.norm() / std::sqrt(static_cast<double>(p.k.rows())));
  for (const auto& list : found) {
    for (const EigenResult& r : list) {
      if (!r.is_real || !r.converged || r.value() <= 0.0) continue;
      const double k = std::sqrt(r.value());
      if (k <= k_min || k >= k_max) continue;
      if (r.residual > 1e-8 * scale * std::max(1.0, r.value())) continue;
      ks.emplace_back(k, r.residual);
    }
  }
  std::sort(ks.begin(), ks.end());
  TEResult out;
  out.method = TEMethod::PencilX;
  out.warnings = warnings;
  for (const auto& [k, res] : ks) {
    if (!out.eigenvalues.empty() && std::abs(k * k - out.eigenvalues.back() * out.eigenvalues.back()) <=
                                        1e-6 * k * k) {
      out.residuals.back() = std::min(out.residuals.back(), res);
      continue;
    }
    if (static_cast<int>(out.eigenvalues.size()) == count) break;
    out.eigenvalues.push_back(k);
    out.residuals.push_back(res);
  }
  out.shortfall = static_cast<int>(out.eigenvalues.size()) < count;
  if (out.eigenvalues.empty()) out.warnings.push_back("no real eigenvalue in the window");
  return out;
}

inline TEResult solve_te_pencil(const TEQuery& q, const TEOptions& opts = {}) {
  q.validate();
  check_pencil_regime(q.field, opts.allow_voids);
  const TriangleMesh mesh = mesh_for(q.domain, q.field, opts);
  TEResult out = solve_pencil_sweep(assemble_pencil_X(mesh, q.field, opts.allow_voids, opts.quadrature_levels), q.k_min, q.k_max, q.count, opts);
  out.h = mesh.h;
  return out;
}

}  // namespace tehom
