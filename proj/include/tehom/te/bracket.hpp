#pragma once

// Comparison with constant media: the j-th eigenvalue of the periodic medium
// should lie between the j-th eigenvalues of the constant media built from
// the extreme values (a_min or a_max, n_min or n_max). The interval is the
// hull of those corner eigenvalues, so it does not depend on which corner
// is the lower one.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tehom/te/analytic.hpp"
#include "tehom/te/fourth_order.hpp"
#include "tehom/te/pencil.hpp"

namespace tehom {

struct BracketEntry {
  int index = 0;  // j, starting at 1
  double k = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool ok = false;
};

struct BracketReport {
  std::vector<BracketEntry> entries;
  std::vector<std::string> notes;
  bool ok() const {
    return !entries.empty() && std::all_of(entries.begin(), entries.end(), [](const BracketEntry& e) { return e.ok; });
  }
};

namespace detail {

inline std::vector<double> constant_medium_eigenvalues(const Domain& domain, double a, double n, double k_min,
                                                       double k_max, int count, const TriangleMesh& mesh,
                                                       const TEOptions& opts) {
  if (domain.is_disk()) return roots_all_modes(domain.radius, a, n, k_min, k_max, count);
  const CoefficientField f = combine(presets::tensor_constant(a), presets::scalar_constant(n));
  if (a == 1.0) {
    return solve_fixed_point(assemble_fourth_order(mesh, f), k_min, k_max, count, opts).eigenvalues;
  }
  return solve_pencil_sweep(assemble_pencil_X(mesh, f), k_min, k_max, count, opts).eigenvalues;
}

}  // namespace detail

/// Checks each eigenvalue of `result` against the corner hull, with a
/// relative allowance `tol` for the discretization error. Disks use the
/// analytic roots; squares solve the constant media on the same mesh.
inline BracketReport bracket_check(const TEResult& result, const CoefficientField& field, const Domain& domain,
                                   double k_min, double k_max, const TEOptions& opts = {}, double tol = 1e-2) {
  BracketReport report;
  if (result.eigenvalues.empty()) {
    report.notes.push_back("no eigenvalues to check");
    return report;
  }
  const Bounds b = field.bounds();
  const int count = static_cast<int>(result.eigenvalues.size());
  const TriangleMesh mesh = domain.is_disk() ? TriangleMesh{} : mesh_for(domain, field, opts);
  // widen the window so corner eigenvalues outside it are still found
  const double lo = 0.5 * k_min, hi = 2.0 * k_max;

  std::vector<double> as{b.a_min}, ns{b.n_min};
  if (b.a_max != b.a_min) as.push_back(b.a_max);
  if (b.n_max != b.n_min) ns.push_back(b.n_max);
  std::vector<std::vector<double>> corners;
  for (double a : as) {
    for (double n : ns) {
      if (std::abs(n / a - 1.0) <= 1e-14) {
        report.notes.push_back("corner without contrast skipped");
        continue;
      }
      corners.push_back(detail::constant_medium_eigenvalues(domain, a, n, lo, hi, count, mesh, opts));
    }
  }
  for (int j = 0; j < count; ++j) {
    BracketEntry e;
    e.index = j + 1;
    e.k = result.eigenvalues[j];
    e.lower = std::numeric_limits<double>::infinity();
    e.upper = -std::numeric_limits<double>::infinity();
    bool complete = !corners.empty();
    for (const auto& c : corners) {
      if (static_cast<int>(c.size()) <= j) {
        complete = false;
        continue;
      }
      e.lower = std::min(e.lower, c[j]);
      e.upper = std::max(e.upper, c[j]);
    }
    e.ok = complete && e.k >= e.lower * (1.0 - tol) && e.k <= e.upper * (1.0 + tol);
    if (!complete) report.notes.push_back("comparison eigenvalue " + std::to_string(j + 1) + " not found");
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace tehom
