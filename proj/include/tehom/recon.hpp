#pragma once

// Effective parameters from a measured first transmission eigenvalue: the
// constant medium whose first eigenvalue equals the measurement. Disks use
// the first root of d_0; squares use the finite element solver as the
// forward map, inside a bracket taken from the inscribed and circumscribed
// disks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tehom/te/analytic.hpp"
#include "tehom/te/fourth_order.hpp"
#include "tehom/te/pencil.hpp"

namespace tehom {

enum class ReconMode { Index, TensorScalar, Ratio };

inline std::string_view to_string(ReconMode m) {
  switch (m) {
    case ReconMode::Index: return "index";
    case ReconMode::TensorScalar: return "tensor";
    case ReconMode::Ratio: return "ratio";
  }
  return "unknown";
}

/// Which side of a = 1 the tensor inversion searches.
enum class ContrastBranch { Below, Above };

struct ReconstructionReport {
  double measured_k1 = 0.0;
  ReconMode mode = ReconMode::Index;
  double value = 0.0;  // n_h, a_h or n_h / a_h
  double residual = 0.0;  // |k1(value) - measured_k1|
  double lo = 0.0, hi = 0.0;  // bracket searched
  bool converged = false;
  Domain domain;
  int forward_solves = 0;
  std::vector<std::string> warnings;
};

inline constexpr int kReconMonotoneSamples = 50;
inline constexpr double kReconScanStart = 1e-3;

namespace detail {

/// n_h / a_h from the model that drops the jump in the normal derivative:
/// Lap w + alpha k^2 w = 0, Lap v + k^2 v = 0, w = v, dw/dnu = dv/dnu.
inline double det_dropped_jump(double k, double r, double alpha) {
  const double s = std::sqrt(alpha);
  return bessel_j(0, k * r * s) * bessel_j(1, k * r) - s * bessel_j(1, k * r * s) * bessel_j(0, k * r);
}

/// First root of d in (0, k_cap], +inf when there is none.
inline double first_root_below(const std::function<double(double)>& d, double k_cap) {
  const auto roots = scan_roots(d, kReconScanStart, k_cap, kAnalyticScanStep, 1, kAnalyticRootTol);
  return roots.empty() ? std::numeric_limits<double>::infinity() : roots[0];
}

struct DiskForward {
  ReconMode mode;
  double r;

  double det(double p, double k) const {
    switch (mode) {
      case ReconMode::Index: return det_disk(k, r, 1.0, p);
      case ReconMode::TensorScalar: return det_disk(k, r, p, 1.0);
      case ReconMode::Ratio: return det_dropped_jump(k, r, p);
    }
    return 0.0;
  }
  double k1(double p, double k_cap) const {
    return first_root_below([&](double k) { return det(p, k); }, k_cap);
  }
};

inline std::pair<double, double> recon_bracket(ReconMode mode, ContrastBranch branch) {
  if (mode == ReconMode::TensorScalar && branch == ContrastBranch::Below) return {1e-3, 1.0 - 1e-6};
  return {1.0 + 1e-6, 100.0};
}

/// Bisection of p -> k1(p) - k on [lo, hi] after checking that k1 is
/// strictly monotone on a 50-point grid. `k1_of` may return +inf (no
/// eigenvalue below its cap), which counts as larger than k.
inline ReconstructionReport bisect_parameter(const std::function<double(double)>& k1_of, double k, double lo, double hi,
                                             double rel_tol, ReconMode mode) {
  ReconstructionReport rep;
  rep.measured_k1 = k;
  rep.mode = mode;
  rep.lo = lo;
  rep.hi = hi;

  std::vector<double> grid;
  for (int i = 0; i < kReconMonotoneSamples; ++i) {
    const double p = lo + (hi - lo) * i / (kReconMonotoneSamples - 1.0);
    grid.push_back(k1_of(p));
  }
  const bool decreasing = grid.front() > grid.back();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = grid[i - 1], b = grid[i];
    if (std::isinf(a) && std::isinf(b)) continue;
    const bool ok = decreasing ? a > b : a < b;
    require(ok, ErrorKind::InvalidParameter,
            "k1 is not strictly monotone on the bracket near p = " +
                std::to_string(lo + (hi - lo) * static_cast<double>(i) / (kReconMonotoneSamples - 1.0)));
  }
  const double k_lo = std::min(grid.front(), grid.back()), k_hi = std::max(grid.front(), grid.back());
  require(k >= k_lo && k <= k_hi, ErrorKind::OutOfRange,
          "k1 = " + std::to_string(k) + " outside the range [" + std::to_string(k_lo) + ", " + std::to_string(k_hi) +
              "] reachable on the bracket");

  // keep g(a) < 0 < g(b) in the orientation of the map
  auto g = [&](double p) { return decreasing ? k - k1_of(p) : k1_of(p) - k; };
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > rel_tol * std::max(1.0, std::abs(b)); ++it) {
    const double mid = 0.5 * (a + b);
    (g(mid) < 0.0 ? a : b) = mid;
  }
  rep.value = 0.5 * (a + b);
  return rep;
}

}  // namespace detail

/// Constant disk inversion; `branch` only matters for the tensor mode.
inline ReconstructionReport invert_disk(ReconMode mode, double k1, double r,
                                        ContrastBranch branch = ContrastBranch::Below) {
  require(k1 > 0.0 && std::isfinite(k1), ErrorKind::InvalidParameter, "measured k1 must be positive");
  require(r > 0.0, ErrorKind::InvalidParameter, "disk radius must be positive");
  const detail::DiskForward fwd{mode, r};
  const double cap = 2.0 * k1 + 1.0;
  const auto [lo, hi] = detail::recon_bracket(mode, branch);
  int solves = 0;
  auto k1_of = [&](double p) {
    ++solves;
    return fwd.k1(p, cap);
  };
  ReconstructionReport rep = detail::bisect_parameter(k1_of, k1, lo, hi, 1e-14, mode);
  rep.domain = Domain::disk(r);
  const double k_rec = fwd.k1(rep.value, cap);
  rep.residual = std::abs(k_rec - k1);
  rep.converged = rep.residual <= 1e-8;
  rep.forward_solves = solves + 1;
  if (!rep.converged) rep.warnings.push_back("residual " + std::to_string(rep.residual) + " above 1e-8");
  return rep;
}

inline ReconstructionReport invert_index(double k1, double r) { return invert_disk(ReconMode::Index, k1, r); }

inline ReconstructionReport invert_tensor_scalar(double k1, double r, ContrastBranch branch = ContrastBranch::Below) {
  return invert_disk(ReconMode::TensorScalar, k1, r, branch);
}

inline ReconstructionReport invert_ratio(double k1, double r) { return invert_disk(ReconMode::Ratio, k1, r); }

/// Disk-only entry points reject other domains.
inline ReconstructionReport invert_disk(ReconMode mode, double k1, const Domain& domain,
                                        ContrastBranch branch = ContrastBranch::Below) {
  require(domain.is_disk(), ErrorKind::DomainError,
          "analytic inversion needs a disk; use invert_fem for " + domain.describe());
  return invert_disk(mode, k1, domain.radius, branch);
}

/// First eigenvalue of the constant medium p on `mesh` (index and ratio
/// modes: A = I, n = p; tensor mode: A = p I, n = 1).
inline double fem_first_eigenvalue(ReconMode mode, double p, const TriangleMesh& mesh, double k_min, double k_max,
                                   const TEOptions& opts) {
  if (mode == ReconMode::TensorScalar) {
    const CoefficientField f = combine(presets::tensor_constant(p), presets::scalar_constant(1.0));
    const TEResult r = solve_pencil_sweep(assemble_pencil_X(mesh, f), k_min, k_max, 1, opts);
    return r.eigenvalues.empty() ? std::numeric_limits<double>::infinity() : r.eigenvalues[0];
  }
  const CoefficientField f = combine(presets::identity_tensor(), presets::scalar_constant(p));
  const TEResult r = solve_fixed_point(assemble_fourth_order(mesh, f), k_min, k_max, 1, opts);
  return r.eigenvalues.empty() ? std::numeric_limits<double>::infinity() : r.eigenvalues[0];
}

/// Inversion with the finite element forward map on the mesh of `domain`
/// chosen by `opts`. The bracket comes from the disks inscribed in and
/// circumscribing the domain, widened by 10% and checked with the FEM.
inline ReconstructionReport invert_fem(ReconMode mode, double k1, const Domain& domain, const TEOptions& opts = {},
                                       ContrastBranch branch = ContrastBranch::Below, double rel_tol = 1e-6) {
  require(k1 > 0.0 && std::isfinite(k1), ErrorKind::InvalidParameter, "measured k1 must be positive");
  const auto [blo, bhi] = detail::recon_bracket(mode, branch);
  const double r_in = domain.half_width();
  const double r_out = domain.is_disk() ? r_in : r_in * std::sqrt(2.0);
  const double p1 = invert_disk(mode == ReconMode::Ratio ? ReconMode::Index : mode, k1, r_in, branch).value;
  const double p2 = invert_disk(mode == ReconMode::Ratio ? ReconMode::Index : mode, k1, r_out, branch).value;
  const double width = std::abs(p2 - p1);
  double lo = std::max(blo, std::min(p1, p2) - 0.1 * width - 1e-3);
  double hi = std::min(bhi, std::max(p1, p2) + 0.1 * width + 1e-3);

  const TriangleMesh mesh = mesh_for(domain, combine(presets::identity_tensor(), presets::scalar_constant(2.0)), opts);
  const double k_min = 0.5 * k1, k_max = 1.5 * k1;
  int solves = 0;
  auto k1_of = [&](double p) {
    ++solves;
    return fem_first_eigenvalue(mode, p, mesh, k_min, k_max, opts);
  };
  // orientation of the map, read off the inscribed disk
  const detail::DiskForward surrogate{mode == ReconMode::Ratio ? ReconMode::Index : mode, r_in};
  const bool decreasing = surrogate.k1(lo, 4.0 * k1 + 1.0) > surrogate.k1(hi, 4.0 * k1 + 1.0);
  auto g = [&](double p) { return decreasing ? k1 - k1_of(p) : k1_of(p) - k1; };
  double glo = g(lo), ghi = g(hi);
  for (int grow = 0; grow < 8 && glo > 0.0 && lo > blo; ++grow) {
    lo = std::max(blo, lo - std::max(width, 0.1 * lo));
    glo = g(lo);
  }
  for (int grow = 0; grow < 8 && ghi < 0.0 && hi < bhi; ++grow) {
    hi = std::min(bhi, hi + std::max(width, 0.1 * hi));
    ghi = g(hi);
  }
  require(glo <= 0.0 && ghi >= 0.0, ErrorKind::OutOfRange,
          "no parameter in [" + std::to_string(lo) + ", " + std::to_string(hi) + "] reproduces k1 = " +
              std::to_string(k1) + " on " + domain.describe());

  ReconstructionReport rep;
  rep.measured_k1 = k1;
  rep.mode = mode;
  rep.domain = domain;
  rep.lo = lo;
  rep.hi = hi;
  double a = lo, b = hi;
  while (b - a > rel_tol * b) {
    const double mid = 0.5 * (a + b);
    (g(mid) < 0.0 ? a : b) = mid;
  }
  rep.value = 0.5 * (a + b);
  rep.residual = std::abs(k1_of(rep.value) - k1);
  rep.forward_solves = solves;
  rep.converged = true;
  return rep;
}

}  // namespace tehom
