#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tehom/coeffs.hpp"
#include "tehom/error.hpp"
#include "tehom/mesh.hpp"

namespace tehom {

struct Domain {
  enum class Kind { Disk, Square };
  Kind kind = Kind::Disk;
  double radius = 1.0;
  double lo = 0.0, hi = 1.0;

  static Domain disk(double r) {
    require(r > 0.0, ErrorKind::InvalidParameter, "disk radius must be positive");
    return {Kind::Disk, r, -r, r};
  }
  static Domain square(double lo, double hi) {
    require(hi > lo, ErrorKind::InvalidParameter, "square needs hi > lo");
    return {Kind::Square, 0.5 * (hi - lo), lo, hi};
  }

  bool is_disk() const { return kind == Kind::Disk; }
  double area() const { return is_disk() ? std::numbers::pi * radius * radius : (hi - lo) * (hi - lo); }
  /// Radius of the disk, half the side of the square.
  double half_width() const { return is_disk() ? radius : 0.5 * (hi - lo); }

  std::string describe() const {
    char buf[96];
    if (is_disk()) {
      std::snprintf(buf, sizeof buf, "disk:%.12g", radius);
    } else {
      std::snprintf(buf, sizeof buf, "square:%.12g,%.12g", lo, hi);
    }
    return buf;
  }
};

enum class TEMethod { Analytic, PencilX, FixedPoint4th };

inline std::string_view to_string(TEMethod m) {
  switch (m) {
    case TEMethod::Analytic: return "analytic";
    case TEMethod::PencilX: return "pencil-X";
    case TEMethod::FixedPoint4th: return "fixed-point-4th";
  }
  return "unknown";
}

struct TEQuery {
  Domain domain;
  CoefficientField field;
  double k_min = 0.5;
  double k_max = 5.0;
  int count = 1;

  void validate() const {
    require(k_min > 0.0 && k_max > k_min && std::isfinite(k_max), ErrorKind::InvalidParameter,
            "k-window must satisfy 0 < k_min < k_max");
    require(count >= 1, ErrorKind::InvalidParameter, "count must be positive");
  }
};

struct TEResult {
  std::vector<double> eigenvalues;  // ascending k
  std::vector<double> residuals;
  TEMethod method = TEMethod::Analytic;
  double h = 0.0;  // 0 for the analytic solver
  bool shortfall = false;  // fewer than `count` eigenvalues found in the window
  std::vector<std::string> warnings;

  double first() const {
    require(!eigenvalues.empty(), ErrorKind::OutOfRange, "no transmission eigenvalue in the window");
    return eigenvalues.front();
  }
};

struct TEOptions {
  double h_max = 0.0;  // 0 = automatic: the smaller of L/20 and eps/8
  int rings = 0;  // disk mesh override
  int divisions = 0;  // square mesh override
  int scan_steps = 200;  // tau grid of the fixed-point search
  int curves = 8;  // lambda_j(tau) tracked for j <= curves
  double shift_step = 0.05;  // k spacing of the pencil shift sweep
  int ritz_per_shift = 6;
  bool allow_voids = false;  // accept phases with n = 1 or A = I
  double void_cap = 1e3;  // cap on 1/|n - 1| when voids are allowed
  int quadrature_levels = 2;  // coefficient quadrature on 4^levels pieces per triangle
  int threads = 0;  // 0 = TEHOM_THREADS or 1
};

inline int thread_count(const TEOptions& opts) {
  if (opts.threads > 0) return opts.threads;
  if (const char* env = std::getenv("TEHOM_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(int n, int threads, const Fn& fn) {
  threads = std::clamp(threads, 1, std::max(n, 1));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Target mesh size for a field on a domain: L/20 for constant media and
/// at most eps/8 when the coefficients oscillate.
inline double target_h(const Domain& domain, const CoefficientField& field, const TEOptions& opts) {
  if (opts.h_max > 0.0) return opts.h_max;
  double h = domain.half_width() / 20.0;
  if (field.kind() != FieldKind::Constant) h = std::min(h, field.epsilon / 8.0);
  return h;
}

inline TriangleMesh mesh_for(const Domain& domain, const CoefficientField& field, const TEOptions& opts) {
  if (domain.is_disk()) {
    if (opts.rings > 0) return disk_mesh_rings(domain.radius, opts.rings);
    const double h = target_h(domain, field, opts);
    int rings = std::max(2, static_cast<int>(std::ceil(domain.radius / h)));
    TriangleMesh mesh = disk_mesh_rings(domain.radius, rings);
    while (mesh.h > h) {
      rings = std::max(rings + 1, static_cast<int>(std::ceil(rings * mesh.h / h)));
      mesh = disk_mesh_rings(domain.radius, rings);
    }
    return mesh;
  }
  if (opts.divisions > 0) return square_mesh(domain.lo, domain.hi, opts.divisions);
  const double side = domain.hi - domain.lo;
  int div = std::max(2, static_cast<int>(std::ceil(std::sqrt(2.0) * side / target_h(domain, field, opts) - 1e-9)));
  if (field.kind() == FieldKind::Piecewise) {
    // align grid lines with half-cells when the domain spans whole periods
    const double halves = 2.0 * side / field.epsilon;
    const long m = std::lround(halves);
    if (m > 0 && std::abs(halves - m) < 1e-9) div = static_cast<int>((div + m - 1) / m * m);
  }
  return square_mesh(domain.lo, domain.hi, div);
}

}  // namespace tehom
