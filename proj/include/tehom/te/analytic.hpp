#pragma once

// Transmission eigenvalues of a disk with constant (a I, n) by separation of
// variables. Mode m contributes
//   d_m(k) = J_m(k_i R) k J_m'(k R) - a k_i J_m'(k_i R) J_m(k R),  k_i = k sqrt(n/a),
// and for m = 0 this is -k times
//   d_0(k) = J_0(k_i R) J_1(k R) - sqrt(n a) J_1(k_i R) J_0(k R).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tehom/specfun.hpp"
#include "tehom/te/types.hpp"

namespace tehom {

inline constexpr double kAnalyticScanStep = 0.01;
inline constexpr double kAnalyticRootTol = 1e-10;

namespace detail {

inline void check_disk_params(double k, double r, double a, double n) {
  require(k > 0.0 && r > 0.0 && a > 0.0 && n > 0.0, ErrorKind::InvalidParameter,
          "disk determinant needs k, R, a, n > 0");
  require(std::abs(n / a - 1.0) > 1e-14, ErrorKind::DegenerateContrast, "n / a = 1 has no contrast");
}

/// Bisection on a bracketed sign change of f.
template <typename F>
double bisect(const F& f, double lo, double hi, double flo, double tol) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Sign changes of f on [lo, hi] scanned at `step`, each bisected to tol.
template <typename F>
std::vector<double> scan_roots(const F& f, double lo, double hi, double step, int count, double tol) {
  std::vector<double> roots;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
  double x0 = lo, f0 = f(lo);
  for (int i = 1; i <= n && static_cast<int>(roots.size()) < count; ++i) {
    const double x1 = i == n ? hi : lo + (hi - lo) * i / n;
    const double f1 = f(x1);
    if (f0 == 0.0) {
      if (x0 > lo) roots.push_back(x0);
    } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      roots.push_back(bisect(f, x0, x1, f0, tol));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace detail

inline double det_disk(double k, double r, double a, double n) {
  detail::check_disk_params(k, r, a, n);
  const double c = std::sqrt(n / a);
  const double x = k * r, xi = k * r * c;
  return bessel_j(0, xi) * bessel_j(1, x) - std::sqrt(n * a) * bessel_j(1, xi) * bessel_j(0, x);
}

/// d_m(k) divided by the sum of the magnitudes of its two terms, so the
/// sign is kept and high orders do not underflow near k = 0.
inline double det_disk_mode(int m, double k, double r, double a, double n) {
  detail::check_disk_params(k, r, a, n);
  const double ki = k * std::sqrt(n / a);
  const double t1 = bessel_j(m, ki * r) * k * bessel_j_prime(m, k * r);
  const double t2 = a * ki * bessel_j_prime(m, ki * r) * bessel_j(m, k * r);
  const double scale = std::abs(t1) + std::abs(t2);
  return scale > 0.0 ? (t1 - t2) / scale : 0.0;
}

/// First `count` roots of d_0 in [k_min, k_max].
inline TEResult roots_disk(double r, double a, double n, double k_min, double k_max, int count,
                           double step = kAnalyticScanStep) {
  require(k_min > 0.0 && k_max > k_min, ErrorKind::InvalidParameter, "k-window must satisfy 0 < k_min < k_max");
  require(count >= 1, ErrorKind::InvalidParameter, "count must be positive");
  require(step > 0.0 && step <= kAnalyticScanStep, ErrorKind::InvalidParameter, "scan step must be in (0, 0.01]");
  detail::check_disk_params(1.0, r, a, n);
  TEResult out;
  out.method = TEMethod::Analytic;
  out.eigenvalues = detail::scan_roots([&](double k) { return det_disk(k, r, a, n); }, k_min, k_max, step, count,
                                       kAnalyticRootTol);
  for (double k : out.eigenvalues) out.residuals.push_back(std::abs(det_disk(k, r, a, n)));
  out.shortfall = static_cast<int>(out.eigenvalues.size()) < count;
  if (out.shortfall) out.warnings.push_back("fewer roots than requested in the window");
  return out;
}

/// Smallest transmission eigenvalue over all angular modes in the window,
/// or NaN when none is found. Orders run to k_max R max(1, sqrt(n/a)) + 10.
inline double first_root_all_modes(double r, double a, double n, double k_min, double k_max,
                                   double step = kAnalyticScanStep) {
  detail::check_disk_params(1.0, r, a, n);
  const double reach = k_max * r * std::max(1.0, std::sqrt(n / a));
  const int max_order = std::min(kMaxBesselOrder - 1, static_cast<int>(std::ceil(reach)) + 10);
  double best = std::numeric_limits<double>::quiet_NaN();
  for (int m = 0; m <= max_order; ++m) {
    const double hi = std::isnan(best) ? k_max : best;
    const auto roots = detail::scan_roots([&](double k) { return det_disk_mode(m, k, r, a, n); }, k_min, hi, step, 1,
                                          kAnalyticRootTol);
    if (!roots.empty() && (std::isnan(best) || roots[0] < best)) best = roots[0];
  }
  return best;
}

/// Eigenvalues of a constant disk over all angular modes, ascending; modes
/// m >= 1 are listed twice (cos and sin).
inline std::vector<double> roots_all_modes(double r, double a, double n, double k_min, double k_max, int count,
                                           double step = kAnalyticScanStep) {
  detail::check_disk_params(1.0, r, a, n);
  const double reach = k_max * r * std::max(1.0, std::sqrt(n / a));
  const int max_order = std::min(kMaxBesselOrder - 1, static_cast<int>(std::ceil(reach)) + 10);
  std::vector<double> all;
  for (int m = 0; m <= max_order; ++m) {
    const auto roots = detail::scan_roots([&](double k) { return det_disk_mode(m, k, r, a, n); }, k_min, k_max, step,
                                          count, kAnalyticRootTol);
    for (double k : roots) {
      all.push_back(k);
      if (m > 0) all.push_back(k);
    }
  }
  std::sort(all.begin(), all.end());
  if (static_cast<int>(all.size()) > count) all.resize(count);
  return all;
}

}  // namespace tehom
