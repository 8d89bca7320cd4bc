#pragma once

// Real-argument Bessel functions of integer order.
//
//   J_m : ascending series for x <= 1, Miller backward recurrence normalised
//         by J_0 + 2 sum J_2k = 1 for moderate x, Hankel asymptotics once
//         x >= max(30, m^2).
//   Y_m : Neumann series in J_k for x < 30, Hankel asymptotics above; Y_0 and
//         Y_1 are then carried upward by the (stable) three-term recurrence.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "tehom/error.hpp"

namespace tehom {

inline constexpr int kMaxBesselOrder = 60;

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kSeriesLimit = 1.0;
inline constexpr double kAsymptoticStart = 30.0;

inline double j_series(int m, double x) {
  const double half = 0.5 * x;
  const double q = -half * half;
  double term = 1.0;
  for (int k = 1; k <= m; ++k) term *= half / k;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + m));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Hankel's expansion: returns (P, Q) with
//   J_m = sqrt(2/(pi x)) (P cos chi - Q sin chi),
//   Y_m = sqrt(2/(pi x)) (P sin chi + Q cos chi),   chi = x - (m/2 + 1/4) pi.
inline void hankel_pq(int m, double x, double& p, double& q) {
  const double mu = 4.0 * m * m;
  const double z = 8.0 * x;
  p = 1.0;
  q = 0.0;
  double term = 1.0;
  double last = 1e300;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * z);
    if (std::abs(term) > last) break;  // asymptotic series started diverging
    last = std::abs(term);
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      p += ((k / 2) % 2 == 1 ? -1.0 : 1.0) * term;
    }
    if (last < 1e-17) break;
  }
}

inline double j_asymptotic(int m, double x) {
  double p = 0.0;
  double q = 0.0;
  hankel_pq(m, x, p, q);
  const double chi = x - (0.5 * m + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

inline double y_asymptotic(int m, double x) {
  double p = 0.0;
  double q = 0.0;
  hankel_pq(m, x, p, q);
  const double chi = x - (0.5 * m + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

inline bool use_asymptotic(int m, double x) {
  return x >= kAsymptoticStart && x >= static_cast<double>(m) * m;
}

// Miller's algorithm; fills J_0 .. J_maxOrder. Requires x > 0.
inline std::vector<double> j_miller(int max_order, double x) {
  const double top = std::max(static_cast<double>(max_order), x);
  int start = static_cast<int>(top + 30.0 + std::sqrt(40.0 * top));
  start += start % 2;
  std::vector<double> f(static_cast<std::size_t>(start) + 2, 0.0);
  f[start + 1] = 0.0;
  f[start] = 1e-300;
  const double two_over_x = 2.0 / x;
  for (int k = start; k >= 1; --k) {
    f[k - 1] = k * two_over_x * f[k] - f[k + 1];
    if (std::abs(f[k - 1]) > 1e250) {
      for (int j = k - 1; j <= start; ++j) f[j] *= 1e-250;
    }
  }
  double norm = f[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * f[k];
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
  for (int k = 0; k <= max_order; ++k) out[k] = f[k] / norm;
  return out;
}

inline std::vector<double> y_neumann01(double x) {
  // J_k up to a comfortable order so the Neumann tails are converged.
  const int order = static_cast<int>(x + 40.0 + std::sqrt(40.0 * x));
  const std::vector<double> j = x <= kSeriesLimit
                                    ? [&] {
                                        std::vector<double> v(order + 1);
                                        for (int k = 0; k <= order; ++k) v[k] = j_series(k, x);
                                        return v;
                                      }()
                                    : j_miller(order, x);
  const double lg = std::log(0.5 * x);
  double s0 = 0.0;
  for (int k = 1; 2 * k <= order; ++k) s0 += ((k % 2 == 0) ? 1.0 : -1.0) * j[2 * k] / k;
  const double y0 = (2.0 / std::numbers::pi) * ((lg + kEulerGamma) * j[0] - 2.0 * s0);
  double s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= order; ++k) {
    s1 += ((k % 2 == 0) ? 1.0 : -1.0) * (1.0 + 2.0 * k) * j[2 * k + 1] /
          (static_cast<double>(k) * (k + 1));
  }
  const double psi2 = 1.0 - kEulerGamma;
  const double y1 = (2.0 / std::numbers::pi) * (-j[0] / x + (lg - psi2) * j[1] - s1);
  return {y0, y1};
}

inline void check_order(int order) {
  require(order >= 0 && order <= kMaxBesselOrder, ErrorKind::UnsupportedOrder,
          "Bessel order " + std::to_string(order) + " outside [0, " +
              std::to_string(kMaxBesselOrder) + "]");
}

}  // namespace detail

/// J_0 .. J_maxOrder at x >= 0 in one sweep. Not subject to the single-order
/// ceiling, which exists for the scalar entry points only.
inline std::vector<double> bessel_j_all(int max_order, double x) {
  require(max_order >= 0, ErrorKind::InvalidParameter, "negative Bessel order");
  require(x >= 0.0 && std::isfinite(x), ErrorKind::DomainError, "bessel_j needs x >= 0");
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (x <= detail::kSeriesLimit) {
    for (int k = 0; k <= max_order; ++k) out[k] = detail::j_series(k, x);
    return out;
  }
  return detail::j_miller(max_order, x);
}

inline double bessel_j(int order, double x) {
  detail::check_order(order);
  require(x >= 0.0 && std::isfinite(x), ErrorKind::DomainError, "bessel_j needs x >= 0");
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  if (x <= detail::kSeriesLimit) return detail::j_series(order, x);
  if (detail::use_asymptotic(order, x)) return detail::j_asymptotic(order, x);
  return detail::j_miller(order, x)[order];
}

/// Y_0 .. Y_maxOrder at x > 0.
inline std::vector<double> bessel_y_all(int max_order, double x) {
  require(max_order >= 0, ErrorKind::InvalidParameter, "negative Bessel order");
  require(x > 0.0 && std::isfinite(x), ErrorKind::DomainError, "bessel_y needs x > 0");
  std::vector<double> out(static_cast<std::size_t>(std::max(max_order, 1)) + 1);
  if (x >= detail::kAsymptoticStart) {
    out[0] = detail::y_asymptotic(0, x);
    out[1] = detail::y_asymptotic(1, x);
  } else {
    const auto y01 = detail::y_neumann01(x);
    out[0] = y01[0];
    out[1] = y01[1];
  }
  for (int k = 1; k < max_order; ++k) out[k + 1] = (2.0 * k / x) * out[k] - out[k - 1];
  out.resize(static_cast<std::size_t>(max_order) + 1);
  return out;
}

inline double bessel_y(int order, double x) {
  detail::check_order(order);
  require(x > 0.0 && std::isfinite(x), ErrorKind::DomainError, "bessel_y needs x > 0");
  return bessel_y_all(order, x)[order];
}

/// J_m'(x) = (J_{m-1} - J_{m+1}) / 2, with J_0' = -J_1.
inline double bessel_j_prime(int order, double x) {
  detail::check_order(order);
  if (order == 0) return -bessel_j(1, x);
  if (order == kMaxBesselOrder) {
    // one past the ceiling is still well inside what Miller delivers
    const auto j = bessel_j_all(order + 1, x);
    return 0.5 * (j[order - 1] - j[order + 1]);
  }
  return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x));
}

inline double bessel_y_prime(int order, double x) {
  detail::check_order(order);
  const auto y = bessel_y_all(order + 1, x);
  if (order == 0) return -y[1];
  return 0.5 * (y[order - 1] - y[order + 1]);
}

inline std::complex<double> hankel1(int order, double x) {
  return {bessel_j(order, x), bessel_y(order, x)};
}

inline std::complex<double> hankel1_prime(int order, double x) {
  return {bessel_j_prime(order, x), bessel_y_prime(order, x)};
}

}  // namespace tehom
