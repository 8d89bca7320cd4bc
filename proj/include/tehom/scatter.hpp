#pragma once

// Far-field data for a penetrable disk with constant (a, n), the far-field
// equation F g = Phi_inf(., z) solved by Tikhonov regularization with the
// Morozov discrepancy principle, and transmission eigenvalue detection as
// spikes of the Herglotz norm of g over a k-grid.
//
// Conventions: u^s(x) ~ e^{ikr} / sqrt(r) u_inf(theta) as r -> inf, so the
// fundamental solution i/4 H_0(k|x - z|) has far field
// gamma e^{-ik xhat.z} with gamma = e^{i pi/4} / sqrt(8 pi k). The far-field
// operator is (F g)(theta) = int u_inf(theta, phi) g(phi) dphi, discretized by
// the trapezoid rule on N equispaced directions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "tehom/coeffs.hpp"
#include "tehom/linalg/svd.hpp"
#include "tehom/specfun.hpp"
#include "tehom/te/types.hpp"

namespace tehom {

using cdouble = std::complex<double>;

struct FarFieldMatrix {
  double k = 0.0;
  std::vector<double> thetas;  // observation directions
  std::vector<double> phis;  // incidence directions
  CMatrix entries;  // u_inf(theta_i, phi_j)
  double delta = 0.0;  // relative noise already applied

  int size() const { return static_cast<int>(thetas.size()); }
  /// The trapezoid-weighted operator acting on densities g(phi_j).
  CMatrix op() const { return entries * (2.0 * std::numbers::pi / static_cast<double>(size())); }
};

inline std::vector<double> uniform_angles(int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = 2.0 * std::numbers::pi * i / n;
  return t;
}

inline bool valid_direction_count(int n) { return n >= 16 && n <= 256 && (n & (n - 1)) == 0; }

/// Series truncation order used by farfield_disk.
inline int farfield_order(double k, double r) { return static_cast<int>(std::ceil(k * r)) + 20; }

/// Scaled far-field coefficients beta_m, m = 0..order, of a disk; u_inf is
/// sqrt(2 / (pi k)) e^{-i pi/4} sum_{m in Z} beta_|m| e^{im(theta - phi)}.
inline std::vector<cdouble> disk_coefficients(double k, double r, double a, double n, int order) {
  require(k > 0.0 && r > 0.0 && a > 0.0 && n > 0.0, ErrorKind::InvalidParameter,
          "far field needs k, R, a, n > 0");
  auto attempt = [&](double kk, std::vector<cdouble>& beta) {
    const double ki = kk * std::sqrt(n / a);
    const double x = kk * r, xi = ki * r;
    const auto j = bessel_j_all(order + 1, x);
    const auto y = bessel_y_all(order + 1, x);
    const auto ji = bessel_j_all(order + 1, xi);
    auto prime = [](const std::vector<double>& f, int m) { return m == 0 ? -f[1] : 0.5 * (f[m - 1] - f[m + 1]); };
    beta.assign(order + 1, 0.0);
    for (int m = 0; m <= order; ++m) {
      const cdouble h(j[m], y[m]);
      const cdouble hp(prime(j, m), prime(y, m));
      const double jp = prime(j, m), jip = prime(ji, m);
      // b H - c J(k_i R) = -i^m J,  b k H' - c a k_i J'(k_i R) = -i^m k J'
      const cdouble det = kk * hp * ji[m] - a * ki * h * jip;
      const double num = a * ki * j[m] * jip - kk * jp * ji[m];
      const double scale = std::abs(kk * hp * ji[m]) + std::abs(a * ki * h * jip);
      if (!(std::abs(det) > 1e-15 * scale)) return false;
      beta[m] = num / det;
    }
    return true;
  };
  std::vector<cdouble> beta;
  if (attempt(k, beta)) return beta;
  require(attempt(k + 1e-12, beta), ErrorKind::NumericalResonance,
          "transmission match singular at k = " + std::to_string(k));
  return beta;
}

/// u_inf on N x N equispaced observation/incidence angles.
inline FarFieldMatrix farfield_disk(double k, double r, double a, double n, int directions, int order = 0) {
  require(valid_direction_count(directions), ErrorKind::InvalidParameter,
          "direction count must be a power of two in [16, 256]");
  const int m_max = order > 0 ? order : farfield_order(k, r);
  const auto beta = disk_coefficients(k, r, a, n, m_max);
  const cdouble pref = std::sqrt(2.0 / (std::numbers::pi * k)) * std::polar(1.0, -std::numbers::pi / 4.0);

  FarFieldMatrix f;
  f.k = k;
  f.thetas = uniform_angles(directions);
  f.phis = f.thetas;
  // the disk is rotation invariant: u_inf depends on theta - phi only
  std::vector<cdouble> row(directions);
  for (int d = 0; d < directions; ++d) {
    const double t = 2.0 * std::numbers::pi * d / directions;
    cdouble s = beta[0];
    for (int m = 1; m <= m_max; ++m) s += 2.0 * beta[m] * std::cos(m * t);
    row[d] = pref * s;
  }
  f.entries.resize(directions, directions);
  for (int i = 0; i < directions; ++i)
    for (int j = 0; j < directions; ++j) f.entries(i, j) = row[(i - j + directions) % directions];
  return f;
}

/// Multiplies each entry by (1 + delta zeta) with zeta uniform on the unit
/// disk; the stream is fixed by `seed`.
inline void add_noise(FarFieldMatrix& f, double delta, std::uint64_t seed) {
  require(delta >= 0.0, ErrorKind::InvalidParameter, "noise level must be nonnegative");
  f.delta = delta;
  if (delta == 0.0) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Eigen::Index j = 0; j < f.entries.cols(); ++j) {
    for (Eigen::Index i = 0; i < f.entries.rows(); ++i) {
      const double rad = std::sqrt(u(rng));
      const double ang = 2.0 * std::numbers::pi * u(rng);
      f.entries(i, j) *= 1.0 + delta * std::polar(rad, ang);
    }
  }
}

/// Far field of the point source at z on the observation angles.
inline CVector point_source_farfield(double k, const std::vector<double>& thetas, const Vec2& z) {
  const cdouble gamma = std::polar(1.0, std::numbers::pi / 4.0) / std::sqrt(8.0 * std::numbers::pi * k);
  CVector phi(static_cast<Eigen::Index>(thetas.size()));
  for (std::size_t i = 0; i < thetas.size(); ++i)
    phi[i] = gamma * std::polar(1.0, -k * (std::cos(thetas[i]) * z.x() + std::sin(thetas[i]) * z.y()));
  return phi;
}

struct TikhonovResult {
  CVector g;
  double alpha = 0.0;
  double residual = 0.0;  // |F g - rhs|
  bool bracket_failed = false;
};

inline constexpr double kNoiseFreeAlpha = 1e-10;

namespace detail {

struct Filtered {
  double residual;
  double gnorm;
};

inline Filtered filtered(const DenseSVD& svd, const CVector& coef, double perp2, double alpha) {
  double r2 = perp2, g2 = 0.0;
  for (Eigen::Index i = 0; i < coef.size(); ++i) {
    const double s = svd.singular_values[i];
    const double c2 = std::norm(coef[i]);
    r2 += std::pow(alpha / (s * s + alpha), 2) * c2;
    g2 += std::pow(s / (s * s + alpha), 2) * c2;
  }
  return {std::sqrt(r2), std::sqrt(g2)};
}

}  // namespace detail

/// Tikhonov solution for a given alpha.
inline CVector tikhonov_fixed(const DenseSVD& svd, const CVector& rhs, double alpha) {
  const CVector coef = svd.u.adjoint() * rhs;
  CVector filt(coef.size());
  for (Eigen::Index i = 0; i < coef.size(); ++i) {
    const double s = svd.singular_values[i];
    filt[i] = s > 0.0 ? coef[i] * (s / (s * s + alpha)) : cdouble(0.0);
  }
  return svd.v * filt;
}

/// g_alpha = sum sigma / (sigma^2 + alpha) (u_i^* rhs) v_i with alpha from
/// |F g - rhs| = delta |F| |g|, bisected in log10 alpha over [-14, 2].
/// Without noise alpha is fixed at 1e-10.
inline TikhonovResult tikhonov_morozov(const DenseSVD& svd, const CVector& rhs, double delta) {
  require(delta >= 0.0, ErrorKind::InvalidParameter, "noise level must be nonnegative");
  const CVector coef = svd.u.adjoint() * rhs;
  const double perp2 = std::max(0.0, rhs.squaredNorm() - coef.squaredNorm());
  const double fnorm = svd.singular_values.size() > 0 ? svd.singular_values[0] : 0.0;
  auto morozov = [&](double log_alpha) {
    const auto f = detail::filtered(svd, coef, perp2, std::pow(10.0, log_alpha));
    return f.residual - delta * fnorm * f.gnorm;
  };

  TikhonovResult out;
  if (delta == 0.0) {
    out.alpha = kNoiseFreeAlpha;
  } else {
    double lo = -14.0, hi = 2.0;
    if (morozov(lo) > 0.0) {
      out.alpha = std::pow(10.0, lo);
      out.bracket_failed = true;
    } else if (morozov(hi) < 0.0) {
      out.alpha = std::pow(10.0, hi);
      out.bracket_failed = true;
    } else {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (morozov(mid) > 0.0 ? hi : lo) = mid;
      }
      out.alpha = std::pow(10.0, 0.5 * (lo + hi));
    }
  }
  out.g = tikhonov_fixed(svd, rhs, out.alpha);
  out.residual = detail::filtered(svd, coef, perp2, out.alpha).residual;
  return out;
}

inline TikhonovResult tikhonov_morozov(const FarFieldMatrix& f, const Vec2& z, double delta) {
  return tikhonov_morozov(svd_dense(f.op()), point_source_farfield(f.k, f.thetas, z), delta);
}

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

}  // namespace detail

/// Quadrature nodes over D and plane waves on them, reused for every g at
/// one wavenumber.
class HerglotzQuadrature {
 public:
  HerglotzQuadrature(double k, const Domain& domain, const std::vector<double>& phis) {
    const int nd = static_cast<int>(phis.size());
    std::vector<Vec2> pts;
    if (domain.is_disk()) {
      const double r = domain.radius;
      const int nr = static_cast<int>(std::ceil(k * r)) + 16;
      const int nt = 2 * static_cast<int>(std::ceil(2.0 * k * r)) + 64;
      const auto [gx, gw] = detail::gauss_legendre(nr);
      for (int i = 0; i < nr; ++i) {
        const double rho = 0.5 * r * (gx[i] + 1.0);
        for (int j = 0; j < nt; ++j) {
          const double t = 2.0 * std::numbers::pi * j / nt;
          pts.emplace_back(rho * std::cos(t), rho * std::sin(t));
          weights_.push_back(0.5 * r * gw[i] * rho * 2.0 * std::numbers::pi / nt);
        }
      }
    } else {
      const double side = domain.hi - domain.lo;
      const int np = static_cast<int>(std::ceil(k * side)) + 16;
      const auto [gx, gw] = detail::gauss_legendre(np);
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) {
          pts.emplace_back(domain.lo + 0.5 * side * (gx[i] + 1.0), domain.lo + 0.5 * side * (gx[j] + 1.0));
          weights_.push_back(0.25 * side * side * gw[i] * gw[j]);
        }
    }
    waves_.resize(static_cast<Eigen::Index>(pts.size()), nd);
    const double dphi = 2.0 * std::numbers::pi / nd;
    for (int j = 0; j < nd; ++j) {
      const double c = std::cos(phis[j]), s = std::sin(phis[j]);
      for (std::size_t q = 0; q < pts.size(); ++q)
        waves_(static_cast<Eigen::Index>(q), j) = dphi * std::polar(1.0, k * (pts[q].x() * c + pts[q].y() * s));
    }
  }

  double norm(const CVector& g) const {
    const CVector v = waves_ * g;
    double s = 0.0;
    for (Eigen::Index q = 0; q < v.size(); ++q) s += weights_[q] * std::norm(v[q]);
    return std::sqrt(s);
  }

 private:
  CMatrix waves_;  // trapezoid weight times e^{ik x_q . d(phi_j)}
  std::vector<double> weights_;
};

/// L2(D) norm of v_g(x) = int g(phi) e^{ik x.d(phi)} dphi, with g given on
/// `phis` (equispaced).
inline double herglotz_norm(const CVector& g, double k, const Domain& domain, const std::vector<double>& phis) {
  require(g.size() == static_cast<Eigen::Index>(phis.size()), ErrorKind::InvalidParameter,
          "density and direction grid differ in length");
  return HerglotzQuadrature(k, domain, phis).norm(g);
}

struct DetectionCurve {
  std::vector<double> ks;
  std::vector<double> gnorm;  // median over z of |v_g|
  std::vector<Vec2> zs;
  std::vector<double> detected;
  std::vector<char> is_spike;
  bool degenerate = false;  // no scatterer: F = 0
  std::vector<std::string> warnings;
};

struct DetectOptions {
  double step = 0.005;
  int directions = 64;
  int num_z = 25;
  double spike_factor = 5.0;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = TEHOM_THREADS or 1
};

/// Sunflower points inside 0.8 R: deterministic and evenly spread.
inline std::vector<Vec2> sampling_points(double r, int count) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec2> z;
  for (int j = 0; j < count; ++j) {
    const double rho = 0.8 * r * std::sqrt((j + 0.5) / count);
    z.emplace_back(rho * std::cos(j * golden), rho * std::sin(j * golden));
  }
  return z;
}

/// Seed of the noise stream at grid index i, independent of thread layout.
inline std::uint64_t noise_seed(std::uint64_t seed, std::size_t i) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Indices i with c[i] a strict local maximum of (c[i-1], c[i], c[i+1])
/// exceeding factor times the median of c.
inline std::vector<std::size_t> find_spikes(const std::vector<double>& c, double factor) {
  std::vector<std::size_t> out;
  if (c.size() < 3) return out;
  std::vector<double> sorted = c;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (std::size_t i = 1; i + 1 < c.size(); ++i)
    if (c[i] > c[i - 1] && c[i] > c[i + 1] && c[i] > factor * median) out.push_back(i);
  return out;
}

inline DetectionCurve detect_te(double k_min, double k_max, double r, double a, double n, double delta,
                                const DetectOptions& opts = {}) {
  require(k_min > 0.0 && k_max > k_min, ErrorKind::InvalidParameter, "k-window must satisfy 0 < k_min < k_max");
  require(r > 0.0 && a > 0.0 && n > 0.0, ErrorKind::InvalidParameter, "R, a, n must be positive");
  require(opts.step > 0.0 && opts.num_z >= 1 && opts.spike_factor > 0.0, ErrorKind::InvalidParameter,
          "detection needs a positive step, spike factor and sampling count");
  require(valid_direction_count(opts.directions), ErrorKind::InvalidParameter,
          "direction count must be a power of two in [16, 256]");
  require(delta >= 0.0, ErrorKind::InvalidParameter, "noise level must be nonnegative");

  DetectionCurve out;
  const int steps = static_cast<int>(std::floor((k_max - k_min) / opts.step + 1e-9));
  for (int i = 0; i <= steps; ++i) out.ks.push_back(k_min + i * opts.step);
  out.zs = sampling_points(r, opts.num_z);
  out.gnorm.assign(out.ks.size(), 0.0);
  out.is_spike.assign(out.ks.size(), 0);
  if (a == 1.0 && n == 1.0) {
    out.degenerate = true;
    out.warnings.push_back("no contrast: the far field vanishes");
    return out;
  }

  const Domain disk = Domain::disk(r);
  TEOptions topt;
  topt.threads = opts.threads;
  std::vector<int> failed(out.ks.size(), 0);
  parallel_for(static_cast<int>(out.ks.size()), thread_count(topt), [&](int i) {
    const double k = out.ks[i];
    FarFieldMatrix f = farfield_disk(k, r, a, n, opts.directions);
    add_noise(f, delta, noise_seed(opts.seed, i));
    const DenseSVD svd = svd_dense(f.op());
    const HerglotzQuadrature quad(k, disk, f.phis);
    std::vector<double> norms;
    for (const Vec2& z : out.zs) {
      const TikhonovResult t = tikhonov_morozov(svd, point_source_farfield(k, f.thetas, z), delta);
      if (t.bracket_failed) ++failed[i];
      norms.push_back(quad.norm(t.g));
    }
    std::nth_element(norms.begin(), norms.begin() + norms.size() / 2, norms.end());
    out.gnorm[i] = norms[norms.size() / 2];
  });
  const int total_failed = std::accumulate(failed.begin(), failed.end(), 0);
  if (total_failed > 0)
    out.warnings.push_back("Morozov bracket failed for " + std::to_string(total_failed) + " (k, z) pairs");

  for (std::size_t i : find_spikes(out.gnorm, opts.spike_factor)) {
    out.is_spike[i] = 1;
    out.detected.push_back(out.ks[i]);
  }
  return out;
}

}  // namespace tehom
