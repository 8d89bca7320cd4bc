#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tehom/scatter.hpp"
#include "tehom/te/analytic.hpp"

namespace {

using namespace tehom;
constexpr double kPi = std::numbers::pi;

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

TEST(FarField, NoContrastVanishes) {
  const FarFieldMatrix f = farfield_disk(2.0, 1.0, 1.0, 1.0, 32);
  EXPECT_EQ(max_abs(f.entries), 0.0);
}

TEST(FarField, DirectionCountValidated) {
  EXPECT_THROW(farfield_disk(2.0, 1.0, 0.5, 2.0, 48), Error);
  EXPECT_THROW(farfield_disk(2.0, 1.0, 0.5, 2.0, 8), Error);
  EXPECT_THROW(farfield_disk(2.0, 1.0, 0.5, 2.0, 512), Error);
  EXPECT_THROW(farfield_disk(2.0, 1.0, -0.5, 2.0, 32), Error);
}

TEST(FarField, ReciprocityAndRotation) {
  for (const auto& [a, n] : {std::pair{0.5, 2.5}, std::pair{1.0, 3.0}, std::pair{2.0, 0.7}}) {
    const FarFieldMatrix f = farfield_disk(3.3, 1.0, a, n, 64);
    const int nd = f.size();
    const double scale = max_abs(f.entries);
    ASSERT_GT(scale, 0.0);
    double recip = 0.0, rot = 0.0;
    for (int i = 0; i < nd; ++i) {
      for (int j = 0; j < nd; ++j) {
        // theta + pi and phi + pi are half a turn further on the grid
        recip = std::max(recip, std::abs(f.entries(i, j) - f.entries((j + nd / 2) % nd, (i + nd / 2) % nd)));
        for (int s : {1, 5, 17}) rot = std::max(rot, std::abs(f.entries(i, j) - f.entries((i + s) % nd, (j + s) % nd)));
      }
    }
    EXPECT_LE(recip, 1e-10 * scale);
    EXPECT_LE(rot, 1e-10 * scale);
  }
}

TEST(FarField, TruncationDoubling) {
  for (double k : {0.7, 2.5, 6.0}) {
    const int m = farfield_order(k, 1.0);
    const FarFieldMatrix f1 = farfield_disk(k, 1.0, 0.5, 2.5, 32, m);
    const FarFieldMatrix f2 = farfield_disk(k, 1.0, 0.5, 2.5, 32, 2 * m);
    EXPECT_LE(max_abs(f1.entries - f2.entries), 1e-10 * max_abs(f1.entries)) << "k = " << k;
  }
}

TEST(FarField, CoefficientsMatchStdBessel) {
  // same transmission match written with the standard library's Bessel functions
  const double k = 2.7, r = 1.3, a = 0.6, n = 2.2;
  const double ki = k * std::sqrt(n / a);
  const auto beta = disk_coefficients(k, r, a, n, 12);
  auto jp = [](int m, double x) {
    return m == 0 ? -std::cyl_bessel_j(1, x) : 0.5 * (std::cyl_bessel_j(m - 1, x) - std::cyl_bessel_j(m + 1, x));
  };
  auto yp = [](int m, double x) {
    return m == 0 ? -std::cyl_neumann(1, x) : 0.5 * (std::cyl_neumann(m - 1, x) - std::cyl_neumann(m + 1, x));
  };
  for (int m = 0; m <= 12; ++m) {
    const double x = k * r, xi = ki * r;
    const std::complex<double> h(std::cyl_bessel_j(m, x), std::cyl_neumann(m, x));
    const std::complex<double> hp(jp(m, x), yp(m, x));
    const double jx = std::cyl_bessel_j(m, x), jxi = std::cyl_bessel_j(m, xi);
    const std::complex<double> want = (a * ki * jx * jp(m, xi) - k * jp(m, x) * jxi) / (k * hp * jxi - a * ki * h * jp(m, xi));
    EXPECT_NEAR(std::abs(beta[m] - want), 0.0, 1e-12 * std::max(1.0, std::abs(want))) << "m = " << m;
  }
}

TEST(FarField, LosslessModesConserveEnergy) {
  // real a, n: the outgoing amplitude of every mode has modulus one, |1 + 2 beta_m| = 1
  for (const auto& [a, n] : {std::pair{0.5, 2.5}, std::pair{1.0, 3.0}, std::pair{3.0, 0.4}}) {
    const auto beta = disk_coefficients(4.1, 1.0, a, n, 30);
    for (std::size_t m = 0; m < beta.size(); ++m) EXPECT_NEAR(std::abs(1.0 + 2.0 * beta[m]), 1.0, 1e-12);
  }
}

TEST(FarField, NoiseIsSeededAndBounded) {
  const FarFieldMatrix clean = farfield_disk(2.0, 1.0, 0.5, 2.5, 32);
  FarFieldMatrix a = clean, b = clean, c = clean;
  add_noise(a, 0.05, 7);
  add_noise(b, 0.05, 7);
  add_noise(c, 0.05, 8);
  EXPECT_EQ(max_abs(a.entries - b.entries), 0.0);
  EXPECT_GT(max_abs(a.entries - c.entries), 0.0);
  const CMatrix rel = (a.entries - clean.entries).cwiseQuotient(clean.entries);
  EXPECT_LE(rel.cwiseAbs().maxCoeff(), 0.05 + 1e-12);
  EXPECT_GT(rel.cwiseAbs().maxCoeff(), 0.03);
  EXPECT_EQ(a.delta, 0.05);
}

TEST(Herglotz, ZeroDensity) {
  const auto phis = uniform_angles(32);
  EXPECT_EQ(herglotz_norm(CVector::Zero(32), 2.0, Domain::disk(1.0), phis), 0.0);
}

TEST(Herglotz, LowFrequencyDelta) {
  const auto phis = uniform_angles(32);
  CVector g = CVector::Zero(32);
  g[3] = 1.0;
  for (const Domain& d : {Domain::disk(1.5), Domain::square(-1.0, 2.0)}) {
    EXPECT_NEAR(herglotz_norm(g, 1e-9, d, phis), std::sqrt(d.area()) * 2.0 * kPi / 32.0, 1e-9);
  }
}

TEST(Herglotz, ConstantDensityGivesBesselJ0) {
  // g = 1 gives v_g = 2 pi J_0(k|x|), and int_0^R J_0(kr)^2 r dr = R^2 (J_0^2 + J_1^2) / 2
  const double k = 3.1, r = 1.2;
  const auto phis = uniform_angles(64);
  const double x = k * r;
  const double exact = 2.0 * kPi * std::sqrt(2.0 * kPi * 0.5 * r * r *
                                             (std::pow(std::cyl_bessel_j(0, x), 2) + std::pow(std::cyl_bessel_j(1, x), 2)));
  EXPECT_NEAR(herglotz_norm(CVector::Ones(64), k, Domain::disk(r), phis), exact, 1e-10 * exact);
}

TEST(Herglotz, RotationBySlot) {
  const auto phis = uniform_angles(64);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  CVector g(64);
  for (auto& v : g) v = {nd(rng), nd(rng)};
  CVector shifted(64);
  for (int j = 0; j < 64; ++j) shifted[(j + 1) % 64] = g[j];
  const double a = herglotz_norm(g, 4.0, Domain::disk(1.0), phis);
  const double b = herglotz_norm(shifted, 4.0, Domain::disk(1.0), phis);
  EXPECT_NEAR(a, b, 1e-8 * a);
}

TEST(Tikhonov, NoiseFreeConvention) {
  const FarFieldMatrix f = farfield_disk(2.0, 1.0, 0.5, 2.5, 32);
  const TikhonovResult t = tikhonov_morozov(f, Vec2(0.1, -0.2), 0.0);
  EXPECT_EQ(t.alpha, 1e-10);
  EXPECT_FALSE(t.bracket_failed);
}

TEST(Tikhonov, IdentityClosedForm) {
  const DenseSVD svd = svd_dense(CMatrix::Identity(8, 8));
  CVector e1 = CVector::Zero(8);
  e1[0] = 1.0;
  for (double alpha : {1e-6, 0.1, 2.0}) {
    const CVector g = tikhonov_fixed(svd, e1, alpha);
    EXPECT_NEAR(g.norm(), 1.0 / (1.0 + alpha), 1e-14);
    EXPECT_NEAR(std::abs(g[0]), 1.0 / (1.0 + alpha), 1e-14);
  }
}

TEST(Tikhonov, DiscrepancyMonotoneInAlpha) {
  const FarFieldMatrix f = farfield_disk(2.4, 1.0, 0.5, 2.5, 32);
  const CMatrix op = f.op();
  const DenseSVD svd = svd_dense(op);
  const CVector rhs = point_source_farfield(f.k, f.thetas, Vec2(0.3, 0.1));
  double prev = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double alpha = std::pow(10.0, -12.0 + 0.7 * i);
    const double res = (op * tikhonov_fixed(svd, rhs, alpha) - rhs).norm();
    EXPECT_GE(res, prev * (1.0 - 1e-12));
    prev = res;
  }
}

TEST(Tikhonov, NormalEquations) {
  FarFieldMatrix f = farfield_disk(2.9, 1.0, 0.5, 2.5, 64);
  add_noise(f, 0.01, 11);
  const CMatrix op = f.op();
  const CVector rhs = point_source_farfield(f.k, f.thetas, Vec2(-0.2, 0.4));
  const TikhonovResult t = tikhonov_morozov(svd_dense(op), rhs, 0.01);
  EXPECT_FALSE(t.bracket_failed);
  const CVector lhs = op.adjoint() * (op * t.g) + t.alpha * t.g;
  const CVector want = op.adjoint() * rhs;
  EXPECT_LE((lhs - want).norm(), 1e-9 * want.norm());
  // alpha solves the discrepancy equation
  const double fnorm = svd_dense(op).singular_values[0];
  EXPECT_NEAR((op * t.g - rhs).norm(), 0.01 * fnorm * t.g.norm(), 1e-8 * (op * t.g - rhs).norm());
  EXPECT_NEAR(t.residual, (op * t.g - rhs).norm(), 1e-10 * t.residual);
}

TEST(Detect, SamplingPointsInsideDisk) {
  const auto z = sampling_points(2.0, 25);
  ASSERT_EQ(z.size(), 25u);
  for (const Vec2& p : z) EXPECT_LT(p.norm(), 0.8 * 2.0);
  EXPECT_EQ(sampling_points(2.0, 25)[7], z[7]);
}

TEST(Detect, SpikeRule) {
  const std::vector<double> c{1, 1, 1, 6, 1, 1, 4, 1, 1, 1, 7};
  const auto s = find_spikes(c, 5.0);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], 3u);
}

TEST(Detect, NoScatterer) {
  const DetectionCurve c = detect_te(2.0, 2.5, 1.0, 1.0, 1.0, 0.01);
  EXPECT_TRUE(c.degenerate);
  EXPECT_TRUE(c.detected.empty());
}

// every detected k is within 0.05 of a disk eigenvalue of some angular mode,
// and the first one of the window is found
void expect_spikes_on_roots(const DetectionCurve& c, double a, double n) {
  const auto roots = roots_all_modes(1.0, a, n, c.ks.front(), c.ks.back(), 40);
  ASSERT_FALSE(roots.empty());
  ASSERT_FALSE(c.detected.empty());
  EXPECT_NEAR(c.detected.front(), roots.front(), 0.05);
  for (double k : c.detected) {
    double gap = 1e300;
    for (double r : roots) gap = std::min(gap, std::abs(k - r));
    EXPECT_LE(gap, 0.05) << "spike at " << k;
  }
  for (double v : c.gnorm) EXPECT_TRUE(std::isfinite(v) && v > 0.0);
}

TEST(Detect, SpikesOnDiskEigenvalues) {
  const DetectionCurve c = detect_te(2.3, 3.3, 1.0, 0.5, 2.5, 0.01);
  expect_spikes_on_roots(c, 0.5, 2.5);
  EXPECT_NEAR(c.detected.front(), roots_disk(1.0, 0.5, 2.5, 2.0, 3.0, 1).first(), 0.05);
}

TEST(Detect, IndexContrastOnly) {
  const DetectionCurve c = detect_te(4.0, 5.5, 1.0, 1.0, 2.5, 0.01);
  expect_spikes_on_roots(c, 1.0, 2.5);
  EXPECT_NEAR(c.detected.front(), roots_disk(1.0, 1.0, 2.5, 4.0, 5.5, 1).first(), 0.05);
}

TEST(Detect, NoiseRobustness) {
  std::vector<double> firsts;
  for (double delta : {0.005, 0.01, 0.02}) {
    const DetectionCurve c = detect_te(2.3, 3.3, 1.0, 0.5, 2.5, delta);
    ASSERT_FALSE(c.detected.empty()) << "delta = " << delta;
    firsts.push_back(c.detected.front());
  }
  EXPECT_NEAR(firsts[0], firsts[1], 0.05);
  EXPECT_NEAR(firsts[2], firsts[1], 0.05);
}

TEST(Detect, SerialAndThreadedAgree) {
  DetectOptions serial, threaded;
  serial.threads = 1;
  threaded.threads = 3;
  serial.step = threaded.step = 0.02;
  const DetectionCurve a = detect_te(2.4, 2.7, 1.0, 0.5, 2.5, 0.01, serial);
  const DetectionCurve b = detect_te(2.4, 2.7, 1.0, 0.5, 2.5, 0.01, threaded);
  EXPECT_EQ(a.gnorm, b.gnorm);
}

}  // namespace
