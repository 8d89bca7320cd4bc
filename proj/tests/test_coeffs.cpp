#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

#include "tehom/coeffs.hpp"

namespace {

using namespace tehom;
namespace P = tehom::presets;

std::vector<CoefficientField> all_presets() {
  return {
      combine(P::identity_tensor(), P::scalar_constant(3.0)),
      combine(P::identity_tensor(), P::scalar_sincos()),
      combine(P::tensor_sincos(), P::scalar_sincos()),
      combine(P::tensor_rotated(), P::scalar_layered()),
      combine(P::tensor_checkerboard(1.0, 4.0), P::scalar_checkerboard(2.0, 5.0)),
      combine(P::tensor_voids(0.5), P::scalar_voids(5.0)),
  };
}

TEST(Coeffs, ConstantField) {
  const auto f = combine(P::identity_tensor(), P::scalar_constant(3.0));
  const auto [a, n] = evaluate(f, Vec2(0.3, 0.7));
  EXPECT_TRUE(a.isApprox(Mat2::Identity()));
  EXPECT_EQ(n, 3.0);
  EXPECT_EQ(f.kind(), FieldKind::Constant);
}

TEST(Coeffs, SincosSubstitution) {
  const auto f = combine(P::identity_tensor(), P::scalar_sincos());
  EXPECT_NEAR(evaluate_n(f, Vec2(0.25, 0.0)), 4.0, 1e-15);
  const auto g = combine(P::tensor_sincos(), P::scalar_constant(1.0));
  const Mat2 a = evaluate_a(g, Vec2(0.0, 0.25));
  EXPECT_NEAR(a(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(a(1, 1), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(a(0, 1), 0.0);
}

TEST(Coeffs, Rescale) {
  const auto f = rescale(combine(P::identity_tensor(), P::scalar_sincos()), 0.5);
  EXPECT_NEAR(evaluate_n(f, Vec2(0.125, 0.0)), 4.0, 1e-15);
  const auto c = combine(P::identity_tensor(), P::scalar_constant(2.0));
  const auto c2 = rescale(c, 0.137);
  EXPECT_EQ(evaluate_n(c2, Vec2(0.4, 1.9)), 2.0);
  const auto b = c2.bounds();
  EXPECT_EQ(b.n_min, c.bounds().n_min);
  EXPECT_EQ(b.n_max, c.bounds().n_max);
  EXPECT_THROW(rescale(c, 0.0), Error);
  EXPECT_THROW(rescale(c, -0.5), Error);
}

TEST(Coeffs, RescaleByOneIsIdentity) {
  for (const auto& base : all_presets()) {
    const auto f = rescale(base, 1.0 / 3.0);
    const auto g = rescale(f, 1.0);
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const Vec2 x(-1.0 + 0.05 * i, -1.0 + 0.05 * j);
        EXPECT_EQ(evaluate_n(f, x), evaluate_n(g, x));
        EXPECT_EQ(evaluate_a(f, x), evaluate_a(g, x));
      }
    }
  }
}

TEST(Coeffs, PresetsRespectBounds) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const auto& f : all_presets()) {
    const auto b = f.bounds();
    for (int s = 0; s < 10000; ++s) {
      const Vec2 x(u(rng), u(rng));
      const auto [a, n] = evaluate(f, x);
      ASSERT_NEAR(a(0, 1), a(1, 0), 1e-15);
      Eigen::SelfAdjointEigenSolver<Mat2> es(a);
      ASSERT_GT(es.eigenvalues()(0), 0.0) << f.describe();
      ASSERT_GE(es.eigenvalues()(0), b.a_min - 1e-12) << f.describe();
      ASSERT_LE(es.eigenvalues()(1), b.a_max + 1e-12) << f.describe();
      ASSERT_GE(n, b.n_min) << f.describe();
      ASSERT_LE(n, b.n_max) << f.describe();
    }
  }
}

TEST(Coeffs, Periodicity) {
  for (const auto& f : all_presets()) {
    for (int i = 0; i <= 50; ++i) {
      const double t = i / 50.0;
      for (const Vec2& y : {Vec2(t, 0.0), Vec2(0.0, t), Vec2(t, 0.3)}) {
        EXPECT_NEAR(evaluate_n(f, y), evaluate_n(f, y + Vec2(1, 0)), 1e-12);
        EXPECT_NEAR(evaluate_n(f, y), evaluate_n(f, y + Vec2(0, 1)), 1e-12);
        EXPECT_TRUE(evaluate_a(f, y).isApprox(evaluate_a(f, y + Vec2(1, 0)), 1e-12));
        EXPECT_TRUE(evaluate_a(f, y).isApprox(evaluate_a(f, y + Vec2(0, 1)), 1e-12));
      }
    }
  }
}

TEST(Coeffs, AnalyticMeans) {
  EXPECT_NEAR(mean_n(P::scalar_sincos()), 3.0, 1e-10);
  EXPECT_NEAR(mean_n(P::scalar_layered()), 2.5, 1e-10);
  EXPECT_NEAR(mean_n(P::scalar_checkerboard(2.0, 5.0)), 3.5, 1e-10);
  EXPECT_NEAR(mean_n(P::scalar_voids(5.0)), 5.0 - std::numbers::pi / 4.0, 1e-6);
  EXPECT_NEAR(P::scalar_voids(5.0).mean, 5.0 - std::numbers::pi / 4.0, 1e-15);
}

TEST(Coeffs, DiscontinuityConvention) {
  // interface points take the outside value
  EXPECT_EQ(P::scalar_voids(5.0).eval(Vec2(0.75, 0.5)), 5.0);
  EXPECT_EQ(P::scalar_voids(5.0).eval(Vec2(0.5, 0.5)), 1.0);
  const auto cb = P::scalar_checkerboard(2.0, 5.0);
  EXPECT_EQ(cb.eval(Vec2(0.25, 0.25)), 2.0);
  EXPECT_EQ(cb.eval(Vec2(0.75, 0.25)), 5.0);
  EXPECT_EQ(cb.eval(Vec2(0.75, 0.75)), 2.0);
}

TEST(Coeffs, RotatedPresetIsSimilarity) {
  const Mat2 t = P::clockwise_rotation(1.0);
  EXPECT_NEAR(t(0, 1), std::sin(1.0), 1e-15);
  const auto base = P::tensor_sincos();
  const auto rot = P::tensor_rotated();
  const Vec2 y(0.2, 0.9);
  EXPECT_TRUE(rot.eval(y).isApprox(t * base.eval(y) * t.transpose(), 1e-14));
  EXPECT_NEAR(rot.eval(y).trace(), base.eval(y).trace(), 1e-14);
}

TEST(Coeffs, WrapEdgeCases) {
  const Vec2 w = wrap_to_cell(Vec2(-1e-18, 1.0));
  EXPECT_GE(w.x(), 0.0);
  EXPECT_LT(w.x(), 1.0);
  EXPECT_EQ(w.y(), 0.0);
}

}  // namespace
