#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tehom/recon.hpp"

namespace {

using namespace tehom;

double first_root(double r, double a, double n) { return roots_disk(r, a, n, 0.05, 40.0, 1).first(); }

TEST(Recon, IndexRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> un(1.3, 12.0), ur(0.5, 2.5);
  for (int i = 0; i < 20; ++i) {
    const double n = un(rng), r = ur(rng);
    const ReconstructionReport rep = invert_index(first_root(r, 1.0, n), r);
    EXPECT_NEAR(rep.value, n, 1e-8 * n) << "n = " << n << " R = " << r;
    EXPECT_TRUE(rep.converged);
    EXPECT_LE(rep.residual, 1e-8);
    EXPECT_GE(rep.value, rep.lo);
    EXPECT_LE(rep.value, rep.hi);
  }
}

TEST(Recon, TensorRoundTripBothBranches) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> below(0.1, 0.8), above(1.3, 6.0);
  for (int i = 0; i < 20; ++i) {
    const double a = below(rng);
    const ReconstructionReport rep = invert_tensor_scalar(first_root(1.0, a, 1.0), 1.0);
    EXPECT_NEAR(rep.value, a, 1e-8 * a) << "a = " << a;
    EXPECT_LE(rep.residual, 1e-8);
  }
  for (int i = 0; i < 20; ++i) {
    const double a = above(rng);
    const ReconstructionReport rep = invert_tensor_scalar(first_root(1.0, a, 1.0), 1.0, ContrastBranch::Above);
    EXPECT_NEAR(rep.value, a, 1e-8 * a) << "a = " << a;
  }
}

TEST(Recon, RatioRoundTripAndIndexAgreement) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(1.5, 9.0);
  for (int i = 0; i < 20; ++i) {
    const double alpha = ua(rng);
    const double k = first_root(1.0, 1.0, alpha);
    const ReconstructionReport ratio = invert_ratio(k, 1.0);
    EXPECT_NEAR(ratio.value, alpha, 1e-8 * alpha);
    EXPECT_NEAR(ratio.value, invert_index(k, 1.0).value, 1e-10);
  }
}

TEST(Recon, DroppedJumpDeterminantIsIndexDeterminant) {
  for (double k : {0.7, 2.1, 4.4})
    for (double alpha : {1.7, 5.0}) EXPECT_NEAR(detail::det_dropped_jump(k, 1.3, alpha), det_disk(k, 1.3, 1.0, alpha), 1e-14);
}

TEST(Recon, Errors) {
  EXPECT_THROW(invert_index(-1.0, 1.0), Error);
  EXPECT_THROW(invert_index(2.0, 0.0), Error);
  try {
    invert_index(0.01, 1.0);  // below k1(n = 100)
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
  }
  try {
    invert_disk(ReconMode::Index, 1.0, Domain::square(-3.0, 3.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}

TEST(Recon, MonotonicityGuard) {
  // a map with a bump must be refused instead of bisected
  auto bumpy = [](double p) { return 3.0 - p + 0.5 * std::sin(8.0 * p); };
  try {
    detail::bisect_parameter(bumpy, 2.0, 0.0, 2.0, 1e-12, ReconMode::Index);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
  }
  const auto rep = detail::bisect_parameter([](double p) { return 3.0 - p; }, 2.0, 0.0, 2.0, 1e-14, ReconMode::Index);
  EXPECT_NEAR(rep.value, 1.0, 1e-13);
}

TEST(Recon, FiniteElementForwardMapOnSquare) {
  TEOptions opts;
  opts.divisions = 12;
  opts.scan_steps = 10;
  const Domain sq = Domain::square(-3.0, 3.0);
  const auto field = combine(presets::identity_tensor(), presets::scalar_constant(3.5));
  const double k = solve_te_4th({sq, field, 0.5, 2.0, 1}, opts).first();
  const ReconstructionReport rep = invert_fem(ReconMode::Index, k, sq, opts);
  EXPECT_NEAR(rep.value, 3.5, 1e-5);
  EXPECT_LE(rep.residual, 1e-5);
  EXPECT_LT(rep.lo, 3.5);
  EXPECT_GT(rep.hi, 3.5);
}

TEST(Recon, SquareBetweenSurrogateDisks) {
  // k1 of the square lies between those of its circumscribed and inscribed disks
  TEOptions opts;
  opts.divisions = 48;
  opts.scan_steps = 10;
  const auto field = combine(presets::identity_tensor(), presets::scalar_constant(3.5));
  const double k = solve_te_4th({Domain::square(-3.0, 3.0), field, 0.5, 2.0, 1}, opts).first();
  EXPECT_GT(k, first_root_all_modes(3.0 * std::sqrt(2.0), 1.0, 3.5, 0.3, 2.0));
  EXPECT_LT(k, first_root_all_modes(3.0, 1.0, 3.5, 0.3, 2.0));
}

TEST(Recon, FiniteElementTensorOnSquare) {
  TEOptions opts;
  opts.divisions = 12;
  const Domain sq = Domain::square(-3.0, 3.0);
  const auto field = combine(presets::tensor_constant(0.45), presets::scalar_constant(1.0));
  const double k = solve_te_pencil({sq, field, 1.0, 3.0, 1}, opts).first();
  const ReconstructionReport rep = invert_fem(ReconMode::TensorScalar, k, sq, opts);
  EXPECT_NEAR(rep.value, 0.45, 1e-5);
}

}  // namespace
