#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

#include "tehom/linalg/arnoldi.hpp"
#include "tehom/linalg/sparse.hpp"
#include "tehom/linalg/svd.hpp"

namespace {

using namespace tehom;

SparseMatrix diag(std::initializer_list<double> d) {
  std::vector<Triplet> t;
  int i = 0;
  for (double x : d) {
    t.emplace_back(i, i, x);
    ++i;
  }
  return assemble(i, i, t);
}

// 1-D P1 stiffness and mass on n interior nodes of (0, 1).
std::pair<SparseMatrix, SparseMatrix> laplace_1d(int n) {
  const double h = 1.0 / (n + 1);
  std::vector<Triplet> k, m;
  for (int i = 0; i < n; ++i) {
    k.emplace_back(i, i, 2.0 / h);
    m.emplace_back(i, i, 4.0 * h / 6.0);
    if (i + 1 < n) {
      k.emplace_back(i, i + 1, -1.0 / h);
      k.emplace_back(i + 1, i, -1.0 / h);
      m.emplace_back(i, i + 1, h / 6.0);
      m.emplace_back(i + 1, i, h / 6.0);
    }
  }
  return {assemble(n, n, k), assemble(n, n, m)};
}

TEST(SolveDirect, Trivial) {
  const SparseMatrix eye = diag({1, 1, 1});
  const VectorX x = solve_direct(eye, Eigen::Vector3d(1, 2, 3));
  EXPECT_TRUE(x.isApprox(Eigen::Vector3d(1, 2, 3)));
  const VectorX y = solve_direct(diag({2, 4}), Eigen::Vector2d(2, 4));
  EXPECT_NEAR(y[0], 1.0, 1e-15);
  EXPECT_NEAR(y[1], 1.0, 1e-15);
}

TEST(SolveDirect, RandomSpd) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) b(i, j) = g(rng);
  const Eigen::MatrixXd spd = b * b.transpose() + 50.0 * Eigen::MatrixXd::Identity(50, 50);
  const SparseMatrix s = spd.sparseView();
  VectorX rhs(50);
  for (int i = 0; i < 50; ++i) rhs[i] = g(rng);
  const VectorX x = solve_direct(s, rhs);
  EXPECT_LE((s * x - rhs).norm() / rhs.norm(), 1e-9);
}

TEST(SolveDirect, SingularThrows) {
  try {
    solve_direct(diag({1, 0, 2}), Eigen::Vector3d(1, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FactorizationFailure);
  }
}

TEST(Assemble, DuplicatesSummedAndRangeChecked) {
  const SparseMatrix a = assemble(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, 1.0}});
  EXPECT_EQ(a.coeff(0, 0), 3.0);
  EXPECT_EQ(a.nonZeros(), 2);
  EXPECT_THROW(assemble(2, 2, {{2, 0, 1.0}}), Error);
}

TEST(ShiftInvert, DiagonalPencils) {
  auto r = eig_shift_invert(diag({1, 2, 3}), diag({1, 1, 1}), 1.9, 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].value(), 2.0, 1e-12);
  EXPECT_TRUE(r[0].is_real);
  EXPECT_LE(r[0].residual, 1e-8);
  r = eig_shift_invert(diag({1, 2, 3}), diag({1, 1, 2}), 1.4, 1);
  EXPECT_NEAR(r[0].value(), 1.5, 1e-12);
}

TEST(ShiftInvert, ShiftOnEigenvalueFails) {
  try {
    eig_shift_invert(diag({1, 2, 3}), diag({1, 1, 1}), 2.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FactorizationFailure);
  }
}

TEST(ShiftInvert, LaplacianMatchesDenseQz) {
  const auto [k, m] = laplace_1d(200);
  const Eigen::MatrixXd kd(k), md(m);
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> qz(kd, md);
  std::vector<double> all;
  for (Eigen::Index i = 0; i < qz.eigenvalues().size(); ++i) all.push_back(qz.eigenvalues()[i].real());
  std::sort(all.begin(), all.end());
  for (double shift : {5.0, 400.0, 3000.0}) {
    const auto res = eig_shift_invert(k, m, shift, 6);
    ASSERT_EQ(res.size(), 6u);
    std::vector<double> nearest = all;
    std::sort(nearest.begin(), nearest.end(),
              [&](double a, double b) { return std::abs(a - shift) < std::abs(b - shift); });
    std::vector<double> got, want(nearest.begin(), nearest.begin() + 6);
    for (const auto& r : res) {
      EXPECT_TRUE(r.is_real);
      EXPECT_TRUE(r.converged);
      EXPECT_LE(r.residual, 1e-8 * std::max(1.0, std::abs(r.value())));
      got.push_back(r.value());
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(got[i] / want[i], 1.0, 1e-6) << "shift " << shift;
  }
}

TEST(ShiftInvert, ComplexPairsAreFlagged) {
  // block [[1, -2], [2, 1]] has eigenvalues 1 +- 2i; the rest is real
  const SparseMatrix k = assemble(4, 4, {{0, 0, 1}, {0, 1, -2}, {1, 0, 2}, {1, 1, 1}, {2, 2, 5}, {3, 3, 7}});
  const auto res = eig_shift_invert(k, diag({1, 1, 1, 1}), 0.5, 4);
  int complex_count = 0;
  for (const auto& r : res) {
    if (!r.is_real) {
      ++complex_count;
      EXPECT_NEAR(std::abs(r.lambda.imag()), 2.0, 1e-10);
    } else {
      EXPECT_LE(std::abs(r.lambda.imag()), 1e-6 * std::abs(r.lambda));
    }
    EXPECT_LE(r.residual, 1e-8);
  }
  EXPECT_EQ(complex_count, 2);
}

// Sign of det(K - lambda M) for a dense pencil.
int det_sign(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m, double lambda) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(k - lambda * m);
  const double d = lu.determinant();
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

TEST(ShiftInvert, IndefiniteSweepMatchesDeterminantScan) {
  // symmetric K, indefinite M: a mix of real and complex eigenvalues
  const int n = 60;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd kd = Eigen::MatrixXd::Zero(n, n), md = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    kd(i, i) = 4.0 + u(rng);
    md(i, i) = (i % 3 == 0 ? -1.0 : 1.0) * (1.0 + 0.5 * u(rng));
    if (i + 1 < n) {
      const double off = u(rng);
      kd(i, i + 1) = kd(i + 1, i) = off;
      const double moff = 0.3 * u(rng);
      md(i, i + 1) = md(i + 1, i) = moff;
    }
  }
  const SparseMatrix k = kd.sparseView(), m = md.sparseView();
  const double lo = 0.5, hi = 8.0;

  std::vector<double> scan;
  const double step = 1e-4;  // closest pair in this instance is 3.5e-4 apart
  int prev = det_sign(kd, md, lo);
  for (double x = lo + step; x <= hi; x += step) {
    const int s = det_sign(kd, md, x);
    if (s != prev) {
      double a = x - step, b = x;
      for (int it = 0; it < 80; ++it) {
        const double c = 0.5 * (a + b);
        if (det_sign(kd, md, c) == prev) a = c; else b = c;
      }
      scan.push_back(0.5 * (a + b));
    }
    prev = s;
  }
  ASSERT_GE(scan.size(), 5u);

  std::vector<double> swept;
  for (double shift = lo + 0.0137; shift < hi; shift += 0.1) {
    for (const auto& r : eig_shift_invert(k, m, shift, 4)) {
      if (!r.is_real || !r.converged) continue;
      EXPECT_LE(r.residual, 1e-8);
      const double v = r.value();
      if (v <= lo || v >= hi) continue;
      const bool seen = std::any_of(swept.begin(), swept.end(),
                                    [&](double w) { return std::abs(w - v) <= 1e-6 * std::abs(v); });
      if (!seen) swept.push_back(v);
    }
  }
  std::sort(swept.begin(), swept.end());
  ASSERT_EQ(swept.size(), scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) EXPECT_NEAR(swept[i], scan[i], 1e-8);
}

TEST(Svd, Diagonal) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 3.0;
  const auto s = svd_dense(a);
  EXPECT_NEAR(s.singular_values[0], 3.0, 1e-14);
  EXPECT_NEAR(s.singular_values[1], 1.0, 1e-14);
}

TEST(Svd, UnitaryAndRandom) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  CMatrix a(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) a(i, j) = {g(rng), g(rng)};
  const CMatrix q = Eigen::HouseholderQR<CMatrix>(a).householderQ();
  const auto sq = svd_dense(q);
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(sq.singular_values[i], 1.0, 1e-10);
  const auto s = svd_dense(a);
  EXPECT_LE((a - s.reconstruct()).norm() / a.norm(), 1e-10);
  for (int i = 1; i < 20; ++i) EXPECT_GE(s.singular_values[i - 1], s.singular_values[i]);
  EXPECT_LE((s.u.adjoint() * s.u - CMatrix::Identity(20, 20)).norm(), 1e-10);
  EXPECT_LE((s.v.adjoint() * s.v - CMatrix::Identity(20, 20)).norm(), 1e-10);
}

}  // namespace
