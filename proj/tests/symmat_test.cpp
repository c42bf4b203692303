#include <gtest/gtest.h>

#include <cmath>

#include "canfilt/rng.hpp"
#include "canfilt/symmat.hpp"

using namespace canfilt;

namespace {

constexpr double kTight = 1e-12;

SymMat2d random_symmetric(CounterRng<double>& rng, double lo, double hi) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

SymMat2d random_psd(CounterRng<double>& rng, double lo, double hi) {
  const Mat2d g{rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
  const Mat2d gram = g.transpose() * g;
  return {gram.a11, gram.a12, gram.a22};
}

Mat2d reconstruct(const EigenPair2<double>& ep) {
  const Mat2d v1v1{ep.v1.x * ep.v1.x, ep.v1.x * ep.v1.y, ep.v1.y * ep.v1.x, ep.v1.y * ep.v1.y};
  const Mat2d v2v2{ep.v2.x * ep.v2.x, ep.v2.x * ep.v2.y, ep.v2.y * ep.v2.x, ep.v2.y * ep.v2.y};
  return ep.lambda1 * v1v1 + ep.lambda2 * v2v2;
}

}  // namespace

// ---- eig --------------------------------------------------------------------

TEST(Eig, GoldenLambdaMin) {
  const SymMat2d h0{2.0, 0.3, 1.5};
  EXPECT_NEAR(eig(h0).lambda2, 1.359487, 1e-6);
}

TEST(Eig, Identity) {
  const auto ep = eig(SymMat2d::identity());
  EXPECT_DOUBLE_EQ(ep.lambda1, 1.0);
  EXPECT_DOUBLE_EQ(ep.lambda2, 1.0);
  EXPECT_DOUBLE_EQ(ep.v1.x, 1.0);
  EXPECT_DOUBLE_EQ(ep.v1.y, 0.0);
  EXPECT_DOUBLE_EQ(ep.v2.x, 0.0);
  EXPECT_DOUBLE_EQ(ep.v2.y, 1.0);
}

TEST(Eig, PureCoupling) {
  // hand solution of the characteristic polynomial of [[0, 1/2], [1/2, 0]]
  const auto ep = eig(SymMat2d{0.0, 0.5, 0.0});
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(ep.lambda1, 0.5, kTight);
  EXPECT_NEAR(ep.lambda2, -0.5, kTight);
  EXPECT_NEAR(ep.v1.x, inv_sqrt2, kTight);
  EXPECT_NEAR(ep.v1.y, inv_sqrt2, kTight);
  EXPECT_NEAR(std::abs(ep.v2.x), inv_sqrt2, kTight);
  EXPECT_NEAR(std::abs(ep.v2.y), inv_sqrt2, kTight);
  EXPECT_NEAR(dot(ep.v1, ep.v2), 0.0, kTight);
  EXPECT_NEAR(frob_norm(reconstruct(ep) - SymMat2d{0.0, 0.5, 0.0}.full()), 0.0, 1e-10);
}

TEST(Eig, DiagonalOrdering) {
  const auto ep = eig(SymMat2d{1.0, 0.0, 4.0});
  EXPECT_DOUBLE_EQ(ep.lambda1, 4.0);
  EXPECT_DOUBLE_EQ(ep.lambda2, 1.0);
  EXPECT_DOUBLE_EQ(ep.v1.x, 0.0);
  EXPECT_DOUBLE_EQ(ep.v1.y, 1.0);
}

TEST(Eig, InvariantsOnRandomMatrices) {
  CounterRng<double> rng(0xE16);
  double worst_recon = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const SymMat2d m = random_symmetric(rng, -10.0, 10.0);
    const auto ep = eig(m);
    ASSERT_GE(ep.lambda1, ep.lambda2);
    ASSERT_NEAR(norm(ep.v1), 1.0, 1e-12);
    ASSERT_NEAR(norm(ep.v2), 1.0, 1e-12);
    ASSERT_NEAR(dot(ep.v1, ep.v2), 0.0, 1e-12);
    worst_recon = std::max(worst_recon, frob_norm(reconstruct(ep) - m.full()));
  }
  EXPECT_LE(worst_recon, 1e-10);
}

// ---- symmetrize ---------------------------------------------------------------

TEST(Symmetrize, Shear) {
  const SymMat2d s = symmetrize(Mat2d{0.0, -1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(s.h11, 0.0);
  EXPECT_DOUBLE_EQ(s.h12, -0.5);
  EXPECT_DOUBLE_EQ(s.h22, 0.0);
}

TEST(Symmetrize, FixedPointOnSymmetricInput) {
  const Mat2d m{1.0, 0.7, 0.7, -2.0};
  const SymMat2d s = symmetrize(m);
  EXPECT_DOUBLE_EQ(s.h11, 1.0);
  EXPECT_DOUBLE_EQ(s.h12, 0.7);
  EXPECT_DOUBLE_EQ(s.h22, -2.0);
}

TEST(Symmetrize, General) {
  const SymMat2d s = symmetrize(Mat2d{1.0, 2.0, 4.0, 3.0});
  EXPECT_DOUBLE_EQ(s.h11, 1.0);
  EXPECT_DOUBLE_EQ(s.h12, 3.0);
  EXPECT_DOUBLE_EQ(s.h22, 3.0);
}

// ---- project_psd ----------------------------------------------------------------

TEST(ProjectPsd, DiagonalClip) {
  const SymMat2d p = project_psd(SymMat2d{1.0, 0.0, -1.0});
  EXPECT_NEAR(p.h11, 1.0, kTight);
  EXPECT_NEAR(p.h12, 0.0, kTight);
  EXPECT_NEAR(p.h22, 0.0, kTight);
}

TEST(ProjectPsd, FixesPsdInput) {
  CounterRng<double> rng(0xF1);
  for (int i = 0; i < 1000; ++i) {
    const SymMat2d m = random_psd(rng, -3.0, 3.0);
    EXPECT_LE(frob_norm(project_psd(m) - m), kTight);
  }
}

TEST(ProjectPsd, ShearExample) {
  // symmetrizes to [[0, -1/2], [-1/2, 0]], clips the -1/2 eigenvalue
  const SymMat2d p = project_psd(Mat2d{0.0, -1.0, 0.0, 0.0});
  EXPECT_NEAR(p.h11, 0.25, kTight);
  EXPECT_NEAR(p.h12, -0.25, kTight);
  EXPECT_NEAR(p.h22, 0.25, kTight);
}

TEST(ProjectPsd, ResultIsPsd) {
  CounterRng<double> rng(0xF2);
  for (int i = 0; i < 5000; ++i) {
    const SymMat2d m = random_symmetric(rng, -10.0, 10.0);
    EXPECT_GE(lambda_min(project_psd(m)), -1e-12);
  }
}

TEST(ProjectPsd, Idempotent) {
  CounterRng<double> rng(0xF3);
  for (int i = 0; i < 2000; ++i) {
    const SymMat2d p = project_psd(random_symmetric(rng, -10.0, 10.0));
    EXPECT_LE(frob_norm(project_psd(p) - p), kTight);
  }
}

TEST(ProjectPsd, VariationalInequality) {
  // nearest-point certificate: <X - P(X), Y - P(X)> <= 0 for PSD Y
  CounterRng<double> rng(0xF4);
  double worst = -1.0;
  for (int i = 0; i < 2000; ++i) {
    const SymMat2d x = random_symmetric(rng, -3.0, 3.0);
    const SymMat2d y = random_psd(rng, -3.0, 3.0);
    const SymMat2d p = project_psd(x);
    worst = std::max(worst, frob_inner(x - p, y - p));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(ProjectPsd, NonExpansive) {
  CounterRng<double> rng(0xF5);
  for (int i = 0; i < 2000; ++i) {
    const SymMat2d x = random_symmetric(rng, -10.0, 10.0);
    const SymMat2d y = random_symmetric(rng, -10.0, 10.0);
    EXPECT_LE(frob_norm(project_psd(x) - project_psd(y)), frob_norm(x - y) + kTight);
  }
}

// ---- norms -----------------------------------------------------------------------

TEST(Frobenius, NormOfIdentity) {
  EXPECT_DOUBLE_EQ(frob_norm(Mat2d::identity()), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(frob_norm(SymMat2d::identity()), std::sqrt(2.0));
}

TEST(Frobenius, InnerConsistentWithNorm) {
  const Mat2d a{1.0, -2.0, 0.5, 3.0};
  EXPECT_DOUBLE_EQ(frob_inner(a, a), frob_norm(a) * frob_norm(a));
  const SymMat2d s{1.0, -2.0, 3.0};
  EXPECT_NEAR(frob_inner(s, s), frob_norm(s) * frob_norm(s), 1e-14);
  EXPECT_DOUBLE_EQ(frob_inner(s, s), frob_inner(s.full(), s.full()));
}

TEST(Frobenius, DisjointSupport) {
  EXPECT_DOUBLE_EQ(frob_inner(Mat2d{1.0, 0.0, 0.0, 0.0}, Mat2d{0.0, 0.0, 0.0, 1.0}), 0.0);
}

TEST(SpectralNorm, SymmetricMatchesGramRoute) {
  CounterRng<double> rng(0xF6);
  for (int i = 0; i < 500; ++i) {
    const SymMat2d m = random_symmetric(rng, -5.0, 5.0);
    EXPECT_NEAR(spectral_norm(m), spectral_norm(m.full()), 1e-9);
  }
}
