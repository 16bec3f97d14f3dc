#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "diskcert/energies.hpp"
#include "diskcert/gallery.hpp"

using namespace diskcert;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(PDirichlet, GalleryEnergies) {
  const PolarGrid g(256, 256);
  const PDirichletSpec spec{2.0, sample(g, constant_profile(1.0))};
  EXPECT_NEAR(eval_E(identity_map().sample(g), spec), 2.0 * kPi, 1e-5);
  EXPECT_NEAR(eval_E(ncover_map(2).sample(g), spec), 2.5 * kPi, 1e-4);
  // |grad u_3|^2 = 3 + 1/3
  EXPECT_NEAR(eval_E(ncover_map(3).sample(g), spec), (3.0 + 1.0 / 3.0) * kPi, 1e-4);
}

TEST(PDirichlet, PGreaterThanTwo) {
  // Identity: |I|^p = 2^(p/2), E = 2^(p/2) pi.
  const PolarGrid g(64, 64);
  const PDirichletSpec spec{3.0, sample(g, constant_profile(1.0))};
  EXPECT_NEAR(eval_E(identity_map().sample(g), spec), std::pow(2.0, 1.5) * kPi, 1e-9);
}

TEST(PDirichlet, RejectsBadInputs) {
  const PolarGrid g(16, 16);
  EXPECT_THROW((PDirichletSpec{1.5, sample(g, constant_profile(1.0))}.validate()), Error);
  EXPECT_THROW((PDirichletSpec{2.0, sample(g, constant_profile(-1.0))}.validate()), Error);
}

TEST(NCover, MeasurePreservingAtNodes) {
  const PolarGrid g(256, 256);
  for (int N : {2, 3}) {
    const ScalarField d = det(gradient(ncover_map(N).sample(g)));
    for (double v : d.values) ASSERT_NEAR(v, 1.0, 1e-8) << "N=" << N;
  }
}

TEST(Sigma, SquaredWeight) {
  const PolarGrid g(16, 16);
  const MatrixField gu = ncover_map(2).sample_gradient(g);
  const ScalarField nu = sample(g, constant_profile(2.0));
  const ScalarField s2 = sigma_squared(nu, gu, 4.0);
  // nu |grad u|^(p-2) = 2 * 2.5
  for (double v : s2.values) EXPECT_NEAR(v, 5.0, 1e-12);
  EXPECT_EQ(pow_pm2(0.0, 2.0), 1.0);
}

TEST(Subdifferential, NoViolationsAcrossExponents) {
  for (double p : {2.0, 2.5, 3.0, 4.0}) {
    const SubdifferentialReport r = check_subdifferential(p, 20000, 17);
    EXPECT_EQ(r.violations, 0) << "p=" << p;
    EXPECT_EQ(r.equality_slack, 0.0) << "p=" << p;
    EXPECT_GE(r.min_slack, -1e-12);
  }
}

TEST(Subdifferential, ExactQuadraticAtPTwo) {
  // For p = 2 the inequality is an identity.
  const Mat2 a{0.3, -1.0, 2.0, 0.5}, b{-1.0, 0.25, 0.0, 1.5};
  EXPECT_NEAR(subdifferential_slack(a, b, 2.0), 0.0, 1e-14);
  EXPECT_GT(subdifferential_slack(a, b, 3.0), 0.0);
}

TEST(Polyconvex, GrowthBoundsOfGalleryModels) {
  const PolarGrid g(16, 16);
  EXPECT_TRUE(check_growth(spec_psi_zero(g, 2.0, constant_profile(1.0)), 2000, 3).ok());
  EXPECT_TRUE(check_growth(spec_linear_det(g, 2.0, constant_profile(1.0), constant_profile(0.5)), 2000, 3).ok());
  // (d-1)^2 grows like |xi|^4: the upper bound must fail for p = 2.
  const PolyconvexSpec penalty = spec_det_penalty(g, 2.0, constant_profile(1.0), constant_profile(1.0));
  EXPECT_TRUE(penalty.local_use_only);
  const GrowthReport r = check_growth(penalty, 2000, 3);
  EXPECT_GT(r.upper_violations, 0);
  EXPECT_EQ(r.lower_violations, 0);
}

TEST(Polyconvex, PsiConvexity) {
  const PolarGrid g(16, 16);
  EXPECT_EQ(check_psi_convexity(spec_det_penalty(g, 2.0, constant_profile(1.0), constant_profile(1.0)), 2000, 9).violations, 0);
  EXPECT_EQ(check_psi_convexity(spec_linear_det(g, 2.0, constant_profile(1.0), constant_profile(0.5)), 2000, 9).violations, 0);
  const PolyconvexSpec concave = make_polyconvex(g, 2.0, constant_profile(1.0), psi_concave_det(),
                                                 constant_profile(1.0), "concave", true);
  EXPECT_GT(check_psi_convexity(concave, 2000, 9).violations, 0);
}

TEST(Polyconvex, EnergyOfAffineMap) {
  // I = int nu/p |A|^2 + gamma (det A - 1)^2 dx for constant A.
  const PolarGrid g(32, 32);
  const Mat2 A{1.2, 0.3, 0.1, 0.9};
  const PolyconvexSpec spec = spec_det_penalty(g, 2.0, constant_profile(1.0), constant_profile(1.0));
  const double expected = (0.5 * frobenius_sq(A) + std::pow(det(A) - 1.0, 2)) * kPi;
  EXPECT_NEAR(eval_I(affine_map(A).sample(g), spec), expected, 1e-10);
}
