#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "diskcert/certifier.hpp"
#include "diskcert/gallery.hpp"

using namespace diskcert;

namespace {

PDirichletSpec unit_spec(const PolarGrid& g) { return {2.0, sample(g, constant_profile(1.0))}; }

/// Cartesian gradient of the ncover pressure, coef x / R^2.
VectorField ncover_pressure_gradient(const PolarGrid& g, int N) {
  const double coef = (N * N - 1.0) / N;
  return sample_vector(g, [=](double R, double t) {
    return std::array<double, 2>{coef * std::cos(t) / R, coef * std::sin(t) / R};
  });
}

/// Minimality: K satisfies the bound and K - 1 does not.
void expect_minimal(const IntegerBound& b, const ScalarField& lhs, const ScalarField& unit, double factor) {
  ASSERT_TRUE(b.bounded());
  EXPECT_TRUE(bound_holds(lhs, unit, factor, *b.value));
  if (*b.value > 0) EXPECT_FALSE(bound_holds(lhs, unit, factor, *b.value - 1));
}

}  // namespace

TEST(EstimateL, AngularProfile) {
  const PolarGrid g(64, 256);
  // |d/dt exp(cos 2t)| / exp(cos 2t) = 2 |sin 2t| <= 2
  const IntegerBound b = estimate_l(sample(g, angular_profile(2)));
  ASSERT_TRUE(b.bounded());
  EXPECT_EQ(*b.value, 2);
  EXPECT_NEAR(b.sup_ratio, 2.0, 1e-12);
  EXPECT_EQ(*estimate_l(sample(g, constant_profile(3.0))).value, 0);
  EXPECT_EQ(*estimate_l(sample(g, angular_profile(3, 0.5))).value, 3);
}

TEST(EstimateL, VanishingSigmaIsUnbounded) {
  const PolarGrid g(16, 64);
  const ScalarField s = sample(g, [](double, double t) { return std::pow(std::max(0.0, std::cos(t)), 2); });
  EXPECT_FALSE(estimate_l(s).bounded());
}

TEST(EstimateNM, RatioOneData) {
  // |R grad lambda|_inf = sigma^2 everywhere: n = ceil(sqrt 2), m = ceil(2 sqrt 2 / sqrt 3).
  const PolarGrid g(16, 16);
  VectorField ps(g);
  for (std::size_t n = 0; n < ps.c1.size(); ++n) ps.c1[n] = (n % 2) ? 1.0 : -1.0;
  const ScalarField s2 = sample(g, constant_profile(1.0));
  const IntegerBound n = estimate_n(ps, s2), m = estimate_m(ps, s2);
  EXPECT_EQ(*n.value, 2);
  EXPECT_EQ(*m.value, 2);
  EXPECT_NEAR(n.sup_ratio, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(m.sup_ratio, 2.0 * std::sqrt(2.0) / std::sqrt(3.0), 1e-15);
  expect_minimal(n, pressure_lhs(ps), s2, kFactorN);
  expect_minimal(m, pressure_lhs(ps), s2, kFactorM);
}

TEST(EstimateNM, ExactIntegerRatioIsNotRoundedUp) {
  // ratio exactly 3 after the factor: ceil must give 3, not 4.
  const PolarGrid g(8, 8);
  VectorField ps(g);
  for (double& v : ps.c2) v = 3.0 * kFactorN;
  EXPECT_EQ(*estimate_n(ps, sample(g, constant_profile(1.0))).value, 3);
}

TEST(Certify, IdentityZeroPressureIsFullClass) {
  const PolarGrid g(64, 64);
  const CertificateReport r =
      certify_incompressible(identity_map().sample(g), unit_spec(g), sample(g, constant_profile(0.0)));
  EXPECT_TRUE(r.applicable);
  EXPECT_EQ(*r.n_star, 0);
  EXPECT_TRUE(r.full_class);
  EXPECT_TRUE(r.pressure_gradient_vanishes);
  EXPECT_TRUE(r.sigma0_positive);
}

TEST(Certify, GalleryStarsAreSumsAndMinimal) {
  const PolarGrid g(128, 128);
  for (int N : {2, 3}) {
    const StationaryCandidate c{ncover_map(N).sample(g), unit_spec(g), std::nullopt,
                                ncover_pressure_gradient(g, N)};
    const CertificateReport r = certify(c);
    ASSERT_TRUE(r.applicable);
    EXPECT_EQ(*r.n, N == 2 ? 3 : 4);
    EXPECT_EQ(*r.m, N == 2 ? 3 : 5);
    EXPECT_EQ(*r.n_star, *r.n + *r.l);
    EXPECT_EQ(*r.m_star, *r.m + *r.l);
    // sigma = 1 for p = 2, so the ratio is R lambda_,R = (N^2 - 1)/N.
    const double ratio = (N * N - 1.0) / N;
    EXPECT_EQ(*r.n, static_cast<int>(std::ceil(ratio / kFactorN)));
    EXPECT_EQ(*r.m, static_cast<int>(std::ceil(ratio / kFactorM)));
    const ScalarField s2 = multiply(r.sigma, r.sigma);
    VectorField ps = to_polar(*c.grad_lambda);
    for (int i = 0; i < g.n_r(); ++i)
      for (int k = 0; k < g.n_theta(); ++k) {
        ps.c1[g.index(i, k)] *= g.radius(i);
        ps.c2[g.index(i, k)] *= g.radius(i);
      }
    expect_minimal(r.n_bound, pressure_lhs(ps), s2, kFactorN);
    expect_minimal(r.m_bound, pressure_lhs(ps), s2, kFactorM);
    expect_minimal(r.l_bound, ScalarField(g), r.sigma, 1.0);
  }
}

TEST(Certify, DipolePressure) {
  // lambda = 0.3 R^2 cos t: R grad lambda = (0.6 R^2 cos t, -0.3 R^2 sin t), sup 0.6 R^2 < 0.6.
  const PolarGrid g(128, 128);
  const CertificateReport r = certify_incompressible(
      identity_map().sample(g), unit_spec(g),
      sample(g, [](double R, double t) { return 0.3 * R * R * std::cos(t); }));
  EXPECT_EQ(*r.n, 1);
  EXPECT_EQ(*r.m, 1);
  EXPECT_TRUE(r.full_class);  // m* = 1
  EXPECT_FALSE(r.pressure_gradient_vanishes);
}

TEST(Certify, VanishingSigmaIsNotApplicable) {
  const PolarGrid g(64, 64);
  const PDirichletSpec spec{2.0, sample(g, [](double, double t) { return std::pow(std::max(0.0, std::cos(t)), 2); })};
  const CertificateReport r = certify_incompressible(
      identity_map().sample(g), spec, sample(g, [](double R, double t) { return R * R * std::sin(t); }));
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.sigma0_positive);
  EXPECT_FALSE(r.full_class);
}

TEST(Certify, IntegrabilityOnlyForPAboveTwo) {
  const PolarGrid g(32, 32);
  const PDirichletSpec spec{4.0, sample(g, constant_profile(1.0))};
  const CertificateReport r =
      certify_incompressible(identity_map().sample(g), spec, sample(g, constant_profile(0.0)));
  ASSERT_TRUE(r.sigma_integrability.has_value());
  // sigma^2 = |I|^2 = 2, sigma^(4/(p-2)) = sigma^2 = 2, integral 2 pi
  EXPECT_NEAR(*r.sigma_integrability, 2.0 * std::numbers::pi, 1e-10);
}

TEST(Certify, CompressibleAffine) {
  const PolarGrid g(64, 64);
  const VectorField u = affine_map({1.2, 0.3, 0.1, 0.9}).sample(g);
  const CertificateReport r =
      certify_compressible(u, spec_det_penalty(g, 2.0, constant_profile(1.0), constant_profile(1.0)));
  // q is constant, so the pressure-like gradient vanishes.
  EXPECT_TRUE(r.applicable);
  EXPECT_EQ(*r.n_star, 0);
  EXPECT_TRUE(r.full_class);
  ASSERT_TRUE(r.siv_spector.has_value());
}

TEST(SivSpector, MarginSign) {
  const PolarGrid g(32, 32);
  const VectorField u = identity_map().sample(g);
  // q = -rho constant; sigma^2 = 1, need |q| R <= 1.
  EXPECT_TRUE(check_siv_spector(spec_linear_det(g, 2.0, constant_profile(1.0), constant_profile(0.5)), u).holds);
  // nu = 1/2: sigma^2 = 1/2 < R for R > 1/2.
  const SivSpectorResult r = check_siv_spector(spec_linear_det(g, 2.0, constant_profile(0.5), constant_profile(1.0)), u);
  EXPECT_FALSE(r.holds);
  EXPECT_NEAR(r.min_margin, 0.5 - g.radius(g.n_r() - 1), 1e-14);
}
