#include <gtest/gtest.h>

#include <cmath>

#include "diskcert/gallery.hpp"
#include "diskcert/stationarity.hpp"

using namespace diskcert;

namespace {

PDirichletSpec unit_spec(const PolarGrid& g, double p = 2.0) {
  return {p, sample(g, constant_profile(1.0))};
}

}  // namespace

TEST(TestBasis, CompactSupportAndCount) {
  const PolarGrid g(64, 32);
  const TestBasisSpec spec;
  const auto basis = make_test_basis(g, spec);
  // components x (cos modes 0..8 + sin modes 1..8) x radial functions
  EXPECT_EQ(basis.size(), 2u * 17u * 4u);
  for (const auto& tf : basis)
    for (int i = 0; i < g.n_r(); ++i)
      if (g.radius(i) < spec.r0 || g.radius(i) > spec.r1)
        for (int k = 0; k < g.n_theta(); ++k) ASSERT_EQ(tf.eta.c1[g.index(i, k)] + tf.eta.c2[g.index(i, k)], 0.0);
}

TEST(Residual, IdentityWithZeroPressure) {
  const PolarGrid g(256, 256);
  const StationaryCandidate c{identity_map().sample(g), unit_spec(g), sample(g, constant_profile(0.0))};
  EXPECT_LE(ele_residual_incompressible(c).max_normalized, 1e-8);
}

TEST(Residual, NCoverWithClosedFormPressure) {
  const PolarGrid g(256, 256);
  const StationaryCandidate c{ncover_map(2).sample(g), unit_spec(g), sample(g, ncover_pressure(2, 1.0, 2.0))};
  EXPECT_LE(ele_residual_incompressible(c).max_normalized, 1e-5);
}

TEST(Residual, WrongPressureIsDetected) {
  const PolarGrid g(128, 128);
  const StationaryCandidate c{ncover_map(2).sample(g), unit_spec(g), sample(g, constant_profile(0.0))};
  EXPECT_GT(ele_residual_incompressible(c).max_normalized, 1e-2);
}

TEST(Residual, RejectsNonMeasurePreserving) {
  const PolarGrid g(64, 64);
  const StationaryCandidate c{affine_map({1.2, 0.0, 0.0, 1.0}).sample(g), unit_spec(g),
                              sample(g, constant_profile(0.0))};
  EXPECT_THROW(ele_residual_incompressible(c), Error);
}

TEST(Residual, AffineCompressible) {
  const PolarGrid g(256, 256);
  const VectorField u = affine_map({1.2, 0.3, 0.1, 0.9}).sample(g);
  const StationaryCandidate c{u, spec_det_penalty(g, 2.0, constant_profile(1.0), constant_profile(1.0)),
                              std::nullopt};
  EXPECT_LE(ele_residual_compressible(c).max_normalized, 1e-8);
}

TEST(Residual, CompressibleDetectsNonStationary) {
  const PolarGrid g(128, 128);
  const StationaryCandidate c{ncover_map(2).sample(g),
                              spec_det_penalty(g, 2.0, constant_profile(1.0), radial_profile(0.0, 1.0)),
                              std::nullopt};
  EXPECT_GT(ele_residual_compressible(c).max_normalized, 1e-3);
}

TEST(PressureRecovery, NCoverClosesTheLoop) {
  const PolarGrid g(256, 256);
  const PDirichletSpec spec = unit_spec(g);
  const VectorField u = ncover_map(2).sample(g);
  const PressureRecovery rec = recover_pressure_gradient(u, spec);
  EXPECT_LE(rec.max_curl, 1e-4);
  const ScalarField lambda = integrate_pressure(rec.grad_lambda, g.n_r() / 2, 0);
  const StationaryCandidate c{u, spec, lambda};
  EXPECT_LE(ele_residual_incompressible(c).max_normalized, 1e-5);
  // Agrees with (3/2) ln R up to the additive constant fixed at the base node.
  const ScalarField exact = sample(g, ncover_pressure(2, 1.0, 2.0));
  const double shift = exact(g.n_r() / 2, 0) - lambda(g.n_r() / 2, 0);
  for (int i = g.n_r() / 8; i < g.n_r(); i += 9)
    for (int k = 0; k < g.n_theta(); k += 17) EXPECT_NEAR(lambda(i, k) + shift, exact(i, k), 1e-5);
}

TEST(PressureRecovery, PathFamiliesAgree) {
  const PolarGrid g(128, 128);
  const PressureRecovery rec = recover_pressure_gradient(ncover_map(3).sample(g), unit_spec(g));
  const ScalarField a = integrate_pressure(rec.grad_lambda, 40, 5, PathFamily::radial_then_angular);
  const ScalarField b = integrate_pressure(rec.grad_lambda, 40, 5, PathFamily::angular_then_radial);
  EXPECT_LT(max_abs(a - b), 1e-8);
  EXPECT_EQ(a(40, 5), 0.0);
}

TEST(PressureRecovery, NonGradientIsRejected) {
  const PolarGrid g(64, 64);
  const VectorField rot = sample_vector(g, [](double R, double t) {
    return std::array<double, 2>{-R * std::sin(t), R * std::cos(t)};  // curl = 2
  });
  EXPECT_THROW(integrate_pressure(rot, 10, 0), Error);
}
