#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "diskcert/fourier.hpp"

using namespace diskcert;

namespace {

ScalarField random_smooth(const PolarGrid& g, std::uint64_t seed, int modes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> a(modes + 1), b(modes + 1), c(modes + 1);
  for (int j = 0; j <= modes; ++j) a[j] = n01(rng), b[j] = n01(rng), c[j] = n01(rng);
  return sample(g, [&](double R, double t) {
    double v = a[0];
    for (int j = 1; j <= modes; ++j) v += (a[j] + c[j] * R) * std::cos(j * t) + b[j] * R * R * std::sin(j * t);
    return v;
  });
}

}  // namespace

TEST(Decompose, SingleHarmonicCoefficients) {
  const PolarGrid g(12, 32);
  const ScalarField f = sample(g, [](double R, double t) { return R * std::cos(3 * t) - 2.0 * std::sin(5 * t) + 0.5; });
  const ModeSpectrum s = decompose(f);
  for (int i = 0; i < g.n_r(); ++i) {
    EXPECT_NEAR(s.A(0, 0, i), 0.5, 1e-14);
    EXPECT_NEAR(s.A(0, 3, i), g.radius(i), 1e-14);
    EXPECT_NEAR(s.B(0, 5, i), -2.0, 1e-14);
    EXPECT_NEAR(s.A(0, 4, i), 0.0, 1e-14);
    // angular mean of (R cos 3t)^2 = R^2 / 2
    EXPECT_NEAR(s.mode_mass(3, i), 0.5 * g.radius(i) * g.radius(i), 1e-14);
  }
}

TEST(Decompose, RoundTrip) {
  const PolarGrid g(10, 48);
  const ScalarField f = random_smooth(g, 7, 12);
  const ScalarField r = reconstruct_scalar(decompose(f));
  EXPECT_LT(max_abs(f - r), 1e-13);
}

TEST(Decompose, ParsevalOnRings) {
  // Angular mean of f^2 equals the sum of the mode masses.
  const PolarGrid g(8, 64);
  const ScalarField f = random_smooth(g, 3, 20);
  const ModeSpectrum s = decompose(f);
  for (int i = 0; i < g.n_r(); ++i) {
    double mean = 0.0, modes = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) mean += f(i, k) * f(i, k);
    mean /= g.n_theta();
    for (int j = 0; j <= s.j_max; ++j) modes += s.mode_mass(j, i);
    EXPECT_NEAR(mean, modes, 1e-12 * mean);
  }
}

TEST(Bands, ProjectionIsIdempotentAndComplementary) {
  const PolarGrid g(8, 64);
  const ScalarField f = random_smooth(g, 11, 20);
  const ScalarField hi = project_band(f, Band::at_least(4));
  const ScalarField lo = project_band(f, Band::less_than(4));
  EXPECT_LT(max_abs(project_band(hi, Band::at_least(4)) - hi), 1e-13);
  EXPECT_LT(max_abs(hi + lo - f), 1e-13);
  EXPECT_LT(max_abs(project_band(hi, Band::less_than(4))), 1e-13);
  EXPECT_LT(integrate(multiply(hi, lo)), 1e-12);
}

TEST(Bands, ZeroPlusHighAndMembership) {
  EXPECT_TRUE(Band::zero_plus_at_least(3).contains(0));
  EXPECT_FALSE(Band::zero_plus_at_least(3).contains(2));
  EXPECT_TRUE(Band::zero_plus_at_least(3).contains(3));
  EXPECT_TRUE(Band::zero().contains(0));
  EXPECT_FALSE(Band::zero().contains(1));
  const PolarGrid g(8, 16);
  EXPECT_THROW(project_band(ScalarField(g), Band::at_least(9)), Error);
}

TEST(Bands, ZeroModeAndTilde) {
  const PolarGrid g(8, 32);
  const ScalarField f = sample(g, [](double R, double t) { return R + std::sin(2 * t); });
  const ScalarField z = zero_mode(f);
  for (int i = 0; i < g.n_r(); ++i)
    for (int k = 0; k < g.n_theta(); ++k) EXPECT_NEAR(z(i, k), g.radius(i), 1e-15);
  EXPECT_LT(max_abs(zero_mode(tilde(f))), 1e-15);
}

TEST(Dtheta, ExactBelowNyquist) {
  const PolarGrid g(8, 32);
  const ScalarField f = sample(g, [](double R, double t) { return R * std::sin(5 * t) + std::cos(15 * t); });
  const ScalarField expected =
      sample(g, [](double R, double t) { return 5 * R * std::cos(5 * t) - 15 * std::sin(15 * t); });
  EXPECT_LT(max_abs(dtheta(f) - expected), 1e-12);
  // The Nyquist mode has no derivative.
  const ScalarField nyq = sample(g, [](double, double t) { return std::cos(16 * t); });
  EXPECT_LT(max_abs(dtheta(nyq)), 1e-12);
}

TEST(BandContent, LeakageFraction) {
  const PolarGrid g(8, 32);
  const ScalarField f = sample(g, [](double, double t) { return std::cos(t) + std::cos(5 * t); });
  const BandContent b = band_content(f, 3);
  EXPECT_NEAR(b.aggregate, 0.5, 1e-13);
  EXPECT_EQ(band_content(ScalarField(g), 3).aggregate, 0.0);
}

TEST(EvaluateRing, InterpolatesOffGrid) {
  const PolarGrid g(8, 32);
  const ScalarField f = sample(g, [](double R, double t) { return R * std::cos(3 * t) + std::sin(t); });
  const ModeSpectrum s = decompose(f);
  EXPECT_NEAR(evaluate_ring(s, 0, 4, 0.123), g.radius(4) * std::cos(0.369) + std::sin(0.123), 1e-13);
}
