#pragma once

// p-Dirichlet energy E(u) = int nu |grad u|^p dx for measure-preserving maps,
// the compressible polyconvex energy I(u) = int nu/p |grad u|^p + Psi(x, grad u,
// det grad u) dx, and sampled checks of the structural hypotheses on Psi.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "diskcert/diffops.hpp"
#include "diskcert/grid.hpp"

namespace diskcert {

/// |xi|^(p-2) given |xi|^2. At xi = 0 this is 1 for p = 2 and 0 for p > 2.
inline double pow_pm2(double norm_sq, double p) {
  if (p == 2.0) return 1.0;
  if (norm_sq == 0.0) return 0.0;
  return std::pow(norm_sq, 0.5 * (p - 2.0));
}

inline double pow_p(double norm_sq, double p) { return std::pow(norm_sq, 0.5 * p); }

inline void require_exponent(double p) {
  require(std::isfinite(p) && p >= 2.0, "exponent p must be finite and >= 2");
}

inline void require_nonnegative(const ScalarField& f, const char* what) {
  require_finite(f, what);
  for (double v : f.values) require(v >= 0.0, std::string(what) + " must be non-negative");
}

struct PDirichletSpec {
  double p = 2.0;
  ScalarField nu;

  void validate() const {
    require_exponent(p);
    require_nonnegative(nu, "nu");
  }
};

/// Position of a quadrature node, handed to Psi evaluators.
struct NodePoint {
  double R = 0.0;
  double theta = 0.0;
};

struct PsiEval {
  double value = 0.0;
  Mat2 d_xi;         ///< partial derivative with respect to xi
  double d_d = 0.0;  ///< partial derivative with respect to the determinant slot
};

/// Psi(x, xi, d). Must be reentrant.
using PsiFunction = std::function<PsiEval(const NodePoint& x, const Mat2& xi, double d)>;

struct PolyconvexSpec {
  double p = 2.0;
  ScalarField nu;
  PsiFunction psi;
  ScalarField growth_c;  ///< C(x) of the p-growth bound
  std::string psi_name = "custom";
  /// Set for models that do not satisfy the global growth bound; such specs
  /// are only used for derivative-based criteria.
  bool local_use_only = false;

  void validate() const {
    require_exponent(p);
    require_nonnegative(nu, "nu");
    require_nonnegative(growth_c, "growth certificate C");
    require_same_grid(nu.grid, growth_c.grid, "PolyconvexSpec");
    require(static_cast<bool>(psi), "PolyconvexSpec: Psi evaluator missing");
  }

  /// Phi(x, xi) = nu/p |xi|^p + Psi(x, xi, det xi) at node n.
  double phi(std::size_t n, const NodePoint& x, const Mat2& xi) const {
    return nu.values[n] / p * pow_p(frobenius_sq(xi), p) + psi(x, xi, det(xi)).value;
  }
};

inline NodePoint node_point(const PolarGrid& g, std::size_t n) {
  const int i = static_cast<int>(n / g.n_theta());
  const int k = static_cast<int>(n % g.n_theta());
  return {g.radius(i), g.theta(k)};
}

/// nu |grad u|^(p-2), the squared weight sigma^2.
inline ScalarField sigma_squared(const ScalarField& nu, const MatrixField& grad_u, double p) {
  require_same_grid(nu.grid, grad_u.grid, "sigma_squared");
  ScalarField out(nu.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] = nu.values[n] * pow_pm2(frobenius_sq(grad_u.at(n)), p);
  return out;
}

inline ScalarField energy_density_E(const MatrixField& grad_u, const PDirichletSpec& spec) {
  ScalarField out(grad_u.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] = spec.nu.values[n] * pow_p(frobenius_sq(grad_u.at(n)), spec.p);
  require_finite(out, "eval_E");
  return out;
}

inline double eval_E(const MatrixField& grad_u, const PDirichletSpec& spec) {
  spec.validate();
  require_same_grid(grad_u.grid, spec.nu.grid, "eval_E");
  return integrate(energy_density_E(grad_u, spec));
}

inline double eval_E(const VectorField& u, const PDirichletSpec& spec) {
  return eval_E(gradient(u), spec);
}

inline ScalarField energy_density_I(const MatrixField& grad_u, const PolyconvexSpec& spec) {
  const PolarGrid& g = grad_u.grid;
  ScalarField out(g);
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] = spec.phi(n, node_point(g, n), grad_u.at(n));
  require_finite(out, "eval_I");
  return out;
}

inline double eval_I(const MatrixField& grad_u, const PolyconvexSpec& spec) {
  spec.validate();
  require_same_grid(grad_u.grid, spec.nu.grid, "eval_I");
  return integrate(energy_density_I(grad_u, spec));
}

inline double eval_I(const VectorField& u, const PolyconvexSpec& spec) {
  return eval_I(gradient(u), spec);
}

// ---------------------------------------------------------------------------
// Structural checks

namespace detail {

inline Mat2 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat2 m{normal(rng), normal(rng), normal(rng), normal(rng)};
  const double len = frobenius(m);
  return len > 0.0 ? (1.0 / len) * m : Mat2::identity();
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace detail

struct GrowthWitness {
  double R = 0.0;
  double theta = 0.0;
  Mat2 xi;
  double phi = 0.0;
  double bound = 0.0;
};

struct GrowthReport {
  long samples = 0;
  long lower_violations = 0;  ///< Phi < 0
  long upper_violations = 0;  ///< Phi > C/p (1 + |xi|^p)
  std::vector<GrowthWitness> witnesses;
  bool ok() const { return lower_violations == 0 && upper_violations == 0; }
};

/// Samples 0 <= Phi(x, xi) <= C(x)/p (1 + |xi|^p) at random nodes. Norms of xi
/// are log-uniform in [1e-3, 1e3]; every fourth sample uses the conformal
/// direction I/sqrt(2), which maximises det xi for a given norm.
inline GrowthReport check_growth(const PolyconvexSpec& spec, long samples, std::uint64_t seed,
                                 std::size_t max_witnesses = 8) {
  spec.validate();
  require(samples > 0, "check_growth: sample count must be positive");
  const PolarGrid& g = spec.nu.grid;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  GrowthReport report;
  report.samples = samples;
  for (long s = 0; s < samples; ++s) {
    const std::size_t n = pick(rng);
    const Mat2 dir = (s % 4 == 3) ? (1.0 / std::sqrt(2.0)) * Mat2::identity()
                                  : detail::random_direction(rng);
    const double norm = detail::log_uniform(rng, 1e-3, 1e3);
    const Mat2 xi = norm * dir;
    const NodePoint x = node_point(g, n);
    const double phi = spec.phi(n, x, xi);
    const double bound = spec.growth_c.values[n] / spec.p * (1.0 + pow_p(norm * norm, spec.p));
    const double tol = 1e-12 * (1.0 + std::abs(bound));
    const bool low = phi < -tol;
    const bool high = phi > bound + tol;
    if (low) ++report.lower_violations;
    if (high) ++report.upper_violations;
    if ((low || high) && report.witnesses.size() < max_witnesses)
      report.witnesses.push_back({x.R, x.theta, xi, phi, bound});
  }
  return report;
}

struct SubdifferentialReport {
  long trials = 0;
  long violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double equality_slack = 0.0;  ///< slack at a = b, exactly zero
  Mat2 witness_a, witness_b;
};

/// Slack of (1/p)|b|^p >= (1/p)|a|^p + |a|^(p-2) a.(b-a) + (1/2)|a|^(p-2)|b-a|^2.
inline double subdifferential_slack(const Mat2& a, const Mat2& b, double p) {
  const double na = frobenius_sq(a);
  const double w = pow_pm2(na, p);
  const Mat2 diff = b - a;
  return pow_p(frobenius_sq(b), p) / p -
         (pow_p(na, p) / p + w * dot(a, diff) + 0.5 * w * frobenius_sq(diff));
}

/// Random pairs with entries in [-1, 1]; every fifth pair has a = 0, every
/// fifth b = a, every fifth b = t a (colinear, t in [-3, 3]).
inline SubdifferentialReport check_subdifferential(double p, long trials, std::uint64_t seed,
                                                   double slack_tolerance = 1e-12) {
  require_exponent(p);
  require(trials > 0, "check_subdifferential: trial count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  auto random_matrix = [&] { return Mat2{entry(rng), entry(rng), entry(rng), entry(rng)}; };
  SubdifferentialReport report;
  report.trials = trials;
  const Mat2 probe = random_matrix();
  report.equality_slack = subdifferential_slack(probe, probe, p);
  for (long t = 0; t < trials; ++t) {
    Mat2 a = random_matrix();
    Mat2 b = random_matrix();
    switch (t % 5) {
      case 1: a = Mat2{}; break;
      case 2: b = a; break;
      case 3: b = scale(rng) * a; break;
      default: break;
    }
    const double slack = subdifferential_slack(a, b, p);
    if (slack < report.min_slack) report.min_slack = slack;
    if (slack < -slack_tolerance) {
      if (report.violations == 0) {
        report.witness_a = a;
        report.witness_b = b;
      }
      ++report.violations;
    }
  }
  return report;
}

struct ConvexityReport {
  long trials = 0;
  long violations = 0;
  double worst_gap = 0.0;  ///< largest Psi(mid) - average found
};

/// Midpoint convexity of (xi, d) -> Psi(x, xi, d) over random pairs at random nodes.
inline ConvexityReport check_psi_convexity(const PolyconvexSpec& spec, long trials,
                                           std::uint64_t seed) {
  spec.validate();
  require(trials > 0, "check_psi_convexity: trial count must be positive");
  const PolarGrid& g = spec.nu.grid;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  ConvexityReport report;
  report.trials = trials;
  for (long t = 0; t < trials; ++t) {
    const NodePoint x = node_point(g, pick(rng));
    const Mat2 xz{entry(rng), entry(rng), entry(rng), entry(rng)};
    const Mat2 xw{entry(rng), entry(rng), entry(rng), entry(rng)};
    const double dz = entry(rng), dw = entry(rng);
    const double mid = spec.psi(x, 0.5 * (xz + xw), 0.5 * (dz + dw)).value;
    const double avg = 0.5 * (spec.psi(x, xz, dz).value + spec.psi(x, xw, dw).value);
    const double gap = mid - avg;
    report.worst_gap = std::max(report.worst_gap, gap);
    if (gap > 1e-12 * (1.0 + std::abs(avg))) ++report.violations;
  }
  return report;
}

}  // namespace diskcert
