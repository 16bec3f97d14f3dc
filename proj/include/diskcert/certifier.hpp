#pragma once

// Certificate quantities for the high-frequency uniqueness criteria:
//
//   sigma = sqrt(nu |grad u|^(p-2)),
//   l     : |sigma_,theta| <= l sigma,
//   n     : |R grad lambda|_inf <= n / sqrt(2)            * sigma^2,
//   m     : |R grad lambda|_inf <= sqrt(3) m / (2 sqrt 2) * sigma^2,
//   n* = n + l, m* = m + l.
//
// In the compressible setting lambda is replaced by q(x) = d_d Psi(x, grad u,
// det grad u). Integers are ceilings of grid suprema of the pointwise ratios;
// "for a.e. x" becomes "at every quadrature node".

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "diskcert/diffops.hpp"
#include "diskcert/energies.hpp"
#include "diskcert/fourier.hpp"
#include "diskcert/stationarity.hpp"

namespace diskcert {

/// Below this both numerator and denominator count as zero.
inline constexpr double kZeroLevel = 1e-12;
/// Round-off allowance when taking the ceiling of a supremum: a ratio of
/// 2 + 1e-15 certifies 2, not 3.
inline constexpr double kCeilSlack = 1e-9;
/// Threshold defining "strictly satisfied" nodes.
inline constexpr double kStrictMargin = 1e-10;

inline const double kFactorN = 1.0 / std::sqrt(2.0);
inline const double kFactorM = std::sqrt(3.0) / (2.0 * std::sqrt(2.0));

/// Smallest integer K >= 0 with lhs <= K * factor * unit at all nodes.
struct IntegerBound {
  std::optional<int> value;  ///< nullopt means unbounded
  double sup_ratio = 0.0;    ///< sup lhs / (factor * unit) over counted nodes
  ScalarField margin;        ///< K * factor * unit - lhs (unset when unbounded)

  bool bounded() const { return value.has_value(); }
};

/// Does the integer K satisfy lhs <= K * factor * unit at every node (with the
/// same round-off allowance used by the ceiling)?
inline bool bound_holds(const ScalarField& lhs, const ScalarField& unit, double factor, int K) {
  for (std::size_t n = 0; n < lhs.values.size(); ++n) {
    const double a = lhs.values[n], b = unit.values[n];
    if (b < kZeroLevel) {
      if (a >= kZeroLevel) return false;
      continue;
    }
    if (a > (K + kCeilSlack) * factor * b) return false;
  }
  return true;
}

inline IntegerBound ceil_bound(const ScalarField& lhs, const ScalarField& unit, double factor) {
  require_same_grid(lhs.grid, unit.grid, "ceil_bound");
  IntegerBound out;
  double sup = 0.0;
  for (std::size_t n = 0; n < lhs.values.size(); ++n) {
    const double a = lhs.values[n], b = unit.values[n];
    if (b < kZeroLevel) {
      if (a >= kZeroLevel) {
        out.sup_ratio = std::numeric_limits<double>::infinity();
        return out;
      }
      continue;
    }
    sup = std::max(sup, a / (factor * b));
  }
  out.sup_ratio = sup;
  const int K = std::max(0, static_cast<int>(std::ceil(sup - kCeilSlack)));
  out.value = K;
  out.margin = ScalarField(lhs.grid);
  for (std::size_t n = 0; n < lhs.values.size(); ++n)
    out.margin.values[n] = K * factor * unit.values[n] - lhs.values[n];
  return out;
}

inline ScalarField compute_sigma(const ScalarField& nu, const MatrixField& grad_u, double p) {
  require_exponent(p);
  require_nonnegative(nu, "nu");
  ScalarField s = sigma_squared(nu, grad_u, p);
  for (double& v : s.values) v = std::sqrt(v);
  return s;
}

inline ScalarField compute_sigma(const ScalarField& nu, const VectorField& u, double p) {
  return compute_sigma(nu, gradient(u), p);
}

/// l with |sigma_,theta| <= l sigma; unbounded where sigma = 0 but sigma_,theta != 0.
inline IntegerBound estimate_l(const ScalarField& sigma) {
  require_nonnegative(sigma, "sigma");
  ScalarField lhs = dtheta(sigma);
  for (double& v : lhs.values) v = std::abs(v);
  return ceil_bound(lhs, sigma, 1.0);
}

/// |R grad lambda|_inf from the scaled polar pair (R lambda_,R, lambda_,theta).
inline ScalarField pressure_lhs(const VectorField& polar_scaled) { return polar_maxnorm(polar_scaled); }

inline IntegerBound estimate_n(const VectorField& polar_scaled_grad, const ScalarField& sigma_sq) {
  return ceil_bound(pressure_lhs(polar_scaled_grad), sigma_sq, kFactorN);
}

inline IntegerBound estimate_m(const VectorField& polar_scaled_grad, const ScalarField& sigma_sq) {
  return ceil_bound(pressure_lhs(polar_scaled_grad), sigma_sq, kFactorM);
}

inline IntegerBound estimate_n_incompressible(const ScalarField& lambda, const ScalarField& nu,
                                              const VectorField& u, double p) {
  return estimate_n(scalar_gradient(lambda).polar_scaled, sigma_squared(nu, gradient(u), p));
}

inline IntegerBound estimate_m_incompressible(const ScalarField& lambda, const ScalarField& nu,
                                              const VectorField& u, double p) {
  return estimate_m(scalar_gradient(lambda).polar_scaled, sigma_squared(nu, gradient(u), p));
}

/// q(x) = d_d Psi(x, grad u(x), det grad u(x)).
inline ScalarField det_derivative_field(const PolyconvexSpec& spec, const MatrixField& grad_u) {
  const PolarGrid& g = grad_u.grid;
  ScalarField q(g);
  for (std::size_t n = 0; n < q.values.size(); ++n) {
    const Mat2 G = grad_u.at(n);
    q.values[n] = spec.psi(node_point(g, n), G, det(G)).d_d;
  }
  require_finite(q, "det_derivative_field");
  return q;
}

inline IntegerBound estimate_n_compressible(const PolyconvexSpec& spec, const VectorField& u) {
  const MatrixField grad_u = gradient(u);
  const ScalarField q = det_derivative_field(spec, grad_u);
  return estimate_n(scalar_gradient(q).polar_scaled, sigma_squared(spec.nu, grad_u, spec.p));
}

inline IntegerBound estimate_m_compressible(const PolyconvexSpec& spec, const VectorField& u) {
  const MatrixField grad_u = gradient(u);
  const ScalarField q = det_derivative_field(spec, grad_u);
  return estimate_m(scalar_gradient(q).polar_scaled, sigma_squared(spec.nu, grad_u, spec.p));
}

struct SivSpectorResult {
  bool holds = false;
  double min_margin = 0.0;
  ScalarField margin;  ///< nu |grad u|^(p-2) - |d_d Psi| R
};

/// |d_d Psi(x, grad u, det grad u)| R <= nu |grad u|^(p-2), R taken as the radius |x|.
inline SivSpectorResult check_siv_spector(const PolyconvexSpec& spec, const VectorField& u) {
  spec.validate();
  const PolarGrid& g = u.grid;
  const MatrixField grad_u = gradient(u);
  const ScalarField q = det_derivative_field(spec, grad_u);
  const ScalarField s2 = sigma_squared(spec.nu, grad_u, spec.p);
  SivSpectorResult out{true, std::numeric_limits<double>::infinity(), ScalarField(g)};
  for (int i = 0; i < g.n_r(); ++i) {
    for (int k = 0; k < g.n_theta(); ++k) {
      const std::size_t n = g.index(i, k);
      const double m = s2.values[n] - std::abs(q.values[n]) * g.radius(i);
      out.margin.values[n] = m;
      out.min_margin = std::min(out.min_margin, m);
      if (m < -kZeroLevel * (1.0 + s2.values[n])) out.holds = false;
    }
  }
  return out;
}

enum class Setting { incompressible, compressible };

inline const char* to_string(Setting s) {
  return s == Setting::incompressible ? "incompressible" : "compressible";
}

struct CertificateReport {
  Setting setting = Setting::incompressible;
  double p = 2.0;
  std::optional<int> l, n, m, n_star, m_star;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool sigma0_positive = false;
  bool applicable = false;  ///< l, n and m all finite
  bool full_class = false;
  bool pressure_gradient_vanishes = false;
  double strict_measure_n = 0.0;  ///< dx-measure where the n-inequality holds strictly
  double strict_measure_m = 0.0;
  std::optional<bool> siv_spector;  ///< compressible only
  std::optional<double> sigma_integrability;  ///< int sigma^(4/(p-2)) dx, p > 2
  std::vector<std::string> notes;

  ScalarField sigma;
  IntegerBound l_bound, n_bound, m_bound;
};

namespace detail {

inline double strict_measure(const IntegerBound& b) {
  if (!b.bounded()) return 0.0;
  ScalarField indicator(b.margin.grid);
  for (std::size_t n = 0; n < indicator.values.size(); ++n)
    indicator.values[n] = b.margin.values[n] > kStrictMargin ? 1.0 : 0.0;
  return integrate(indicator);
}

inline CertificateReport assemble(Setting setting, double p, const ScalarField& sigma,
                                  const VectorField& polar_scaled_grad) {
  CertificateReport r;
  r.setting = setting;
  r.p = p;
  r.sigma = sigma;
  r.sigma_min = std::numeric_limits<double>::infinity();
  r.sigma_max = 0.0;
  for (double v : sigma.values) {
    r.sigma_min = std::min(r.sigma_min, v);
    r.sigma_max = std::max(r.sigma_max, v);
  }
  r.sigma0_positive = r.sigma_min > kZeroLevel;

  const ScalarField sigma_sq = multiply(sigma, sigma);
  r.l_bound = estimate_l(sigma);
  r.n_bound = estimate_n(polar_scaled_grad, sigma_sq);
  r.m_bound = estimate_m(polar_scaled_grad, sigma_sq);
  r.l = r.l_bound.value;
  r.n = r.n_bound.value;
  r.m = r.m_bound.value;
  r.applicable = r.l && r.n && r.m;
  if (r.applicable) {
    r.n_star = *r.n + *r.l;
    r.m_star = *r.m + *r.l;
    r.full_class = *r.n_star == 0 || *r.m_star == 0 || *r.m_star == 1;
  } else {
    r.notes.push_back("certificate not applicable: a required bound is unbounded");
  }
  r.pressure_gradient_vanishes = max_abs(pressure_lhs(polar_scaled_grad)) < kZeroLevel;
  if (r.applicable && !r.full_class && r.pressure_gradient_vanishes)
    r.notes.push_back(
        "pressure gradient vanishes: the expansion alone yields minimality in the full class "
        "although n* != 0 and m* > 1");
  r.strict_measure_n = strict_measure(r.n_bound);
  r.strict_measure_m = strict_measure(r.m_bound);
  if (p > 2.0) {
    ScalarField s(sigma.grid);
    for (std::size_t n = 0; n < s.values.size(); ++n)
      s.values[n] = std::pow(sigma.values[n], 4.0 / (p - 2.0));
    r.sigma_integrability = integrate(s);
  } else {
    r.notes.push_back("p = 2: the integrability requirement on sigma is vacuous");
  }
  if (!r.sigma0_positive)
    r.notes.push_back("sigma is not bounded away from zero: uniqueness clauses do not apply");
  return r;
}

}  // namespace detail

inline CertificateReport certify_incompressible(const VectorField& u, const PDirichletSpec& spec,
                                                const VectorField& polar_scaled_grad_lambda) {
  spec.validate();
  return detail::assemble(Setting::incompressible, spec.p, compute_sigma(spec.nu, u, spec.p),
                          polar_scaled_grad_lambda);
}

inline CertificateReport certify_incompressible(const VectorField& u, const PDirichletSpec& spec,
                                                const ScalarField& lambda) {
  return certify_incompressible(u, spec, scalar_gradient(lambda).polar_scaled);
}

inline CertificateReport certify_compressible(const VectorField& u, const PolyconvexSpec& spec) {
  spec.validate();
  const MatrixField grad_u = gradient(u);
  const ScalarField q = det_derivative_field(spec, grad_u);
  CertificateReport r = detail::assemble(Setting::compressible, spec.p,
                                         compute_sigma(spec.nu, grad_u, spec.p),
                                         scalar_gradient(q).polar_scaled);
  const SivSpectorResult ss = check_siv_spector(spec, u);
  r.siv_spector = ss.holds;
  r.notes.push_back("comparison criterion evaluated with R = |x|");
  if (spec.local_use_only)
    r.notes.push_back("Psi model " + spec.psi_name + " fails the global growth bound; local use only");
  return r;
}

/// Dispatches on the candidate's setting.
inline CertificateReport certify(const StationaryCandidate& c) {
  if (c.incompressible()) {
    const auto& spec = std::get<PDirichletSpec>(c.spec);
    if (c.grad_lambda) {
      VectorField polar = to_polar(*c.grad_lambda);
      const PolarGrid& g = polar.grid;
      for (int i = 0; i < g.n_r(); ++i)
        for (int k = 0; k < g.n_theta(); ++k) {
          const std::size_t n = g.index(i, k);
          polar.c1[n] *= g.radius(i);
          polar.c2[n] *= g.radius(i);
        }
      return certify_incompressible(c.u, spec, polar);
    }
    require(c.lambda.has_value(), "certify: incompressible candidate without pressure");
    return certify_incompressible(c.u, spec, *c.lambda);
  }
  require(!c.lambda && !c.grad_lambda, "certify: compressible candidate must not carry a pressure");
  return certify_compressible(c.u, std::get<PolyconvexSpec>(c.spec));
}

}  // namespace diskcert
