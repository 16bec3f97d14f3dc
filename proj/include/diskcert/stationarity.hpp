#pragma once

// Weak Euler-Lagrange residuals for the incompressible and compressible
// settings, and recovery of a pressure for smooth incompressible candidates.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "diskcert/diffops.hpp"
#include "diskcert/energies.hpp"
#include "diskcert/fourier.hpp"

namespace diskcert {

struct StationaryCandidate {
  VectorField u;
  std::variant<PDirichletSpec, PolyconvexSpec> spec;
  std::optional<ScalarField> lambda;            ///< incompressible only
  std::optional<VectorField> grad_lambda;       ///< Cartesian, optional
  double det_tolerance = 1e-6;

  bool incompressible() const { return std::holds_alternative<PDirichletSpec>(spec); }
  double p() const {
    return std::visit([](const auto& s) { return s.p; }, spec);
  }
  const ScalarField& nu() const {
    return std::visit([](const auto& s) -> const ScalarField& { return s.nu; }, spec);
  }
};

// ---------------------------------------------------------------------------
// Test basis: zeta_q(R) {cos j theta, sin j theta} in either component, with
// zeta_q(R) = (1 - s^2)^4 T_{q-1}(s), s the affine image of [r0, r1] on [-1, 1].

struct TestBasisSpec {
  int max_mode = 8;
  int radial_count = 4;
  double r0 = 0.1;
  double r1 = 0.9;

  std::string describe() const {
    return "zeta_q(R)*{cos,sin}(j theta) e_c, j<=" + std::to_string(max_mode) +
           ", q<=" + std::to_string(radial_count) + ", zeta_q=(1-s^2)^4 T_{q-1}(s) on [" +
           std::to_string(r0) + "," + std::to_string(r1) + "]";
  }
};

struct TestFunction {
  int component = 0;
  int mode = 0;
  bool sine = false;
  int q = 1;
  VectorField eta;
};

inline double chebyshev(int n, double s) {
  double t0 = 1.0, t1 = s;
  if (n == 0) return t0;
  for (int m = 1; m < n; ++m) {
    const double t2 = 2.0 * s * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

inline double radial_bump(double R, double r0, double r1, int q) {
  if (R <= r0 || R >= r1) return 0.0;
  const double s = (2.0 * R - r0 - r1) / (r1 - r0);
  const double w = 1.0 - s * s;
  return w * w * w * w * chebyshev(q - 1, s);
}

inline std::vector<TestFunction> make_test_basis(const PolarGrid& grid, const TestBasisSpec& spec) {
  require(0.0 < spec.r0 && spec.r0 < spec.r1 && spec.r1 < 1.0,
          "test basis: need 0 < r0 < r1 < 1");
  require(spec.max_mode >= 0 && spec.max_mode <= grid.max_mode(), "test basis: mode beyond Nyquist");
  require(spec.radial_count >= 1, "test basis: need at least one radial bump");
  std::vector<TestFunction> basis;
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j <= spec.max_mode; ++j) {
      for (int trig = 0; trig < (j == 0 ? 1 : 2); ++trig) {
        for (int q = 1; q <= spec.radial_count; ++q) {
          const bool sine = trig == 1;
          ScalarField s = sample(grid, [&](double R, double t) {
            return radial_bump(R, spec.r0, spec.r1, q) * (sine ? std::sin(j * t) : std::cos(j * t));
          });
          VectorField eta(grid);
          eta.data(c) = std::move(s.values);
          basis.push_back({c, j, sine, q, std::move(eta)});
        }
      }
    }
  }
  return basis;
}

struct ResidualReport {
  struct Entry {
    int component = 0;
    int mode = 0;
    bool sine = false;
    int q = 1;
    double residual = 0.0;
    double normalized = 0.0;
  };
  std::vector<Entry> entries;
  double max_normalized = 0.0;
  std::string basis;
};

namespace detail {

inline ResidualReport weak_residuals(const MatrixField& stress, double sigma_sq_max,
                                     const std::vector<TestFunction>& basis,
                                     const std::string& description) {
  ResidualReport report;
  report.basis = description;
  for (const auto& tf : basis) {
    const MatrixField grad_eta = gradient(tf.eta);
    const double r = integrate(matrix_dot(stress, grad_eta));
    const double scale = weighted_norm(grad_eta, Measure::dx) * (1.0 + sigma_sq_max);
    const double normalized = scale > 0.0 ? std::abs(r) / scale : 0.0;
    require(std::isfinite(r), "ELE residual: non-finite value");
    report.entries.push_back({tf.component, tf.mode, tf.sine, tf.q, r, normalized});
    report.max_normalized = std::max(report.max_normalized, normalized);
  }
  return report;
}

inline void require_measure_preserving(const MatrixField& grad_u, double tol, const char* where) {
  for (std::size_t n = 0; n < grad_u.m11.size(); ++n) {
    const double d = det(grad_u.at(n));
    if (!(std::abs(d - 1.0) <= tol))
      throw Error(std::string(where) + ": det grad u deviates from 1 by " +
                  std::to_string(std::abs(d - 1.0)));
  }
}

}  // namespace detail

/// r(eta) = int p nu |grad u|^(p-2) grad u . grad eta + p lambda cof grad u . grad eta dx,
/// normalised by ||grad eta||_{L2} (1 + ||sigma||_inf^2).
inline ResidualReport ele_residual_incompressible(const StationaryCandidate& c,
                                                  const TestBasisSpec& basis_spec = {}) {
  require(c.incompressible(), "ele_residual_incompressible: candidate is compressible");
  require(c.lambda.has_value(), "ele_residual_incompressible: pressure lambda missing");
  const auto& spec = std::get<PDirichletSpec>(c.spec);
  spec.validate();
  const PolarGrid& g = c.u.grid;
  const MatrixField grad_u = gradient(c.u);
  detail::require_measure_preserving(grad_u, c.det_tolerance, "ele_residual_incompressible");
  const ScalarField s2 = sigma_squared(spec.nu, grad_u, spec.p);
  const MatrixField cof_u = cof(grad_u);
  MatrixField stress(g);
  for (std::size_t n = 0; n < stress.m11.size(); ++n)
    stress.set(n, spec.p * s2.values[n] * grad_u.at(n) + spec.p * (*c.lambda).values[n] * cof_u.at(n));
  return detail::weak_residuals(stress, max_abs(s2), make_test_basis(g, basis_spec),
                                basis_spec.describe());
}

/// r(eta) = int (nu |grad u|^(p-2) grad u + d_xi Psi + d_d Psi cof grad u) . grad eta dx.
inline ResidualReport ele_residual_compressible(const StationaryCandidate& c,
                                                const TestBasisSpec& basis_spec = {}) {
  require(!c.incompressible(), "ele_residual_compressible: candidate is incompressible");
  const auto& spec = std::get<PolyconvexSpec>(c.spec);
  spec.validate();
  const PolarGrid& g = c.u.grid;
  const MatrixField grad_u = gradient(c.u);
  const ScalarField s2 = sigma_squared(spec.nu, grad_u, spec.p);
  MatrixField stress(g);
  for (std::size_t n = 0; n < stress.m11.size(); ++n) {
    const Mat2 G = grad_u.at(n);
    const PsiEval pe = spec.psi(node_point(g, n), G, det(G));
    stress.set(n, s2.values[n] * G + pe.d_xi + pe.d_d * cof(G));
  }
  return detail::weak_residuals(stress, max_abs(s2), make_test_basis(g, basis_spec),
                                basis_spec.describe());
}

struct PressureRecovery {
  VectorField grad_lambda;  ///< Cartesian g ~ grad lambda
  ScalarField curl;         ///< curl g; vanishes iff g is a gradient
  double max_curl = 0.0;
};

/// Solves p (cof grad u) g = -div(p nu |grad u|^(p-2) grad u) pointwise, using
/// div(cof grad u) = 0. Requires a smooth measure-preserving u.
inline PressureRecovery recover_pressure_gradient(const VectorField& u, const PDirichletSpec& spec,
                                                  double det_tolerance = 1e-6) {
  spec.validate();
  const PolarGrid& g = u.grid;
  const MatrixField grad_u = gradient(u);
  detail::require_measure_preserving(grad_u, det_tolerance, "recover_pressure_gradient");
  const ScalarField s2 = sigma_squared(spec.nu, grad_u, spec.p);
  const VectorField div_s = divergence(s2 * grad_u);
  PressureRecovery out{VectorField(g), ScalarField(g), 0.0};
  for (std::size_t n = 0; n < div_s.c1.size(); ++n) {
    const Mat2 G = grad_u.at(n);
    // (cof G)^-1 = G^T / det G
    const auto v = apply(transpose(G), {div_s.c1[n], div_s.c2[n]});
    const double d = det(G);
    out.grad_lambda.c1[n] = -v[0] / d;
    out.grad_lambda.c2[n] = -v[1] / d;
  }
  out.curl = curl(out.grad_lambda);
  out.max_curl = max_abs(out.curl);
  return out;
}

enum class PathFamily { radial_then_angular, angular_then_radial };

namespace detail {

// Integral of the cubic interpolant over each cell interval [R_i, R_{i+1}].
inline std::vector<double> interval_integrals(std::span<const double> f, double h) {
  const int n = static_cast<int>(f.size());
  std::vector<double> out(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    if (i == 0)
      out[i] = h / 24.0 * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
    else if (i == n - 2)
      out[i] = h / 24.0 * (f[n - 4] - 5 * f[n - 3] + 19 * f[n - 2] + 9 * f[n - 1]);
    else
      out[i] = h / 24.0 * (-f[i - 1] + 13 * f[i] + 13 * f[i + 1] - f[i + 2]);
  }
  return out;
}

// int_{R_base}^{R_i} f dR for every i.
inline std::vector<double> radial_primitive(std::span<const double> f, double h, int base) {
  const auto pieces = interval_integrals(f, h);
  std::vector<double> out(f.size(), 0.0);
  for (int i = base + 1; i < static_cast<int>(f.size()); ++i) out[i] = out[i - 1] + pieces[i - 1];
  for (int i = base - 1; i >= 0; --i) out[i] = out[i + 1] - pieces[i];
  return out;
}

// int_{theta_base}^{theta_k} f dtheta along the counter-clockwise arc, spectrally.
inline std::vector<double> angular_primitive(const ModeSpectrum& s, int i, int base_k) {
  const PolarGrid& g = s.grid;
  auto H = [&](double t) {
    double v = 0.0;
    for (int j = 1; j <= s.j_max; ++j)
      v += (s.A(0, j, i) * std::sin(j * t) - s.B(0, j, i) * std::cos(j * t)) / j;
    return v;
  };
  const double tb = g.theta(base_k);
  const double hb = H(tb);
  std::vector<double> out(g.n_theta());
  for (int k = 0; k < g.n_theta(); ++k) {
    double arc = g.theta(k) - tb;
    if (arc < 0.0) arc += 2.0 * std::numbers::pi;
    out[k] = s.A(0, 0, i) * arc + H(g.theta(k)) - hb;
  }
  return out;
}

}  // namespace detail

/// lambda(x) = path integral of g from the base node; lambda(base) = 0.
inline ScalarField integrate_pressure(const VectorField& grad_lambda, int base_i, int base_k,
                                      PathFamily family = PathFamily::radial_then_angular,
                                      double curl_tolerance = 1e-4) {
  const PolarGrid& g = grad_lambda.grid;
  require(base_i >= 0 && base_i < g.n_r() && base_k >= 0 && base_k < g.n_theta(),
          "integrate_pressure: base node outside grid");
  const double max_curl = max_abs(curl(grad_lambda));
  require(max_curl <= curl_tolerance,
          "integrate_pressure: curl " + std::to_string(max_curl) + " above tolerance; no pressure exists");
  const VectorField polar = to_polar(grad_lambda);
  // R * g_theta, the integrand of the angular legs.
  ScalarField rg_theta(g);
  for (int i = 0; i < g.n_r(); ++i)
    for (int k = 0; k < g.n_theta(); ++k)
      rg_theta(i, k) = g.radius(i) * polar.c2[g.index(i, k)];
  const ModeSpectrum ang = decompose(rg_theta);

  auto radial_leg = [&](int k) {
    std::vector<double> fr(g.n_r());
    for (int i = 0; i < g.n_r(); ++i) fr[i] = polar.c1[g.index(i, k)];
    return detail::radial_primitive(fr, g.dr(), base_i);
  };

  ScalarField lambda(g);
  if (family == PathFamily::radial_then_angular) {
    const auto rad = radial_leg(base_k);
    for (int i = 0; i < g.n_r(); ++i) {
      const auto arc = detail::angular_primitive(ang, i, base_k);
      for (int k = 0; k < g.n_theta(); ++k) lambda(i, k) = rad[i] + arc[k];
    }
  } else {
    const auto arc = detail::angular_primitive(ang, base_i, base_k);
    for (int k = 0; k < g.n_theta(); ++k) {
      const auto rad = radial_leg(k);
      for (int i = 0; i < g.n_r(); ++i) lambda(i, k) = arc[k] + rad[i];
    }
  }
  return lambda;
}

}  // namespace diskcert
