#pragma once

// Closed-form reference maps, Psi models and coefficient profiles used by the
// tests, the acceptance suite and the CLI.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "diskcert/energies.hpp"

namespace diskcert {

using MapExpr = std::function<std::array<double, 2>(double R, double theta)>;
using GradientExpr = std::function<Mat2(double R, double theta)>;

/// A map u with its exact gradient. Construction re-checks the metadata: the
/// gradient against central differences and, for measure-preserving maps,
/// det grad u = 1 to 1e-8.
class ReferenceMap {
 public:
  ReferenceMap(std::string name, MapExpr map, GradientExpr grad, bool measure_preserving,
               std::optional<ScalarExpr> pressure = std::nullopt)
      : name_(std::move(name)),
        map_(std::move(map)),
        grad_(std::move(grad)),
        measure_preserving_(measure_preserving),
        pressure_(std::move(pressure)) {
    verify();
  }

  const std::string& name() const { return name_; }
  bool measure_preserving() const { return measure_preserving_; }
  /// Pressure for nu = 1, p = 2 when known in closed form.
  const std::optional<ScalarExpr>& pressure() const { return pressure_; }

  std::array<double, 2> operator()(double R, double theta) const { return map_(R, theta); }
  std::array<double, 2> at_xy(double x, double y) const {
    return map_(std::hypot(x, y), std::atan2(y, x));
  }
  Mat2 gradient(double R, double theta) const { return grad_(R, theta); }

  VectorField sample(const PolarGrid& grid) const { return sample_vector(grid, map_); }

  MatrixField sample_gradient(const PolarGrid& grid) const {
    MatrixField out(grid);
    for (int i = 0; i < grid.n_r(); ++i)
      for (int k = 0; k < grid.n_theta(); ++k)
        out.set(grid.index(i, k), grad_(grid.radius(i), grid.theta(k)));
    return out;
  }

 private:
  void verify() const {
    const double h = 1e-5;
    for (int a = 1; a <= 7; ++a) {
      for (int b = 0; b < 11; ++b) {
        const double R = a / 8.0;
        const double t = 2.0 * std::numbers::pi * b / 11.0 + 0.1;
        const double x = R * std::cos(t), y = R * std::sin(t);
        const auto px = at_xy(x + h, y), mx = at_xy(x - h, y);
        const auto py = at_xy(x, y + h), my = at_xy(x, y - h);
        const Mat2 fd{(px[0] - mx[0]) / (2 * h), (py[0] - my[0]) / (2 * h),
                      (px[1] - mx[1]) / (2 * h), (py[1] - my[1]) / (2 * h)};
        const Mat2 g = grad_(R, t);
        require(frobenius(fd - g) <= 1e-6 * (1.0 + frobenius(g)),
                "ReferenceMap " + name_ + ": gradient does not match the map");
        if (measure_preserving_)
          require(std::abs(det(g) - 1.0) <= 1e-8,
                  "ReferenceMap " + name_ + ": claimed measure-preserving but det != 1");
      }
    }
  }

  std::string name_;
  MapExpr map_;
  GradientExpr grad_;
  bool measure_preserving_;
  std::optional<ScalarExpr> pressure_;
};

inline ReferenceMap identity_map() {
  return ReferenceMap(
      "identity",
      [](double R, double t) { return std::array<double, 2>{R * std::cos(t), R * std::sin(t)}; },
      [](double, double) { return Mat2::identity(); }, true,
      ScalarExpr([](double, double) { return 0.0; }));
}

/// u_N = (R / sqrt N)(cos N theta, sin N theta); det grad u_N = 1 and
/// |grad u_N|^2 = N + 1/N.
inline ReferenceMap ncover_map(int N) {
  require(N >= 1, "ncover_map: N must be >= 1");
  const double s = std::sqrt(static_cast<double>(N));
  const double lambda_coef = (N * N - 1.0) / N;
  return ReferenceMap(
      "ncover" + std::to_string(N),
      [=](double R, double t) {
        return std::array<double, 2>{R / s * std::cos(N * t), R / s * std::sin(N * t)};
      },
      [=](double, double t) {
        // u_,R (x) e_R + R^-1 u_,theta (x) e_theta
        const double cn = std::cos(N * t), sn = std::sin(N * t);
        const double c = std::cos(t), si = std::sin(t);
        const double r1 = cn / s, r2 = sn / s;
        const double t1 = -s * sn, t2 = s * cn;
        return Mat2{r1 * c - t1 * si, r1 * si + t1 * c, r2 * c - t2 * si, r2 * si + t2 * c};
      },
      true, ScalarExpr([=](double R, double) { return lambda_coef * std::log(R); }));
}

/// Pressure of u_N for constant nu and exponent p: nu |grad u_N|^(p-2) (N^2-1)/N ln R.
inline ScalarExpr ncover_pressure(int N, double nu, double p) {
  const double w = nu * pow_pm2(N + 1.0 / N, p);
  const double coef = w * (N * N - 1.0) / N;
  return [=](double R, double) { return coef * std::log(R); };
}

inline ReferenceMap affine_map(const Mat2& A, std::string name = "affine") {
  const bool mp = std::abs(det(A) - 1.0) <= 1e-12;
  return ReferenceMap(
      std::move(name),
      [=](double R, double t) {
        const double x = R * std::cos(t), y = R * std::sin(t);
        return std::array<double, 2>{A.a11 * x + A.a12 * y, A.a21 * x + A.a22 * y};
      },
      [=](double, double) { return A; }, mp,
      mp ? std::optional<ScalarExpr>(ScalarExpr([](double, double) { return 0.0; }))
         : std::nullopt);
}

/// The measure-preserving entries of the gallery.
inline std::vector<ReferenceMap> reference_maps() {
  return {identity_map(), ncover_map(2), ncover_map(3),
          affine_map({2.0, 1.0, 1.0, 1.0}, "affine_sym"), affine_map({1.0, 0.5, 0.0, 1.0}, "shear")};
}

// ---------------------------------------------------------------------------
// Coefficient profiles

inline ScalarExpr constant_profile(double c) {
  return [=](double, double) { return c; };
}
/// a + b R^2
inline ScalarExpr radial_profile(double a, double b) {
  return [=](double R, double) { return a + b * R * R; };
}
/// scale * exp(cos(l theta))
inline ScalarExpr angular_profile(int l, double scale = 1.0) {
  return [=](double, double t) { return scale * std::exp(std::cos(l * t)); };
}

// ---------------------------------------------------------------------------
// Psi models

inline PsiFunction psi_zero() {
  return [](const NodePoint&, const Mat2&, double) { return PsiEval{}; };
}

/// gamma(x) (d - 1)^2
inline PsiFunction psi_det_penalty(ScalarExpr gamma) {
  return [gamma = std::move(gamma)](const NodePoint& x, const Mat2&, double d) {
    const double g = gamma(x.R, x.theta);
    return PsiEval{g * (d - 1.0) * (d - 1.0), Mat2{}, 2.0 * g * (d - 1.0)};
  };
}

/// -rho(x) d
inline PsiFunction psi_linear_det(ScalarExpr rho) {
  return [rho = std::move(rho)](const NodePoint& x, const Mat2&, double d) {
    const double r = rho(x.R, x.theta);
    return PsiEval{-r * d, Mat2{}, -r};
  };
}

/// -d^2, concave in d. Only used to show the convexity check has teeth.
inline PsiFunction psi_concave_det() {
  return [](const NodePoint&, const Mat2&, double d) { return PsiEval{-d * d, Mat2{}, -2.0 * d}; };
}

inline PolyconvexSpec make_polyconvex(const PolarGrid& grid, double p, const ScalarExpr& nu,
                                      PsiFunction psi, const ScalarExpr& growth_c,
                                      std::string name, bool local_use_only = false) {
  PolyconvexSpec spec{p, sample(grid, nu), std::move(psi), sample(grid, growth_c), std::move(name),
                      local_use_only};
  spec.validate();
  return spec;
}

/// nu/p |xi|^p with Psi = 0 and C = nu.
inline PolyconvexSpec spec_psi_zero(const PolarGrid& grid, double p, const ScalarExpr& nu) {
  return make_polyconvex(grid, p, nu, psi_zero(), nu, "zero");
}

/// Psi_A = gamma (d-1)^2. Fails the global growth bound for p = 2 (Psi grows
/// like |xi|^4), so it is flagged local-use-only; C = nu + gamma is reported.
inline PolyconvexSpec spec_det_penalty(const PolarGrid& grid, double p, const ScalarExpr& nu,
                                       const ScalarExpr& gamma) {
  ScalarExpr c = [=](double R, double t) { return nu(R, t) + gamma(R, t); };
  return make_polyconvex(grid, p, nu, psi_det_penalty(gamma), c, "det_penalty", true);
}

/// Psi_B = -rho d with 0 <= rho <= nu. For p = 2 the growth bound holds with
/// C = nu + rho, since |d| <= |xi|^2 / 2.
inline PolyconvexSpec spec_linear_det(const PolarGrid& grid, double p, const ScalarExpr& nu,
                                      const ScalarExpr& rho) {
  ScalarExpr c = [=](double R, double t) { return nu(R, t) + std::abs(rho(R, t)); };
  return make_polyconvex(grid, p, nu, psi_linear_det(rho), c, "linear_det");
}

}  // namespace diskcert
