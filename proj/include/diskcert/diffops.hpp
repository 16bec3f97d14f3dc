#pragma once

// Polar-frame differential operators on the cell-centred grid, 2x2 cofactor
// algebra, weighted norms and the polar max-norm.
//
// Gradients use the polar decomposition
//     grad u = u_,R (x) e_R + R^-1 u_,theta (x) e_theta,
// with spectral theta-derivatives and fourth-order finite differences in R
// (one-sided fourth-order stencils in the two cells nearest each radial end).

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "diskcert/fourier.hpp"
#include "diskcert/grid.hpp"

namespace diskcert {

// ---------------------------------------------------------------------------
// Pointwise 2x2 algebra

/// cof A = [[a22, -a21], [-a12, a11]].
inline Mat2 cof(const Mat2& a) { return {a.a22, -a.a21, -a.a12, a.a11}; }
inline double det(const Mat2& a) { return a.a11 * a.a22 - a.a12 * a.a21; }
/// Frobenius inner product A . B.
inline double dot(const Mat2& a, const Mat2& b) {
  return a.a11 * b.a11 + a.a12 * b.a12 + a.a21 * b.a21 + a.a22 * b.a22;
}
inline double frobenius_sq(const Mat2& a) { return dot(a, a); }
inline double frobenius(const Mat2& a) { return std::sqrt(frobenius_sq(a)); }
inline Mat2 transpose(const Mat2& a) { return {a.a11, a.a21, a.a12, a.a22}; }
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}
inline std::array<double, 2> apply(const Mat2& a, std::array<double, 2> v) {
  return {a.a11 * v[0] + a.a12 * v[1], a.a21 * v[0] + a.a22 * v[1]};
}

// ---------------------------------------------------------------------------
// Matrix fields

inline MatrixField cof(const MatrixField& a) {
  MatrixField out(a.grid);
  for (std::size_t n = 0; n < a.m11.size(); ++n) out.set(n, cof(a.at(n)));
  return out;
}

inline ScalarField det(const MatrixField& a) {
  ScalarField out(a.grid);
  for (std::size_t n = 0; n < a.m11.size(); ++n) out.values[n] = det(a.at(n));
  return out;
}

inline ScalarField matrix_dot(const MatrixField& a, const MatrixField& b) {
  require_same_grid(a.grid, b.grid, "matrix_dot");
  ScalarField out(a.grid);
  for (std::size_t n = 0; n < a.m11.size(); ++n) out.values[n] = dot(a.at(n), b.at(n));
  return out;
}

inline ScalarField frobenius_sq(const MatrixField& a) { return matrix_dot(a, a); }

inline MatrixField transpose(const MatrixField& a) {
  MatrixField out(a.grid);
  for (std::size_t n = 0; n < a.m11.size(); ++n) out.set(n, transpose(a.at(n)));
  return out;
}

/// Pointwise matrix-vector product.
inline VectorField apply(const MatrixField& a, const VectorField& v) {
  require_same_grid(a.grid, v.grid, "apply");
  VectorField out(a.grid);
  for (std::size_t n = 0; n < v.c1.size(); ++n) {
    const auto r = apply(a.at(n), {v.c1[n], v.c2[n]});
    out.c1[n] = r[0];
    out.c2[n] = r[1];
  }
  return out;
}

inline MatrixField operator*(const ScalarField& w, MatrixField a) {
  require_same_grid(w.grid, a.grid, "ScalarField * MatrixField");
  for (std::size_t n = 0; n < a.m11.size(); ++n) a.set(n, w.values[n] * a.at(n));
  return a;
}

// ---------------------------------------------------------------------------
// Derivatives

/// d/dR of R-major data, fourth order everywhere.
inline std::vector<double> radial_derivative(const PolarGrid& g, std::span<const double> f) {
  const int nr = g.n_r();
  const int nt = g.n_theta();
  require(nr >= 5, "radial_derivative: need at least 5 radial cells for the stencil");
  const double s = 1.0 / (12.0 * g.dr());
  std::vector<double> out(f.size());
  auto at = [&](int i, int k) { return f[static_cast<std::size_t>(i) * nt + k]; };
  for (int k = 0; k < nt; ++k) {
    for (int i = 0; i < nr; ++i) {
      double d;
      if (i == 0) {
        d = -25 * at(0, k) + 48 * at(1, k) - 36 * at(2, k) + 16 * at(3, k) - 3 * at(4, k);
      } else if (i == 1) {
        d = -3 * at(0, k) - 10 * at(1, k) + 18 * at(2, k) - 6 * at(3, k) + at(4, k);
      } else if (i == nr - 2) {
        d = 3 * at(nr - 1, k) + 10 * at(nr - 2, k) - 18 * at(nr - 3, k) + 6 * at(nr - 4, k) -
            at(nr - 5, k);
      } else if (i == nr - 1) {
        d = 25 * at(nr - 1, k) - 48 * at(nr - 2, k) + 36 * at(nr - 3, k) - 16 * at(nr - 4, k) +
            3 * at(nr - 5, k);
      } else {
        d = at(i - 2, k) - 8 * at(i - 1, k) + 8 * at(i + 1, k) - at(i + 2, k);
      }
      out[static_cast<std::size_t>(i) * nt + k] = d * s;
    }
  }
  return out;
}

inline ScalarField dR(const ScalarField& f) {
  ScalarField out(f.grid);
  out.values = radial_derivative(f.grid, f.values);
  return out;
}

inline VectorField dR(const VectorField& f) {
  VectorField out(f.grid);
  out.c1 = radial_derivative(f.grid, f.c1);
  out.c2 = radial_derivative(f.grid, f.c2);
  return out;
}

/// Cartesian gradient of a vector field: entry (a, b) = d u_a / d x_b.
inline MatrixField gradient(const VectorField& u) {
  const PolarGrid& g = u.grid;
  const VectorField ur = dR(u);
  const VectorField ut = dtheta(u);
  MatrixField out(g);
  for (int i = 0; i < g.n_r(); ++i) {
    const double inv_r = 1.0 / g.radius(i);
    for (int k = 0; k < g.n_theta(); ++k) {
      const std::size_t n = g.index(i, k);
      const double c = g.cos_theta(k), s = g.sin_theta(k);
      const double r1 = ur.c1[n], r2 = ur.c2[n];
      const double t1 = ut.c1[n] * inv_r, t2 = ut.c2[n] * inv_r;
      out.set(n, {r1 * c - t1 * s, r1 * s + t1 * c, r2 * c - t2 * s, r2 * s + t2 * c});
    }
  }
  return out;
}

/// Gradient of a scalar in two representations: Cartesian (g1, g2) and the
/// scaled polar pair (R lambda_,R, lambda_,theta) = components of R grad lambda
/// in the frame (e_R, e_theta).
struct ScalarGradient {
  VectorField cartesian;
  VectorField polar_scaled;
};

inline ScalarGradient scalar_gradient(const ScalarField& f) {
  const PolarGrid& g = f.grid;
  const ScalarField fr = dR(f);
  const ScalarField ft = dtheta(f);
  ScalarGradient out{VectorField(g), VectorField(g)};
  for (int i = 0; i < g.n_r(); ++i) {
    const double R = g.radius(i);
    for (int k = 0; k < g.n_theta(); ++k) {
      const std::size_t n = g.index(i, k);
      const double c = g.cos_theta(k), s = g.sin_theta(k);
      const double gr = fr.values[n], gt = ft.values[n] / R;
      out.cartesian.c1[n] = gr * c - gt * s;
      out.cartesian.c2[n] = gr * s + gt * c;
      out.polar_scaled.c1[n] = R * fr.values[n];
      out.polar_scaled.c2[n] = ft.values[n];
    }
  }
  return out;
}

/// Polar components (v . e_R, v . e_theta) of a Cartesian vector field.
inline VectorField to_polar(const VectorField& v) {
  const PolarGrid& g = v.grid;
  VectorField out(g);
  for (int i = 0; i < g.n_r(); ++i) {
    for (int k = 0; k < g.n_theta(); ++k) {
      const std::size_t n = g.index(i, k);
      const double c = g.cos_theta(k), s = g.sin_theta(k);
      out.c1[n] = v.c1[n] * c + v.c2[n] * s;
      out.c2[n] = -v.c1[n] * s + v.c2[n] * c;
    }
  }
  return out;
}

/// Inverse of to_polar.
inline VectorField from_polar(const VectorField& p) {
  const PolarGrid& g = p.grid;
  VectorField out(g);
  for (int i = 0; i < g.n_r(); ++i) {
    for (int k = 0; k < g.n_theta(); ++k) {
      const std::size_t n = g.index(i, k);
      const double c = g.cos_theta(k), s = g.sin_theta(k);
      out.c1[n] = p.c1[n] * c - p.c2[n] * s;
      out.c2[n] = p.c1[n] * s + p.c2[n] * c;
    }
  }
  return out;
}

inline ScalarField divergence(const VectorField& v) {
  const MatrixField gv = gradient(v);
  ScalarField out(v.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n) out.values[n] = gv.m11[n] + gv.m22[n];
  return out;
}

/// Row-wise divergence: (div M)_a = sum_b d M_ab / d x_b.
inline VectorField divergence(const MatrixField& m) {
  VectorField row1(m.grid), row2(m.grid);
  row1.c1 = m.m11;
  row1.c2 = m.m12;
  row2.c1 = m.m21;
  row2.c2 = m.m22;
  return VectorField(divergence(row1), divergence(row2));
}

/// Scalar curl d_1 v_2 - d_2 v_1.
inline ScalarField curl(const VectorField& v) {
  const MatrixField gv = gradient(v);
  ScalarField out(v.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n) out.values[n] = gv.m21[n] - gv.m12[n];
  return out;
}

/// Weak divergence of a matrix field against a test field: int M . grad(phi) dx.
inline double weak_divergence(const MatrixField& m, const VectorField& test) {
  return integrate(matrix_dot(m, gradient(test)));
}

// ---------------------------------------------------------------------------
// Norms

inline double weighted_norm(const ScalarField& f, Measure measure) {
  return std::sqrt(integrate(multiply(f, f), measure));
}
inline double weighted_norm(const VectorField& f, Measure measure) {
  return std::sqrt(integrate(squared_norm(f), measure));
}
inline double weighted_norm(const MatrixField& f, Measure measure) {
  return std::sqrt(integrate(frobenius_sq(f), measure));
}

/// Components of a vector in the local frame (e_R, e_theta).
struct PolarVector {
  double y_R = 0.0;
  double y_theta = 0.0;
};

/// |y|_inf = max(|y_R|, |y_theta|). Absolute values keep the norm sign-free.
inline double polar_maxnorm(const PolarVector& y) {
  return std::max(std::abs(y.y_R), std::abs(y.y_theta));
}

/// Nodewise polar max-norm of a field already stored in polar components.
inline ScalarField polar_maxnorm(const VectorField& polar) {
  ScalarField out(polar.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] = polar_maxnorm(PolarVector{polar.c1[n], polar.c2[n]});
  return out;
}

}  // namespace diskcert
