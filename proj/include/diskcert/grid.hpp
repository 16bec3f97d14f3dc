#pragma once

// Cell-centred polar sampling of the unit disk and the field containers that
// live on it. Radial nodes sit at R_i = (i + 1/2)/n_r, so neither the origin
// nor the boundary circle is ever sampled; angular nodes are uniform and
// periodic. Storage is R-major: index = i * n_theta + k.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "diskcert/error.hpp"

namespace diskcert {

enum class Measure {
  dx,          ///< area element R dR dtheta
  dx_over_R2,  ///< singular element R^-1 dR dtheta
};

class PolarGrid {
 public:
  static constexpr int kMinRadial = 8;
  static constexpr int kMinAngular = 8;

  PolarGrid() = default;

  PolarGrid(int n_r, int n_theta) : n_r_(n_r), n_theta_(n_theta) {
    require(n_r >= kMinRadial, "PolarGrid: n_r must be >= " + std::to_string(kMinRadial));
    require(n_theta >= kMinAngular,
            "PolarGrid: n_theta must be >= " + std::to_string(kMinAngular));
    require(n_theta % 2 == 0, "PolarGrid: n_theta must be even");
    dr_ = 1.0 / n_r;
    dtheta_ = 2.0 * std::numbers::pi / n_theta;
    radius_.resize(n_r);
    for (int i = 0; i < n_r; ++i) radius_[i] = (i + 0.5) * dr_;
    theta_.resize(n_theta);
    cos_.resize(n_theta);
    sin_.resize(n_theta);
    for (int k = 0; k < n_theta; ++k) {
      theta_[k] = k * dtheta_;
      cos_[k] = std::cos(theta_[k]);
      sin_[k] = std::sin(theta_[k]);
    }
  }

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  std::size_t size() const { return static_cast<std::size_t>(n_r_) * n_theta_; }
  std::size_t index(int i, int k) const { return static_cast<std::size_t>(i) * n_theta_ + k; }

  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }
  double radius(int i) const { return radius_[i]; }
  double theta(int k) const { return theta_[k]; }
  double cos_theta(int k) const { return cos_[k]; }
  double sin_theta(int k) const { return sin_[k]; }
  std::span<const double> radii() const { return radius_; }
  std::span<const double> thetas() const { return theta_; }

  /// Largest angular mode the grid resolves without aliasing.
  int max_mode() const { return n_theta_ / 2 - 1; }

  /// Quadrature weight of node (i, .) for the given measure.
  double weight(int i, Measure measure) const {
    const double base = dr_ * dtheta_;
    return measure == Measure::dx ? radius_[i] * base : base / radius_[i];
  }

  friend bool operator==(const PolarGrid& a, const PolarGrid& b) {
    return a.n_r_ == b.n_r_ && a.n_theta_ == b.n_theta_;
  }

 private:
  int n_r_ = 0;
  int n_theta_ = 0;
  double dr_ = 0.0;
  double dtheta_ = 0.0;
  std::vector<double> radius_;
  std::vector<double> theta_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

inline PolarGrid make_grid(int n_r, int n_theta) { return PolarGrid(n_r, n_theta); }

inline void require_same_grid(const PolarGrid& a, const PolarGrid& b, const char* where) {
  require(a == b, std::string(where) + ": grid mismatch");
}

struct ScalarField {
  PolarGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const PolarGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator()(int i, int k) { return values[grid.index(i, k)]; }
  double operator()(int i, int k) const { return values[grid.index(i, k)]; }

  ScalarField& operator+=(const ScalarField& o) {
    require_same_grid(grid, o.grid, "ScalarField +=");
    for (std::size_t n = 0; n < values.size(); ++n) values[n] += o.values[n];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    require_same_grid(grid, o.grid, "ScalarField -=");
    for (std::size_t n = 0; n < values.size(); ++n) values[n] -= o.values[n];
    return *this;
  }
  ScalarField& operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
  }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }

/// Cartesian components (c1, c2) sampled on polar nodes.
struct VectorField {
  PolarGrid grid;
  std::vector<double> c1;
  std::vector<double> c2;

  VectorField() = default;
  explicit VectorField(const PolarGrid& g) : grid(g), c1(g.size(), 0.0), c2(g.size(), 0.0) {}
  VectorField(const ScalarField& x, const ScalarField& y) : grid(x.grid), c1(x.values), c2(y.values) {
    require_same_grid(x.grid, y.grid, "VectorField");
  }

  ScalarField component(int c) const {
    ScalarField out(grid);
    out.values = c == 0 ? c1 : c2;
    return out;
  }
  std::vector<double>& data(int c) { return c == 0 ? c1 : c2; }
  const std::vector<double>& data(int c) const { return c == 0 ? c1 : c2; }

  VectorField& operator+=(const VectorField& o) {
    require_same_grid(grid, o.grid, "VectorField +=");
    for (std::size_t n = 0; n < c1.size(); ++n) {
      c1[n] += o.c1[n];
      c2[n] += o.c2[n];
    }
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    require_same_grid(grid, o.grid, "VectorField -=");
    for (std::size_t n = 0; n < c1.size(); ++n) {
      c1[n] -= o.c1[n];
      c2[n] -= o.c2[n];
    }
    return *this;
  }
  VectorField& operator*=(double s) {
    for (std::size_t n = 0; n < c1.size(); ++n) {
      c1[n] *= s;
      c2[n] *= s;
    }
    return *this;
  }
};

inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
inline VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
inline VectorField operator*(double s, VectorField a) { return a *= s; }

/// Pointwise product of a scalar weight with a vector field.
inline VectorField operator*(const ScalarField& w, VectorField v) {
  require_same_grid(w.grid, v.grid, "ScalarField * VectorField");
  for (std::size_t n = 0; n < v.c1.size(); ++n) {
    v.c1[n] *= w.values[n];
    v.c2[n] *= w.values[n];
  }
  return v;
}

/// Dense 2x2 matrix, row-major entries a11 a12 / a21 a22.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  Mat2& operator+=(const Mat2& o) {
    a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22;
    return *this;
  }
  Mat2& operator*=(double s) {
    a11 *= s; a12 *= s; a21 *= s; a22 *= s;
    return *this;
  }
  friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
  friend Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
  friend Mat2 operator*(double s, Mat2 a) { return a *= s; }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

struct MatrixField {
  PolarGrid grid;
  std::vector<double> m11, m12, m21, m22;

  MatrixField() = default;
  explicit MatrixField(const PolarGrid& g)
      : grid(g), m11(g.size(), 0.0), m12(g.size(), 0.0), m21(g.size(), 0.0), m22(g.size(), 0.0) {}

  Mat2 at(std::size_t n) const { return {m11[n], m12[n], m21[n], m22[n]}; }
  Mat2 at(int i, int k) const { return at(grid.index(i, k)); }
  void set(std::size_t n, const Mat2& a) {
    m11[n] = a.a11;
    m12[n] = a.a12;
    m21[n] = a.a21;
    m22[n] = a.a22;
  }

  MatrixField& operator+=(const MatrixField& o) {
    require_same_grid(grid, o.grid, "MatrixField +=");
    for (std::size_t n = 0; n < m11.size(); ++n) set(n, at(n) + o.at(n));
    return *this;
  }
  MatrixField& operator-=(const MatrixField& o) {
    require_same_grid(grid, o.grid, "MatrixField -=");
    for (std::size_t n = 0; n < m11.size(); ++n) set(n, at(n) - o.at(n));
    return *this;
  }
};

inline MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
inline MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }

namespace detail {
inline void require_finite(std::span<const double> values, const char* where) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(std::string(where) + ": non-finite value");
  }
}
}  // namespace detail

inline void require_finite(const ScalarField& f, const char* where) {
  detail::require_finite(f.values, where);
}
inline void require_finite(const VectorField& f, const char* where) {
  detail::require_finite(f.c1, where);
  detail::require_finite(f.c2, where);
}
inline void require_finite(const MatrixField& f, const char* where) {
  for (const auto* v : {&f.m11, &f.m12, &f.m21, &f.m22}) detail::require_finite(*v, where);
}

/// Quadrature of f over the unit disk: midpoint rule in R, trapezoid in theta.
inline double integrate(const ScalarField& f, Measure measure = Measure::dx) {
  require_finite(f, "integrate");
  const PolarGrid& g = f.grid;
  double total = 0.0;
  for (int i = 0; i < g.n_r(); ++i) {
    double ring = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) ring += f(i, k);
    total += ring * g.weight(i, measure);
  }
  return total;
}

// Pointwise helpers used throughout the numerical modules.

inline ScalarField pointwise(const PolarGrid& grid, const std::function<double(std::size_t)>& fn) {
  ScalarField out(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) out.values[n] = fn(n);
  return out;
}

inline ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "multiply");
  ScalarField out(a.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n) out.values[n] = a.values[n] * b.values[n];
  return out;
}

inline ScalarField squared_norm(const VectorField& v) {
  ScalarField out(v.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] = v.c1[n] * v.c1[n] + v.c2[n] * v.c2[n];
  return out;
}

inline ScalarField dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid, "dot");
  ScalarField out(a.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] = a.c1[n] * b.c1[n] + a.c2[n] * b.c2[n];
  return out;
}

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs(const VectorField& f) {
  double m = 0.0;
  for (std::size_t n = 0; n < f.c1.size(); ++n)
    m = std::max({m, std::abs(f.c1[n]), std::abs(f.c2[n])});
  return m;
}

// Sampling of closed-form expressions at grid nodes.

using ScalarExpr = std::function<double(double R, double theta)>;
using VectorExpr = std::function<std::array<double, 2>(double R, double theta)>;

inline ScalarField sample(const PolarGrid& grid, const ScalarExpr& expr) {
  ScalarField out(grid);
  for (int i = 0; i < grid.n_r(); ++i)
    for (int k = 0; k < grid.n_theta(); ++k) out(i, k) = expr(grid.radius(i), grid.theta(k));
  require_finite(out, "sample");
  return out;
}

inline VectorField sample_vector(const PolarGrid& grid, const VectorExpr& expr) {
  VectorField out(grid);
  for (int i = 0; i < grid.n_r(); ++i) {
    for (int k = 0; k < grid.n_theta(); ++k) {
      const auto v = expr(grid.radius(i), grid.theta(k));
      const std::size_t n = grid.index(i, k);
      out.c1[n] = v[0];
      out.c2[n] = v[1];
    }
  }
  require_finite(out, "sample_vector");
  return out;
}

}  // namespace diskcert
