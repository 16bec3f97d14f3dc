#pragma once

// Angular Fourier analysis of fields on the polar grid.
//
// Convention: per radius
//     f(R, theta) = A_0(R) + sum_{j>=1} A_j(R) cos(j theta) + B_j(R) sin(j theta),
// with A_0 the angular mean and A_j, B_j carrying the 1/pi prefactor, so that
// summing the modes reproduces f exactly for band-limited data. Band membership
// does not depend on the normalisation.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "diskcert/grid.hpp"

namespace diskcert {

namespace detail {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

// Batched ring transforms: one real-to-complex DFT per radius. Plans are
// created once per grid shape and reused through the new-array execute
// interface, which FFTW documents as thread-safe.
class RingTransform {
 public:
  static const RingTransform& get(int n_r, int n_theta) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<RingTransform>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{n_r, n_theta}];
    if (!slot) slot.reset(new RingTransform(n_r, n_theta));
    return *slot;
  }

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  int n_freq() const { return n_theta_ / 2 + 1; }

  /// Forward transform of R-major data; returns n_r * n_freq coefficients.
  std::vector<std::complex<double>> forward(std::span<const double> data) const {
    const std::size_t n = static_cast<std::size_t>(n_r_) * n_theta_;
    const std::size_t m = static_cast<std::size_t>(n_r_) * n_freq();
    auto in = fftw_alloc<double>(n);
    auto out = fftw_alloc<fftw_complex>(m);
    std::copy(data.begin(), data.end(), in.get());
    fftw_execute_dft_r2c(forward_, in.get(), out.get());
    std::vector<std::complex<double>> result(m);
    for (std::size_t q = 0; q < m; ++q) result[q] = {out[q][0], out[q][1]};
    return result;
  }

  /// Unnormalised inverse: data_k = sum_j X_j e^{i j theta_k} over the full
  /// Hermitian spectrum.
  std::vector<double> inverse(std::span<const std::complex<double>> coeffs) const {
    const std::size_t n = static_cast<std::size_t>(n_r_) * n_theta_;
    const std::size_t m = static_cast<std::size_t>(n_r_) * n_freq();
    auto in = fftw_alloc<fftw_complex>(m);
    auto out = fftw_alloc<double>(n);
    for (std::size_t q = 0; q < m; ++q) {
      in[q][0] = coeffs[q].real();
      in[q][1] = coeffs[q].imag();
    }
    fftw_execute_dft_c2r(inverse_, in.get(), out.get());
    return std::vector<double>(out.get(), out.get() + n);
  }

  RingTransform(const RingTransform&) = delete;
  RingTransform& operator=(const RingTransform&) = delete;

 private:
  RingTransform(int n_r, int n_theta) : n_r_(n_r), n_theta_(n_theta) {
    const std::size_t n = static_cast<std::size_t>(n_r) * n_theta;
    const std::size_t m = static_cast<std::size_t>(n_r) * n_freq();
    auto in = fftw_alloc<double>(n);
    auto out = fftw_alloc<fftw_complex>(m);
    int len[] = {n_theta};
    const int nf = n_freq();
    forward_ = fftw_plan_many_dft_r2c(1, len, n_r, in.get(), nullptr, 1, n_theta, out.get(),
                                      nullptr, 1, nf, FFTW_ESTIMATE);
    inverse_ = fftw_plan_many_dft_c2r(1, len, n_r, out.get(), nullptr, 1, nf, in.get(), nullptr,
                                      1, n_theta, FFTW_ESTIMATE);
    require(forward_ != nullptr && inverse_ != nullptr, "fftw: planning failed");
  }

  int n_r_;
  int n_theta_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace detail

/// Radial coefficient arrays A_j(R_i), B_j(R_i) for each field component.
struct ModeSpectrum {
  struct Component {
    std::vector<double> a;  // (j_max + 1) * n_r, index j * n_r + i
    std::vector<double> b;  // b[0 * n_r + i] unused (zero)
  };

  PolarGrid grid;
  int j_max = 0;
  std::vector<Component> components;

  ModeSpectrum() = default;
  ModeSpectrum(const PolarGrid& g, int jmax, int n_components) : grid(g), j_max(jmax) {
    require(jmax >= 0 && jmax <= g.max_mode(),
            "ModeSpectrum: j_max must satisfy 0 <= j_max < n_theta/2");
    const std::size_t len = static_cast<std::size_t>(jmax + 1) * g.n_r();
    components.assign(n_components, Component{std::vector<double>(len, 0.0),
                                              std::vector<double>(len, 0.0)});
  }

  double& A(int c, int j, int i) { return components[c].a[static_cast<std::size_t>(j) * grid.n_r() + i]; }
  double& B(int c, int j, int i) { return components[c].b[static_cast<std::size_t>(j) * grid.n_r() + i]; }
  double A(int c, int j, int i) const { return components[c].a[static_cast<std::size_t>(j) * grid.n_r() + i]; }
  double B(int c, int j, int i) const { return components[c].b[static_cast<std::size_t>(j) * grid.n_r() + i]; }

  /// Angular L^2 mass (1/2pi) int |f^(j)|^2 dtheta of mode j at radius i, summed
  /// over components.
  double mode_mass(int j, int i) const {
    double m = 0.0;
    for (std::size_t c = 0; c < components.size(); ++c) {
      const int ci = static_cast<int>(c);
      m += j == 0 ? A(ci, 0, i) * A(ci, 0, i)
                  : 0.5 * (A(ci, j, i) * A(ci, j, i) + B(ci, j, i) * B(ci, j, i));
    }
    return m;
  }
};

namespace detail {

inline void decompose_into(ModeSpectrum& s, int c, std::span<const double> data) {
  const PolarGrid& g = s.grid;
  const auto& tr = RingTransform::get(g.n_r(), g.n_theta());
  const auto X = tr.forward(data);
  const double inv_n = 1.0 / g.n_theta();
  const int nf = tr.n_freq();
  for (int i = 0; i < g.n_r(); ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * nf;
    s.A(c, 0, i) = X[row].real() * inv_n;
    for (int j = 1; j <= s.j_max; ++j) {
      s.A(c, j, i) = 2.0 * X[row + j].real() * inv_n;
      s.B(c, j, i) = -2.0 * X[row + j].imag() * inv_n;
    }
  }
}

inline std::vector<std::complex<double>> spectral_coefficients(const ModeSpectrum& s, int c) {
  const PolarGrid& g = s.grid;
  const int nf = g.n_theta() / 2 + 1;
  std::vector<std::complex<double>> X(static_cast<std::size_t>(g.n_r()) * nf);
  for (int i = 0; i < g.n_r(); ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * nf;
    X[row] = s.A(c, 0, i);
    for (int j = 1; j <= s.j_max; ++j) X[row + j] = {0.5 * s.A(c, j, i), -0.5 * s.B(c, j, i)};
  }
  return X;
}

inline std::vector<double> reconstruct_component(const ModeSpectrum& s, int c) {
  const auto& tr = RingTransform::get(s.grid.n_r(), s.grid.n_theta());
  return tr.inverse(spectral_coefficients(s, c));
}

inline int resolve_jmax(const PolarGrid& g, int j_max) {
  return j_max < 0 ? g.max_mode() : j_max;
}

}  // namespace detail

inline ModeSpectrum decompose(const ScalarField& f, int j_max = -1) {
  ModeSpectrum s(f.grid, detail::resolve_jmax(f.grid, j_max), 1);
  detail::decompose_into(s, 0, f.values);
  return s;
}

inline ModeSpectrum decompose(const VectorField& f, int j_max = -1) {
  ModeSpectrum s(f.grid, detail::resolve_jmax(f.grid, j_max), 2);
  detail::decompose_into(s, 0, f.c1);
  detail::decompose_into(s, 1, f.c2);
  return s;
}

inline ScalarField reconstruct_scalar(const ModeSpectrum& s) {
  require(s.components.size() == 1, "reconstruct_scalar: spectrum is not scalar");
  ScalarField out(s.grid);
  out.values = detail::reconstruct_component(s, 0);
  return out;
}

inline VectorField reconstruct_vector(const ModeSpectrum& s) {
  require(s.components.size() == 2, "reconstruct_vector: spectrum is not a vector spectrum");
  VectorField out(s.grid);
  out.c1 = detail::reconstruct_component(s, 0);
  out.c2 = detail::reconstruct_component(s, 1);
  return out;
}

/// Sets of angular modes used to describe the variation classes.
struct Band {
  enum class Kind {
    zero_only,       ///< {0}
    high,            ///< {j >= N}
    zero_plus_high,  ///< {0} u {j >= N}
    below,           ///< {j < N}
  };
  Kind kind = Kind::high;
  int N = 0;

  static Band zero() { return {Kind::zero_only, 0}; }
  static Band at_least(int n) { return {Kind::high, n}; }
  static Band zero_plus_at_least(int n) { return {Kind::zero_plus_high, n}; }
  static Band less_than(int n) { return {Kind::below, n}; }

  bool contains(int j) const {
    switch (kind) {
      case Kind::zero_only: return j == 0;
      case Kind::high: return j >= N;
      case Kind::zero_plus_high: return j == 0 || j >= N;
      case Kind::below: return j < N;
    }
    return false;
  }
};

inline ModeSpectrum restrict_to(ModeSpectrum s, const Band& band) {
  for (int c = 0; c < static_cast<int>(s.components.size()); ++c)
    for (int j = 0; j <= s.j_max; ++j)
      if (!band.contains(j))
        for (int i = 0; i < s.grid.n_r(); ++i) s.A(c, j, i) = s.B(c, j, i) = 0.0;
  return s;
}

namespace detail {
inline void check_band(const PolarGrid& g, const Band& band) {
  if (band.kind != Band::Kind::zero_only)
    require(band.N >= 0 && band.N <= g.max_mode(), "project_band: N beyond Nyquist");
}
}  // namespace detail

/// Orthogonal projection onto the given band; idempotent.
inline ScalarField project_band(const ScalarField& f, const Band& band) {
  detail::check_band(f.grid, band);
  return reconstruct_scalar(restrict_to(decompose(f), band));
}

inline VectorField project_band(const VectorField& f, const Band& band) {
  detail::check_band(f.grid, band);
  return reconstruct_vector(restrict_to(decompose(f), band));
}

/// Angular mean per radius (the zero mode), broadcast over theta.
inline ScalarField zero_mode(const ScalarField& f) {
  ScalarField out(f.grid);
  const PolarGrid& g = f.grid;
  for (int i = 0; i < g.n_r(); ++i) {
    double mean = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) mean += f(i, k);
    mean /= g.n_theta();
    for (int k = 0; k < g.n_theta(); ++k) out(i, k) = mean;
  }
  return out;
}

inline VectorField zero_mode(const VectorField& f) {
  return VectorField(zero_mode(f.component(0)), zero_mode(f.component(1)));
}

/// f minus its zero mode.
template <typename Field>
Field tilde(const Field& f) {
  return f - zero_mode(f);
}

/// Spectral theta-derivative of a scalar field (exact below Nyquist).
inline ScalarField dtheta(const ScalarField& f) {
  const PolarGrid& g = f.grid;
  const auto& tr = detail::RingTransform::get(g.n_r(), g.n_theta());
  auto X = tr.forward(f.values);
  const int nf = tr.n_freq();
  const double inv_n = 1.0 / g.n_theta();
  for (int i = 0; i < g.n_r(); ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * nf;
    for (int j = 0; j < nf; ++j) {
      // The Nyquist mode has no resolvable derivative.
      X[row + j] = (j == nf - 1) ? 0.0 : X[row + j] * std::complex<double>(0.0, j * inv_n);
    }
  }
  ScalarField out(g);
  out.values = tr.inverse(X);
  return out;
}

inline VectorField dtheta(const VectorField& f) {
  return VectorField(dtheta(f.component(0)), dtheta(f.component(1)));
}

/// Evaluates the trigonometric interpolant of ring i of component c at an
/// arbitrary angle.
inline double evaluate_ring(const ModeSpectrum& s, int c, int i, double theta) {
  double v = s.A(c, 0, i);
  for (int j = 1; j <= s.j_max; ++j)
    v += s.A(c, j, i) * std::cos(j * theta) + s.B(c, j, i) * std::sin(j * theta);
  return v;
}

struct BandContent {
  std::vector<double> per_radius;  ///< leakage fraction below N at each R_i
  double aggregate = 0.0;          ///< dx-weighted fraction over the disk
};

/// Fraction of angular L^2 mass in modes below N. A zero field reports 0.
template <typename Field>
BandContent band_content(const Field& f, int N) {
  const ModeSpectrum s = decompose(f);
  const PolarGrid& g = s.grid;
  require(N >= 0, "band_content: N must be non-negative");
  BandContent out;
  out.per_radius.assign(g.n_r(), 0.0);
  double below_total = 0.0;
  double total = 0.0;
  for (int i = 0; i < g.n_r(); ++i) {
    double below = 0.0, all = 0.0;
    for (int j = 0; j <= s.j_max; ++j) {
      const double m = s.mode_mass(j, i);
      all += m;
      if (j < N) below += m;
    }
    out.per_radius[i] = all > 0.0 ? below / all : 0.0;
    below_total += below * g.radius(i);
    total += all * g.radius(i);
  }
  out.aggregate = total > 0.0 ? below_total / total : 0.0;
  return out;
}

}  // namespace diskcert
