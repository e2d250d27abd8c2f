#pragma once

// Strang splitting driver shared by the full and envelope solvers.
//
// A run of n equal steps K(h/2) P(h) K(h/2) is executed with adjacent
// kinetic half-steps merged:
//   K(h/2) P K(h) P K(h) ... P K(h/2),
// which is algebraically the same map. The state lives in the FFT buffer in
// position space between calls.
//
// Everything runs in long double: double-precision FFT round trips bias the
// discrete mass by a fraction of an ulp per step, which over 10^4-10^5 steps
// exceeds the 1e-12 mass-conservation budget.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "ehrenfest/errors.hpp"
#include "ehrenfest/spectral_grid.hpp"

namespace ehrenfest::detail {

using xcomplex = std::complex<long double>;

/// In-place unnormalized long-double FFT over a grid (FFTW_ESTIMATE plans).
class ExtendedFourier {
 public:
  explicit ExtendedFourier(const Grid& grid);
  ~ExtendedFourier();
  ExtendedFourier(const ExtendedFourier&) = delete;
  ExtendedFourier& operator=(const ExtendedFourier&) = delete;

  std::span<xcomplex> buffer() noexcept;
  void forward() noexcept;
  void backward() noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};


class SplitStepEngine {
 public:
  /// Kinetic flow exp(-i * kinetic_scale * |k|^2 * h); `dealias` zeroes modes
  /// beyond 2/3 of the Nyquist index on every axis.
  SplitStepEngine(const Grid& grid, double kinetic_scale, bool dealias)
      : grid_(grid), fft_(grid), kinetic_scale_(kinetic_scale), ksq_(grid.size(), 0.0),
        keep_(grid.size(), 1.0) {
    for (int ax = 0; ax < grid.dimension(); ++ax) {
      const Axis& a = grid.axis(ax);
      for (std::size_t i = 0; i < ksq_.size(); ++i) {
        const std::size_t ia = grid.indices(i)[ax];
        const double k = a.wavenumber(ia);
        ksq_[i] += k * k;
        if (dealias) {
          const auto n = static_cast<double>(a.points);
          const double m = std::abs(k) * a.length / (2.0 * std::numbers::pi);
          if (m > n / 3.0) keep_[i] = 0.0;
        }
      }
    }
  }

  std::span<xcomplex> state() noexcept { return fft_.buffer(); }

  /// Copy of the current state rounded to double.
  WaveField field(double epsilon) {
    const auto buf = fft_.buffer();
    std::vector<complex> v(buf.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = complex(static_cast<double>(buf[i].real()), static_cast<double>(buf[i].imag()));
    }
    return WaveField(grid_, std::move(v), epsilon);
  }
  const Grid& grid() const noexcept { return grid_; }

  void load(std::span<const complex> values) {
    auto buf = fft_.buffer();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = xcomplex(values[i].real(), values[i].imag());
  }

  /// Advances from t0 to t1 in ceil((t1-t0)/max_dt) equal steps.
  /// `phase(psi, t_mid, h)` applies the position-space substep of step size h
  /// centred at t_mid. `check(t)` runs every `check_every` steps and at t1,
  /// with the state in position space.
  template <typename Phase, typename Check>
  void advance(double t0, double t1, double max_dt, Phase&& phase, Check&& check,
               std::size_t check_every = 512) {
    if (!(t1 > t0)) return;
    const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / max_dt - 1e-9));
    const double h = (t1 - t0) / static_cast<double>(steps);
    prepare(h);
    std::size_t done = 0;
    while (done < steps) {
      const std::size_t chunk = std::min(check_every, steps - done);
      kinetic(half_);
      for (std::size_t s = 0; s < chunk; ++s) {
        const double t_mid = t0 + (static_cast<double>(done + s) + 0.5) * h;
        phase(state(), t_mid, h);
        kinetic(s + 1 < chunk ? full_ : half_);
      }
      done += chunk;
      check(done == steps ? t1 : t0 + static_cast<double>(done) * h);
    }
  }

 private:
  void prepare(double h) {
    if (h == prepared_h_) return;
    prepared_h_ = h;
    const long double inv_n = 1.0L / static_cast<long double>(grid_.size());
    half_.resize(ksq_.size());
    full_.resize(ksq_.size());
    for (std::size_t i = 0; i < ksq_.size(); ++i) {
      const long double a = static_cast<long double>(kinetic_scale_) * ksq_[i] * h;
      half_[i] = std::polar(keep_[i] * inv_n, -0.5L * a);
      full_[i] = std::polar(keep_[i] * inv_n, -a);
    }
  }

  void kinetic(const std::vector<xcomplex>& mult) {
    fft_.forward();
    auto buf = fft_.buffer();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= mult[i];
    fft_.backward();
  }

  Grid grid_;
  ExtendedFourier fft_;
  double kinetic_scale_;
  std::vector<double> ksq_;
  std::vector<long double> keep_;
  std::vector<xcomplex> half_;
  std::vector<xcomplex> full_;
  double prepared_h_ = -1.0;
};

/// |z|^(2 sigma) for integer sigma >= 1.
template <class R>
R modulus_power(const std::complex<R>& z, int sigma) {
  const R m2 = std::norm(z);
  R p = m2;
  for (int i = 1; i < sigma; ++i) p *= m2;
  return p;
}

}  // namespace ehrenfest::detail
