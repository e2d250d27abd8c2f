#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ehrenfest/potential.hpp"
#include "ehrenfest/spectral_grid.hpp"

namespace ehrenfest {

/// Critical nonlinearity exponent 1 + d*sigma/2.
double critical_alpha(int dimension, int sigma);

/// Scalar parameters of one semiclassical run.
struct SimConfig {
  double epsilon = 0.01;
  int dimension = 1;
  int sigma = 1;
  double lambda = 1.0;
  double alpha = 1.5;
  double alpha_c = 1.5;  ///< set by validate()
  double horizon = 1.0;

  double dt = 0.0;            ///< full-solver step; 0 selects dt_per_eps * epsilon
  double dt_per_eps = 0.05;
  double flow_dt = 0.0;       ///< trajectory step; 0 selects min(1e-3, pde_dt())
  double envelope_dt = 1e-3;  ///< envelope-solver step
  std::size_t envelope_points = 512;
  double envelope_extent = 10.0;  ///< envelope half-width in units of the 99.99%-mass radius
  GridPolicy grid{};
  bool dealias = false;

  /// Checks invariants and recomputes alpha_c. Throws ConfigError.
  void validate();

  double pde_dt() const noexcept { return dt > 0.0 ? dt : dt_per_eps * epsilon; }
  double flow_step() const noexcept;

  bool operator==(const SimConfig&) const = default;
};

/// Called at each sample time with the current field; return false to stop.
using SnapshotObserver = std::function<bool(double t, const WaveField& psi)>;

/// Strang-split propagation of
///   i eps psi_t + eps^2/2 Lap psi = V psi + lambda eps^alpha |psi|^(2 sigma) psi
/// on psi0's grid. Kinetic half-steps are the Fourier multipliers
/// exp(-i eps h |k|^2 / 4); the potential and nonlinearity share one
/// position-space phase exp(-i h (V + lambda eps^alpha |psi|^(2 sigma)) / eps).
/// sample_times must be nondecreasing and within [0, cfg.horizon]. Throws
/// InvalidRunError when the boundary-mass guard trips and DivergedError on
/// non-finite values.
void propagate_nls(const SimConfig& cfg, const Potential& potential, const WaveField& psi0,
                   std::span<const double> sample_times, const SnapshotObserver& observer);

std::vector<WaveField> propagate_nls(const SimConfig& cfg, const Potential& potential,
                                     const WaveField& psi0, std::span<const double> sample_times);

}  // namespace ehrenfest
