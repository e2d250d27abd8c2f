#pragma once

#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "ehrenfest/potential.hpp"
#include "ehrenfest/types.hpp"

namespace ehrenfest {

/// Classical state (x, xi) together with the accumulated action S.
struct PhaseState {
  Vec x{};
  Vec xi{};
  double action = 0.0;
};

/// Fitted exponential envelope |x(t)| + |xi(t)| <= prefactor * exp(rate * t).
struct GrowthFit {
  double prefactor = 0.0;
  double rate = 0.0;
};

/// A classical trajectory of H = |xi|^2/2 + V(x) sampled on a uniform time grid
/// t_n = n * dt, with the action S(t) = int_0^t (|xi|^2/2 - V(x)) ds.
class Trajectory {
 public:
  Trajectory(Potential potential, double dt, std::vector<PhaseState> samples);

  const Potential& potential() const noexcept { return potential_; }
  int dimension() const noexcept { return potential_.dimension(); }
  double dt() const noexcept { return dt_; }
  double horizon() const noexcept { return dt_ * static_cast<double>(samples_.size() - 1); }
  std::size_t size() const noexcept { return samples_.size(); }
  double time(std::size_t n) const noexcept { return dt_ * static_cast<double>(n); }
  const PhaseState& sample(std::size_t n) const { return samples_.at(n); }
  std::span<const PhaseState> samples() const noexcept { return samples_; }

  /// Initial energy |xi_0|^2/2 + V(x_0).
  double energy0() const noexcept { return energy0_; }

  /// State at an arbitrary time, by cubic Hermite interpolation using the
  /// exact time derivatives (xi, -grad V, Lagrangian) at the bracketing samples.
  /// Throws RangeError outside [0, horizon()].
  PhaseState state_at(double t) const;

  /// |xi(t)|^2/2 + V(x(t)) at an interpolated time.
  double energy(double t) const;

  /// Largest |E(t_n) - energy0()| over the samples.
  double max_energy_drift() const;

  /// Per-axis extremes of x and the largest |xi| over the samples.
  Vec min_position() const;
  Vec max_position() const;
  double max_momentum() const;

  GrowthFit growth_fit() const;

  /// CSV with header t,x...,xi...,S,E.
  void write_csv(std::ostream& out) const;

 private:
  Potential potential_;
  double dt_;
  std::vector<PhaseState> samples_;
  double energy0_;
};

/// Stormer-Verlet (kick-drift-kick) integration of xdot = xi, xidot = -grad V
/// on [0, T], with the action accumulated by the discrete Lagrangian of the
/// same scheme. The step count is ceil(T/dt), so the horizon covers T.
///
/// Throws ConfigError for dt <= 0 or T <= 0 and DivergedError (with the last
/// finite sample time) when the state overflows.
Trajectory integrate_flow(const Potential& potential, std::span<const double> x0,
                          std::span<const double> xi0, double T, double dt);

/// {t in [0,T] : |x1(t) - x2(t)| <= eps^gamma} as disjoint ordered intervals.
struct CrossingSet {
  double gamma = 0.0;
  double epsilon = 0.0;
  std::vector<std::pair<double, double>> intervals;
  double total_measure = 0.0;
};

/// Detects the near-crossing set on the shared sample grid with one linear
/// interpolation per endpoint. Throws ConfigError on mismatched grids or
/// gamma outside (0, 1/2), RangeError when either trajectory stops before T.
CrossingSet crossing_set(const Trajectory& a, const Trajectory& b, double gamma, double epsilon,
                         double T);

}  // namespace ehrenfest
