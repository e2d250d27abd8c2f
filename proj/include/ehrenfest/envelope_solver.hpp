#pragma once

#include <span>
#include <vector>

#include "ehrenfest/hamiltonian_flow.hpp"
#include "ehrenfest/spectral_grid.hpp"

namespace ehrenfest {

/// Snapshots of an envelope (profile) evolution in the blown-up frame
/// y = (x - x(t))/sqrt(eps), driven by Q(t) = Hess V(x(t)).
struct EnvelopeRun {
  Grid grid;
  double lambda = 0.0;
  int sigma = 1;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<WaveField> snapshots;
  /// Q at the trajectory sample times used to drive the run.
  std::vector<double> q_times;
  std::vector<Mat> q_samples;

  /// Snapshot recorded at time t (within 1e-9 relative); throws RangeError.
  const WaveField& snapshot_at(double t) const;
};

/// Strang-split solution of i v_t + 1/2 Lap v = 1/2 <Q(t) y, y> v, v(0) = a.
/// Q is linearly interpolated from the trajectory samples at each substep
/// midpoint. Snapshots are taken at `sample_times` (nondecreasing, within
/// [0, T]); when empty, at every step of a uniform grid of size <= dt.
EnvelopeRun propagate_envelope_linear(const WaveField& a, const Trajectory& traj, double T,
                                      double dt, std::span<const double> sample_times = {});

/// Same with the extra nonlinear potential lambda |u|^(2 sigma).
EnvelopeRun propagate_envelope_nonlinear(const WaveField& a, const Trajectory& traj,
                                         double lambda, int sigma, double T, double dt,
                                         std::span<const double> sample_times = {});

/// M_m(t) = max over |alpha|+|beta| <= m of ||y^alpha d^beta u(t)||, for
/// m = 0..k, plus least-squares exponential rates of each series.
struct MomentaSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> values;  ///< values[m][n]
  std::vector<double> rates;                ///< fitted c in M_m(t) ~ exp(c t)
  std::vector<double> fit_residuals;        ///< max |log M_m - fit|

  void write_csv(std::ostream& out) const;
};

MomentaSeries momenta_monitor(const EnvelopeRun& run, int k);

/// Radius containing 99.99% of the mass of a profile about y = 0.
double mass_radius(const WaveField& profile, double fraction = 0.9999);

}  // namespace ehrenfest
