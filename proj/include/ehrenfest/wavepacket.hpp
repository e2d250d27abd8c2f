#pragma once

#include <span>
#include <variant>
#include <vector>

#include "ehrenfest/envelope_solver.hpp"
#include "ehrenfest/hamiltonian_flow.hpp"
#include "ehrenfest/nls_solver.hpp"
#include "ehrenfest/spectral_grid.hpp"

namespace ehrenfest {

/// Unit-mass Gaussian (pi w^2)^(-d/4) exp(-|y - c|^2 / (2 w^2)).
struct GaussianProfile {
  double width = 1.0;
  Vec center_offset{};
  bool operator==(const GaussianProfile&) const = default;
};

/// Initial packet eps^(-d/4) a((x - x0)/sqrt(eps)) exp(i (x - x0).xi0 / eps)
/// with a = amplitude * profile. A tabulated profile is a WaveField on its own
/// y-grid, evaluated by band-limited interpolation.
struct PacketSpec {
  int dimension = 1;
  std::variant<GaussianProfile, WaveField> envelope = GaussianProfile{};
  Vec x0{};
  Vec xi0{};
  complex amplitude{1.0, 0.0};
};

/// amplitude * a(y) sampled on a y-grid.
WaveField sample_envelope(const PacketSpec& spec, const Grid& y_grid);

/// 99.99%-mass radius of the profile about y = 0.
double envelope_radius(const PacketSpec& spec);

/// Default envelope grid: [-H, H)^d with H = cfg.envelope_extent * radius
/// and cfg.envelope_points per axis.
Grid envelope_grid(const PacketSpec& spec, const SimConfig& cfg);

/// Samples the initial packet on `grid`. Throws ConfigError when the
/// oscillation xi0/eps is under-resolved (h > eps*pi/(4|xi0|) on an axis).
WaveField build_initial(const PacketSpec& spec, const SimConfig& cfg, const Grid& grid);

/// eps^(-d/4) u(t, (x - x(t))/sqrt(eps)) exp(i (S(t) + xi(t).(x - x(t)))/eps)
/// on `grid`, with u interpolated band-limited from the envelope snapshot at t
/// and the phase evaluated exactly at the grid points. Throws RangeError when t
/// is not covered and ConfigError when the packet centre is too close to the
/// grid boundary.
WaveField reconstruct(const EnvelopeRun& env, const Trajectory& traj, const SimConfig& cfg,
                      double t, const Grid& grid);

/// Sum of the two initial packets on `grid`.
WaveField superpose(const PacketSpec& first, const PacketSpec& second, const SimConfig& cfg,
                    const Grid& grid);

/// True when both packets start at the same phase-space point.
bool same_phase_point(const PacketSpec& first, const PacketSpec& second);

/// Band-limited (trigonometric) interpolant of `table` evaluated on the tensor
/// product of target coordinates `targets[axis]`; targets outside the table's
/// domain evaluate to zero. Output is row-major over the targets.
std::vector<complex> interpolate_band_limited(const WaveField& table,
                                              std::span<const std::vector<double>> targets);

}  // namespace ehrenfest
