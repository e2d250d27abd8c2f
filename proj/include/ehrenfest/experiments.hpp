#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ehrenfest/envelope_solver.hpp"
#include "ehrenfest/hamiltonian_flow.hpp"
#include "ehrenfest/nls_solver.hpp"
#include "ehrenfest/potential.hpp"
#include "ehrenfest/wavepacket.hpp"

namespace ehrenfest {

/// Error time series of psi - (phi_1 + ...) at the sample times.
struct ErrorReport {
  double epsilon = 0.0;
  bool two_packet = false;
  std::vector<double> times;
  std::vector<double> err_l2;
  std::vector<double> err_sigma_eps;
  std::vector<double> err_h;  ///< NaN for two-packet runs
  double initial_norm = 0.0;  ///< ||psi(0)||
  double max_mass_drift = 0.0;  ///< max |mass(t)/mass(0) - 1| over the samples
  std::size_t grid_points = 0;
  bool valid = true;
  std::vector<std::string> notes;

  double sup_l2() const;
  double sup_sigma_eps() const;
  double sup_h() const;

  /// Header t,err_l2,err_sigma_eps,err_h.
  void write_csv(std::ostream& out) const;
};

enum class ErrorNorm { l2, sigma_eps };

/// Stop a comparison run once the chosen error exceeds `threshold`
/// (times ||psi(0)|| when `relative`).
struct StopRule {
  bool enabled = false;
  ErrorNorm norm = ErrorNorm::l2;
  double threshold = 0.0;
  bool relative = true;
};

/// Full solver against the wave-packet approximation built from one or two
/// packets. With one packet the envelope is linear when lambda = 0 or
/// alpha > alpha_c and nonlinear at alpha = alpha_c; two packets require
/// alpha = alpha_c and use independent nonlinear envelopes. Solver guard
/// failures propagate as exceptions.
ErrorReport run_comparison(const SimConfig& cfg, const Potential& potential,
                           std::span<const PacketSpec> packets,
                           std::span<const double> sample_times, const StopRule& stop = {});

ErrorReport compare_single(SimConfig cfg, const Potential& potential, const PacketSpec& spec,
                           double T, std::span<const double> sample_times);

/// Sigma_eps-only comparison for superposed data.
ErrorReport superposition_study(SimConfig cfg, const Potential& potential,
                                const PacketSpec& first, const PacketSpec& second, double T,
                                std::span<const double> sample_times);

/// `count` + 1 equally spaced times on [0, T].
/// Envelope of a single packet along its flow, sampled at the given times
/// (nonlinear envelope iff alpha = alpha_c and lambda != 0).
EnvelopeRun packet_envelope(SimConfig cfg, const Potential& potential, const PacketSpec& spec,
                            std::span<const double> sample_times);

std::vector<double> uniform_times(double T, std::size_t count);

struct SweepOptions {
  ErrorNorm norm = ErrorNorm::l2;
  std::size_t sample_count = 50;
  double slope_tolerance = 0.1;
  double max_fit_residual = 0.15;
  double min_slope = 0.33;  ///< two-packet runs pass when slope >= min_slope
  bool self_check = false;
  double self_check_tolerance = 0.05;
  unsigned threads = 1;
};

struct ConvergenceReport {
  std::vector<double> epsilons;  ///< strictly decreasing
  std::vector<double> errors;    ///< sup-in-time error per epsilon
  std::vector<ErrorReport> runs;
  double slope = 0.0;
  double intercept = 0.0;
  double fit_residual = 0.0;  ///< max |log err - fit|
  double expected_slope = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool self_check_run = false;
  double self_check_error = 0.0;
  double self_check_change = 0.0;  ///< relative change of the refined error
  bool valid = true;
  bool passed = false;
  std::vector<std::string> diagnostics;

  /// Header epsilon,sup_error,fitted_error.
  void write_csv(std::ostream& out) const;
};

/// Expected error exponent: 1/2 at alpha_c (or lambda = 0), min(1/2, alpha - alpha_c) above.
double expected_rate(const SimConfig& cfg);

/// Runs the comparison for each epsilon (in parallel) and fits the slope of
/// log sup_t err against log eps. Needs >= 3 distinct epsilons spanning at
/// least one decade (ConfigError otherwise).
ConvergenceReport sweep_epsilon(const SimConfig& base, const Potential& potential,
                                std::span<const PacketSpec> packets, double T,
                                std::span<const double> epsilons, const SweepOptions& options = {});

struct EhrenfestOptions {
  double sample_dt = 0.05;
  double max_relative_residual = 0.25;
  bool self_check = false;
  double self_check_tolerance = 0.05;
  unsigned threads = 1;
};

struct EhrenfestReport {
  std::vector<double> epsilons;  ///< strictly decreasing
  double delta = 0.1;
  double t_max = 0.0;
  std::vector<double> t_star;
  std::vector<bool> censored;
  std::vector<ErrorReport> runs;
  double slope = 0.0;      ///< dT*/dlog(1/eps)
  double intercept = 0.0;
  double relative_residual = 0.0;  ///< max_i |T*_i - fit_i| / T*_i
  bool strictly_increasing = false;
  bool all_censored = false;
  bool self_check_run = false;
  double self_check_change = 0.0;
  bool valid = true;
  bool passed = false;
  std::vector<std::string> diagnostics;

  /// Header epsilon,log_inv_epsilon,t_star,censored.
  void write_csv(std::ostream& out) const;
};

/// First time the L2 error exceeds delta * ||psi(0)||, located by linear
/// interpolation between samples; T_max (censored) when never exceeded.
double first_exceedance(const ErrorReport& run, double threshold, double t_max, bool& censored);

EhrenfestReport ehrenfest_study(const SimConfig& base, const Potential& potential,
                                const PacketSpec& spec, double delta,
                                std::span<const double> epsilons, double t_max,
                                const EhrenfestOptions& options = {});

/// (1/eps) ||N_I(t)||_L2 of the cross terms of eps^alpha_c |phi_1+phi_2|^(2 sigma)(phi_1+phi_2).
struct InteractionSeries {
  double epsilon = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  double integral = 0.0;         ///< trapezoidal time integral
  double crossing_measure = 0.0; ///< |I^eps(T)| for the configured gamma
  CrossingSet crossings;

  /// Header t,interaction.
  void write_csv(std::ostream& out) const;
};

InteractionSeries interaction_magnitude(const EnvelopeRun& first, const EnvelopeRun& second,
                                        const Trajectory& traj1, const Trajectory& traj2,
                                        const SimConfig& cfg, double T, double gamma);

struct InteractionReport {
  std::vector<double> epsilons;
  std::vector<InteractionSeries> series;
  bool monotone_decreasing = false;
  bool passed = false;

  /// Header epsilon,integral,crossing_measure.
  void write_csv(std::ostream& out) const;
};

/// Builds trajectories and nonlinear envelopes for both packets at each
/// epsilon and integrates the interaction term over [0, T].
InteractionReport interaction_study(const SimConfig& base, const Potential& potential,
                                    const PacketSpec& first, const PacketSpec& second, double T,
                                    std::span<const double> epsilons, double gamma,
                                    std::size_t sample_count, unsigned threads = 1);

/// Least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace ehrenfest
