#include "ehrenfest/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "ehrenfest/errors.hpp"
#include "split_step.hpp"
#include "text.hpp"

namespace ehrenfest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_critical(const SimConfig& cfg) { return std::abs(cfg.alpha - cfg.alpha_c) < 1e-12; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

double sup(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// claimed by exactly one worker and writes only its own slot, so results do
// not depend on scheduling. The first exception (by index) is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  auto body = [&](unsigned w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> sorted_epsilons(std::span<const double> epsilons, std::size_t min_count) {
  if (epsilons.size() < min_count) {
    throw ConfigError("at least " + std::to_string(min_count) + " epsilon values are required");
  }
  std::vector<double> eps(epsilons.begin(), epsilons.end());
  for (double e : eps) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("epsilon values must be positive");
  }
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end()) {
    throw ConfigError("epsilon values must be distinct");
  }
  return eps;
}

// The same run at half the time steps and twice the grid points.
SimConfig refined(SimConfig cfg) {
  if (cfg.dt > 0.0) {
    cfg.dt *= 0.5;
  } else {
    cfg.dt_per_eps *= 0.5;
  }
  cfg.flow_dt = 0.5 * cfg.flow_step();
  cfg.envelope_dt *= 0.5;
  cfg.grid.refine *= 2.0;
  return cfg;
}

std::vector<double> trajectory_times(double T, double dt) {
  const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  return uniform_times(T, std::max<std::size_t>(n, 1));
}

}  // namespace

// --- reports ---------------------------------------------------------------

double ErrorReport::sup_l2() const { return sup(err_l2); }
double ErrorReport::sup_sigma_eps() const { return sup(err_sigma_eps); }
double ErrorReport::sup_h() const { return two_packet ? kNaN : sup(err_h); }

void ErrorReport::write_csv(std::ostream& out) const {
  out << "t,err_l2,err_sigma_eps,err_h\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << fmt(times[i]) << ',' << fmt(err_l2[i]) << ',' << fmt(err_sigma_eps[i]) << ','
        << (two_packet ? std::string("nan") : fmt(err_h[i])) << '\n';
  }
}

void ConvergenceReport::write_csv(std::ostream& out) const {
  out << "epsilon,sup_error,fitted_error\n";
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double fit = std::exp(intercept + slope * std::log(epsilons[i]));
    out << fmt(epsilons[i]) << ',' << fmt(errors[i]) << ',' << fmt(fit) << '\n';
  }
}

void EhrenfestReport::write_csv(std::ostream& out) const {
  out << "epsilon,log_inv_epsilon,t_star,censored\n";
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    out << fmt(epsilons[i]) << ',' << fmt(-std::log(epsilons[i])) << ',' << fmt(t_star[i]) << ','
        << (censored[i] ? 1 : 0) << '\n';
  }
}

void InteractionSeries::write_csv(std::ostream& out) const {
  out << "t,interaction\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << fmt(times[i]) << ',' << fmt(values[i]) << '\n';
  }
}

void InteractionReport::write_csv(std::ostream& out) const {
  out << "epsilon,integral,crossing_measure\n";
  for (const auto& s : series) {
    out << fmt(s.epsilon) << ',' << fmt(s.integral) << ',' << fmt(s.crossing_measure) << '\n';
  }
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("line fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

std::vector<double> uniform_times(double T, std::size_t count) {
  if (count == 0) throw ConfigError("sample count must be positive");
  std::vector<double> t(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    t[i] = T * static_cast<double>(i) / static_cast<double>(count);
  }
  t.back() = T;
  return t;
}

double expected_rate(const SimConfig& cfg) {
  const double ac = critical_alpha(cfg.dimension, cfg.sigma);
  if (cfg.lambda == 0.0 || std::abs(cfg.alpha - ac) < 1e-12) return 0.5;
  return std::min(0.5, cfg.alpha - ac);
}

static EnvelopeRun envelope_along(const SimConfig& cfg, const PacketSpec& spec, const Trajectory& traj,
                           std::span<const double> sample_times) {
  const WaveField a = sample_envelope(spec, envelope_grid(spec, cfg));
  if (is_critical(cfg) && cfg.lambda != 0.0) {
    return propagate_envelope_nonlinear(a, traj, cfg.lambda, cfg.sigma, cfg.horizon,
                                        cfg.envelope_dt, sample_times);
  }
  return propagate_envelope_linear(a, traj, cfg.horizon, cfg.envelope_dt, sample_times);
}

// --- single comparison -------------------------------------------------------

ErrorReport run_comparison(const SimConfig& cfg_in, const Potential& potential,
                           std::span<const PacketSpec> packets,
                           std::span<const double> sample_times, const StopRule& stop) {
  SimConfig cfg = cfg_in;
  cfg.validate();
  if (packets.empty() || packets.size() > 2) throw ConfigError("one or two packets are supported");
  if (cfg.alpha < cfg.alpha_c - 1e-12) {
    throw ConfigError("alpha below the critical value " + text::format_double(cfg.alpha_c) +
                      " is not covered");
  }
  const bool critical = is_critical(cfg);
  const bool two = packets.size() == 2;
  if (two && !critical && cfg.lambda != 0.0) {
    throw ConfigError("two-packet runs require alpha = alpha_c");
  }
  for (const auto& p : packets) {
    if (p.dimension != cfg.dimension) throw ConfigError("packet dimension differs from config");
  }
  const double T = cfg.horizon;
  for (double t : sample_times) {
    if (t < 0.0 || t > T * (1.0 + 1e-12)) throw ConfigError("sample time outside [0, T]");
  }

  std::vector<Trajectory> trajs;
  double radius = 0.0;
  for (const auto& p : packets) {
    trajs.push_back(integrate_flow(potential, std::span(p.x0.data(), cfg.dimension),
                                   std::span(p.xi0.data(), cfg.dimension), T, cfg.flow_step()));
    radius = std::max(radius, envelope_radius(p));
  }
  std::vector<const Trajectory*> ptrs;
  for (const auto& t : trajs) ptrs.push_back(&t);
  const Grid grid = size_grid(ptrs, cfg.epsilon, radius, cfg.grid);

  WaveField psi0 = build_initial(packets[0], cfg, grid);
  if (two) psi0 += build_initial(packets[1], cfg, grid);

  std::vector<EnvelopeRun> envs;
  for (std::size_t k = 0; k < packets.size(); ++k) {
    envs.push_back(envelope_along(cfg, packets[k], trajs[k], sample_times));
  }

  ErrorReport rep;
  rep.epsilon = cfg.epsilon;
  rep.two_packet = two;
  rep.grid_points = grid.size();
  const double mass0 = psi0.mass();
  rep.initial_norm = std::sqrt(mass0);
  if (two && same_phase_point(packets[0], packets[1])) {
    rep.notes.push_back("packets share their initial phase-space point");
  }
  const double threshold = stop.relative ? stop.threshold * rep.initial_norm : stop.threshold;

  propagate_nls(cfg, potential, psi0, sample_times, [&](double t, const WaveField& psi) {
    WaveField w = psi;
    for (std::size_t k = 0; k < envs.size(); ++k) w -= reconstruct(envs[k], trajs[k], cfg, t, grid);
    rep.times.push_back(t);
    if (two) {
      rep.err_l2.push_back(norm_l2(w));
      rep.err_sigma_eps.push_back(norm_sigma_eps(w));
      rep.err_h.push_back(kNaN);
    } else {
      const NormTriple n = norm_triple(w, t, trajs[0]);
      rep.err_l2.push_back(n.l2);
      rep.err_sigma_eps.push_back(n.sigma_eps);
      rep.err_h.push_back(n.h_norm);
    }
    if (mass0 > 0.0) {
      rep.max_mass_drift = std::max(rep.max_mass_drift, std::abs(psi.mass() / mass0 - 1.0));
    }
    if (!stop.enabled) return true;
    const double e = stop.norm == ErrorNorm::l2 ? rep.err_l2.back() : rep.err_sigma_eps.back();
    return !(e > threshold);
  });
  return rep;
}

ErrorReport compare_single(SimConfig cfg, const Potential& potential, const PacketSpec& spec,
                           double T, std::span<const double> sample_times) {
  cfg.horizon = T;
  return run_comparison(cfg, potential, std::span(&spec, 1), sample_times);
}

EnvelopeRun packet_envelope(SimConfig cfg, const Potential& potential, const PacketSpec& spec,
                            std::span<const double> sample_times) {
  cfg.validate();
  if (spec.dimension != cfg.dimension) throw ConfigError("packet dimension differs from config");
  const Trajectory traj =
      integrate_flow(potential, std::span(spec.x0.data(), cfg.dimension),
                     std::span(spec.xi0.data(), cfg.dimension), cfg.horizon, cfg.flow_step());
  return envelope_along(cfg, spec, traj, sample_times);
}

ErrorReport superposition_study(SimConfig cfg, const Potential& potential,
                                const PacketSpec& first, const PacketSpec& second, double T,
                                std::span<const double> sample_times) {
  cfg.horizon = T;
  cfg.validate();
  if (!is_critical(cfg)) throw ConfigError("superposition requires alpha = alpha_c");
  const PacketSpec pair[2] = {first, second};
  ErrorReport rep = run_comparison(cfg, potential, pair, sample_times);
  const auto energy = [&](const PacketSpec& p) {
    return 0.5 * dot(p.xi0, p.xi0) + potential.value(p.x0);
  };
  if (std::abs(energy(first) - energy(second)) <= 1e-12 * std::max(1.0, std::abs(energy(first)))) {
    rep.notes.push_back("packets have equal classical energies; the large-time estimate assumes E1 != E2");
  }
  if (cfg.dimension != 1) {
    rep.notes.push_back("large-time superposition estimates are stated for d = 1");
  }
  return rep;
}

// --- epsilon sweep -----------------------------------------------------------

ConvergenceReport sweep_epsilon(const SimConfig& base, const Potential& potential,
                                std::span<const PacketSpec> packets, double T,
                                std::span<const double> epsilons, const SweepOptions& options) {
  ConvergenceReport rep;
  rep.epsilons = sorted_epsilons(epsilons, 3);
  if (rep.epsilons.front() / rep.epsilons.back() < 10.0 * (1.0 - 1e-12)) {
    throw ConfigError("epsilon values must span at least one decade");
  }
  SimConfig tmpl = base;
  tmpl.horizon = T;
  tmpl.validate();
  if (packets.empty() || packets.size() > 2) throw ConfigError("one or two packets are supported");
  const bool two = packets.size() == 2;

  rep.expected_slope = expected_rate(tmpl);
  if (two) {
    rep.lower = options.min_slope;
    rep.upper = std::numeric_limits<double>::infinity();
  } else {
    rep.lower = rep.expected_slope - options.slope_tolerance;
    rep.upper = rep.expected_slope + options.slope_tolerance;
  }
  const auto times = uniform_times(T, options.sample_count);
  const auto pick = [&](const ErrorReport& r) {
    return options.norm == ErrorNorm::l2 ? r.sup_l2() : r.sup_sigma_eps();
  };

  const std::size_t n = rep.epsilons.size();
  rep.runs.resize(n);
  std::vector<std::string> failures(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    SimConfig c = tmpl;
    c.epsilon = rep.epsilons[i];
    try {
      rep.runs[i] = run_comparison(c, potential, packets, times);
    } catch (const InvalidRunError& e) {
      failures[i] = e.what();
    } catch (const DivergedError& e) {
      failures[i] = e.what();
    }
  });
  rep.errors.assign(n, kNaN);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string tag = "epsilon " + text::format_double(rep.epsilons[i]) + ": ";
    if (!failures[i].empty()) {
      rep.valid = false;
      rep.diagnostics.push_back(tag + failures[i]);
      continue;
    }
    rep.errors[i] = pick(rep.runs[i]);
    if (!(rep.errors[i] > 0.0)) {
      rep.valid = false;
      rep.diagnostics.push_back(tag + "error is zero; no slope can be fitted");
    }
    for (const auto& note : rep.runs[i].notes) rep.diagnostics.push_back(tag + note);
  }
  if (!rep.valid) return rep;

  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(rep.epsilons[i]);
    ly[i] = std::log(rep.errors[i]);
  }
  const LineFit f = fit_line(lx, ly);
  rep.slope = f.slope;
  rep.intercept = f.intercept;
  for (std::size_t i = 0; i < n; ++i) {
    rep.fit_residual = std::max(rep.fit_residual, std::abs(ly[i] - (f.intercept + f.slope * lx[i])));
  }

  bool self_ok = true;
  if (options.self_check) {
    SimConfig c = refined(tmpl);
    c.epsilon = rep.epsilons.back();
    rep.self_check_run = true;
    try {
      rep.self_check_error = pick(run_comparison(c, potential, packets, times));
      rep.self_check_change = std::abs(rep.self_check_error - rep.errors.back()) / rep.errors.back();
      self_ok = rep.self_check_change < options.self_check_tolerance;
      if (!self_ok) rep.diagnostics.push_back("refined rerun changed the smallest-epsilon error by " +
                                              text::format_double(rep.self_check_change));
    } catch (const InvalidRunError& e) {
      rep.valid = false;
      rep.diagnostics.push_back(std::string("refined rerun: ") + e.what());
      return rep;
    } catch (const DivergedError& e) {
      rep.valid = false;
      rep.diagnostics.push_back(std::string("refined rerun: ") + e.what());
      return rep;
    }
  }

  const bool in_window = rep.slope >= rep.lower && rep.slope <= rep.upper;
  if (!in_window) rep.diagnostics.push_back("slope outside the expected window");
  const bool fit_ok = rep.fit_residual < options.max_fit_residual;
  if (!fit_ok) rep.diagnostics.push_back("log-log fit residual too large");
  rep.passed = in_window && fit_ok && self_ok;
  return rep;
}

// --- Ehrenfest time ----------------------------------------------------------

double first_exceedance(const ErrorReport& run, double threshold, double t_max, bool& censored) {
  censored = false;
  for (std::size_t i = 0; i < run.err_l2.size(); ++i) {
    if (run.err_l2[i] > threshold) {
      if (i == 0) return 0.0;
      const double e0 = run.err_l2[i - 1], e1 = run.err_l2[i];
      const double t0 = run.times[i - 1], t1 = run.times[i];
      return t0 + (threshold - e0) / (e1 - e0) * (t1 - t0);
    }
  }
  censored = true;
  return t_max;
}

EhrenfestReport ehrenfest_study(const SimConfig& base, const Potential& potential,
                                const PacketSpec& spec, double delta,
                                std::span<const double> epsilons, double t_max,
                                const EhrenfestOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("T_max must be positive");
  if (!(options.sample_dt > 0.0)) throw ConfigError("sample_dt must be positive");
  EhrenfestReport rep;
  rep.epsilons = sorted_epsilons(epsilons, 3);
  rep.delta = delta;
  rep.t_max = t_max;
  SimConfig tmpl = base;
  tmpl.horizon = t_max;
  tmpl.validate();
  if (tmpl.dimension != 1 || tmpl.sigma != 1) {
    rep.diagnostics.push_back("the logarithmic horizon is established for d = sigma = 1 only");
  }

  const auto times = trajectory_times(t_max, options.sample_dt);
  const StopRule stop{true, ErrorNorm::l2, delta, true};
  const std::size_t n = rep.epsilons.size();
  rep.runs.resize(n);
  std::vector<std::string> failures(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    SimConfig c = tmpl;
    c.epsilon = rep.epsilons[i];
    try {
      rep.runs[i] = run_comparison(c, potential, std::span(&spec, 1), times, stop);
    } catch (const InvalidRunError& e) {
      failures[i] = e.what();
    } catch (const DivergedError& e) {
      failures[i] = e.what();
    }
  });

  rep.t_star.assign(n, kNaN);
  rep.censored.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i].empty()) {
      rep.valid = false;
      rep.diagnostics.push_back("epsilon " + text::format_double(rep.epsilons[i]) + ": " +
                                failures[i]);
      continue;
    }
    bool cens = false;
    rep.t_star[i] =
        first_exceedance(rep.runs[i], delta * rep.runs[i].initial_norm, t_max, cens);
    rep.censored[i] = cens;
  }
  if (!rep.valid) return rep;

  rep.all_censored = std::all_of(rep.censored.begin(), rep.censored.end(), [](bool b) { return b; });
  if (rep.all_censored) {
    rep.diagnostics.push_back("threshold never crossed for any epsilon; all horizons censored");
    rep.passed = true;
    return rep;
  }

  rep.strictly_increasing = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(rep.t_star[i] > rep.t_star[i - 1])) rep.strictly_increasing = false;
  }
  std::vector<double> lx(n);
  for (std::size_t i = 0; i < n; ++i) lx[i] = -std::log(rep.epsilons[i]);
  const LineFit f = fit_line(lx, rep.t_star);
  rep.slope = f.slope;
  rep.intercept = f.intercept;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = std::abs(rep.t_star[i] - (f.intercept + f.slope * lx[i]));
    rep.relative_residual =
        std::max(rep.relative_residual, rep.t_star[i] > 0.0 ? res / rep.t_star[i]
                                                            : std::numeric_limits<double>::infinity());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rep.censored[i]) {
      rep.diagnostics.push_back("epsilon " + text::format_double(rep.epsilons[i]) +
                                ": censored at T_max");
    }
  }

  bool self_ok = true;
  if (options.self_check) {
    // Refine the largest-epsilon uncensored run; it is the cheapest one that
    // actually locates a crossing.
    std::size_t pick = n;
    for (std::size_t i = 0; i < n && pick == n; ++i) {
      if (!rep.censored[i]) pick = i;
    }
    SimConfig c = refined(tmpl);
    c.epsilon = rep.epsilons[pick];
    rep.self_check_run = true;
    try {
      const ErrorReport r = run_comparison(c, potential, std::span(&spec, 1), times, stop);
      bool cens = false;
      const double ts = first_exceedance(r, delta * r.initial_norm, t_max, cens);
      rep.self_check_change = std::abs(ts - rep.t_star[pick]) / rep.t_star[pick];
      self_ok = !cens && rep.self_check_change < options.self_check_tolerance;
      if (!self_ok) rep.diagnostics.push_back("refined rerun moved T* by " +
                                              text::format_double(rep.self_check_change));
    } catch (const InvalidRunError& e) {
      rep.valid = false;
      rep.diagnostics.push_back(std::string("refined rerun: ") + e.what());
      return rep;
    } catch (const DivergedError& e) {
      rep.valid = false;
      rep.diagnostics.push_back(std::string("refined rerun: ") + e.what());
      return rep;
    }
  }

  if (!rep.strictly_increasing) rep.diagnostics.push_back("T* is not strictly increasing");
  const bool fit_ok = rep.relative_residual < options.max_relative_residual;
  if (!fit_ok) rep.diagnostics.push_back("relative residual of the log fit too large");
  rep.passed = rep.strictly_increasing && fit_ok && self_ok;
  return rep;
}

// --- interaction term --------------------------------------------------------

InteractionSeries interaction_magnitude(const EnvelopeRun& first, const EnvelopeRun& second,
                                        const Trajectory& traj1, const Trajectory& traj2,
                                        const SimConfig& cfg_in, double T, double gamma) {
  SimConfig cfg = cfg_in;
  cfg.validate();
  if (!is_critical(cfg)) throw ConfigError("the interaction term is defined at alpha = alpha_c");
  const double r = std::max(mass_radius(first.snapshots.front()),
                            mass_radius(second.snapshots.front()));
  const Trajectory* ptrs[2] = {&traj1, &traj2};
  const Grid grid = size_grid(ptrs, cfg.epsilon, r, cfg.grid);
  const double coupling = std::pow(cfg.epsilon, cfg.alpha_c);

  InteractionSeries s;
  s.epsilon = cfg.epsilon;
  for (double t : first.times) {
    if (t > T * (1.0 + 1e-12)) break;
    const WaveField p1 = reconstruct(first, traj1, cfg, t, grid);
    const WaveField p2 = reconstruct(second, traj2, cfg, t, grid);
    WaveField ni(grid, cfg.epsilon);
    for (std::size_t i = 0; i < ni.size(); ++i) {
      const complex a = p1[i], b = p2[i], c = a + b;
      ni[i] = coupling * (detail::modulus_power(c, cfg.sigma) * c -
                          detail::modulus_power(a, cfg.sigma) * a -
                          detail::modulus_power(b, cfg.sigma) * b);
    }
    s.times.push_back(t);
    s.values.push_back(norm_l2(ni) / cfg.epsilon);
  }
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    s.integral += 0.5 * (s.values[i] + s.values[i - 1]) * (s.times[i] - s.times[i - 1]);
  }
  s.crossings = crossing_set(traj1, traj2, gamma, cfg.epsilon, T);
  s.crossing_measure = s.crossings.total_measure;
  return s;
}

InteractionReport interaction_study(const SimConfig& base, const Potential& potential,
                                    const PacketSpec& first, const PacketSpec& second, double T,
                                    std::span<const double> epsilons, double gamma,
                                    std::size_t sample_count, unsigned threads) {
  InteractionReport rep;
  rep.epsilons = sorted_epsilons(epsilons, 2);
  SimConfig tmpl = base;
  tmpl.horizon = T;
  tmpl.validate();
  if (first.dimension != tmpl.dimension || second.dimension != tmpl.dimension) {
    throw ConfigError("packet dimension differs from config");
  }
  const auto times = uniform_times(T, sample_count);
  rep.series.resize(rep.epsilons.size());
  parallel_for(rep.epsilons.size(), threads, [&](std::size_t i) {
    SimConfig c = tmpl;
    c.epsilon = rep.epsilons[i];
    const int d = c.dimension;
    const Trajectory t1 = integrate_flow(potential, std::span(first.x0.data(), d),
                                         std::span(first.xi0.data(), d), T, c.flow_step());
    const Trajectory t2 = integrate_flow(potential, std::span(second.x0.data(), d),
                                         std::span(second.xi0.data(), d), T, c.flow_step());
    const EnvelopeRun e1 = propagate_envelope_nonlinear(
        sample_envelope(first, envelope_grid(first, c)), t1, c.lambda, c.sigma, T,
        c.envelope_dt, times);
    const EnvelopeRun e2 = propagate_envelope_nonlinear(
        sample_envelope(second, envelope_grid(second, c)), t2, c.lambda, c.sigma, T,
        c.envelope_dt, times);
    rep.series[i] = interaction_magnitude(e1, e2, t1, t2, c, T, gamma);
  });
  rep.monotone_decreasing = true;
  for (std::size_t i = 1; i < rep.series.size(); ++i) {
    if (!(rep.series[i].integral < rep.series[i - 1].integral)) rep.monotone_decreasing = false;
  }
  rep.passed = rep.monotone_decreasing;
  return rep;
}

}  // namespace ehrenfest
