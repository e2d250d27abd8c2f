// End-to-end acceptance run: one [PASS]/[FAIL] line per criterion.
// Usage: acceptance [output-dir]; exit status 0 iff every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "ehrenfest/config.hpp"
#include "ehrenfest/errors.hpp"
#include "ehrenfest/experiments.hpp"
#include "oracles.hpp"

using namespace ehrenfest;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Drift {
  double mass = 0.0;    // max relative mass drift over every propagation
  double energy = 0.0;  // max energy drift over every trajectory
  std::size_t propagations = 0;
  std::size_t trajectories = 0;
};

Drift drift;
fs::path out_dir;
unsigned threads = 1;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LabConfig config(const char* name) { return load_config(fs::path(EHL_CONFIG_DIR) / name); }

void save(const std::string& name, const auto& report) {
  std::ofstream out(out_dir / name);
  report.write_csv(out);
}

void absorb(const ErrorReport& r) {
  drift.mass = std::max(drift.mass, r.max_mass_drift);
  ++drift.propagations;
}

// Energy drift of every packet's trajectory at the default step, for each epsilon.
void absorb_trajectories(const LabConfig& c, std::span<const double> epsilons, double T) {
  for (double eps : epsilons) {
    SimConfig s = c.sim;
    s.epsilon = eps;
    for (const PacketSpec& p : c.packet_specs()) {
      const Trajectory tr = integrate_flow(c.potential, std::span(p.x0.data(), 1),
                                           std::span(p.xi0.data(), 1), T, s.flow_step());
      drift.energy = std::max(drift.energy, tr.max_energy_drift());
      ++drift.trajectories;
    }
  }
}

SweepOptions sweep_options(const LabConfig& c) {
  SweepOptions o;
  o.norm = c.experiment.norm;
  o.sample_count = c.experiment.samples;
  o.slope_tolerance = c.experiment.slope_tolerance;
  o.max_fit_residual = c.experiment.max_fit_residual;
  o.min_slope = c.experiment.min_slope;
  o.self_check = c.experiment.self_check;
  o.threads = threads;
  return o;
}

std::string self_check_note(const ConvergenceReport& r) {
  if (!r.self_check_run) return "";
  return fmt(", refined rerun changes the error by %.2e", r.self_check_change);
}

bool self_check_ok(const ConvergenceReport& r) {
  return !r.self_check_run || r.self_check_change < 0.05;
}

// --- criteria ------------------------------------------------------------

Outcome quadratic_exactness() {
  const LabConfig c = config("quadratic.ini");
  const double T = c.sim.horizon;
  const auto times = uniform_times(T, c.experiment.samples);
  const ErrorReport r = compare_single(c.sim, c.potential, c.packet(0), T, times);
  absorb(r);
  const double eps[] = {c.sim.epsilon};
  absorb_trajectories(c, eps, T);
  save("quadratic_error.csv", r);
  return {r.valid && r.sup_l2() <= 1e-5,
          fmt("sup err_l2 = %.3e (limit 1e-5), N = %zu", r.sup_l2(), r.grid_points)};
}

ConvergenceReport run_sweep(const LabConfig& c, const std::string& tag) {
  const ConvergenceReport r = sweep_epsilon(c.sim, c.potential, c.packet_specs(), c.sim.horizon,
                                            c.experiment.epsilons, sweep_options(c));
  for (const auto& run : r.runs) absorb(run);
  absorb_trajectories(c, r.epsilons, c.sim.horizon);
  save(tag + ".csv", r);
  for (std::size_t i = 0; i < r.runs.size(); ++i) save(tag + "_error_" + std::to_string(i + 1) + ".csv", r.runs[i]);
  return r;
}

Outcome window(const ConvergenceReport& r, double lo, double hi) {
  const bool pass = r.valid && r.slope >= lo && r.slope <= hi && r.fit_residual < 0.15 &&
                    self_check_ok(r);
  return {pass, fmt("slope %.4f in [%.2f, %.2f], fit residual %.4f (limit 0.15)%s", r.slope, lo, hi,
                    r.fit_residual, self_check_note(r).c_str())};
}

Outcome critical_rate() { return window(run_sweep(config("sweep_critical.ini"), "sweep_critical"), 0.4, 0.6); }

Outcome linearizable_rate() {
  const Outcome a = window(run_sweep(config("sweep_alpha175.ini"), "sweep_alpha175"), 0.15, 0.35);
  const Outcome b = window(run_sweep(config("sweep_alpha250.ini"), "sweep_alpha250"), 0.4, 0.6);
  return {a.pass && b.pass, "alpha 1.75: " + a.detail + "; alpha 2.5: " + b.detail};
}

Outcome ehrenfest_monotonicity() {
  const LabConfig c = config("ehrenfest.ini");
  const double t_max = c.experiment.t_max > 0.0 ? c.experiment.t_max : c.sim.horizon;
  EhrenfestOptions o;
  o.sample_dt = c.experiment.sample_dt;
  o.max_relative_residual = c.experiment.max_relative_residual;
  o.self_check = c.experiment.self_check;
  o.threads = threads;
  const EhrenfestReport r = ehrenfest_study(c.sim, c.potential, c.packet(0), c.experiment.delta,
                                            c.experiment.epsilons, t_max, o);
  for (const auto& run : r.runs) absorb(run);
  absorb_trajectories(c, r.epsilons, t_max);
  save("ehrenfest.csv", r);
  std::string ts;
  for (std::size_t i = 0; i < r.t_star.size(); ++i) {
    ts += fmt("%s%.3f%s", i ? ", " : "", r.t_star[i], r.censored[i] ? " (censored)" : "");
  }
  const bool check_ok = !r.self_check_run || r.self_check_change < 0.05;
  const bool pass = r.valid && !r.all_censored && r.strictly_increasing &&
                    r.relative_residual < 0.25 && check_ok;
  return {pass, fmt("T* = [%s], strictly increasing: %s, relative residual %.4f (limit 0.25)%s",
                    ts.c_str(), r.strictly_increasing ? "yes" : "no", r.relative_residual,
                    r.self_check_run ? fmt(", refined rerun changes T* by %.2e", r.self_check_change).c_str()
                                     : "")};
}

Outcome superposition_rate() {
  const ConvergenceReport r = run_sweep(config("two_packets.ini"), "superposition");
  const bool pass = r.valid && r.slope >= 0.33 && self_check_ok(r);
  return {pass, fmt("Sigma_eps slope %.4f (limit >= 0.33), fit residual %.4f%s", r.slope,
                    r.fit_residual, self_check_note(r).c_str())};
}

Outcome interaction_smallness() {
  const LabConfig c = config("two_packets.ini");
  const InteractionReport r =
      interaction_study(c.sim, c.potential, c.packet(0), c.packet(1), c.sim.horizon,
                        c.experiment.epsilons, c.experiment.gamma, c.experiment.samples, threads);
  save("interaction.csv", r);
  std::string vals;
  for (std::size_t i = 0; i < r.series.size(); ++i) {
    vals += fmt("%s%.4e", i ? ", " : "", r.series[i].integral);
  }
  return {r.monotone_decreasing, "time integrals [" + vals + "] for eps = 0.04, 0.01, 0.0025"};
}

// --- criterion 7 properties -----------------------------------------------

Outcome gauge_identity() {
  const double eps = 0.01;
  const PhaseState c{{0.3, 0}, {1.2, 0}, 0.7};
  const Grid g = Grid::line(-2, 4, 4096);
  const double se = std::sqrt(eps);
  const auto wrap = [&](const std::function<complex(double)>& env) {
    WaveField f(g, eps);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double x = g.point(i)[0], y = (x - c.x[0]) / se;
      f[i] = std::pow(eps, -0.25) * env(y) * std::exp(complex(0, (c.action + c.xi[0] * (x - c.x[0])) / eps));
    }
    return f;
  };
  const auto u = [](double y) { return std::exp(-0.5 * y * y) * complex(1.0, 0.3 * y); };
  const auto du = [](double y) {
    return std::exp(-0.5 * y * y) * (complex(0.0, 0.3) - y * complex(1.0, 0.3 * y));
  };
  const WaveField ref = wrap(du);
  const double res = norm_l2(apply_A(wrap(u), c) - ref) / norm_l2(ref);
  return {res <= 1e-10, fmt("gauge residual %.2e (limit 1e-10)", res)};
}

Outcome envelope_bit_agreement() {
  const LabConfig c = config("sweep_critical.ini");
  const PacketSpec p = c.packet(0);
  const Trajectory tr = integrate_flow(c.potential, std::span(p.x0.data(), 1),
                                       std::span(p.xi0.data(), 1), c.sim.horizon, 1e-3);
  const WaveField a = sample_envelope(p, envelope_grid(p, c.sim));
  const EnvelopeRun lin = propagate_envelope_linear(a, tr, c.sim.horizon, c.sim.envelope_dt);
  const EnvelopeRun non =
      propagate_envelope_nonlinear(a, tr, 0.0, c.sim.sigma, c.sim.horizon, c.sim.envelope_dt);
  std::size_t differ = lin.snapshots.size() == non.snapshots.size() ? 0 : 1;
  for (std::size_t n = 0; differ == 0 && n < lin.snapshots.size(); ++n) {
    for (std::size_t i = 0; i < a.size(); ++i) differ += lin.snapshots[n][i] != non.snapshots[n][i];
  }
  return {differ == 0, fmt("lambda = 0 envelope differs in %zu samples over %zu snapshots", differ,
                           lin.snapshots.size())};
}

Outcome time_reversal() {
  const LabConfig c = config("sweep_critical.ini");
  SimConfig s = c.sim;
  s.epsilon = 0.02;
  s.horizon = 0.5;
  const Grid g = Grid::line(-4, 8, 1024);
  const WaveField psi0 = build_initial(c.packet(0), s, g);
  const double T[] = {s.horizon};
  const auto conj = [](WaveField f) {
    for (auto& z : f.values()) z = std::conj(z);
    return f;
  };
  const WaveField fwd = propagate_nls(s, c.potential, psi0, T).back();
  const WaveField back = conj(propagate_nls(s, c.potential, conj(fwd), T).back());
  SimConfig half = s;
  half.dt = 0.5 * s.pde_dt();
  const double one_way = norm_l2(fwd - propagate_nls(half, c.potential, psi0, T).back());
  const double err = norm_l2(back - psi0);
  return {err <= 10 * one_way, fmt("reversal error %.2e vs one-way dt error %.2e", err, one_way)};
}

Outcome crossing_oracle() {
  const LabConfig c = config("two_packets.ini");
  const double T = c.sim.horizon, gamma = c.experiment.gamma;
  const auto V = [](double x) { return 0.5 * x * x + std::cos(x); };
  const auto dV = [](double x) { return x - std::sin(x); };
  const std::size_t steps = 200000;
  const PacketSpec p1 = c.packet(0), p2 = c.packet(1);
  const auto r1 = oracle::rk4_flow(V, dV, p1.x0[0], p1.xi0[0], T, steps);
  const auto r2 = oracle::rk4_flow(V, dV, p2.x0[0], p2.xi0[0], T, steps);
  const auto dist = [&](double t) {
    const double s = t / T * static_cast<double>(steps);
    const std::size_t n = std::min(static_cast<std::size_t>(s), steps - 1);
    const double f = s - static_cast<double>(n);
    return std::abs((1 - f) * (r1[n].x - r2[n].x) + f * (r1[n + 1].x - r2[n + 1].x));
  };
  bool pass = true;
  std::string detail;
  for (double eps : c.experiment.epsilons) {
    SimConfig s = c.sim;
    s.epsilon = eps;
    const double dt = s.flow_step();
    const Trajectory a = integrate_flow(c.potential, std::span(p1.x0.data(), 1),
                                        std::span(p1.xi0.data(), 1), T, dt);
    const Trajectory b = integrate_flow(c.potential, std::span(p2.x0.data(), 1),
                                        std::span(p2.xi0.data(), 1), T, dt);
    const CrossingSet cs = crossing_set(a, b, gamma, eps, T);
    const auto ref = oracle::brute_crossings(dist, std::pow(eps, gamma), T, steps);
    double worst = cs.intervals.size() == ref.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; std::isfinite(worst) && i < ref.size(); ++i) {
      worst = std::max({worst, std::abs(cs.intervals[i].first - ref[i].first),
                        std::abs(cs.intervals[i].second - ref[i].second)});
    }
    pass = pass && worst <= dt;
    detail += fmt("%seps %.4g: %zu interval(s), endpoint error %.2e (cell %.2e)",
                  detail.empty() ? "" : "; ", eps, cs.intervals.size(), worst, dt);
  }
  return {pass, detail};
}

Outcome property_suite() {
  // Short runs so the suite has material even when earlier criteria failed early.
  const LabConfig c = config("sweep_critical.ini");
  const double eps[] = {0.01};
  absorb_trajectories(c, eps, 10.0);
  const ErrorReport r = compare_single(c.sim, c.potential, c.packet(0), c.sim.horizon,
                                       uniform_times(c.sim.horizon, 10));
  absorb(r);

  std::vector<std::pair<std::string, Outcome>> parts;
  parts.emplace_back("mass", Outcome{drift.mass <= 1e-12,
                                     fmt("max relative mass drift %.2e over %zu propagations (limit 1e-12)",
                                         drift.mass, drift.propagations)});
  parts.emplace_back("energy", Outcome{drift.energy <= 1e-6,
                                       fmt("max energy drift %.2e over %zu trajectories (limit 1e-6)",
                                           drift.energy, drift.trajectories)});
  const auto guarded = [&](const char* name, Outcome (*f)()) {
    try {
      parts.emplace_back(name, f());
    } catch (const std::exception& e) {
      parts.emplace_back(name, Outcome{false, e.what()});
    }
  };
  guarded("gauge", gauge_identity);
  guarded("envelope", envelope_bit_agreement);
  guarded("reversal", time_reversal);
  guarded("crossings", crossing_oracle);

  Outcome all{true, ""};
  for (const auto& [name, o] : parts) {
    all.pass = all.pass && o.pass;
    all.detail += (all.detail.empty() ? "" : " | ") + std::string(o.pass ? "" : "FAILED ") + o.detail;
  }
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out_dir);
  threads = std::max(1u, std::thread::hardware_concurrency());

  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"quadratic exactness", quadratic_exactness},
      {"bounded-time sqrt(eps) rate", critical_rate},
      {"linearizable rate", linearizable_rate},
      {"Ehrenfest-time monotonicity", ehrenfest_monotonicity},
      {"superposition rate", superposition_rate},
      {"interaction smallness", interaction_smallness},
      {"property suite", property_suite},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [title, run] : criteria) {
    ++n;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("[%s] criterion %d: %s -- %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", n, title,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
