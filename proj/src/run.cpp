#include "ehrenfest/run.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ehrenfest/errors.hpp"
#include "ehrenfest/experiments.hpp"
#include "text.hpp"

namespace ehrenfest {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Context {
  const RunManifest& manifest;
  const LabConfig& cfg;
  std::ostream& log;
  unsigned threads;
  bool self_check;
};

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  body(out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, [&](std::ostream& o) { o << text; });
}

json diagnostics(const std::vector<std::string>& lines) {
  json a = json::array();
  for (const auto& l : lines) a.push_back(l);
  return a;
}

json error_summary(const ErrorReport& r) {
  json j;
  j["epsilon"] = r.epsilon;
  j["grid_points"] = r.grid_points;
  j["sup_err_l2"] = r.sup_l2();
  j["sup_err_sigma_eps"] = r.sup_sigma_eps();
  if (!r.two_packet) j["sup_err_h"] = r.sup_h();
  j["max_mass_drift"] = r.max_mass_drift;
  j["notes"] = diagnostics(r.notes);
  return j;
}

void write_runs(const Context& c, const std::vector<ErrorReport>& runs) {
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].times.empty()) continue;
    write_file(c.manifest.out_dir / ("error_" + std::to_string(i + 1) + ".csv"),
               [&](std::ostream& o) { runs[i].write_csv(o); });
  }
}

SweepOptions sweep_options(const Context& c, ErrorNorm norm) {
  const ExperimentParams& x = c.cfg.experiment;
  SweepOptions o;
  o.norm = norm;
  o.sample_count = x.samples;
  o.slope_tolerance = x.slope_tolerance;
  o.max_fit_residual = x.max_fit_residual;
  o.min_slope = x.min_slope;
  o.self_check = c.self_check;
  o.threads = c.threads;
  return o;
}

json sweep_summary(const ConvergenceReport& r) {
  json j;
  j["epsilons"] = r.epsilons;
  j["errors"] = r.errors;
  j["slope"] = r.slope;
  j["intercept"] = r.intercept;
  j["fit_residual"] = r.fit_residual;
  j["expected_slope"] = r.expected_slope;
  j["slope_window"] = {r.lower, std::isfinite(r.upper) ? json(r.upper) : json(nullptr)};
  j["self_check_run"] = r.self_check_run;
  if (r.self_check_run) {
    j["self_check_error"] = r.self_check_error;
    j["self_check_change"] = r.self_check_change;
  }
  j["valid"] = r.valid;
  j["diagnostics"] = diagnostics(r.diagnostics);
  return j;
}

bool cmd_trajectory(const Context& c, json& out) {
  const SimConfig& s = c.cfg.sim;
  bool ok = true;
  json list = json::array();
  for (std::size_t i = 0; i < c.cfg.packets.size(); ++i) {
    const PacketSpec p = c.cfg.packet(i);
    const Trajectory traj =
        integrate_flow(c.cfg.potential, std::span(p.x0.data(), s.dimension),
                       std::span(p.xi0.data(), s.dimension), s.horizon, s.flow_step());
    write_file(c.manifest.out_dir / ("trajectory_" + std::to_string(i + 1) + ".csv"),
               [&](std::ostream& o) { traj.write_csv(o); });
    const double drift = traj.max_energy_drift();
    const GrowthFit g = traj.growth_fit();
    ok = ok && drift <= 1e-6;
    json j;
    j["packet"] = i + 1;
    j["dt"] = traj.dt();
    j["steps"] = traj.size() - 1;
    j["energy"] = traj.energy0();
    j["max_energy_drift"] = drift;
    j["growth_prefactor"] = g.prefactor;
    j["growth_rate"] = g.rate;
    list.push_back(j);
  }
  if (c.cfg.packets.size() == 2) {
    const PacketSpec a = c.cfg.packet(0), b = c.cfg.packet(1);
    const int d = s.dimension;
    const Trajectory ta = integrate_flow(c.cfg.potential, std::span(a.x0.data(), d),
                                         std::span(a.xi0.data(), d), s.horizon, s.flow_step());
    const Trajectory tb = integrate_flow(c.cfg.potential, std::span(b.x0.data(), d),
                                         std::span(b.xi0.data(), d), s.horizon, s.flow_step());
    const CrossingSet cs = crossing_set(ta, tb, c.cfg.experiment.gamma, s.epsilon, s.horizon);
    json iv = json::array();
    for (const auto& [lo, hi] : cs.intervals) iv.push_back({lo, hi});
    out["crossing_gamma"] = cs.gamma;
    out["crossing_intervals"] = iv;
    out["crossing_measure"] = cs.total_measure;
  }
  out["trajectories"] = list;
  return ok;
}

bool cmd_propagate(const Context& c, json& out) {
  const SimConfig& s = c.cfg.sim;
  const auto specs = c.cfg.packet_specs();
  std::vector<Trajectory> trajs;
  double radius = 0.0;
  for (const auto& p : specs) {
    trajs.push_back(integrate_flow(c.cfg.potential, std::span(p.x0.data(), s.dimension),
                                   std::span(p.xi0.data(), s.dimension), s.horizon,
                                   s.flow_step()));
    radius = std::max(radius, envelope_radius(p));
  }
  std::vector<const Trajectory*> ptrs;
  for (const auto& t : trajs) ptrs.push_back(&t);
  const Grid grid = size_grid(ptrs, s.epsilon, radius, s.grid);
  WaveField psi0 = build_initial(specs[0], s, grid);
  if (specs.size() == 2) psi0 += build_initial(specs[1], s, grid);

  const auto times = uniform_times(s.horizon, c.cfg.experiment.samples);
  std::vector<double> masses;
  WaveField last;
  propagate_nls(s, c.cfg.potential, psi0, times, [&](double, const WaveField& psi) {
    masses.push_back(psi.mass());
    last = psi;
    return true;
  });
  double drift = 0.0;
  for (double m : masses) drift = std::max(drift, std::abs(m / masses.front() - 1.0));
  write_file(c.manifest.out_dir / "mass.csv", [&](std::ostream& o) {
    o << "t,mass\n";
    char buf[64];
    for (std::size_t i = 0; i < masses.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12e,%.17e\n", times[i], masses[i]);
      o << buf;
    }
  });
  write_file(c.manifest.out_dir / "psi_T.bin",
             [&](std::ostream& o) { write_field_binary(o, last); });
  if (s.dimension == 1) {
    write_file(c.manifest.out_dir / "psi_T.csv", [&](std::ostream& o) { write_field_csv(o, last); });
  }
  out["grid_points"] = grid.size();
  out["dt"] = s.pde_dt();
  out["initial_mass"] = masses.front();
  out["max_relative_mass_drift"] = drift;
  return drift <= 1e-12;
}

bool cmd_compare(const Context& c, json& out) {
  if (c.cfg.packets.size() != 1) {
    throw ConfigError("compare takes exactly one packet; use superpose for two");
  }
  const SimConfig& s = c.cfg.sim;
  const auto times = uniform_times(s.horizon, c.cfg.experiment.samples);
  const ErrorReport r = compare_single(s, c.cfg.potential, c.cfg.packet(0), s.horizon, times);
  write_file(c.manifest.out_dir / "error.csv", [&](std::ostream& o) { r.write_csv(o); });
  out["result"] = error_summary(r);
  const MomentaSeries m =
      momenta_monitor(packet_envelope(s, c.cfg.potential, c.cfg.packet(0), times), c.cfg.experiment.k_max);
  write_file(c.manifest.out_dir / "momenta.csv", [&](std::ostream& o) { m.write_csv(o); });
  out["momenta_rates"] = m.rates;
  const double tol = c.cfg.experiment.tolerance;
  if (tol > 0.0) {
    out["tolerance"] = tol;
    return r.sup_l2() <= tol;
  }
  return true;
}

bool cmd_sweep(const Context& c, json& out) {
  const SimConfig& s = c.cfg.sim;
  const auto specs = c.cfg.packet_specs();
  const ErrorNorm norm = specs.size() == 2 ? ErrorNorm::sigma_eps : c.cfg.experiment.norm;
  const ConvergenceReport r = sweep_epsilon(s, c.cfg.potential, specs, s.horizon,
                                            c.cfg.experiment.epsilons, sweep_options(c, norm));
  write_file(c.manifest.out_dir / "sweep.csv", [&](std::ostream& o) { r.write_csv(o); });
  write_runs(c, r.runs);
  out["norm"] = norm == ErrorNorm::l2 ? "l2" : "sigma_eps";
  out["sweep"] = sweep_summary(r);
  return r.valid && r.passed;
}

bool cmd_ehrenfest(const Context& c, json& out) {
  if (c.cfg.packets.size() != 1) throw ConfigError("ehrenfest takes exactly one packet");
  const SimConfig& s = c.cfg.sim;
  const ExperimentParams& x = c.cfg.experiment;
  EhrenfestOptions o;
  o.sample_dt = x.sample_dt;
  o.max_relative_residual = x.max_relative_residual;
  o.self_check = c.self_check;
  o.threads = c.threads;
  const double t_max = x.t_max > 0.0 ? x.t_max : s.horizon;
  const EhrenfestReport r =
      ehrenfest_study(s, c.cfg.potential, c.cfg.packet(0), x.delta, x.epsilons, t_max, o);
  write_file(c.manifest.out_dir / "ehrenfest.csv", [&](std::ostream& f) { r.write_csv(f); });
  write_runs(c, r.runs);
  json j;
  j["epsilons"] = r.epsilons;
  j["delta"] = r.delta;
  j["T_max"] = r.t_max;
  j["t_star"] = r.t_star;
  j["censored"] = r.censored;
  j["all_censored"] = r.all_censored;
  j["strictly_increasing"] = r.strictly_increasing;
  j["slope"] = r.slope;
  j["intercept"] = r.intercept;
  j["relative_residual"] = r.relative_residual;
  j["self_check_run"] = r.self_check_run;
  if (r.self_check_run) j["self_check_change"] = r.self_check_change;
  j["valid"] = r.valid;
  j["diagnostics"] = diagnostics(r.diagnostics);
  out["ehrenfest"] = j;
  return r.valid && r.passed;
}

bool cmd_superpose(const Context& c, json& out) {
  if (c.cfg.packets.size() != 2) throw ConfigError("superpose needs [packet.1] and [packet.2]");
  const SimConfig& s = c.cfg.sim;
  const auto specs = c.cfg.packet_specs();
  if (!c.cfg.experiment.epsilons.empty()) {
    SimConfig check = s;
    check.validate();
    if (std::abs(check.alpha - check.alpha_c) > 1e-12) {
      throw ConfigError("superposition requires alpha = alpha_c");
    }
    const ConvergenceReport r =
        sweep_epsilon(s, c.cfg.potential, specs, s.horizon, c.cfg.experiment.epsilons,
                      sweep_options(c, ErrorNorm::sigma_eps));
    write_file(c.manifest.out_dir / "sweep.csv", [&](std::ostream& o) { r.write_csv(o); });
    write_runs(c, r.runs);
    out["norm"] = "sigma_eps";
    out["sweep"] = sweep_summary(r);
    return r.valid && r.passed;
  }
  const auto times = uniform_times(s.horizon, c.cfg.experiment.samples);
  const ErrorReport r =
      superposition_study(s, c.cfg.potential, specs[0], specs[1], s.horizon, times);
  write_file(c.manifest.out_dir / "error.csv", [&](std::ostream& o) { r.write_csv(o); });
  out["result"] = error_summary(r);
  return true;
}

bool cmd_interaction(const Context& c, json& out) {
  if (c.cfg.packets.size() != 2) throw ConfigError("interaction needs [packet.1] and [packet.2]");
  const SimConfig& s = c.cfg.sim;
  const auto specs = c.cfg.packet_specs();
  std::vector<double> eps = c.cfg.experiment.epsilons;
  if (eps.empty()) eps.push_back(s.epsilon);
  const InteractionReport r =
      interaction_study(s, c.cfg.potential, specs[0], specs[1], s.horizon, eps,
                        c.cfg.experiment.gamma, c.cfg.experiment.samples, c.threads);
  write_file(c.manifest.out_dir / "interaction.csv", [&](std::ostream& o) { r.write_csv(o); });
  json list = json::array();
  for (std::size_t i = 0; i < r.series.size(); ++i) {
    write_file(c.manifest.out_dir / ("interaction_" + std::to_string(i + 1) + ".csv"),
               [&](std::ostream& o) { r.series[i].write_csv(o); });
    json j;
    j["epsilon"] = r.series[i].epsilon;
    j["integral"] = r.series[i].integral;
    j["crossing_measure"] = r.series[i].crossing_measure;
    list.push_back(j);
  }
  out["gamma"] = c.cfg.experiment.gamma;
  out["series"] = list;
  out["monotone_decreasing"] = r.monotone_decreasing;
  return r.series.size() < 2 || r.passed;
}

using Handler = bool (*)(const Context&, json&);

Handler handler_for(const std::string& name) {
  if (name == "trajectory") return cmd_trajectory;
  if (name == "propagate") return cmd_propagate;
  if (name == "compare") return cmd_compare;
  if (name == "sweep") return cmd_sweep;
  if (name == "ehrenfest") return cmd_ehrenfest;
  if (name == "superpose") return cmd_superpose;
  if (name == "interaction") return cmd_interaction;
  return nullptr;
}

}  // namespace

int run(const RunManifest& manifest, std::ostream& log) {
  const Handler handler = handler_for(manifest.command);
  if (!handler) {
    log << "error: unknown command '" << manifest.command << "'\n";
    return kExitConfig;
  }
  LabConfig cfg;
  try {
    cfg = load_config(manifest.config_path);
    std::error_code ec;
    fs::create_directories(manifest.out_dir, ec);
    if (ec || !fs::is_directory(manifest.out_dir)) {
      throw IoError("cannot create output directory '" + manifest.out_dir.string() + "'");
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const Context ctx{manifest, cfg, log, std::max(1u, manifest.threads),
                    manifest.self_check || cfg.experiment.self_check};
  json summary;
  summary["command"] = manifest.command;
  summary["version"] = manifest.version;
  summary["config_path"] = manifest.config_path.generic_string();
  summary["deterministic"] = manifest.deterministic;
  summary["config"] = serialize_config(cfg);
  int status = kExitPass;
  try {
    json result;
    const bool passed = handler(ctx, result);
    summary["passed"] = passed;
    summary["result"] = result;
    status = passed ? kExitPass : kExitFail;
  } catch (const InvalidRunError& e) {
    log << "invalid run: " << e.what() << '\n';
    summary["passed"] = false;
    summary["error"] = e.what();
    status = kExitFail;
  } catch (const DivergedError& e) {
    log << "diverged: " << e.what() << '\n';
    summary["passed"] = false;
    summary["error"] = e.what();
    status = kExitFail;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RangeError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    write_text(manifest.out_dir / "summary.json", summary.dump(2) + "\n");
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  log << manifest.command << ": " << (status == kExitPass ? "pass" : "fail") << '\n';
  return status;
}

}  // namespace ehrenfest
