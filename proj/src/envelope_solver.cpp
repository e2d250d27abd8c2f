#include "ehrenfest/envelope_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ehrenfest/errors.hpp"
#include "split_step.hpp"
#include "text.hpp"

namespace ehrenfest {
namespace {

Mat interpolate_q(const std::vector<Mat>& q, double dt, double t) {
  const double pos = std::clamp(t / dt, 0.0, static_cast<double>(q.size() - 1));
  auto n = static_cast<std::size_t>(pos);
  if (n + 1 >= q.size()) return q.back();
  const double s = pos - static_cast<double>(n);
  return (1.0 - s) * q[n] + s * q[n + 1];
}

EnvelopeRun run_envelope(const WaveField& a, const Trajectory& traj, double lambda, int sigma,
                         double T, double dt, std::span<const double> sample_times) {
  const Grid& grid = a.grid();
  if (grid.dimension() != traj.dimension()) {
    throw ConfigError("envelope grid and trajectory dimensions differ");
  }
  if (!(dt > 0.0)) throw ConfigError("envelope dt must be positive");
  if (!(T > 0.0)) throw ConfigError("envelope horizon must be positive");
  if (sigma < 1) throw ConfigError("sigma must be >= 1");
  if (traj.horizon() + 1e-9 * std::max(1.0, T) < T) {
    throw RangeError("trajectory does not cover the envelope horizon");
  }

  std::vector<double> samples(sample_times.begin(), sample_times.end());
  if (samples.empty()) {
    const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    for (std::size_t i = 0; i <= n; ++i) samples.push_back(T * static_cast<double>(i) / static_cast<double>(n));
  }
  if (!std::is_sorted(samples.begin(), samples.end()) || samples.front() < 0.0 ||
      samples.back() > T * (1.0 + 1e-12)) {
    throw ConfigError("envelope sample times must be nondecreasing within [0, T]");
  }

  EnvelopeRun run;
  run.grid = grid;
  run.lambda = lambda;
  run.sigma = sigma;
  run.dt = dt;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    run.q_times.push_back(traj.time(n));
    run.q_samples.push_back(traj.potential().hessian(traj.sample(n).x));
  }

  std::vector<Vec> y(grid.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = grid.point(i);

  detail::SplitStepEngine engine(grid, 0.5, false);
  engine.load(a.values());

  // lambda == 0 runs through the same loop, so the linear and nonlinear
  // solvers agree bit for bit.
  auto phase = [&](std::span<detail::xcomplex> u, double t_mid, double h) {
    const Mat q = interpolate_q(run.q_samples, traj.dt(), t_mid);
    for (std::size_t i = 0; i < u.size(); ++i) {
      long double v = 0.5 * dot(q * y[i], y[i]);
      if (lambda != 0.0) v += lambda * detail::modulus_power(u[i], sigma);
      u[i] *= std::polar(1.0L, -static_cast<long double>(h) * v);
    }
  };

  double last_good = 0.0;
  auto snapshot = [&] {
    return engine.field(1.0);
  };
  auto check = [&](double t) {
    const WaveField view = snapshot();
    if (!view.all_finite()) {
      throw DivergedError(last_good, "envelope became non-finite after t = " +
                                         text::format_double(last_good));
    }
    const double frac = boundary_mass_fraction(view);
    if (frac > kBoundaryMassLimit) {
      throw InvalidRunError(t, "envelope boundary-mass guard tripped at t = " +
                                   text::format_double(t) + " (edge mass fraction " +
                                   text::format_double(frac) + ")");
    }
    last_good = t;
  };

  check(0.0);
  double t = 0.0;
  for (const double ts : samples) {
    engine.advance(t, ts, dt, phase, check);
    t = std::max(t, ts);
    run.times.push_back(ts);
    run.snapshots.push_back(snapshot());
  }
  return run;
}

std::vector<std::array<int, kMaxDim>> multi_indices(int dim, int max_order) {
  std::vector<std::array<int, kMaxDim>> out;
  for (int i = 0; i <= max_order; ++i) {
    if (dim == 1) {
      out.push_back({i, 0});
      continue;
    }
    for (int j = 0; i + j <= max_order; ++j) out.push_back({i, j});
  }
  return out;
}

}  // namespace

const WaveField& EnvelopeRun::snapshot_at(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) {
    throw RangeError("no envelope snapshot at t = " + text::format_double(t));
  }
  return snapshots[static_cast<std::size_t>(it - times.begin())];
}

EnvelopeRun propagate_envelope_linear(const WaveField& a, const Trajectory& traj, double T,
                                      double dt, std::span<const double> sample_times) {
  return run_envelope(a, traj, 0.0, 1, T, dt, sample_times);
}

EnvelopeRun propagate_envelope_nonlinear(const WaveField& a, const Trajectory& traj,
                                         double lambda, int sigma, double T, double dt,
                                         std::span<const double> sample_times) {
  if (!std::isfinite(lambda)) throw ConfigError("lambda must be finite");
  return run_envelope(a, traj, lambda, sigma, T, dt, sample_times);
}

MomentaSeries momenta_monitor(const EnvelopeRun& run, int k) {
  if (k < 0) throw ConfigError("momenta order must be nonnegative");
  const Grid& grid = run.grid;
  const int dim = grid.dimension();
  const auto derivs = multi_indices(dim, k);

  MomentaSeries out;
  out.times = run.times;
  out.values.assign(static_cast<std::size_t>(k) + 1, std::vector<double>(run.snapshots.size(), 0.0));

  for (std::size_t n = 0; n < run.snapshots.size(); ++n) {
    const WaveField& u = run.snapshots[n];
    for (const auto& beta : derivs) {
      WaveField d = u;
      for (int ax = 0; ax < dim; ++ax) {
        for (int r = 0; r < beta[ax]; ++r) d = spectral_derivative(d, ax);
      }
      const int beta_order = beta[0] + beta[1];
      for (const auto& alpha : multi_indices(dim, k - beta_order)) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
          const Vec p = grid.point(i);
          double w = 1.0;
          for (int ax = 0; ax < dim; ++ax) w *= std::pow(p[ax], alpha[ax]);
          s += w * w * std::norm(d[i]);
        }
        const double value = std::sqrt(s * grid.cell_volume());
        for (int m = beta_order + alpha[0] + alpha[1]; m <= k; ++m) {
          auto& slot = out.values[static_cast<std::size_t>(m)][n];
          slot = std::max(slot, value);
        }
      }
    }
  }

  for (const auto& series : out.values) {
    const std::size_t n = series.size();
    double rate = 0.0;
    double intercept = n ? std::log(series.front()) : 0.0;
    if (n > 1) {
      double st = 0, sl = 0, stt = 0, stl = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double l = std::log(series[i]);
        st += out.times[i];
        sl += l;
        stt += out.times[i] * out.times[i];
        stl += out.times[i] * l;
      }
      const double dn = static_cast<double>(n);
      const double den = dn * stt - st * st;
      if (den > 0) {
        rate = (dn * stl - st * sl) / den;
        intercept = (sl - rate * st) / dn;
      }
    }
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      resid = std::max(resid, std::abs(std::log(series[i]) - (intercept + rate * out.times[i])));
    }
    out.rates.push_back(rate);
    out.fit_residuals.push_back(resid);
  }
  return out;
}

void MomentaSeries::write_csv(std::ostream& out) const {
  out << "t";
  for (std::size_t m = 0; m < values.size(); ++m) out << ",M" << m;
  out << ",fitted_rate\n";
  char buf[64];
  const double rate = rates.empty() ? 0.0 : rates.back();
  for (std::size_t n = 0; n < times.size(); ++n) {
    std::snprintf(buf, sizeof(buf), "%.12e", times[n]);
    out << buf;
    for (const auto& series : values) {
      std::snprintf(buf, sizeof(buf), ",%.12e", series[n]);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.12e\n", rate);
    out << buf;
  }
}

double mass_radius(const WaveField& profile, double fraction) {
  const Grid& g = profile.grid();
  std::vector<std::pair<double, double>> r_m(profile.size());
  double total = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    r_m[i] = {norm(g.point(i)), std::norm(profile[i])};
    total += r_m[i].second;
  }
  if (total <= 0.0) return 0.0;
  std::sort(r_m.begin(), r_m.end());
  double acc = 0.0;
  for (const auto& [r, m] : r_m) {
    acc += m;
    if (acc >= fraction * total) return r;
  }
  return r_m.back().first;
}

}  // namespace ehrenfest
