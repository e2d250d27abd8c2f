#include "ehrenfest/hamiltonian_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ehrenfest/errors.hpp"
#include "text.hpp"

namespace ehrenfest {
namespace {

bool finite(const PhaseState& s) {
  return std::isfinite(s.x[0]) && std::isfinite(s.x[1]) && std::isfinite(s.xi[0]) &&
         std::isfinite(s.xi[1]) && std::isfinite(s.action);
}

double hermite(double p0, double m0, double p1, double m1, double h, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * p1 +
         (s3 - s2) * h * m1;
}

}  // namespace

Trajectory::Trajectory(Potential potential, double dt, std::vector<PhaseState> samples)
    : potential_(std::move(potential)), dt_(dt), samples_(std::move(samples)) {
  if (samples_.empty()) throw ConfigError("trajectory needs at least one sample");
  const auto& s0 = samples_.front();
  energy0_ = 0.5 * dot(s0.xi, s0.xi) + potential_.value(s0.x);
}

PhaseState Trajectory::state_at(double t) const {
  const double tol = 1e-9 * std::max(1.0, horizon());
  if (!(t >= -tol && t <= horizon() + tol)) {
    throw RangeError("time " + text::format_double(t) + " outside trajectory range [0, " +
                     text::format_double(horizon()) + "]");
  }
  if (samples_.size() == 1) return samples_.front();
  const double pos = std::clamp(t / dt_, 0.0, static_cast<double>(samples_.size() - 1));
  auto n = static_cast<std::size_t>(std::floor(pos));
  if (n >= samples_.size() - 1) n = samples_.size() - 2;
  const double s = pos - static_cast<double>(n);
  if (s == 0.0) return samples_[n];

  const PhaseState& a = samples_[n];
  const PhaseState& b = samples_[n + 1];
  const Vec fa = -1.0 * potential_.gradient(a.x);
  const Vec fb = -1.0 * potential_.gradient(b.x);
  const double la = 0.5 * dot(a.xi, a.xi) - potential_.value(a.x);
  const double lb = 0.5 * dot(b.xi, b.xi) - potential_.value(b.x);

  PhaseState out;
  for (int i = 0; i < dimension(); ++i) {
    out.x[i] = hermite(a.x[i], a.xi[i], b.x[i], b.xi[i], dt_, s);
    out.xi[i] = hermite(a.xi[i], fa[i], b.xi[i], fb[i], dt_, s);
  }
  out.action = hermite(a.action, la, b.action, lb, dt_, s);
  return out;
}

double Trajectory::energy(double t) const {
  const PhaseState s = state_at(t);
  return 0.5 * dot(s.xi, s.xi) + potential_.value(s.x);
}

double Trajectory::max_energy_drift() const {
  double drift = 0.0;
  for (const auto& s : samples_) {
    drift = std::max(drift, std::abs(0.5 * dot(s.xi, s.xi) + potential_.value(s.x) - energy0_));
  }
  return drift;
}

Vec Trajectory::min_position() const {
  Vec m = samples_.front().x;
  for (const auto& s : samples_) {
    for (int i = 0; i < kMaxDim; ++i) m[i] = std::min(m[i], s.x[i]);
  }
  return m;
}

Vec Trajectory::max_position() const {
  Vec m = samples_.front().x;
  for (const auto& s : samples_) {
    for (int i = 0; i < kMaxDim; ++i) m[i] = std::max(m[i], s.x[i]);
  }
  return m;
}

double Trajectory::max_momentum() const {
  double m = 0.0;
  for (const auto& s : samples_) m = std::max(m, norm(s.xi));
  return m;
}

GrowthFit Trajectory::growth_fit() const {
  // Least-squares rate of log(|x|+|xi|), then the smallest prefactor that
  // makes the exponential an upper envelope of every sample.
  const std::size_t n = samples_.size();
  std::vector<double> logr(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = samples_[i];
    logr[i] = std::log(std::max(norm(s.x) + norm(s.xi), std::numeric_limits<double>::min()));
  }
  double rate = 0.0;
  if (n > 1) {
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = time(i);
      st += t;
      sl += logr[i];
      stt += t * t;
      stl += t * logr[i];
    }
    const double dn = static_cast<double>(n);
    const double den = dn * stt - st * st;
    rate = den > 0 ? std::max(0.0, (dn * stl - st * sl) / den) : 0.0;
  }
  double log_pref = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) log_pref = std::max(log_pref, logr[i] - rate * time(i));
  return {std::exp(log_pref), rate};
}

void Trajectory::write_csv(std::ostream& out) const {
  const int d = dimension();
  out << "t";
  for (int i = 0; i < d; ++i) out << (d == 1 ? ",x" : ",x" + std::to_string(i + 1));
  for (int i = 0; i < d; ++i) out << (d == 1 ? ",xi" : ",xi" + std::to_string(i + 1));
  out << ",S,E\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    out << buf;
  };
  for (std::size_t n = 0; n < samples_.size(); ++n) {
    const auto& s = samples_[n];
    put(time(n));
    for (int i = 0; i < d; ++i) out << ',', put(s.x[i]);
    for (int i = 0; i < d; ++i) out << ',', put(s.xi[i]);
    out << ',';
    put(s.action);
    out << ',';
    put(0.5 * dot(s.xi, s.xi) + potential_.value(s.x));
    out << '\n';
  }
}

Trajectory integrate_flow(const Potential& potential, std::span<const double> x0,
                          std::span<const double> xi0, double T, double dt) {
  const int d = potential.dimension();
  if (x0.size() != static_cast<std::size_t>(d) || xi0.size() != static_cast<std::size_t>(d)) {
    throw ConfigError("initial point dimension does not match the potential");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("flow dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("flow horizon T must be positive");

  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  std::vector<PhaseState> samples;
  samples.reserve(steps + 1);
  PhaseState s;
  for (int i = 0; i < d; ++i) {
    s.x[i] = x0[i];
    s.xi[i] = xi0[i];
  }
  if (!finite(s)) throw ConfigError("initial phase-space point is not finite");
  samples.push_back(s);

  Vec force = -1.0 * potential.gradient(s.x);
  double v_old = potential.value(s.x);
  for (std::size_t n = 0; n < steps; ++n) {
    const Vec xi_half = s.xi + (0.5 * dt) * force;
    const Vec x_new = s.x + dt * xi_half;
    const double v_new = potential.value(x_new);
    force = -1.0 * potential.gradient(x_new);
    PhaseState next;
    next.x = x_new;
    next.xi = xi_half + (0.5 * dt) * force;
    next.action = s.action + dt * (0.5 * dot(xi_half, xi_half) - 0.5 * (v_old + v_new));
    if (!finite(next) || !std::isfinite(v_new)) {
      throw DivergedError(dt * static_cast<double>(n),
                          "classical trajectory diverged after t = " +
                              text::format_double(dt * static_cast<double>(n)));
    }
    samples.push_back(next);
    s = next;
    v_old = v_new;
  }
  return Trajectory(potential, dt, std::move(samples));
}

CrossingSet crossing_set(const Trajectory& a, const Trajectory& b, double gamma, double epsilon,
                         double T) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw ConfigError("crossing gamma must lie in (0, 1/2)");
  if (!(epsilon > 0.0)) throw ConfigError("crossing epsilon must be positive");
  if (!(T > 0.0)) throw ConfigError("crossing horizon must be positive");
  if (a.dt() != b.dt() || a.dimension() != b.dimension()) {
    throw ConfigError("crossing_set needs trajectories on a common sampling grid");
  }
  const double tol = 1e-9 * std::max(1.0, T);
  if (a.horizon() + tol < T || b.horizon() + tol < T) {
    throw RangeError("trajectories do not cover the crossing horizon");
  }

  const double radius = std::pow(epsilon, gamma);
  const double dt = a.dt();
  const auto last = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  auto gap = [&](std::size_t n) { return norm(a.sample(n).x - b.sample(n).x) - radius; };

  CrossingSet out{.gamma = gamma, .epsilon = epsilon, .intervals = {}, .total_measure = 0.0};
  double g_prev = gap(0);
  double t_prev = 0.0;
  double open_at = g_prev <= 0.0 ? 0.0 : -1.0;
  for (std::size_t n = 1; n <= last; ++n) {
    double t = std::min(a.time(n), T);
    double g = gap(n);
    if (a.time(n) > T) {
      // Clip the final cell at T.
      const double frac = (T - t_prev) / dt;
      g = g_prev + frac * (g - g_prev);
      t = T;
    }
    if ((g_prev > 0.0) != (g > 0.0)) {
      const double root = t_prev + (t - t_prev) * g_prev / (g_prev - g);
      if (g <= 0.0) {
        open_at = root;
      } else {
        out.intervals.emplace_back(open_at, root);
        open_at = -1.0;
      }
    }
    g_prev = g;
    t_prev = t;
  }
  if (open_at >= 0.0) out.intervals.emplace_back(open_at, T);
  for (const auto& [lo, hi] : out.intervals) out.total_measure += hi - lo;
  return out;
}

}  // namespace ehrenfest
