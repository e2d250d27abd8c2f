#include "ehrenfest/nls_solver.hpp"

#include <algorithm>
#include <cmath>

#include "ehrenfest/errors.hpp"
#include "split_step.hpp"
#include "text.hpp"

namespace ehrenfest {

double critical_alpha(int dimension, int sigma) {
  return 1.0 + 0.5 * static_cast<double>(dimension) * static_cast<double>(sigma);
}

void SimConfig::validate() {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (dimension < 1 || dimension > kMaxDim) throw ConfigError("dimension must be 1 or 2");
  if (sigma < 1) throw ConfigError("sigma must be an integer >= 1");
  if (!std::isfinite(lambda)) throw ConfigError("lambda must be finite");
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("T must be positive");
  if (dt < 0.0 || flow_dt < 0.0 || !(dt_per_eps > 0.0)) {
    throw ConfigError("time steps must be positive");
  }
  if (!(envelope_dt > 0.0)) throw ConfigError("envelope_dt must be positive");
  if (!(envelope_extent > 0.0)) throw ConfigError("envelope_extent must be positive");
  if (envelope_points < 16 || (envelope_points & (envelope_points - 1)) != 0) {
    throw ConfigError("envelope_points must be a power of two >= 16");
  }
  if (!(grid.refine > 0.0)) throw ConfigError("grid refinement must be positive");
  alpha_c = critical_alpha(dimension, sigma);
}

double SimConfig::flow_step() const noexcept {
  return flow_dt > 0.0 ? flow_dt : std::min(1e-3, pde_dt());
}

void propagate_nls(const SimConfig& cfg, const Potential& potential, const WaveField& psi0,
                   std::span<const double> sample_times, const SnapshotObserver& observer) {
  const Grid& grid = psi0.grid();
  if (grid.dimension() != cfg.dimension || potential.dimension() != cfg.dimension) {
    throw ConfigError("field, potential and config dimensions differ");
  }
  if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
    throw ConfigError("sample times must be nondecreasing");
  }
  if (!sample_times.empty() &&
      (sample_times.front() < 0.0 || sample_times.back() > cfg.horizon * (1.0 + 1e-12))) {
    throw ConfigError("sample times must lie within [0, T]");
  }

  const double eps = cfg.epsilon;
  const double coupling = cfg.lambda * std::pow(eps, cfg.alpha);
  const int sigma = cfg.sigma;

  std::vector<double> potential_values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) potential_values[i] = potential.value(grid.point(i));

  detail::SplitStepEngine engine(grid, 0.5 * eps, cfg.dealias);
  engine.load(psi0.values());

  // Potential-only phase factors are reused while the step size is fixed.
  std::vector<detail::xcomplex> linear_phase;
  double linear_phase_h = -1.0;
  auto phase = [&](std::span<detail::xcomplex> psi, double, double h) {
    const long double step = static_cast<long double>(h) / eps;
    if (coupling == 0.0) {
      if (h != linear_phase_h) {
        linear_phase.resize(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
          linear_phase[i] = std::polar(1.0L, -step * potential_values[i]);
        }
        linear_phase_h = h;
      }
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= linear_phase[i];
      return;
    }
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const long double v = potential_values[i] + coupling * detail::modulus_power(psi[i], sigma);
      psi[i] *= std::polar(1.0L, -step * v);
    }
  };

  double last_good = 0.0;
  auto check = [&](double t) {
    const WaveField view = engine.field(eps);
    if (!view.all_finite()) {
      throw DivergedError(last_good, "full solution became non-finite after t = " +
                                         text::format_double(last_good));
    }
    const double frac = boundary_mass_fraction(view);
    if (frac > kBoundaryMassLimit) {
      throw InvalidRunError(t, "boundary-mass guard tripped at t = " + text::format_double(t) +
                                   " (edge mass fraction " + text::format_double(frac) + ")");
    }
    last_good = t;
  };

  check(0.0);
  double t = 0.0;
  const double dt = cfg.pde_dt();
  for (const double ts : sample_times) {
    engine.advance(t, ts, dt, phase, check);
    t = std::max(t, ts);
    const WaveField snap = engine.field(eps);
    if (!observer(ts, snap)) return;
  }
}

std::vector<WaveField> propagate_nls(const SimConfig& cfg, const Potential& potential,
                                     const WaveField& psi0, std::span<const double> sample_times) {
  std::vector<WaveField> out;
  out.reserve(sample_times.size());
  propagate_nls(cfg, potential, psi0, sample_times, [&](double, const WaveField& f) {
    out.push_back(f);
    return true;
  });
  return out;
}

}  // namespace ehrenfest
