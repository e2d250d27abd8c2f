#include "ehrenfest/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ehrenfest/errors.hpp"
#include "text.hpp"

namespace ehrenfest {
namespace {

// erf(r) = 0.9999 in 1-d; 1 - exp(-r^2) = 0.9999 in 2-d (unit width).
constexpr double kGaussRadius1d = 2.7510639057120607;
const double kGaussRadius2d = std::sqrt(std::log(1e4));

double gaussian_value(const GaussianProfile& g, const Vec& y, int dim) {
  const Vec r = y - g.center_offset;
  const double w2 = g.width * g.width;
  const double norm_const = std::pow(std::numbers::pi * w2, -0.25 * dim);
  return norm_const * std::exp(-dot(r, r) / (2.0 * w2));
}

/// Symmetric trigonometric coefficients p_0..p_N of one table axis (Nyquist
/// split between both ends) laid out so that
///   u(y) = exp(-i (N/2) dk s) * sum_j p_j z^j,  z = exp(i dk s),  s = y - left.
std::size_t symmetric_index(std::size_t j, std::size_t n) {
  // j in [0, N]: m' = j - N/2 mapped to FFT bin.
  const auto m = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(n / 2);
  return static_cast<std::size_t>((m + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n));
}

double split_weight(std::size_t j, std::size_t n) { return (j == 0 || j == n) ? 0.5 : 1.0; }

struct AxisEval {
  std::vector<std::size_t> index;  // target positions inside the table domain
  std::vector<complex> z;          // exp(i dk s)
  std::vector<complex> shift;      // exp(-i (N/2) dk s)
};

AxisEval prepare_axis(const Axis& a, const std::vector<double>& ys) {
  AxisEval e;
  const double dk = 2.0 * std::numbers::pi / a.length;
  const double half = static_cast<double>(a.points / 2);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double s = ys[i] - a.left;
    if (!(s >= 0.0 && s <= a.length)) continue;
    e.index.push_back(i);
    e.z.push_back(std::polar(1.0, dk * s));
    e.shift.push_back(std::polar(1.0, -half * dk * s));
  }
  return e;
}

template <typename Coef>
complex horner(std::size_t n, const complex& z, Coef&& coef) {
  complex acc = coef(n);
  for (std::size_t j = n; j-- > 0;) acc = acc * z + coef(j);
  return acc;
}

}  // namespace

std::vector<complex> interpolate_band_limited(const WaveField& table,
                                              std::span<const std::vector<double>> targets) {
  const Grid& g = table.grid();
  const int dim = g.dimension();
  if (targets.size() != static_cast<std::size_t>(dim)) {
    throw ConfigError("interpolation target dimension does not match the table");
  }
  FourierTransform fft(g);
  auto c = fft.buffer();
  std::copy(table.values().begin(), table.values().end(), c.begin());
  fft.forward();
  const double inv_n = 1.0 / static_cast<double>(g.size());

  if (dim == 1) {
    const std::size_t n = g.axis(0).points;
    std::vector<complex> p(n + 1);
    for (std::size_t j = 0; j <= n; ++j) p[j] = split_weight(j, n) * inv_n * c[symmetric_index(j, n)];
    const AxisEval e = prepare_axis(g.axis(0), targets[0]);
    std::vector<complex> out(targets[0].size());
    for (std::size_t q = 0; q < e.index.size(); ++q) {
      out[e.index[q]] = e.shift[q] * horner(n, e.z[q], [&](std::size_t j) { return p[j]; });
    }
    return out;
  }

  const std::size_t n0 = g.axis(0).points;
  const std::size_t n1 = g.axis(1).points;
  // p[j0][j1] with both axes symmetric.
  std::vector<complex> p((n0 + 1) * (n1 + 1));
  for (std::size_t j0 = 0; j0 <= n0; ++j0) {
    for (std::size_t j1 = 0; j1 <= n1; ++j1) {
      const std::size_t flat = symmetric_index(j0, n0) * n1 + symmetric_index(j1, n1);
      p[j0 * (n1 + 1) + j1] = split_weight(j0, n0) * split_weight(j1, n1) * inv_n * c[flat];
    }
  }
  const AxisEval e0 = prepare_axis(g.axis(0), targets[0]);
  const AxisEval e1 = prepare_axis(g.axis(1), targets[1]);
  const std::size_t m1 = targets[1].size();
  std::vector<complex> out(targets[0].size() * m1);
  std::vector<complex> partial(n1 + 1);
  for (std::size_t q0 = 0; q0 < e0.index.size(); ++q0) {
    for (std::size_t j1 = 0; j1 <= n1; ++j1) {
      partial[j1] = e0.shift[q0] *
                    horner(n0, e0.z[q0], [&](std::size_t j0) { return p[j0 * (n1 + 1) + j1]; });
    }
    for (std::size_t q1 = 0; q1 < e1.index.size(); ++q1) {
      out[e0.index[q0] * m1 + e1.index[q1]] =
          e1.shift[q1] * horner(n1, e1.z[q1], [&](std::size_t j) { return partial[j]; });
    }
  }
  return out;
}

WaveField sample_envelope(const PacketSpec& spec, const Grid& y_grid) {
  if (y_grid.dimension() != spec.dimension) throw ConfigError("envelope grid dimension mismatch");
  WaveField out(y_grid, 1.0);
  if (const auto* gauss = std::get_if<GaussianProfile>(&spec.envelope)) {
    if (!(gauss->width > 0.0)) throw ConfigError("gaussian envelope width must be positive");
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = spec.amplitude * gaussian_value(*gauss, y_grid.point(i), spec.dimension);
    }
    return out;
  }
  const auto& table = std::get<WaveField>(spec.envelope);
  if (table.grid().dimension() != spec.dimension) throw ConfigError("tabulated envelope dimension mismatch");
  std::vector<std::vector<double>> targets(static_cast<std::size_t>(spec.dimension));
  for (int ax = 0; ax < spec.dimension; ++ax) {
    const Axis& a = y_grid.axis(ax);
    for (std::size_t i = 0; i < a.points; ++i) targets[ax].push_back(a.coordinate(i));
  }
  const auto vals = interpolate_band_limited(table, targets);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec.amplitude * vals[i];
  return out;
}

double envelope_radius(const PacketSpec& spec) {
  if (const auto* gauss = std::get_if<GaussianProfile>(&spec.envelope)) {
    const double unit = spec.dimension == 1 ? kGaussRadius1d : kGaussRadius2d;
    return unit * gauss->width + norm(gauss->center_offset);
  }
  return mass_radius(std::get<WaveField>(spec.envelope));
}

Grid envelope_grid(const PacketSpec& spec, const SimConfig& cfg) {
  const double half = cfg.envelope_extent * envelope_radius(spec);
  const Axis a{-half, 2.0 * half, cfg.envelope_points};
  return spec.dimension == 1 ? Grid::line(a.left, a.length, a.points) : Grid::plane(a, a);
}

WaveField build_initial(const PacketSpec& spec, const SimConfig& cfg, const Grid& grid) {
  const int dim = grid.dimension();
  if (dim != spec.dimension || dim != cfg.dimension) throw ConfigError("packet/grid dimension mismatch");
  const double eps = cfg.epsilon;
  for (int ax = 0; ax < dim; ++ax) {
    const double xi = std::abs(spec.xi0[ax]);
    if (xi > 0.0 && grid.axis(ax).spacing() > eps * std::numbers::pi / (4.0 * xi)) {
      throw ConfigError("grid spacing " + text::format_double(grid.axis(ax).spacing()) +
                        " under-resolves the packet oscillation xi0/eps on axis " +
                        std::to_string(ax));
    }
  }
  const double se = std::sqrt(eps);
  const double scale = std::pow(eps, -0.25 * dim);
  WaveField out(grid, eps);

  if (const auto* gauss = std::get_if<GaussianProfile>(&spec.envelope)) {
    if (!(gauss->width > 0.0)) throw ConfigError("gaussian envelope width must be positive");
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Vec dx = grid.point(i) - spec.x0;
      const double a = gaussian_value(*gauss, (1.0 / se) * dx, dim);
      out[i] = spec.amplitude * scale * a * std::polar(1.0, dot(dx, spec.xi0) / eps);
    }
    return out;
  }

  const auto& table = std::get<WaveField>(spec.envelope);
  std::vector<std::vector<double>> targets(static_cast<std::size_t>(dim));
  for (int ax = 0; ax < dim; ++ax) {
    const Axis& a = grid.axis(ax);
    for (std::size_t i = 0; i < a.points; ++i) targets[ax].push_back((a.coordinate(i) - spec.x0[ax]) / se);
  }
  const auto vals = interpolate_band_limited(table, targets);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Vec dx = grid.point(i) - spec.x0;
    out[i] = spec.amplitude * scale * vals[i] * std::polar(1.0, dot(dx, spec.xi0) / eps);
  }
  return out;
}

WaveField reconstruct(const EnvelopeRun& env, const Trajectory& traj, const SimConfig& cfg,
                      double t, const Grid& grid) {
  const int dim = grid.dimension();
  if (dim != traj.dimension() || dim != env.grid.dimension()) {
    throw ConfigError("reconstruction dimension mismatch");
  }
  const WaveField& u = env.snapshot_at(t);
  const PhaseState c = traj.state_at(t);
  const double eps = cfg.epsilon;
  const double se = std::sqrt(eps);

  const double keep_out = se * mass_radius(u);
  for (int ax = 0; ax < dim; ++ax) {
    const Axis& a = grid.axis(ax);
    if (c.x[ax] - keep_out < a.left || c.x[ax] + keep_out > a.right()) {
      throw ConfigError("packet centre at t = " + text::format_double(t) +
                        " is within its mass radius of the grid boundary");
    }
  }

  std::vector<std::vector<double>> targets(static_cast<std::size_t>(dim));
  for (int ax = 0; ax < dim; ++ax) {
    const Axis& a = grid.axis(ax);
    targets[ax].resize(a.points);
    for (std::size_t i = 0; i < a.points; ++i) targets[ax][i] = (a.coordinate(i) - c.x[ax]) / se;
  }
  const auto vals = interpolate_band_limited(u, targets);

  const double scale = std::pow(eps, -0.25 * dim);
  WaveField out(grid, eps);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (vals[i] == complex{}) continue;
    const Vec dx = grid.point(i) - c.x;
    out[i] = scale * vals[i] * std::polar(1.0, (c.action + dot(c.xi, dx)) / eps);
  }
  return out;
}

WaveField superpose(const PacketSpec& first, const PacketSpec& second, const SimConfig& cfg,
                    const Grid& grid) {
  return build_initial(first, cfg, grid) + build_initial(second, cfg, grid);
}

bool same_phase_point(const PacketSpec& first, const PacketSpec& second) {
  return first.x0 == second.x0 && first.xi0 == second.xi0;
}

}  // namespace ehrenfest
