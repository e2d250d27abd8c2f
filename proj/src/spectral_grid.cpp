#include "ehrenfest/spectral_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "ehrenfest/errors.hpp"

namespace ehrenfest {

double Axis::wavenumber(std::size_t i) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(points);
  auto m = static_cast<std::ptrdiff_t>(i);
  if (m >= n / 2) m -= n;
  return 2.0 * std::numbers::pi / length * static_cast<double>(m);
}

Grid::Grid(std::span<const Axis> axes) {
  if (axes.empty() || axes.size() > static_cast<std::size_t>(kMaxDim)) {
    throw ConfigError("grid dimension must be 1 or 2");
  }
  dim_ = static_cast<int>(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const Axis& a = axes[i];
    if (a.points < 16 || !std::has_single_bit(a.points)) {
      throw ConfigError("grid axis point count must be a power of two >= 16, got " +
                        std::to_string(a.points));
    }
    if (!(a.length > 0.0) || !std::isfinite(a.length) || !std::isfinite(a.left)) {
      throw ConfigError("grid axis length must be positive and finite");
    }
    axes_[i] = a;
  }
}

Grid Grid::line(double left, double length, std::size_t points) {
  const Axis a{left, length, points};
  return Grid(std::span<const Axis>(&a, 1));
}

Grid Grid::plane(const Axis& a0, const Axis& a1) {
  const std::array<Axis, 2> axes{a0, a1};
  return Grid(axes);
}

std::size_t Grid::size() const noexcept {
  return dim_ == 1 ? axes_[0].points : axes_[0].points * axes_[1].points;
}

double Grid::cell_volume() const noexcept {
  return dim_ == 1 ? axes_[0].spacing() : axes_[0].spacing() * axes_[1].spacing();
}

std::array<std::size_t, kMaxDim> Grid::indices(std::size_t flat) const noexcept {
  if (dim_ == 1) return {flat, 0};
  return {flat / axes_[1].points, flat % axes_[1].points};
}

Vec Grid::point(std::size_t flat) const noexcept {
  const auto idx = indices(flat);
  if (dim_ == 1) return {axes_[0].coordinate(idx[0]), 0.0};
  return {axes_[0].coordinate(idx[0]), axes_[1].coordinate(idx[1])};
}

WaveField::WaveField(Grid grid, double epsilon)
    : grid_(std::move(grid)), values_(grid_.size()), epsilon_(epsilon) {}

WaveField::WaveField(Grid grid, std::vector<complex> values, double epsilon)
    : grid_(std::move(grid)), values_(std::move(values)), epsilon_(epsilon) {
  if (values_.size() != grid_.size()) throw ConfigError("field size does not match its grid");
}

double WaveField::mass() const noexcept {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return s * grid_.cell_volume();
}

bool WaveField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](const complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

WaveField& WaveField::operator+=(const WaveField& other) {
  if (!(other.grid_ == grid_)) throw ConfigError("field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

WaveField& WaveField::operator-=(const WaveField& other) {
  if (!(other.grid_ == grid_)) throw ConfigError("field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

WaveField& WaveField::operator*=(complex s) {
  for (auto& v : values_) v *= s;
  return *this;
}

WaveField operator+(WaveField a, const WaveField& b) { return a += b; }
WaveField operator-(WaveField a, const WaveField& b) { return a -= b; }

std::vector<double> axis_wavenumbers(const Grid& grid, int axis) {
  std::vector<double> k(grid.size());
  const Axis& a = grid.axis(axis);
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = a.wavenumber(grid.indices(i)[axis]);
  return k;
}

WaveField spectral_derivative(const WaveField& f, int axis) {
  const Grid& g = f.grid();
  FourierTransform fft(g);
  auto buf = fft.buffer();
  std::copy(f.values().begin(), f.values().end(), buf.begin());
  fft.forward();
  const Axis& a = g.axis(axis);
  const double inv_n = 1.0 / static_cast<double>(g.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const std::size_t ia = g.indices(i)[axis];
    const double k = ia == a.points / 2 ? 0.0 : a.wavenumber(ia);
    buf[i] *= complex(0.0, k * inv_n);
  }
  fft.backward();
  return WaveField(g, std::vector<complex>(buf.begin(), buf.end()), f.epsilon());
}

double norm_l2(const WaveField& f) { return std::sqrt(f.mass()); }

double norm_sigma_eps(const WaveField& f) {
  const Grid& g = f.grid();
  const double eps = f.epsilon();
  double grad2 = 0.0;
  for (int ax = 0; ax < g.dimension(); ++ax) grad2 += spectral_derivative(f, ax).mass();
  double x2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec p = g.point(i);
    x2 += dot(p, p) * std::norm(f[i]);
  }
  x2 *= g.cell_volume();
  return norm_l2(f) + eps * std::sqrt(grad2) + std::sqrt(x2);
}

WaveField apply_A(const WaveField& f, const PhaseState& center, int axis) {
  const double se = std::sqrt(f.epsilon());
  WaveField out = spectral_derivative(f, axis);
  const complex shift(0.0, -center.xi[axis] / se);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = se * out[i] + shift * f[i];
  return out;
}

WaveField apply_A(const WaveField& f, double t, const Trajectory& traj, int axis) {
  return apply_A(f, traj.state_at(t), axis);
}

WaveField apply_B(const WaveField& f, const PhaseState& center, int axis) {
  const double se = std::sqrt(f.epsilon());
  WaveField out(f.grid(), f.epsilon());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (f.grid().point(i)[axis] - center.x[axis]) / se * f[i];
  }
  return out;
}

WaveField apply_B(const WaveField& f, double t, const Trajectory& traj, int axis) {
  return apply_B(f, traj.state_at(t), axis);
}

double norm_A(const WaveField& f, const PhaseState& center) {
  double s = 0.0;
  for (int ax = 0; ax < f.grid().dimension(); ++ax) s += apply_A(f, center, ax).mass();
  return std::sqrt(s);
}

double norm_B(const WaveField& f, const PhaseState& center) {
  double s = 0.0;
  for (int ax = 0; ax < f.grid().dimension(); ++ax) s += apply_B(f, center, ax).mass();
  return std::sqrt(s);
}

NormTriple norm_triple(const WaveField& f, const PhaseState& center) {
  const double l2 = norm_l2(f);
  return {l2, norm_sigma_eps(f), l2 + norm_A(f, center) + norm_B(f, center)};
}

NormTriple norm_triple(const WaveField& f, double t, const Trajectory& traj) {
  return norm_triple(f, traj.state_at(t));
}

double max_spacing(double epsilon, double max_momentum, double dispersion_allowance) {
  return epsilon * std::numbers::pi / (4.0 * max_momentum + dispersion_allowance);
}

Grid size_grid(std::span<const Trajectory* const> trajectories, double epsilon,
               double envelope_radius, const GridPolicy& policy) {
  if (trajectories.empty()) throw ConfigError("size_grid needs at least one trajectory");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const int dim = trajectories.front()->dimension();
  const double margin =
      std::max(policy.margin_radii * std::sqrt(epsilon) * envelope_radius, policy.min_margin);
  Vec lo = trajectories.front()->min_position();
  Vec hi = trajectories.front()->max_position();
  double pmax = 0.0;
  for (const Trajectory* t : trajectories) {
    if (t->dimension() != dim) throw ConfigError("trajectories of mixed dimension");
    const Vec a = t->min_position();
    const Vec b = t->max_position();
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], a[i]);
      hi[i] = std::max(hi[i], b[i]);
    }
    pmax = std::max(pmax, t->max_momentum());
  }
  const double hmax = max_spacing(epsilon, pmax, policy.dispersion_allowance);
  std::array<Axis, kMaxDim> axes{};
  for (int i = 0; i < dim; ++i) {
    const double left = lo[i] - margin;
    const double length = hi[i] + margin - left;
    std::size_t n = policy.points_override;
    if (n == 0) {
      const double need = std::ceil(length / hmax);
      if (need > 1e9) throw ConfigError("grid would need more than 1e9 points per axis");
      n = std::bit_ceil(std::max<std::size_t>(16, static_cast<std::size_t>(need)));
    }
    n = static_cast<std::size_t>(std::llround(static_cast<double>(n) * policy.refine));
    axes[i] = Axis{left, length, n};
  }
  return Grid(std::span<const Axis>(axes.data(), static_cast<std::size_t>(dim)));
}

double boundary_mass_fraction(const WaveField& f, std::size_t cells) {
  const Grid& g = f.grid();
  double edge = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double m = std::norm(f[i]);
    total += m;
    const auto idx = g.indices(i);
    bool near = false;
    for (int ax = 0; ax < g.dimension(); ++ax) {
      const std::size_t n = g.axis(ax).points;
      if (idx[ax] < cells || idx[ax] >= n - cells) near = true;
    }
    if (near) edge += m;
  }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace ehrenfest
