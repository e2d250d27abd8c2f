#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "ehrenfest/hamiltonian_flow.hpp"
#include "ehrenfest/types.hpp"

namespace ehrenfest {

/// One periodic axis: `points` samples at left + i*h, h = length/points.
struct Axis {
  double left = 0.0;
  double length = 1.0;
  std::size_t points = 16;

  double spacing() const noexcept { return length / static_cast<double>(points); }
  double coordinate(std::size_t i) const noexcept { return left + spacing() * static_cast<double>(i); }
  /// Angular wavenumber of FFT bin i (standard ordering, Nyquist bin negative).
  double wavenumber(std::size_t i) const noexcept;
  double right() const noexcept { return left + length; }
  bool operator==(const Axis&) const = default;
};

/// Uniform periodic grid in d = 1 or 2 dimensions, row-major with axis 0
/// varying slowest. Every axis has a power-of-two point count >= 16.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::span<const Axis> axes);
  static Grid line(double left, double length, std::size_t points);
  static Grid plane(const Axis& a0, const Axis& a1);

  int dimension() const noexcept { return dim_; }
  const Axis& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  std::size_t size() const noexcept;
  double cell_volume() const noexcept;
  /// Coordinates of the sample with flat index `flat`.
  Vec point(std::size_t flat) const noexcept;
  /// Per-axis indices of the sample with flat index `flat`.
  std::array<std::size_t, kMaxDim> indices(std::size_t flat) const noexcept;

  bool operator==(const Grid&) const = default;

 private:
  int dim_ = 1;
  std::array<Axis, kMaxDim> axes_{};
};

/// Complex samples of a field on a grid, tagged with the semiclassical
/// parameter it belongs to (1 for envelope-frame fields).
class WaveField {
 public:
  WaveField() = default;
  WaveField(Grid grid, double epsilon);
  WaveField(Grid grid, std::vector<complex> values, double epsilon);

  const Grid& grid() const noexcept { return grid_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<complex> values() noexcept { return values_; }
  std::span<const complex> values() const noexcept { return values_; }
  complex& operator[](std::size_t i) { return values_[i]; }
  const complex& operator[](std::size_t i) const { return values_[i]; }

  /// Discrete squared L2 norm h^d * sum |f|^2.
  double mass() const noexcept;
  bool all_finite() const noexcept;

  WaveField& operator+=(const WaveField& other);
  WaveField& operator-=(const WaveField& other);
  WaveField& operator*=(complex s);

 private:
  Grid grid_{};
  std::vector<complex> values_;
  double epsilon_ = 1.0;
};

WaveField operator+(WaveField a, const WaveField& b);
WaveField operator-(WaveField a, const WaveField& b);

/// In-place FFTW transform bound to one grid shape. The backward transform is
/// unnormalized. Plans are created with FFTW_ESTIMATE so results are
/// reproducible run to run.
class FourierTransform {
 public:
  explicit FourierTransform(const Grid& grid);
  ~FourierTransform();
  FourierTransform(FourierTransform&&) noexcept;
  FourierTransform& operator=(FourierTransform&&) noexcept;
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  std::span<complex> buffer() noexcept;
  void forward() noexcept;
  void backward() noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Wavenumbers of every flat index along one axis, i.e. k_axis(flat).
std::vector<double> axis_wavenumbers(const Grid& grid, int axis);

/// Spectral partial derivative along `axis` (Nyquist mode dropped).
WaveField spectral_derivative(const WaveField& f, int axis);

// --- norms -----------------------------------------------------------------

struct NormTriple {
  double l2 = 0.0;
  double sigma_eps = 0.0;
  double h_norm = 0.0;
};

double norm_l2(const WaveField& f);

/// ||f|| + ||eps grad f|| + ||x f||.
double norm_sigma_eps(const WaveField& f);

/// A^eps f = sqrt(eps) d_axis f - i xi_axis(t)/sqrt(eps) f.
WaveField apply_A(const WaveField& f, const PhaseState& center, int axis = 0);
WaveField apply_A(const WaveField& f, double t, const Trajectory& traj, int axis = 0);

/// B^eps f = (x_axis - x_axis(t))/sqrt(eps) f.
WaveField apply_B(const WaveField& f, const PhaseState& center, int axis = 0);
WaveField apply_B(const WaveField& f, double t, const Trajectory& traj, int axis = 0);

/// ||A^eps f|| and ||B^eps f|| summed over components as Euclidean vectors.
double norm_A(const WaveField& f, const PhaseState& center);
double norm_B(const WaveField& f, const PhaseState& center);

NormTriple norm_triple(const WaveField& f, const PhaseState& center);
NormTriple norm_triple(const WaveField& f, double t, const Trajectory& traj);

// --- grid sizing and guards -------------------------------------------------

struct GridPolicy {
  double dispersion_allowance = 10.0;  ///< p_disp in h <= eps*pi/(4 max|xi| + p_disp)
  double margin_radii = 10.0;          ///< margin = max(margin_radii*sqrt(eps)*r_a, min_margin)
  double min_margin = 2.0;
  std::size_t points_override = 0;     ///< fixed per-axis N when nonzero
  double refine = 1.0;                 ///< multiplies the point count (self-check runs use 2)
  bool operator==(const GridPolicy&) const = default;
};

/// Largest admissible spacing for oscillations of frequency max|xi|/eps.
double max_spacing(double epsilon, double max_momentum, double dispersion_allowance);

/// Grid covering every trajectory's excursion plus margin, resolving the
/// fastest oscillation. `envelope_radius` is the 99.99%-mass radius r_a.
Grid size_grid(std::span<const Trajectory* const> trajectories, double epsilon,
               double envelope_radius, const GridPolicy& policy);

/// Fraction of the mass within `cells` samples of any boundary.
double boundary_mass_fraction(const WaveField& f, std::size_t cells = 5);

inline constexpr double kBoundaryMassLimit = 1e-8;

// --- snapshot I/O -----------------------------------------------------------

/// Little-endian binary snapshot: int64 d, int64 N[d], float64 left[d],
/// float64 right[d], float64 epsilon, then interleaved (re, im) float64
/// samples in row-major order.
void write_field_binary(std::ostream& out, const WaveField& f);
WaveField read_field_binary(std::istream& in);

/// 1-d CSV with header x,re,im,abs.
void write_field_csv(std::ostream& out, const WaveField& f);

}  // namespace ehrenfest
