#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ehrenfest/types.hpp"

namespace ehrenfest {

/// Value, gradient and Hessian of a potential at one point.
struct PotentialSample {
  double value = 0.0;
  Vec gradient{};
  Mat hessian{};
};

/// One closed-form building block of a potential.
struct PotentialTerm {
  enum class Kind { zero, linear, harmonic, inverted_harmonic, cosine, gaussian_bump };

  Kind kind = Kind::zero;
  double amplitude = 0.0;  // cosine / gaussian_bump
  double width = 1.0;      // gaussian_bump
  Vec vector{};            // slope (linear), omega (harmonic), wavenumber (cosine), center (bump)
};

/// A smooth subquadratic potential on R^d built as a sum of catalog terms.
///
/// Every term has analytic derivatives and a bounded Hessian; the bound
/// returned by hessian_bound() is an upper bound on the spectral norm of
/// Hess V over the whole space. Immutable after construction.
class Potential {
 public:
  Potential() = default;

  static Potential zero(int dim);
  static Potential linear(std::span<const double> slope);
  static Potential harmonic(std::span<const double> omega);
  static Potential inverted_harmonic(std::span<const double> omega);
  static Potential cosine(double amplitude, std::span<const double> wavenumber);
  static Potential gaussian_bump(double amplitude, double width, std::span<const double> center);

  /// Parses the config-file form, e.g. "harmonic(1) + cosine(1, 1)".
  static Potential parse(std::string_view expression, int dim);

  /// Sum of two potentials of equal dimension.
  Potential operator+(const Potential& other) const;

  int dimension() const noexcept { return dim_; }
  const std::vector<PotentialTerm>& terms() const noexcept { return terms_; }

  /// Checked evaluation; throws ConfigError when x.size() != dimension().
  PotentialSample evaluate(std::span<const double> x) const;

  // Unchecked fast paths used by the integrators.
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  /// V(x) - T2(x, a) where T2 is the second-order Taylor polynomial of V at a.
  double taylor_remainder(std::span<const double> x, std::span<const double> a) const;

  /// Upper bound on sup_x ||Hess V(x)||_2.
  double hessian_bound() const;

  /// True when V is a polynomial of degree at most two.
  bool is_quadratic() const;

  /// Canonical config-file form; parse(to_string()) reproduces the potential.
  std::string to_string() const;

 private:
  Potential(int dim, std::vector<PotentialTerm> terms) : dim_(dim), terms_(std::move(terms)) {}

  int dim_ = 1;
  std::vector<PotentialTerm> terms_;
};

}  // namespace ehrenfest
