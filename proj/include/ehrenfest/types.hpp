#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace ehrenfest {

/// Largest supported spatial dimension.
inline constexpr int kMaxDim = 2;

using complex = std::complex<double>;

/// A point or vector in R^d, d <= kMaxDim. Components past the active
/// dimension are kept at zero so Euclidean helpers need no dimension argument.
using Vec = std::array<double, kMaxDim>;

/// Symmetric d x d matrix, zero-padded like Vec.
using Mat = std::array<Vec, kMaxDim>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1]}; }

inline Vec operator*(const Mat& m, const Vec& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}
inline Mat operator+(const Mat& a, const Mat& b) {
  return {Vec{a[0][0] + b[0][0], a[0][1] + b[0][1]}, Vec{a[1][0] + b[1][0], a[1][1] + b[1][1]}};
}
inline Mat operator*(double s, const Mat& a) {
  return {Vec{s * a[0][0], s * a[0][1]}, Vec{s * a[1][0], s * a[1][1]}};
}

/// Spectral norm of a symmetric 2x2 (or padded 1x1) matrix.
inline double spectral_norm(const Mat& m) {
  const double tr = 0.5 * (m[0][0] + m[1][1]);
  const double diff = 0.5 * (m[0][0] - m[1][1]);
  const double rad = std::sqrt(diff * diff + m[0][1] * m[1][0]);
  return std::max(std::abs(tr + rad), std::abs(tr - rad));
}

}  // namespace ehrenfest
