#include "ehrenfest/potential.hpp"

#include <cmath>
#include <numbers>

#include "ehrenfest/errors.hpp"
#include "text.hpp"

namespace ehrenfest {
namespace {

using Kind = PotentialTerm::Kind;

Vec to_vec(std::span<const double> v, int dim, const char* what) {
  if (v.size() != static_cast<std::size_t>(dim)) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(dim) + " components, got " +
                      std::to_string(v.size()));
  }
  Vec out{};
  for (int i = 0; i < dim; ++i) out[i] = v[i];
  return out;
}

int checked_dim(std::size_t n) {
  if (n < 1 || n > static_cast<std::size_t>(kMaxDim)) {
    throw ConfigError("potential dimension must be 1 or 2, got " + std::to_string(n));
  }
  return static_cast<int>(n);
}

double term_value(const PotentialTerm& t, const Vec& x) {
  switch (t.kind) {
    case Kind::zero:
      return 0.0;
    case Kind::linear:
      return dot(t.vector, x);
    case Kind::harmonic:
    case Kind::inverted_harmonic: {
      const double s = t.kind == Kind::harmonic ? 0.5 : -0.5;
      return s * (t.vector[0] * t.vector[0] * x[0] * x[0] + t.vector[1] * t.vector[1] * x[1] * x[1]);
    }
    case Kind::cosine:
      return t.amplitude * std::cos(dot(t.vector, x));
    case Kind::gaussian_bump: {
      const Vec r = x - t.vector;
      return t.amplitude * std::exp(-dot(r, r) / (2.0 * t.width * t.width));
    }
  }
  return 0.0;
}

Vec term_gradient(const PotentialTerm& t, const Vec& x) {
  switch (t.kind) {
    case Kind::zero:
      return {};
    case Kind::linear:
      return t.vector;
    case Kind::harmonic:
    case Kind::inverted_harmonic: {
      const double s = t.kind == Kind::harmonic ? 1.0 : -1.0;
      return {s * t.vector[0] * t.vector[0] * x[0], s * t.vector[1] * t.vector[1] * x[1]};
    }
    case Kind::cosine:
      return (-t.amplitude * std::sin(dot(t.vector, x))) * t.vector;
    case Kind::gaussian_bump: {
      const Vec r = x - t.vector;
      const double w2 = t.width * t.width;
      const double g = t.amplitude * std::exp(-dot(r, r) / (2.0 * w2));
      return (-g / w2) * r;
    }
  }
  return {};
}

Mat term_hessian(const PotentialTerm& t, const Vec& x) {
  switch (t.kind) {
    case Kind::zero:
    case Kind::linear:
      return {};
    case Kind::harmonic:
    case Kind::inverted_harmonic: {
      const double s = t.kind == Kind::harmonic ? 1.0 : -1.0;
      return {Vec{s * t.vector[0] * t.vector[0], 0.0}, Vec{0.0, s * t.vector[1] * t.vector[1]}};
    }
    case Kind::cosine: {
      const double c = -t.amplitude * std::cos(dot(t.vector, x));
      const Vec& k = t.vector;
      return {Vec{c * k[0] * k[0], c * k[0] * k[1]}, Vec{c * k[1] * k[0], c * k[1] * k[1]}};
    }
    case Kind::gaussian_bump: {
      const Vec r = x - t.vector;
      const double w2 = t.width * t.width;
      const double g = t.amplitude * std::exp(-dot(r, r) / (2.0 * w2));
      Mat h{};
      for (int i = 0; i < kMaxDim; ++i) {
        for (int j = 0; j < kMaxDim; ++j) h[i][j] = g * r[i] * r[j] / (w2 * w2);
      }
      // Potential::hessian zeroes the padded axis for d = 1.
      h[0][0] -= g / w2;
      h[1][1] -= g / w2;
      return h;
    }
  }
  return {};
}

double term_hessian_bound(const PotentialTerm& t) {
  switch (t.kind) {
    case Kind::zero:
    case Kind::linear:
      return 0.0;
    case Kind::harmonic:
    case Kind::inverted_harmonic:
      return std::max(t.vector[0] * t.vector[0], t.vector[1] * t.vector[1]);
    case Kind::cosine:
      return std::abs(t.amplitude) * dot(t.vector, t.vector);
    case Kind::gaussian_bump:
      // Radial eigenvalue g(r)(r^2/w^4 - 1/w^2) peaks in modulus at r = 0.
      return std::abs(t.amplitude) / (t.width * t.width);
  }
  return 0.0;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::zero: return "zero";
    case Kind::linear: return "linear";
    case Kind::harmonic: return "harmonic";
    case Kind::inverted_harmonic: return "inverted_harmonic";
    case Kind::cosine: return "cosine";
    case Kind::gaussian_bump: return "gaussian_bump";
  }
  return "zero";
}

}  // namespace

Potential Potential::zero(int dim) {
  checked_dim(static_cast<std::size_t>(dim));
  return Potential(dim, {PotentialTerm{}});
}

Potential Potential::linear(std::span<const double> slope) {
  const int dim = checked_dim(slope.size());
  PotentialTerm t{.kind = Kind::linear, .vector = to_vec(slope, dim, "linear slope")};
  return Potential(dim, {t});
}

Potential Potential::harmonic(std::span<const double> omega) {
  const int dim = checked_dim(omega.size());
  PotentialTerm t{.kind = Kind::harmonic, .vector = to_vec(omega, dim, "harmonic frequencies")};
  return Potential(dim, {t});
}

Potential Potential::inverted_harmonic(std::span<const double> omega) {
  const int dim = checked_dim(omega.size());
  PotentialTerm t{.kind = Kind::inverted_harmonic, .vector = to_vec(omega, dim, "harmonic frequencies")};
  return Potential(dim, {t});
}

Potential Potential::cosine(double amplitude, std::span<const double> wavenumber) {
  const int dim = checked_dim(wavenumber.size());
  PotentialTerm t{.kind = Kind::cosine, .amplitude = amplitude,
                  .vector = to_vec(wavenumber, dim, "cosine wavenumber")};
  return Potential(dim, {t});
}

Potential Potential::gaussian_bump(double amplitude, double width, std::span<const double> center) {
  const int dim = checked_dim(center.size());
  if (!(width > 0.0)) throw ConfigError("gaussian_bump width must be positive");
  PotentialTerm t{.kind = Kind::gaussian_bump, .amplitude = amplitude, .width = width,
                  .vector = to_vec(center, dim, "gaussian_bump center")};
  return Potential(dim, {t});
}

Potential Potential::operator+(const Potential& other) const {
  if (other.dim_ != dim_) throw ConfigError("cannot add potentials of different dimension");
  std::vector<PotentialTerm> terms;
  for (const auto& t : terms_) {
    if (t.kind != Kind::zero) terms.push_back(t);
  }
  for (const auto& t : other.terms_) {
    if (t.kind != Kind::zero) terms.push_back(t);
  }
  if (terms.empty()) terms.push_back(PotentialTerm{});
  return Potential(dim_, std::move(terms));
}

Potential Potential::parse(std::string_view expression, int dim) {
  checked_dim(static_cast<std::size_t>(dim));
  std::vector<PotentialTerm> terms;
  std::string_view rest = text::trim(expression);
  if (rest.empty()) throw ConfigError("empty potential expression");

  while (!rest.empty()) {
    const auto open = rest.find('(');
    const auto close = rest.find(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
      throw ConfigError("malformed potential term in '" + std::string(expression) + "'");
    }
    const std::string name(text::trim(rest.substr(0, open)));
    const std::string_view inside = text::trim(rest.substr(open + 1, close - open - 1));
    std::vector<double> args;
    if (!inside.empty()) {
      for (auto tok : text::split(inside, ',')) {
        double v = 0.0;
        if (!text::parse_double(tok, v)) {
          throw ConfigError("bad number '" + std::string(tok) + "' in potential term " + name);
        }
        args.push_back(v);
      }
    }
    const std::size_t d = static_cast<std::size_t>(dim);
    auto want = [&](std::size_t n) {
      if (args.size() != n) {
        throw ConfigError("potential term " + name + " expects " + std::to_string(n) +
                          " arguments for dimension " + std::to_string(dim) + ", got " +
                          std::to_string(args.size()));
      }
    };
    const std::span<const double> all(args);
    Potential term;
    if (name == "zero") {
      want(0);
      term = zero(dim);
    } else if (name == "linear") {
      want(d);
      term = linear(all);
    } else if (name == "harmonic" || name == "inverted_harmonic") {
      if (args.size() == 1 && d == 2) args.push_back(args[0]);
      want(d);
      const std::span<const double> omega(args);
      term = name == "harmonic" ? harmonic(omega) : inverted_harmonic(omega);
    } else if (name == "cosine") {
      want(1 + d);
      term = cosine(args[0], all.subspan(1));
    } else if (name == "gaussian_bump") {
      want(2 + d);
      term = gaussian_bump(args[0], args[1], all.subspan(2));
    } else {
      throw ConfigError("unknown potential kind '" + name + "'");
    }
    for (const auto& t : term.terms_) terms.push_back(t);

    rest = text::trim(rest.substr(close + 1));
    if (!rest.empty()) {
      if (rest.front() != '+') {
        throw ConfigError("expected '+' between potential terms in '" + std::string(expression) + "'");
      }
      rest = text::trim(rest.substr(1));
      if (rest.empty()) throw ConfigError("dangling '+' in potential expression");
    }
  }
  return Potential(dim, {PotentialTerm{}}) + Potential(dim, std::move(terms));
}

PotentialSample Potential::evaluate(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_)) {
    throw ConfigError("point has dimension " + std::to_string(x.size()) + ", potential has " +
                      std::to_string(dim_));
  }
  Vec p{};
  for (int i = 0; i < dim_; ++i) p[i] = x[i];
  return {value(p), gradient(p), hessian(p)};
}

double Potential::value(const Vec& x) const {
  double v = 0.0;
  for (const auto& t : terms_) v += term_value(t, x);
  return v;
}

Vec Potential::gradient(const Vec& x) const {
  Vec g{};
  for (const auto& t : terms_) g = g + term_gradient(t, x);
  if (dim_ == 1) g[1] = 0.0;
  return g;
}

Mat Potential::hessian(const Vec& x) const {
  Mat h{};
  for (const auto& t : terms_) h = h + term_hessian(t, x);
  if (dim_ == 1) h[0][1] = h[1][0] = h[1][1] = 0.0;
  return h;
}

double Potential::taylor_remainder(std::span<const double> x, std::span<const double> a) const {
  const auto at_x = evaluate(x);
  const auto at_a = evaluate(a);
  Vec dx{};
  for (int i = 0; i < dim_; ++i) dx[i] = x[i] - a[i];
  const double t2 = at_a.value + dot(at_a.gradient, dx) + 0.5 * dot(at_a.hessian * dx, dx);
  return at_x.value - t2;
}

double Potential::hessian_bound() const {
  double b = 0.0;
  for (const auto& t : terms_) b += term_hessian_bound(t);
  return b;
}

bool Potential::is_quadratic() const {
  for (const auto& t : terms_) {
    if (t.kind == Kind::cosine || t.kind == Kind::gaussian_bump) {
      if (t.amplitude != 0.0) return false;
    }
  }
  return true;
}

std::string Potential::to_string() const {
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    out += kind_name(t.kind);
    out += '(';
    std::vector<double> args;
    switch (t.kind) {
      case Kind::zero:
        break;
      case Kind::linear:
      case Kind::harmonic:
      case Kind::inverted_harmonic:
        for (int i = 0; i < dim_; ++i) args.push_back(t.vector[i]);
        break;
      case Kind::cosine:
        args.push_back(t.amplitude);
        for (int i = 0; i < dim_; ++i) args.push_back(t.vector[i]);
        break;
      case Kind::gaussian_bump:
        args.push_back(t.amplitude);
        args.push_back(t.width);
        for (int i = 0; i < dim_; ++i) args.push_back(t.vector[i]);
        break;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ", ";
      out += text::format_double(args[i]);
    }
    out += ')';
  }
  return out;
}

}  // namespace ehrenfest
