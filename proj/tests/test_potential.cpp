#include <doctest.h>

#include <cmath>
#include <vector>

#include "ehrenfest/errors.hpp"
#include "ehrenfest/potential.hpp"

using namespace ehrenfest;

namespace {

// Central differences of value (for the gradient) and gradient (for the Hessian).
void check_derivatives(const Potential& p, Vec x) {
  const double h = 1e-5;
  const int d = p.dimension();
  const Vec g = p.gradient(x);
  const Mat H = p.hessian(x);
  for (int i = 0; i < d; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    CHECK(g[i] == doctest::Approx((p.value(xp) - p.value(xm)) / (2 * h)).epsilon(1e-7));
    const Vec gp = p.gradient(xp), gm = p.gradient(xm);
    for (int j = 0; j < d; ++j) {
      CHECK(H[j][i] == doctest::Approx((gp[j] - gm[j]) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
  }
}

}  // namespace

TEST_CASE("catalog terms have consistent derivatives") {
  const double w[] = {1.3};
  const double k[] = {0.7};
  const double c[] = {0.4};
  check_derivatives(Potential::harmonic(w), {0.8, 0});
  check_derivatives(Potential::inverted_harmonic(w), {-1.1, 0});
  check_derivatives(Potential::cosine(2.0, k), {0.3, 0});
  check_derivatives(Potential::gaussian_bump(1.5, 0.6, c), {0.9, 0});
  check_derivatives(Potential::linear(k), {2.0, 0});

  const double w2[] = {1.0, 2.0};
  const double k2[] = {0.5, -1.5};
  const double c2[] = {0.2, -0.3};
  check_derivatives(Potential::harmonic(w2) + Potential::cosine(0.7, k2) +
                        Potential::gaussian_bump(-0.4, 0.8, c2),
                    {0.35, -0.6});
}

TEST_CASE("harmonic plus cosine matches the closed form") {
  const Potential p = Potential::parse("harmonic(1) + cosine(1, 1)", 1);
  for (double x : {-2.0, -0.3, 0.0, 1.0, 2.5}) {
    CHECK(p.value({x, 0}) == doctest::Approx(0.5 * x * x + std::cos(x)));
    CHECK(p.gradient({x, 0})[0] == doctest::Approx(x - std::sin(x)));
    CHECK(p.hessian({x, 0})[0][0] == doctest::Approx(1 - std::cos(x)));
  }
  CHECK(p.hessian({1.0, 0})[1][1] == 0.0);
  CHECK_FALSE(p.is_quadratic());
  CHECK(p.hessian_bound() >= 2.0);
}

TEST_CASE("quadratic potentials have zero Taylor remainder") {
  const double w[] = {1.7, 0.4};
  const double s[] = {0.3, -2.0};
  const Potential p = Potential::harmonic(w) + Potential::linear(s);
  CHECK(p.is_quadratic());
  const double x[] = {1.2, -0.7};
  const double a[] = {-0.4, 2.2};
  CHECK(std::abs(p.taylor_remainder(x, a)) < 1e-12);

  const double k[] = {1.0};
  const Potential q = Potential::cosine(1.0, k);
  const double x1[] = {0.1};
  const double a1[] = {0.0};
  // cos(0.1) - (1 - 0.005) = 0.1^4/24 - ...
  CHECK(q.taylor_remainder(x1, a1) == doctest::Approx(std::pow(0.1, 4) / 24).epsilon(1e-3));
}

TEST_CASE("parse and to_string round-trip") {
  for (const char* expr : {"harmonic(1) + cosine(1, 1)", "inverted_harmonic(0.5)",
                           "gaussian_bump(2, 0.25, 1.5) + linear(-1)", "zero()"}) {
    const Potential p = Potential::parse(expr, 1);
    const Potential q = Potential::parse(p.to_string(), 1);
    CHECK(q.to_string() == p.to_string());
    for (double x : {-1.0, 0.2, 3.0}) CHECK(q.value({x, 0}) == p.value({x, 0}));
  }
  const Potential p2 = Potential::parse("harmonic(1, 2) + cosine(1, 1, 0.5)", 2);
  CHECK(p2.dimension() == 2);
  CHECK(p2.value({1, 1}) == doctest::Approx(0.5 + 2.0 + std::cos(1.5)));
  CHECK(Potential::parse("harmonic(1)", 2).value({1, 1}) == doctest::Approx(1.0));
}

TEST_CASE("malformed expressions and dimension mismatches are rejected") {
  CHECK_THROWS_AS(Potential::parse("harmonik(1)", 1), ConfigError);
  CHECK_THROWS_AS(Potential::parse("harmonic(1", 1), ConfigError);
  CHECK_THROWS_AS(Potential::parse("cosine(1)", 1), ConfigError);
  CHECK_THROWS_AS(Potential::parse("", 1), ConfigError);
  const Potential p = Potential::parse("harmonic(1)", 1);
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(p.evaluate(two), ConfigError);
  const double w2[] = {1.0, 1.0};
  CHECK_THROWS_AS(p + Potential::harmonic(w2), ConfigError);
}
