#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ehrenfest/errors.hpp"
#include "ehrenfest/spectral_grid.hpp"
#include "oracles.hpp"

using namespace ehrenfest;

namespace {

WaveField sample(const Grid& g, double eps, const std::function<complex(Vec)>& f) {
  WaveField w(g, eps);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = f(g.point(i));
  return w;
}

}  // namespace

TEST_CASE("axis wavenumbers follow FFT ordering") {
  const Axis a{0.0, 2 * oracle::pi, 16};
  CHECK(a.wavenumber(0) == 0.0);
  CHECK(a.wavenumber(1) == doctest::Approx(1.0));
  CHECK(a.wavenumber(7) == doctest::Approx(7.0));
  CHECK(a.wavenumber(8) == doctest::Approx(-8.0));
  CHECK(a.wavenumber(15) == doctest::Approx(-1.0));
}

TEST_CASE("grids reject non power-of-two sizes") {
  CHECK_THROWS_AS(Grid::line(0, 1, 24), ConfigError);
  CHECK_THROWS_AS(Grid::line(0, 1, 8), ConfigError);
  CHECK_NOTHROW(Grid::line(0, 1, 32));
}

TEST_CASE("spectral derivative is exact on resolved modes") {
  const Grid g = Grid::line(-oracle::pi, 2 * oracle::pi, 64);
  const WaveField f = sample(g, 1.0, [](Vec x) { return complex(std::sin(3 * x[0]), std::cos(5 * x[0])); });
  const WaveField d = spectral_derivative(f, 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = g.point(i)[0];
    CHECK(std::abs(d[i] - complex(3 * std::cos(3 * x), -5 * std::sin(5 * x))) < 1e-11);
  }

  const Grid g2 = Grid::plane(Axis{0, 2 * oracle::pi, 32}, Axis{0, 2 * oracle::pi, 16});
  const WaveField f2 = sample(g2, 1.0, [](Vec x) { return complex(std::sin(2 * x[0]) * std::cos(x[1])); });
  const WaveField dy = spectral_derivative(f2, 1);
  for (std::size_t i = 0; i < dy.size(); ++i) {
    const Vec x = g2.point(i);
    CHECK(std::abs(dy[i] - complex(-std::sin(2 * x[0]) * std::sin(x[1]))) < 1e-11);
  }
}

TEST_CASE("norms of a Gaussian match quadrature") {
  const double eps = 0.01;
  const Grid g = Grid::line(-3, 6, 2048);
  const double s = std::sqrt(eps);
  const auto gauss = [&](double x) { return std::pow(oracle::pi * eps, -0.25) * std::exp(-x * x / (2 * eps)); };
  const WaveField f = sample(g, eps, [&](Vec x) { return complex(gauss(x[0])); });
  CHECK(norm_l2(f) == doctest::Approx(1.0).epsilon(1e-12));
  // ||eps f'|| = eps * sqrt(1/(2 eps)) and ||x f|| = sqrt(eps/2).
  const double grad = oracle::simpson([&](double x) { return std::pow(eps * (x / eps) * gauss(x), 2); }, -3, 3);
  const double mom = oracle::simpson([&](double x) { return std::pow(x * gauss(x), 2); }, -3, 3);
  CHECK(norm_sigma_eps(f) == doctest::Approx(1.0 + std::sqrt(grad) + std::sqrt(mom)).epsilon(1e-9));
  CHECK(std::sqrt(grad) == doctest::Approx(s / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("gauge operators act on the envelope") {
  // A phi = packet built from u'(y), B phi = packet built from y u(y).
  const double eps = 0.01;
  const PhaseState c{{0.3, 0}, {1.2, 0}, 0.7};
  const Grid g = Grid::line(-2, 4, 4096);
  const double se = std::sqrt(eps);
  const auto u = [](double y) { return std::exp(-0.5 * y * y) * complex(1.0, 0.3 * y); };
  const auto du = [](double y) {
    return std::exp(-0.5 * y * y) * (complex(0.0, 0.3) - y * complex(1.0, 0.3 * y));
  };
  const auto wrap = [&](const std::function<complex(double)>& env) {
    return sample(g, eps, [&](Vec x) {
      const double y = (x[0] - c.x[0]) / se;
      return std::pow(eps, -0.25) * env(y) *
             std::exp(complex(0, (c.action + c.xi[0] * (x[0] - c.x[0])) / eps));
    });
  };
  const WaveField phi = wrap(u);
  const WaveField a = apply_A(phi, c);
  const WaveField b = apply_B(phi, c);
  const WaveField a_ref = wrap(du);
  const WaveField b_ref = wrap([&](double y) { return y * u(y); });
  CHECK(norm_l2(a - a_ref) <= 1e-10 * norm_l2(a_ref));
  CHECK(norm_l2(b - b_ref) <= 1e-10 * norm_l2(b_ref));

  const NormTriple n = norm_triple(phi, c);
  CHECK(n.h_norm == doctest::Approx(n.l2 + norm_l2(a_ref) + norm_l2(b_ref)).epsilon(1e-10));
  CHECK(n.l2 <= n.h_norm);
}

TEST_CASE("grid sizing covers the trajectory and resolves the phase") {
  const double w[] = {1.0};
  const double x0[] = {1.0};
  const double k0[] = {0.0};
  const Trajectory tr = integrate_flow(Potential::harmonic(w), x0, k0, 6.3, 1e-3);
  const Trajectory* list[] = {&tr};
  const double eps = 0.01;
  const Grid g = size_grid(list, eps, 2.75, GridPolicy{});
  const Axis& a = g.axis(0);
  CHECK(a.left <= -1.0 - 2.0);
  CHECK(a.right() >= 1.0 + 2.0);
  CHECK(a.spacing() <= max_spacing(eps, tr.max_momentum(), 10.0));
  CHECK((a.points & (a.points - 1)) == 0);

  GridPolicy fine;
  fine.refine = 2.0;
  CHECK(size_grid(list, eps, 2.75, fine).axis(0).points == 2 * a.points);
}

TEST_CASE("boundary mass fraction") {
  const Grid g = Grid::line(-5, 10, 256);
  const WaveField centred = sample(g, 1.0, [](Vec x) { return complex(std::exp(-x[0] * x[0])); });
  CHECK(boundary_mass_fraction(centred) < kBoundaryMassLimit);
  const WaveField edge = sample(g, 1.0, [](Vec x) { return complex(std::exp(-(x[0] + 5) * (x[0] + 5))); });
  CHECK(boundary_mass_fraction(edge) > 0.1);
}

TEST_CASE("binary snapshots round-trip") {
  const Grid g = Grid::plane(Axis{-1, 2, 16}, Axis{0.5, 3, 32});
  const WaveField f = sample(g, 0.02, [](Vec x) { return complex(x[0], x[1] * x[1]); });
  std::stringstream io;
  write_field_binary(io, f);
  CHECK(io.str().size() == 8 * (1 + 2 + 2 + 2 + 1) + 16 * f.size());
  const WaveField r = read_field_binary(io);
  CHECK(r.grid() == g);
  CHECK(r.epsilon() == 0.02);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(r[i] == f[i]);

  std::stringstream bad("garbage");
  CHECK_THROWS(read_field_binary(bad));
}

TEST_CASE("field CSV header") {
  const Grid g = Grid::line(0, 1, 16);
  std::ostringstream out;
  write_field_csv(out, WaveField(g, 1.0));
  const std::string s = out.str();
  CHECK(s.substr(0, s.find('\n')) == "x,re,im,abs");
}
