#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ehrenfest/errors.hpp"
#include "ehrenfest/nls_solver.hpp"
#include "oracles.hpp"

using namespace ehrenfest;

namespace {

SimConfig base(double eps, double T) {
  SimConfig cfg;
  cfg.epsilon = eps;
  cfg.horizon = T;
  cfg.validate();
  return cfg;
}

// Coherent state of the unit harmonic oscillator at phase point (x0, xi0).
WaveField coherent(const Grid& g, double eps, double x0, double xi0, double t) {
  const auto c = oracle::harmonic_flow(1.0, x0, xi0, t);
  const auto v = oracle::gaussian_envelope([](double) { return 1.0; }, 1.0, t, 2000);
  WaveField f(g, eps);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = oracle::packet(v, eps, c, g.point(i)[0]);
  return f;
}

}  // namespace

TEST_CASE("critical exponent") {
  CHECK(critical_alpha(1, 1) == 1.5);
  CHECK(critical_alpha(2, 1) == 2.0);
  CHECK(critical_alpha(1, 2) == 2.0);
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.epsilon = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.sigma = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.dimension = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.envelope_points = 100;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.dimension = 2;
  cfg.validate();
  CHECK(cfg.alpha_c == 2.0);
  CHECK(cfg.pde_dt() == doctest::Approx(0.05 * cfg.epsilon));
}

TEST_CASE("mass is conserved to 1e-12 in the nonlinear regime") {
  const double eps = 0.01;
  SimConfig cfg = base(eps, 1.0);
  const Potential p = Potential::parse("harmonic(1) + cosine(1, 1)", 1);
  const Grid g = Grid::line(-4, 8, 2048);
  const WaveField psi0 = coherent(g, eps, 1.0, 0.5, 0.0);
  const double m0 = psi0.mass();
  std::vector<double> times;
  for (int n = 1; n <= 10; ++n) times.push_back(0.1 * n);
  double drift = 0;
  propagate_nls(cfg, p, psi0, times, [&](double, const WaveField& f) {
    drift = std::max(drift, std::abs(f.mass() - m0) / m0);
    return true;
  });
  CHECK(drift <= 1e-12);
}

TEST_CASE("linear harmonic evolution matches the coherent state") {
  const double eps = 0.01;
  SimConfig cfg = base(eps, 1.0);
  cfg.lambda = 0.0;
  const double w[] = {1.0};
  const Grid g = Grid::line(-3, 6, 2048);
  const WaveField psi0 = coherent(g, eps, 1.0, 0.0, 0.0);
  const double times[] = {0.5, 1.0};
  const auto out = propagate_nls(cfg, Potential::harmonic(w), psi0, times);
  for (std::size_t n = 0; n < 2; ++n) {
    const WaveField ref = coherent(g, eps, 1.0, 0.0, times[n]);
    CHECK(norm_l2(out[n] - ref) <= 1e-4);
  }
}

TEST_CASE("coherent-state error at the default resolution is splitting error only") {
  // Strang splitting of a quadratic Hamiltonian is exact up to the Verlet
  // frequency shift, so the distance to the coherent state must scale like
  // dt^2 and nothing else. At dt = eps/20 it is 3.3e-6 over a period at
  // eps = 0.01; the 1e-6 level needs dt/2.
  const double eps = 0.01, T = 2 * oracle::pi;
  const double w[] = {1.0};
  const double x0[] = {1.0};
  const double k0[] = {0.0};
  const auto worst = [&](double dt_per_eps) {
    SimConfig cfg = base(eps, T);
    cfg.lambda = 0.0;
    cfg.dt_per_eps = dt_per_eps;
    const Trajectory tr = integrate_flow(Potential::harmonic(w), x0, k0, T, cfg.flow_step());
    const Trajectory* list[] = {&tr};
    const Grid g = size_grid(list, eps, 2.7510639, cfg.grid);
    std::vector<double> times;
    for (int n = 1; n <= 8; ++n) times.push_back(T * n / 8);
    const auto out =
        propagate_nls(cfg, Potential::harmonic(w), coherent(g, eps, 1.0, 0.0, 0.0), times);
    double e = 0;
    for (std::size_t n = 0; n < times.size(); ++n) {
      e = std::max(e, norm_l2(out[n] - coherent(g, eps, 1.0, 0.0, times[n])));
    }
    return e;
  };
  const double full = worst(0.05);
  const double half = worst(0.025);
  MESSAGE("coherent-state error ", full, " at dt = eps/20, ", half, " at eps/40");
  CHECK(full < 1e-5);
  CHECK(half < 1e-6);
  CHECK(full / half == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("free Gaussian matches the closed form") {
  const double eps = 0.02;
  SimConfig cfg = base(eps, 1.0);
  cfg.lambda = 0.0;
  const Grid g = Grid::line(-3, 6, 1024);
  const double xi = 1.0;
  const double times[] = {1.0};
  const auto out = propagate_nls(cfg, Potential::zero(1), coherent(g, eps, -1.0, xi, 0.0), times);
  const auto v = oracle::free_gaussian(1.0, 1.0);
  // Free flow: x = -1 + t xi, action = xi^2 t / 2.
  const oracle::Classical c{-1.0 + xi, xi, 0.5 * xi * xi};
  WaveField ref(g, eps);
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = oracle::packet(v, eps, c, g.point(i)[0]);
  CHECK(norm_l2(out.back() - ref) < 1e-10);
}

TEST_CASE("second order in dt") {
  const double eps = 0.05;
  const Potential p = Potential::parse("harmonic(1) + cosine(1, 1)", 1);
  const Grid g = Grid::line(-4, 8, 512);
  const WaveField psi0 = coherent(g, eps, 0.5, 0.5, 0.0);
  const double T[] = {1.0};
  std::vector<WaveField> sol;
  for (double dt : {0.02, 0.01, 0.005}) {
    SimConfig cfg = base(eps, 1.0);
    cfg.dt = dt;
    sol.push_back(propagate_nls(cfg, p, psi0, T).back());
  }
  const double ratio = norm_l2(sol[0] - sol[1]) / norm_l2(sol[1] - sol[2]);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("a constant shift of the potential is a global phase") {
  const double eps = 0.02;
  SimConfig cfg = base(eps, 0.5);
  const Potential p = Potential::parse("harmonic(1) + cosine(1, 1)", 1);
  // cosine(0.3, 0) is the constant 0.3.
  const Potential shifted = p + Potential::parse("cosine(0.3, 0)", 1);
  const Grid g = Grid::line(-4, 8, 1024);
  const WaveField psi0 = coherent(g, eps, 0.5, 1.0, 0.0);
  const double T[] = {0.5};
  const WaveField a = propagate_nls(cfg, p, psi0, T).back();
  const WaveField b = propagate_nls(cfg, shifted, psi0, T).back();
  const complex phase = std::polar(1.0, -0.3 * 0.5 / eps);
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(b[i] - phase * a[i]));
    CHECK(std::abs(std::abs(a[i]) - std::abs(b[i])) < 1e-12);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("time reversal by conjugation") {
  const double eps = 0.02;
  SimConfig cfg = base(eps, 0.5);
  const Potential p = Potential::parse("harmonic(1) + cosine(1, 1)", 1);
  const Grid g = Grid::line(-4, 8, 1024);
  const WaveField psi0 = coherent(g, eps, 0.5, 1.0, 0.0);
  const double T[] = {0.5};

  const auto conj = [](WaveField f) {
    for (auto& z : f.values()) z = std::conj(z);
    return f;
  };
  const WaveField fwd = propagate_nls(cfg, p, psi0, T).back();
  const WaveField back = conj(propagate_nls(cfg, p, conj(fwd), T).back());

  SimConfig half = cfg;
  half.dt = 0.5 * cfg.pde_dt();
  const double one_way = norm_l2(fwd - propagate_nls(half, p, psi0, T).back());
  REQUIRE(one_way > 0.0);
  CHECK(norm_l2(back - psi0) <= 10 * one_way);
}

TEST_CASE("boundary guard and divergence") {
  const double eps = 0.01;
  SimConfig cfg = base(eps, 2.0);
  cfg.lambda = 0.0;
  const Grid g = Grid::line(-1, 3, 1024);
  // A packet moving right at unit speed reaches the edge at x = 2.
  const WaveField psi0 = coherent(g, eps, 0.0, 1.0, 0.0);
  const double times[] = {2.0};
  try {
    propagate_nls(cfg, Potential::zero(1), psi0, times);
    FAIL("expected the boundary guard to trip");
  } catch (const InvalidRunError& e) {
    CHECK(e.time() > 0.5);
    CHECK(e.time() < 2.0);
  }

  WaveField bad = coherent(g, eps, 0.5, 0.0, 0.0);
  bad[512] = complex(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_AS(propagate_nls(cfg, Potential::zero(1), bad, times), DivergedError);
}

TEST_CASE("sample times are validated") {
  SimConfig cfg = base(0.1, 1.0);
  const Grid g = Grid::line(-4, 8, 256);
  const WaveField psi0 = coherent(g, 0.1, 0.0, 0.0, 0.0);
  const double unsorted[] = {0.5, 0.2};
  const double beyond[] = {2.0};
  CHECK_THROWS_AS(propagate_nls(cfg, Potential::zero(1), psi0, unsorted), ConfigError);
  CHECK_THROWS_AS(propagate_nls(cfg, Potential::zero(1), psi0, beyond), ConfigError);
  CHECK_THROWS_AS(propagate_nls(cfg, Potential::zero(2), psi0, beyond), ConfigError);
}

TEST_CASE("observer can stop the run early") {
  SimConfig cfg = base(0.1, 1.0);
  const Grid g = Grid::line(-4, 8, 256);
  const WaveField psi0 = coherent(g, 0.1, 0.0, 0.0, 0.0);
  const double times[] = {0.1, 0.2, 0.3};
  int calls = 0;
  propagate_nls(cfg, Potential::zero(1), psi0, times, [&](double, const WaveField&) {
    return ++calls < 2;
  });
  CHECK(calls == 2);
}
