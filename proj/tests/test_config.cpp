#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "ehrenfest/config.hpp"
#include "ehrenfest/errors.hpp"

using namespace ehrenfest;

namespace {

constexpr const char* kBasic = R"(# a comment
[sim]
epsilon = 0.01
T = 6.283185307179586

[potential]
expr = harmonic(1)

[packet.1]
x0 = 1   ; trailing comment
)";

int parse_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("defaults and the critical exponent") {
  const LabConfig c = parse_config(kBasic);
  CHECK(c.sim.epsilon == 0.01);
  CHECK(c.sim.dimension == 1);
  CHECK(c.sim.sigma == 1);
  CHECK(c.sim.lambda == 1.0);
  CHECK(c.alpha_critical);
  CHECK(c.sim.alpha == 1.5);
  CHECK(c.sim.alpha_c == 1.5);
  CHECK(c.sim.horizon == doctest::Approx(2 * 3.141592653589793));
  REQUIRE(c.packets.size() == 1);
  const PacketSpec p = c.packet(0);
  CHECK(p.x0[0] == 1.0);
  CHECK(p.xi0[0] == 0.0);
  CHECK(std::get<GaussianProfile>(p.envelope).width == 1.0);
  CHECK(p.amplitude == complex(1.0, 0.0));
}

TEST_CASE("two dimensions at the critical exponent") {
  const LabConfig c = parse_config(R"([sim]
epsilon = 0.05
dimension = 2
alpha = critical
[potential]
expr = harmonic(1, 2)
[packet.1]
x0 = 0.5, -0.5
xi0 = 0, 1
center_offset = 0.1, 0
)");
  CHECK(c.sim.alpha == 2.0);
  CHECK(c.potential.dimension() == 2);
  CHECK(c.packet(0).xi0[1] == 1.0);
  CHECK(c.packet(0).dimension == 2);
}

TEST_CASE("amplitude and phase") {
  const LabConfig c = parse_config(std::string(kBasic) + "amplitude = 2\nphase = 0.5\n");
  CHECK(c.packet(0).amplitude == std::polar(2.0, 0.5));
}

TEST_CASE("errors carry line numbers and key names") {
  try {
    parse_config("[sim]\nT = 1\n[potential]\nexpr = harmonic(1)\n[packet.1]\nx0 = 1\n");
    FAIL("missing epsilon accepted");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("epsilon") != std::string::npos);
  }
  CHECK(parse_line("[sim]\nepsilon = 0.01\nbogus = 3\n") == 3);
  CHECK(parse_line("[sim]\nepsilon = 0.01\nepsilon = 0.02\n") == 3);
  CHECK(parse_line("[sim]\nepsilon = abc\n") == 2);
  CHECK(parse_line("[sim]\nepsilon = -1\n") == 2);
  CHECK(parse_line("[sim]\nepsilon = 0.01\nsigma = 0\n") == 3);
  CHECK(parse_line("[nowhere]\n") == 1);
  CHECK(parse_line("[sim\n") == 1);
  CHECK(parse_line("epsilon = 0.1\n") == 1);
  CHECK(parse_line("[sim]\nepsilon\n") == 2);
  CHECK_THROWS_AS(parse_config(std::string(kBasic) + "[potential]\nexpr = harmonic(2)\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_config("[sim]\nepsilon = 0.1\nT = 1\n[potential]\nexpr = nope(1)\n"
                               "[packet.1]\nx0 = 0\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("[sim]\nepsilon = 0.1\nT = 1\n[potential]\nexpr = harmonic(1)\n"
                               "[packet.1]\nx0 = 0, 1\n"),
                  ConfigError);
}

TEST_CASE("serialization round-trips") {
  const LabConfig c = parse_config(R"([sim]
epsilon = 0.003
sigma = 1
lambda = -0.5
alpha = 1.75
T = 2.5
dt_per_eps = 0.025
envelope_points = 1024
refine = 2
[potential]
expr = harmonic(1) + cosine(1, 1)
[packet.1]
x0 = -0.5
xi0 = 1
width = 0.7
amplitude = 1.5
phase = 0.25
[packet.2]
x0 = 0.5
xi0 = -0.5
[experiment]
epsilons = 0.04, 0.01, 0.0025
delta = 0.2
samples = 20
gamma = 0.3
norm = sigma_eps
self_check = true
)");
  const std::string text = serialize_config(c);
  const LabConfig back = parse_config(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);
  CHECK(back.sim.alpha == 1.75);
  CHECK_FALSE(back.alpha_critical);
  CHECK(back.experiment.norm == ErrorNorm::sigma_eps);
  CHECK(back.experiment.epsilons.size() == 3);
  CHECK(back.sim.grid.refine == 2.0);
}

TEST_CASE("missing files are reported as I/O errors") {
  CHECK_THROWS_AS(load_config("/nonexistent/lab.ini"), IoError);
}

TEST_CASE("subcommand list") {
  const auto& s = subcommands();
  for (const char* name :
       {"trajectory", "propagate", "compare", "sweep", "ehrenfest", "superpose", "interaction"}) {
    CHECK(std::find(s.begin(), s.end(), name) != s.end());
  }
}
