#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ehrenfest/ehrenfest.h"

namespace {

unsigned threads_from_env() {
  const char* env = std::getenv("EHRENFEST_LAB_THREADS");
  if (!env || !*env) return 1;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<unsigned>(v) : 1;
  } catch (const std::exception&) {
    std::cerr << "warning: ignoring EHRENFEST_LAB_THREADS='" << env << "'\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical NLS wave-packet experiments"};
  app.set_version_flag("--version", std::string(ehl_version()));
  app.require_subcommand(1);

  std::string config;
  std::string out = ".";
  unsigned threads = 0;
  bool self_check = false;

  const char* commands[][2] = {
      {"trajectory", "integrate classical trajectories (and crossing sets for two packets)"},
      {"propagate", "run the full solver and record mass and the final field"},
      {"compare", "error of the wave-packet approximation for one packet"},
      {"sweep", "fit the error rate over several epsilon values"},
      {"ehrenfest", "locate the breakdown time T* for several epsilon values"},
      {"superpose", "error of the two-packet approximation in the Sigma_eps norm"},
      {"interaction", "time-integrated size of the two-packet interaction term"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: EHRENFEST_LAB_THREADS or 1)");
    sub->add_flag("--self-check", self_check, "rerun the smallest epsilon at dt/2 and 2N");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : EHL_EXIT_CONFIG;
  }
  if (threads == 0) threads = threads_from_env();
  const std::string command = app.get_subcommands().front()->get_name();
  return ehl_run(command.c_str(), config.c_str(), out.c_str(), threads, self_check ? 1 : 0);
}
