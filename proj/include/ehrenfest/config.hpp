#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ehrenfest/experiments.hpp"
#include "ehrenfest/nls_solver.hpp"
#include "ehrenfest/potential.hpp"
#include "ehrenfest/wavepacket.hpp"

namespace ehrenfest {

/// A [packet.N] section as written. Either a Gaussian (width, center_offset)
/// or a tabulated profile read from a binary snapshot (profile_file, resolved
/// relative to the config file's directory).
struct PacketEntry {
  std::vector<double> x0;
  std::vector<double> xi0;
  double width = 1.0;
  std::vector<double> center_offset;
  double amplitude = 1.0;
  double phase = 0.0;
  std::string profile_file;

  bool operator==(const PacketEntry&) const = default;
};

/// [experiment] parameters shared by the subcommands.
struct ExperimentParams {
  std::vector<double> epsilons;
  double delta = 0.1;
  double t_max = 0.0;  ///< 0: use [sim] T
  double sample_dt = 0.05;
  std::size_t samples = 50;
  double gamma = 0.4;
  double tolerance = 0.0;  ///< compare: pass iff sup err_l2 <= tolerance (when > 0)
  double slope_tolerance = 0.1;
  double max_fit_residual = 0.15;
  double min_slope = 0.33;
  double max_relative_residual = 0.25;
  int k_max = 4;
  bool self_check = false;
  ErrorNorm norm = ErrorNorm::l2;

  bool operator==(const ExperimentParams&) const = default;
};

struct LabConfig {
  SimConfig sim;
  bool alpha_critical = true;  ///< alpha absent or "critical"
  std::string potential_expr;
  Potential potential;
  std::vector<PacketEntry> packets;
  ExperimentParams experiment;
  std::filesystem::path base_dir;  ///< for relative profile_file paths

  /// Builds the packet spec, loading a tabulated profile when configured.
  PacketSpec packet(std::size_t index) const;
  std::vector<PacketSpec> packet_specs() const;

  bool operator==(const LabConfig& o) const;
};

/// Parses INI-like text with sections [sim], [potential], [packet.1],
/// [packet.2] and [experiment]. '#' and ';' start comments. Unknown or
/// duplicate keys, missing required keys and out-of-range values raise
/// ParseError with the offending line.
LabConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads and parses a file; IoError when unreadable.
LabConfig load_config(const std::filesystem::path& path);

/// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const LabConfig& cfg);

struct RunManifest {
  std::string command;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  bool deterministic = true;
  std::string version;
  unsigned threads = 1;
  bool self_check = false;
};

/// Subcommand names accepted by run().
const std::vector<std::string>& subcommands();

}  // namespace ehrenfest
