#pragma once

#include <stdexcept>
#include <string>

namespace ehrenfest {

/// Invalid parameters, mismatched dimensions or grids, malformed config.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config text that failed to parse; carries the 1-based line number (0 when
/// the problem is not tied to a line, e.g. a missing required key).
class ParseError : public ConfigError {
 public:
  ParseError(int line, const std::string& message)
      : ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A query outside the sampled time range of a trajectory or run.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// The state became non-finite. `last_valid_time` is the last time at which
/// every sample was finite.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(double last_valid_time, const std::string& message)
      : std::runtime_error(message), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// A run whose result cannot be trusted (boundary-mass guard tripped).
class InvalidRunError : public std::runtime_error {
 public:
  InvalidRunError(double time, const std::string& message)
      : std::runtime_error(message), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ehrenfest
