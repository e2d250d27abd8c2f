#include "ehrenfest/ehrenfest.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include "ehrenfest/config.hpp"
#include "ehrenfest/errors.hpp"
#include "ehrenfest/hamiltonian_flow.hpp"
#include "ehrenfest/run.hpp"

struct ehl_config {
  ehrenfest::LabConfig value;
};
struct ehl_potential {
  ehrenfest::Potential value;
};
struct ehl_trajectory {
  ehrenfest::Trajectory value;
};
struct ehl_field {
  ehrenfest::WaveField value;
};

namespace {

thread_local std::string last_error;

ehl_status fail(ehl_status s, const char* what) {
  last_error = what;
  return s;
}

// Maps the exception in flight to a status code.
ehl_status translate() {
  try {
    throw;
  } catch (const ehrenfest::ParseError& e) {
    return fail(EHL_ERR_PARSE, e.what());
  } catch (const ehrenfest::ConfigError& e) {
    return fail(EHL_ERR_CONFIG, e.what());
  } catch (const ehrenfest::RangeError& e) {
    return fail(EHL_ERR_RANGE, e.what());
  } catch (const ehrenfest::DivergedError& e) {
    return fail(EHL_ERR_DIVERGED, e.what());
  } catch (const ehrenfest::InvalidRunError& e) {
    return fail(EHL_ERR_INVALID_RUN, e.what());
  } catch (const ehrenfest::IoError& e) {
    return fail(EHL_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(EHL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EHL_ERR_INTERNAL, "unknown error");
  }
}

template <class Fn>
ehl_status guarded(Fn fn) {
  try {
    fn();
    last_error.clear();
    return EHL_OK;
  } catch (...) {
    return translate();
  }
}

ehl_status null_argument() { return fail(EHL_ERR_ARGUMENT, "null argument"); }

}  // namespace

extern "C" {

const char* ehl_version(void) { return EHRENFEST_VERSION; }

const char* ehl_last_error(void) { return last_error.c_str(); }

double ehl_critical_alpha(int dimension, int sigma) {
  return ehrenfest::critical_alpha(dimension, sigma);
}

ehl_status ehl_config_parse(const char* text, ehl_config** out) {
  if (!text || !out) return null_argument();
  return guarded([&] { *out = new ehl_config{ehrenfest::parse_config(text)}; });
}

ehl_status ehl_config_load(const char* path, ehl_config** out) {
  if (!path || !out) return null_argument();
  return guarded([&] { *out = new ehl_config{ehrenfest::load_config(path)}; });
}

void ehl_config_free(ehl_config* cfg) { delete cfg; }

ehl_status ehl_config_serialize(const ehl_config* cfg, char* buf, size_t capacity,
                                size_t* needed) {
  if (!cfg) return null_argument();
  const std::string text = ehrenfest::serialize_config(cfg->value);
  if (needed) *needed = text.size() + 1;
  if (!buf || capacity < text.size() + 1) {
    return fail(EHL_ERR_ARGUMENT, "buffer too small");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  last_error.clear();
  return EHL_OK;
}

ehl_status ehl_config_epsilon(const ehl_config* cfg, double* out) {
  if (!cfg || !out) return null_argument();
  *out = cfg->value.sim.epsilon;
  return EHL_OK;
}

ehl_status ehl_config_alpha(const ehl_config* cfg, double* alpha, double* alpha_c) {
  if (!cfg) return null_argument();
  if (alpha) *alpha = cfg->value.sim.alpha;
  if (alpha_c) *alpha_c = cfg->value.sim.alpha_c;
  return EHL_OK;
}

ehl_status ehl_config_dimension(const ehl_config* cfg, int* out) {
  if (!cfg || !out) return null_argument();
  *out = cfg->value.sim.dimension;
  return EHL_OK;
}

ehl_status ehl_config_packet_count(const ehl_config* cfg, int* out) {
  if (!cfg || !out) return null_argument();
  *out = static_cast<int>(cfg->value.packets.size());
  return EHL_OK;
}

int ehl_run(const char* command, const char* config_path, const char* out_dir, unsigned threads,
            int self_check) {
  if (!command || !config_path || !out_dir) {
    fail(EHL_ERR_ARGUMENT, "null argument");
    return EHL_EXIT_CONFIG;
  }
  ehrenfest::RunManifest m;
  m.command = command;
  m.config_path = config_path;
  m.out_dir = out_dir;
  m.version = EHRENFEST_VERSION;
  m.threads = threads == 0 ? 1 : threads;
  m.self_check = self_check != 0;
  try {
    return ehrenfest::run(m, std::cerr);
  } catch (...) {
    translate();
    std::cerr << "error: " << last_error << '\n';
    return EHL_EXIT_FAIL;
  }
}

ehl_status ehl_potential_parse(const char* expr, int dimension, ehl_potential** out) {
  if (!expr || !out) return null_argument();
  return guarded(
      [&] { *out = new ehl_potential{ehrenfest::Potential::parse(expr, dimension)}; });
}

void ehl_potential_free(ehl_potential* p) { delete p; }

ehl_status ehl_potential_evaluate(const ehl_potential* p, const double* x, double* value,
                                  double* gradient, double* hessian) {
  if (!p || !x) return null_argument();
  return guarded([&] {
    const int d = std::min(p->value.dimension(), ehrenfest::kMaxDim);
    const auto s = p->value.evaluate(std::span(x, static_cast<std::size_t>(d)));
    if (value) *value = s.value;
    for (int i = 0; i < d; ++i) {
      if (gradient) gradient[i] = s.gradient[i];
      for (int j = 0; j < d; ++j) {
        if (hessian) hessian[i * d + j] = s.hessian[i][j];
      }
    }
  });
}

ehl_status ehl_trajectory_integrate(const ehl_potential* p, const double* x0, const double* xi0,
                                    double T, double dt, ehl_trajectory** out) {
  if (!p || !x0 || !xi0 || !out) return null_argument();
  return guarded([&] {
    const auto d = static_cast<std::size_t>(p->value.dimension());
    *out = new ehl_trajectory{
        ehrenfest::integrate_flow(p->value, std::span(x0, d), std::span(xi0, d), T, dt)};
  });
}

void ehl_trajectory_free(ehl_trajectory* traj) { delete traj; }

ehl_status ehl_trajectory_state(const ehl_trajectory* traj, double t, double* x, double* xi,
                                double* action) {
  if (!traj) return null_argument();
  return guarded([&] {
    const auto s = traj->value.state_at(t);
    for (int i = 0; i < traj->value.dimension(); ++i) {
      if (x) x[i] = s.x[i];
      if (xi) xi[i] = s.xi[i];
    }
    if (action) *action = s.action;
  });
}

ehl_status ehl_trajectory_energy_drift(const ehl_trajectory* traj, double* out) {
  if (!traj || !out) return null_argument();
  return guarded([&] { *out = traj->value.max_energy_drift(); });
}

ehl_status ehl_field_read(const char* path, ehl_field** out) {
  if (!path || !out) return null_argument();
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ehrenfest::IoError(std::string("cannot read '") + path + "'");
    *out = new ehl_field{ehrenfest::read_field_binary(in)};
  });
}

void ehl_field_free(ehl_field* f) { delete f; }

ehl_status ehl_field_dimension(const ehl_field* f, int* out) {
  if (!f || !out) return null_argument();
  *out = f->value.grid().dimension();
  return EHL_OK;
}

ehl_status ehl_field_points(const ehl_field* f, int axis, size_t* out) {
  if (!f || !out) return null_argument();
  if (axis < 0 || axis >= f->value.grid().dimension()) {
    return fail(EHL_ERR_ARGUMENT, "axis out of range");
  }
  *out = f->value.grid().axis(axis).points;
  return EHL_OK;
}

ehl_status ehl_field_mass(const ehl_field* f, double* out) {
  if (!f || !out) return null_argument();
  *out = f->value.mass();
  return EHL_OK;
}

ehl_status ehl_field_values(const ehl_field* f, double* out, size_t capacity) {
  if (!f || !out) return null_argument();
  const auto vals = f->value.values();
  if (capacity < 2 * vals.size()) return fail(EHL_ERR_ARGUMENT, "buffer too small");
  for (std::size_t i = 0; i < vals.size(); ++i) {
    out[2 * i] = vals[i].real();
    out[2 * i + 1] = vals[i].imag();
  }
  return EHL_OK;
}

}  // extern "C"
