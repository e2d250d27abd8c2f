#ifndef EHRENFEST_EHRENFEST_H
#define EHRENFEST_EHRENFEST_H

#include <stddef.h>

#if defined(_WIN32)
#  ifdef EHL_BUILDING_LIBRARY
#    define EHL_API __declspec(dllexport)
#  else
#    define EHL_API __declspec(dllimport)
#  endif
#else
#  define EHL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ehl_status {
  EHL_OK = 0,
  EHL_ERR_CONFIG = 1,      /* invalid parameters or malformed config */
  EHL_ERR_PARSE = 2,       /* config text failed to parse (see ehl_last_error) */
  EHL_ERR_RANGE = 3,       /* query outside the sampled range */
  EHL_ERR_DIVERGED = 4,    /* non-finite state */
  EHL_ERR_INVALID_RUN = 5, /* boundary guard tripped */
  EHL_ERR_IO = 6,
  EHL_ERR_ARGUMENT = 7,    /* null pointer or bad size */
  EHL_ERR_INTERNAL = 8
} ehl_status;

/* Exit codes of ehl_run. */
#define EHL_EXIT_PASS 0
#define EHL_EXIT_FAIL 1
#define EHL_EXIT_CONFIG 2

typedef struct ehl_config ehl_config;
typedef struct ehl_potential ehl_potential;
typedef struct ehl_trajectory ehl_trajectory;
typedef struct ehl_field ehl_field;

EHL_API const char* ehl_version(void);

/* Message of the last failed call on this thread ("" if none). */
EHL_API const char* ehl_last_error(void);

EHL_API double ehl_critical_alpha(int dimension, int sigma);

/* --- configs ---------------------------------------------------------- */

EHL_API ehl_status ehl_config_parse(const char* text, ehl_config** out);
EHL_API ehl_status ehl_config_load(const char* path, ehl_config** out);
EHL_API void ehl_config_free(ehl_config* cfg);

/* Writes the canonical text (NUL-terminated) into buf when it fits;
   *needed receives the size including the terminator. */
EHL_API ehl_status ehl_config_serialize(const ehl_config* cfg, char* buf, size_t capacity,
                                        size_t* needed);

EHL_API ehl_status ehl_config_epsilon(const ehl_config* cfg, double* out);
EHL_API ehl_status ehl_config_alpha(const ehl_config* cfg, double* alpha, double* alpha_c);
EHL_API ehl_status ehl_config_dimension(const ehl_config* cfg, int* out);
EHL_API ehl_status ehl_config_packet_count(const ehl_config* cfg, int* out);

/* Runs a subcommand (trajectory, propagate, compare, sweep, ehrenfest,
   superpose, interaction); diagnostics go to stderr. threads = 0 means 1.
   Returns EHL_EXIT_PASS, EHL_EXIT_FAIL or EHL_EXIT_CONFIG. */
EHL_API int ehl_run(const char* command, const char* config_path, const char* out_dir,
                    unsigned threads, int self_check);

/* --- potentials ------------------------------------------------------- */

/* expr as in the [potential] section, e.g. "harmonic(1) + cosine(1, 1)". */
EHL_API ehl_status ehl_potential_parse(const char* expr, int dimension, ehl_potential** out);
EHL_API void ehl_potential_free(ehl_potential* p);

/* value, gradient[d] and row-major hessian[d*d]; any output may be NULL. */
EHL_API ehl_status ehl_potential_evaluate(const ehl_potential* p, const double* x, double* value,
                                          double* gradient, double* hessian);

/* --- trajectories ----------------------------------------------------- */

EHL_API ehl_status ehl_trajectory_integrate(const ehl_potential* p, const double* x0,
                                            const double* xi0, double T, double dt,
                                            ehl_trajectory** out);
EHL_API void ehl_trajectory_free(ehl_trajectory* traj);

EHL_API ehl_status ehl_trajectory_state(const ehl_trajectory* traj, double t, double* x,
                                        double* xi, double* action);
EHL_API ehl_status ehl_trajectory_energy_drift(const ehl_trajectory* traj, double* out);

/* --- fields ----------------------------------------------------------- */

/* Reads a binary snapshot as written by the propagate command. */
EHL_API ehl_status ehl_field_read(const char* path, ehl_field** out);
EHL_API void ehl_field_free(ehl_field* f);

EHL_API ehl_status ehl_field_dimension(const ehl_field* f, int* out);
EHL_API ehl_status ehl_field_points(const ehl_field* f, int axis, size_t* out);
EHL_API ehl_status ehl_field_mass(const ehl_field* f, double* out);

/* Copies interleaved (re, im) samples; capacity counts doubles. */
EHL_API ehl_status ehl_field_values(const ehl_field* f, double* out, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif
