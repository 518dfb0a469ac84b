/* C interface to the spinmz interferometer toolkit.
 *
 * Everything crosses this boundary by value or through opaque handles; no
 * exceptions, no C++ types. Functions return spinmz_status; on any failure
 * spinmz_last_error() describes what went wrong (thread-local storage, valid
 * until the next call from the same thread).
 */
#ifndef SPINMZ_H
#define SPINMZ_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spinmz_status {
  SPINMZ_OK = 0,
  SPINMZ_E_VALIDATION = 1, /* run finished but a physics check failed */
  SPINMZ_E_CONFIG = 2,     /* malformed config or bad parameters */
  SPINMZ_E_INTERNAL = 3    /* unexpected failure, see spinmz_last_error */
} spinmz_status;

/* "spinmz <semver>" */
const char* spinmz_version(void);

/* Message for the most recent failure on this thread; empty on success. */
const char* spinmz_last_error(void);

/* ------------------------------------------------------------------ runs */

/* Completed run: exit code, summary document, list of files written. */
typedef struct spinmz_run spinmz_run;

/* Executes one subcommand (spectrum, protocol, decoherence, metrology or
 * validate) against a config file. out_dir may be NULL for the current
 * directory. threads <= 0 defers to the config / hardware. When has_seed is
 * nonzero, seed overrides the config's [run] seed. On SPINMZ_OK and
 * SPINMZ_E_VALIDATION, *out_run holds a handle the caller must free; on
 * config errors *out_run is NULL. */
spinmz_status spinmz_run_config_file(const char* command, const char* path,
                                     const char* out_dir, int threads,
                                     int has_seed, uint64_t seed,
                                     spinmz_run** out_run);

/* Same, with the config text passed inline. */
spinmz_status spinmz_run_config_text(const char* command, const char* text,
                                     const char* out_dir, int threads,
                                     int has_seed, uint64_t seed,
                                     spinmz_run** out_run);

/* Parses and schema-checks a config without running anything. */
spinmz_status spinmz_config_check_text(const char* command, const char* text);

/* 0 success, 1 validation/adiabaticity failure, 2 config error. */
int spinmz_run_exit_code(const spinmz_run* run);

/* Hex digest identifying (command, config, seed); prefixes output names. */
const char* spinmz_run_id(const spinmz_run* run);

/* One-line outcome description. */
const char* spinmz_run_message(const spinmz_run* run);

/* JSON summary document (same content as the <run_id>_<command>.json file);
 * empty string when the run never reached execution. */
const char* spinmz_run_summary_json(const spinmz_run* run);

int spinmz_run_output_count(const spinmz_run* run);
const char* spinmz_run_output_path(const spinmz_run* run, int index);

void spinmz_run_free(spinmz_run* run);

/* ------------------------------------------------- direct calculators */

/* Twisting strength 8 Omega_z^2 eta_z^2 / (N Delta) in rad/s. */
spinmz_status spinmz_lambda_from_physical(double omega_z, double eta_z,
                                          double big_delta, int n_ions,
                                          double* out_lambda);

/* Single-ion dephasing rate gamma0' Omega_z^2 / Delta'^2 in 1/s. */
spinmz_status spinmz_dephasing_rate_from_physical(double gamma0_prime,
                                                  double omega_z,
                                                  double delta_prime,
                                                  double* out_gamma0);

/* Frequency information N^2 t^2 exp(-2 gamma t N^2) of a GHZ state after
 * free interrogation of length t under correlated dephasing. */
spinmz_status spinmz_ghz_qfi(int n_ions, double t, double gamma,
                             double* out_qfi);

/* Gap between the two lowest levels of delta Jz - bx Jx - lambda Jz^2. */
spinmz_status spinmz_spectrum_gap(int n_ions, double delta, double bx,
                                  double lambda, double* out_gap);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPINMZ_H */
