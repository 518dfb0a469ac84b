#include "spinmz.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "spinmz/errors.hpp"
#include "spinmz/metrology.hpp"
#include "spinmz/model.hpp"
#include "spinmz/runner.hpp"
#include "spinmz/spectra.hpp"

namespace {

thread_local std::string g_last_error;

spinmz_status fail(spinmz_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
spinmz_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const spinmz::ConfigError& e) {
    return fail(SPINMZ_E_CONFIG, e.what());
  } catch (const spinmz::Error& e) {
    return fail(SPINMZ_E_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return fail(SPINMZ_E_INTERNAL, e.what());
  } catch (...) {
    return fail(SPINMZ_E_INTERNAL, "unknown failure");
  }
}

std::string g_version_string;  // set once, stays alive for the process

}  // namespace

struct spinmz_run {
  spinmz::runner::RunReport report;
};

namespace {

spinmz_status run_impl(const char* command, const char* source, bool is_path,
                       const char* out_dir, int threads, int has_seed,
                       uint64_t seed, spinmz_run** out_run) {
  if (out_run) *out_run = nullptr;
  if (!command || !source || !out_run)
    return fail(SPINMZ_E_INTERNAL, "null argument");
  return guarded([&] {
    spinmz::runner::RunOptions opt;
    opt.command = command;
    if (is_path)
      opt.config_path = source;
    else
      opt.config_text = source;
    opt.out_dir = out_dir ? out_dir : ".";
    if (threads > 0) {
      opt.threads = threads;
      opt.threads_set = true;
    }
    if (has_seed) {
      opt.seed = seed;
      opt.seed_set = true;
    }
    spinmz::runner::RunReport report = spinmz::runner::run(opt);
    if (report.exit_code == 2) return fail(SPINMZ_E_CONFIG, report.message);
    auto* run = new spinmz_run{std::move(report)};
    *out_run = run;
    if (run->report.exit_code == 1) {
      g_last_error = run->report.message;
      return SPINMZ_E_VALIDATION;
    }
    return SPINMZ_OK;
  });
}

}  // namespace

extern "C" {

const char* spinmz_version(void) {
  if (g_version_string.empty()) g_version_string = spinmz::runner::version();
  return g_version_string.c_str();
}

const char* spinmz_last_error(void) { return g_last_error.c_str(); }

spinmz_status spinmz_run_config_file(const char* command, const char* path,
                                     const char* out_dir, int threads,
                                     int has_seed, uint64_t seed,
                                     spinmz_run** out_run) {
  return run_impl(command, path, true, out_dir, threads, has_seed, seed,
                  out_run);
}

spinmz_status spinmz_run_config_text(const char* command, const char* text,
                                     const char* out_dir, int threads,
                                     int has_seed, uint64_t seed,
                                     spinmz_run** out_run) {
  return run_impl(command, text, false, out_dir, threads, has_seed, seed,
                  out_run);
}

spinmz_status spinmz_config_check_text(const char* command, const char* text) {
  if (!command || !text) return fail(SPINMZ_E_INTERNAL, "null argument");
  return guarded([&] {
    spinmz::runner::check_config(command, text);
    return SPINMZ_OK;
  });
}

int spinmz_run_exit_code(const spinmz_run* run) {
  return run ? run->report.exit_code : 2;
}

const char* spinmz_run_id(const spinmz_run* run) {
  return run ? run->report.run_id.c_str() : "";
}

const char* spinmz_run_message(const spinmz_run* run) {
  return run ? run->report.message.c_str() : "";
}

const char* spinmz_run_summary_json(const spinmz_run* run) {
  return run ? run->report.summary_json.c_str() : "";
}

int spinmz_run_output_count(const spinmz_run* run) {
  return run ? static_cast<int>(run->report.outputs.size()) : 0;
}

const char* spinmz_run_output_path(const spinmz_run* run, int index) {
  if (!run || index < 0 ||
      index >= static_cast<int>(run->report.outputs.size()))
    return "";
  return run->report.outputs[static_cast<std::size_t>(index)].c_str();
}

void spinmz_run_free(spinmz_run* run) { delete run; }

spinmz_status spinmz_lambda_from_physical(double omega_z, double eta_z,
                                          double big_delta, int n_ions,
                                          double* out_lambda) {
  if (!out_lambda) return fail(SPINMZ_E_INTERNAL, "null argument");
  return guarded([&] {
    *out_lambda =
        spinmz::model::lambda_from_physical(omega_z, eta_z, big_delta, n_ions);
    return SPINMZ_OK;
  });
}

spinmz_status spinmz_dephasing_rate_from_physical(double gamma0_prime,
                                                  double omega_z,
                                                  double delta_prime,
                                                  double* out_gamma0) {
  if (!out_gamma0) return fail(SPINMZ_E_INTERNAL, "null argument");
  return guarded([&] {
    *out_gamma0 = spinmz::model::gamma0_from_physical(gamma0_prime, omega_z,
                                                      delta_prime);
    return SPINMZ_OK;
  });
}

spinmz_status spinmz_ghz_qfi(int n_ions, double t, double gamma,
                             double* out_qfi) {
  if (!out_qfi) return fail(SPINMZ_E_INTERNAL, "null argument");
  return guarded([&]() -> spinmz_status {
    if (n_ions < 1)
      throw spinmz::ConfigError("ion count must be >= 1");
    if (!(t >= 0.0) || !(gamma >= 0.0))
      throw spinmz::ConfigError("interrogation time and rate must be >= 0");
    *out_qfi = spinmz::metrology::qfi_closed_form(n_ions, t, gamma);
    return SPINMZ_OK;
  });
}

spinmz_status spinmz_spectrum_gap(int n_ions, double delta, double bx,
                                  double lambda, double* out_gap) {
  if (!out_gap) return fail(SPINMZ_E_INTERNAL, "null argument");
  return guarded([&] {
    spinmz::SpinBasis basis(n_ions);
    spinmz::model::HamiltonianParams p{delta, bx, lambda};
    spinmz::spectra::EigenSystem sys =
        spinmz::spectra::eigensystem(spinmz::model::build_hamiltonian(basis, p),
                                     2);
    *out_gap = sys.energies[1] - sys.energies[0];
    return SPINMZ_OK;
  });
}

}  // extern "C"
