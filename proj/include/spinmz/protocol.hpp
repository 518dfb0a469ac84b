#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spinmz/collective_spin.hpp"
#include "spinmz/dynamics.hpp"

namespace spinmz::protocol {

// Full interferometer sequence at fixed lambda: prepare along +x at
// Bx = alpha, ramp to Bx = 0 (split), free-evolve a phase, ramp back up at
// delta = 0 and down again at delta = +-delta_recombine (recombine), read
// the pole populations. All three ramps are linear with rate beta, so each
// lasts alpha / beta.
struct ProtocolConfig {
  int n_ions = 0;
  double lambda = 0.0;           // rad/s, > 0
  double alpha = 0.0;            // rad/s, ramp start field, > 0
  double beta = 0.0;             // rad/s^2, ramp rate, > 0
  double delta_recombine = 0.0;  // rad/s, in (0, lambda/4)
  // Sign of the detuning applied during the final ramp. -1 steers the
  // even-cat branch onto m = +N/2 (pole-mapping calibration test pins this).
  int recombine_sign = -1;
  double t_free = 0.0;   // s, >= 0
  double dt = 0.0;       // s; 0 picks the phase-budget default
  double adiabatic_floor = 0.90;
  double leakage_tol = 0.02;
  long long shots = 0;   // 0: exact probabilities, no sampling
  std::uint64_t rng_seed = 1;
  int n_samples = 64;    // trajectory samples per ramp for diagnostics

  double ramp_duration() const { return alpha / beta; }
  double total_duration() const { return 3.0 * ramp_duration() + t_free; }
};

void validate(const ProtocolConfig& c);  // throws ConfigError

struct SplitResult {
  StateVector state;
  double cat_fidelity = 0.0;      // |<cat|psi>|^2 against the zero-phase cat
  double min_even_overlap = 1.0;  // lowest even-sector occupancy seen
  double norm_drift = 0.0;
  bool adiabatic = false;  // min_even_overlap >= adiabatic_floor
};

// Coherent +x state at Bx = alpha, then the down-ramp at delta = 0. The
// sweep crosses the exponentially small even/odd degeneracy, but parity is
// conserved, so adiabaticity is judged inside the even sector.
SplitResult beam_split(const ProtocolConfig& c);

struct PoleReadout {
  double p_plus = 0.0;   // population at m = +N/2
  double p_minus = 0.0;  // population at m = -N/2
  double leakage = 0.0;  // 1 - p_plus - p_minus
  double min_pair_overlap = 1.0;       // ramp up: weight in the parity pair
  double min_two_level_overlap = 1.0;  // ramp down: weight in two lowest
  bool adiabatic = false;
  bool leakage_ok = false;
};

// Two-stage recombiner: Bx 0 -> alpha at delta = 0 (parity components land
// on the two lowest levels), then alpha -> 0 at delta = sign * delta_r
// (the pair fans out onto the poles).
PoleReadout recombine_and_read(const StateVector& state,
                               const ProtocolConfig& c);

struct RecombinerFunctional {
  StateVector w_plus;
  StateVector w_minus;
  double min_pair_overlap = 1.0;
  double min_two_level_overlap = 1.0;
  bool adiabatic = false;
};

// The recombiner is a fixed unitary, so each pole projector pulls back to a
// single vector: p± = |<w±|psi>|^2 under the same discretization as
// recombine_and_read. Mixed inputs read out as <w±|rho|w±>.
RecombinerFunctional recombiner_functional(const ProtocolConfig& c);

struct RunRecord {
  int n_ions = 0;
  double phase = 0.0;   // accumulated free-evolution phase omega0 * T
  double omega0 = 0.0;  // 0 when the phase was set directly
  double duration = 0.0;  // simulated protocol time: 3 ramps + t_free
  double cat_fidelity = 0.0;
  double min_even_overlap = 1.0;
  double min_pair_overlap = 1.0;
  double min_two_level_overlap = 1.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  double leakage = 0.0;
  long long shots = 0;
  long long counts_plus = 0;
  long long counts_minus = 0;
  long long counts_leak = 0;
  bool adiabatic = false;
  bool leakage_ok = false;
};

RunRecord run_mz_sequence_phase(const ProtocolConfig& c, double phase);
// phase = omega0 * t_free
RunRecord run_mz_sequence(const ProtocolConfig& c, double omega0);

// Least-squares fringe p(phi) ~ A cos^2(nu (phi - phi0) / 2) + C, with nu
// scanned over [nu_min, nu_max] and refined. visibility = A / (A + 2C).
struct FringeFit {
  double amplitude = 0.0;     // A
  double offset = 0.0;        // C
  double phase_offset = 0.0;  // phi0
  double frequency = 0.0;     // nu, fringe radians per radian of phi
  double visibility = 0.0;
  double rms_residual = 0.0;
  bool ok = false;
};

FringeFit fit_fringe(const std::vector<double>& phi,
                     const std::vector<double>& p, double nu_min,
                     double nu_max);

struct FringeResult {
  std::vector<double> phase_grid;
  std::vector<double> p_pole_a;  // m = +N/2 branch (frequencies when sampled)
  std::vector<double> p_pole_b;  // m = -N/2 branch
  std::vector<double> leakage;
  FringeFit fit;  // fit of p_pole_a, nu scanned around N
  double visibility = 0.0;
  // shared diagnostics: one splitter, recombiner probed through the pole
  // pullback and one witness run cross-checked against the fast path
  SplitResult split;
  double min_pair_overlap = 1.0;
  double min_two_level_overlap = 1.0;
  double max_leakage = 0.0;
};

// The splitter output and the recombiner are phase-independent, so the scan
// propagates once, pulls the two pole projectors back through the
// recombiner, and reduces every grid point to two inner products. A witness
// point is re-run through the full pipeline and must agree to 1e-9.
FringeResult fringe_scan(const ProtocolConfig& c,
                         const std::vector<double>& phase_grid, int threads);

// Closed-form target: {cos^2(N phi / 2), sin^2(N phi / 2)}.
std::array<double, 2> ideal_pole_probabilities(int n_ions, double phase);

struct Counts {
  long long n_plus = 0;
  long long n_minus = 0;
  long long n_leak = 0;
};

// Multinomial draw over {pole+, pole-, leak}; deterministic per seed.
Counts sample_measurements(double p_plus, double p_minus, long long shots,
                           std::uint64_t seed);

// Stable per-index stream seeding for parallel grids.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace spinmz::protocol
