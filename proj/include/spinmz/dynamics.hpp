#pragma once

#include <vector>

#include "spinmz/collective_spin.hpp"
#include "spinmz/spectra.hpp"

namespace spinmz::dynamics {

// Piecewise-linear control of (bx(t), delta(t)) at fixed lambda.
struct Segment {
  double duration = 0.0;  // seconds, > 0
  double bx_begin = 0.0;
  double bx_end = 0.0;
  double delta_begin = 0.0;
  double delta_end = 0.0;
};

struct RampSchedule {
  std::vector<Segment> segments;
  double lambda = 0.0;

  double total_duration() const;
};

// What the diagnostic overlap follows during propagation. Parity-resolved
// modes require delta = 0 along the schedule.
enum class Tracking {
  none,
  ground,              // instantaneous |0>
  even_ground,         // lowest even-parity state (splitter diagnostics)
  parity_ground_pair,  // weight in span{even ground, odd ground}
  two_lowest           // weight in span{|0>, |1>}
};

struct PropagateOptions {
  double dt = 0.0;  // 0: auto, phase per step <= 0.05 at the peak energy bound
  Tracking tracking = Tracking::none;
  int n_samples = 256;
  bool record_trajectory = false;
};

struct TrajectorySample {
  double t;
  double tracked_overlap;
  double gap;  // e1 - e0 of the instantaneous Hamiltonian
};

struct PropagationResult {
  StateVector final_state;
  double min_tracked_overlap = 1.0;
  double t_at_min = 0.0;
  double norm_drift = 0.0;  // max | ||psi|| - 1 | seen at samples
  std::vector<TrajectorySample> trajectory;
};

// Upper bound on |E| over the schedule: |delta| N/2 + lambda N^2/4 + |bx| N/2.
double energy_bound(const SpinBasis& basis, const RampSchedule& schedule);

double default_dt(const SpinBasis& basis, const RampSchedule& schedule);

// Steps the state with the exact exponential of the midpoint-frozen
// Hamiltonian (eigendecomposition per step): unconditionally unitary and
// second-order accurate in the drive. Rejects dt past the phase bound
// dt * max|E| > 0.5.
PropagationResult propagate(const StateVector& initial,
                            const RampSchedule& schedule,
                            const PropagateOptions& opts);

// Exact inverse of propagate over the same partition (reversed step order,
// conjugated phases). Lets a fixed recombiner act on projectors instead of
// re-propagating every input state.
PropagationResult propagate_adjoint(const StateVector& initial,
                                    const RampSchedule& schedule,
                                    const PropagateOptions& opts);

// amp_m *= exp(-i m phi); phi = omega0 * t. The phase overload takes the
// accumulated phase directly, for omega0 T too large to form in double.
void free_evolve(StateVector& s, double omega0, double t);
void free_evolve_phase(StateVector& s, double phi);

struct AdiabaticityReport {
  double min_overlap = 1.0;
  double t_at_min = 0.0;
  double gap_at_min = 0.0;  // 0 when no trajectory was recorded
  bool passed = false;
};

AdiabaticityReport adiabaticity_report(const PropagationResult& result,
                                       double floor);

}  // namespace spinmz::dynamics
