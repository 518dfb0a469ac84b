#include "spinmz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spinmz/errors.hpp"
#include "spinmz/model.hpp"
#include "spinmz/units.hpp"
#include "tridiag_solve.hpp"

namespace spinmz::dynamics {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

void validate(const RampSchedule& schedule) {
  if (schedule.segments.empty())
    throw ConfigError("ramp schedule has no segments");
  for (const Segment& s : schedule.segments) {
    if (!(s.duration > 0.0) || !std::isfinite(s.duration))
      throw ConfigError("segment duration must be positive and finite");
    if (!std::isfinite(s.bx_begin) || !std::isfinite(s.bx_end) ||
        !std::isfinite(s.delta_begin) || !std::isfinite(s.delta_end))
      throw ConfigError("segment endpoints must be finite");
  }
  if (!std::isfinite(schedule.lambda))
    throw ConfigError("lambda must be finite");
}

struct Controls {
  double bx;
  double delta;
};

Controls controls_at(const Segment& s, double local_t) {
  double f = local_t / s.duration;
  return {s.bx_begin + f * (s.bx_end - s.bx_begin),
          s.delta_begin + f * (s.delta_end - s.delta_begin)};
}

// Diagnostic snapshot against the instantaneous Hamiltonian. The gap
// reported is the one that protects the tracked manifold.
struct Snapshot {
  double overlap;
  double gap;
};

Snapshot snapshot(const TridiagonalOperator& h, const Eigen::VectorXcd& psi,
                  Tracking mode) {
  using spectra::Parity;
  const int dim = h.basis.dim();
  switch (mode) {
    case Tracking::ground: {
      spectra::EigenSystem sys = spectra::eigensystem(h, std::min(2, dim));
      double ov = std::norm(sys.vectors.col(0).cast<cplx>().dot(psi));
      double gap = dim > 1 ? sys.energies[1] - sys.energies[0] : 0.0;
      return {ov, gap};
    }
    case Tracking::even_ground: {
      spectra::FoldedTridiagonal fe = spectra::parity_fold(h, Parity::even);
      int k = std::min<int>(2, fe.diag.size());
      spectra::EigenSystem sys = spectra::tridiagonal_eigensystem(fe.diag, fe.off, k);
      Eigen::VectorXd v = spectra::parity_unfold(h.basis, Parity::even, sys.vectors.col(0));
      double ov = std::norm(v.cast<cplx>().dot(psi));
      double gap = k > 1 ? sys.energies[1] - sys.energies[0] : 0.0;
      return {ov, gap};
    }
    case Tracking::parity_ground_pair: {
      spectra::ParityGroundPair pair = spectra::parity_ground_pair(h);
      double ov = std::norm(pair.v_even.cast<cplx>().dot(psi)) +
                  std::norm(pair.v_odd.cast<cplx>().dot(psi));
      spectra::FoldedTridiagonal fe = spectra::parity_fold(h, Parity::even);
      spectra::FoldedTridiagonal fo = spectra::parity_fold(h, Parity::odd);
      double gap = std::numeric_limits<double>::infinity();
      if (fe.diag.size() > 1) {
        Eigen::VectorXd ev = spectra::tridiagonal_eigensystem(fe.diag, fe.off, 2).energies;
        gap = std::min(gap, ev[1] - ev[0]);
      }
      if (fo.diag.size() > 1) {
        Eigen::VectorXd ev = spectra::tridiagonal_eigensystem(fo.diag, fo.off, 2).energies;
        gap = std::min(gap, ev[1] - ev[0]);
      }
      if (!std::isfinite(gap)) gap = 0.0;
      return {ov, gap};
    }
    case Tracking::two_lowest: {
      int k = std::min(3, dim);
      spectra::EigenSystem sys = spectra::eigensystem(h, k);
      double ov = std::norm(sys.vectors.col(0).cast<cplx>().dot(psi));
      if (k > 1) ov += std::norm(sys.vectors.col(1).cast<cplx>().dot(psi));
      double gap = k > 2 ? sys.energies[2] - sys.energies[1] : 0.0;
      return {ov, gap};
    }
    case Tracking::none:
      break;
  }
  return {1.0, 0.0};
}

PropagationResult propagate_impl(const StateVector& initial,
                                 const RampSchedule& schedule,
                                 const PropagateOptions& opts, bool adjoint) {
  validate(schedule);
  const SpinBasis& basis = initial.basis;
  const int dim = basis.dim();
  const double max_e = energy_bound(basis, schedule);
  double dt = opts.dt > 0.0 ? opts.dt : default_dt(basis, schedule);
  if (dt * max_e > 0.5)
    throw NumericsError(
        "step size too coarse: dt*max|E| = " + units::format_double(dt * max_e) +
        " > 0.5; reduce dt below " + units::format_double(0.5 / max_e) +
        " s (the default uses 0.05/max|E|)");

  if ((opts.tracking == Tracking::even_ground ||
       opts.tracking == Tracking::parity_ground_pair)) {
    for (const Segment& s : schedule.segments)
      if (s.delta_begin != 0.0 || s.delta_end != 0.0)
        throw NumericsError("parity-resolved tracking requires delta = 0 "
                            "across the schedule");
  }

  // Fixed partition: ceil(duration/dt) steps per segment, so segment
  // boundaries land exactly and forward/adjoint share the same midpoints.
  const int nseg = static_cast<int>(schedule.segments.size());
  std::vector<long> steps(nseg);
  std::vector<double> h(nseg), seg_t0(nseg);
  long total_steps = 0;
  double t_acc = 0.0;
  for (int k = 0; k < nseg; ++k) {
    double dur = schedule.segments[k].duration;
    steps[k] = std::max<long>(1, static_cast<long>(std::ceil(dur / dt)));
    h[k] = dur / static_cast<double>(steps[k]);
    seg_t0[k] = t_acc;
    t_acc += dur;
    total_steps += steps[k];
  }
  const double t_total = t_acc;

  long stride = 1;
  if (opts.n_samples > 0)
    stride = std::max<long>(1, total_steps / opts.n_samples);

  PropagationResult result{StateVector(basis)};
  result.final_state.amp = initial.amp;

  Eigen::VectorXd psi_re = initial.amp.real();
  Eigen::VectorXd psi_im = initial.amp.imag();

  TridiagonalOperator ham(basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  Eigen::VectorXd a(dim), b(dim), ar(dim), br(dim);

  auto build_h = [&](double bx, double delta) {
    for (int i = 0; i < dim; ++i) {
      double m = basis.m_of(i);
      ham.diag[i] = delta * m - schedule.lambda * m * m;
    }
    const double jv = basis.j();
    for (int i = 0; i + 1 < dim; ++i) {
      double m = basis.m_of(i + 1);
      ham.off[i] = -0.5 * bx * std::sqrt(jv * (jv + 1) - m * (m + 1));
    }
  };

  auto sample = [&](double t_sched) {
    Eigen::VectorXcd psi(dim);
    psi.real() = psi_re;
    psi.imag() = psi_im;
    double drift = std::abs(psi.norm() - 1.0);
    result.norm_drift = std::max(result.norm_drift, drift);
    if (opts.tracking == Tracking::none && !opts.record_trajectory) return;
    int k = nseg - 1;
    while (k > 0 && t_sched < seg_t0[k]) --k;
    Controls c = controls_at(schedule.segments[k],
                             std::clamp(t_sched - seg_t0[k], 0.0,
                                        schedule.segments[k].duration));
    build_h(c.bx, c.delta);
    Snapshot snap = snapshot(ham, psi, opts.tracking);
    if (snap.overlap < result.min_tracked_overlap) {
      result.min_tracked_overlap = snap.overlap;
      result.t_at_min = t_sched;
    }
    if (opts.record_trajectory)
      result.trajectory.push_back({t_sched, snap.overlap, snap.gap});
  };

  sample(adjoint ? t_total : 0.0);

  long done = 0;
  for (int kk = 0; kk < nseg; ++kk) {
    int k = adjoint ? nseg - 1 - kk : kk;
    const Segment& seg = schedule.segments[k];
    for (long ss = 0; ss < steps[k]; ++ss) {
      long s = adjoint ? steps[k] - 1 - ss : ss;
      double t_mid_local = (static_cast<double>(s) + 0.5) * h[k];
      Controls c = controls_at(seg, t_mid_local);
      build_h(c.bx, c.delta);
      detail::tridiagonal_eigen(ham.diag, ham.off, es, true, evals, evecs);
      const Eigen::MatrixXd& v = evecs;
      a.noalias() = v.transpose() * psi_re;
      b.noalias() = v.transpose() * psi_im;
      const double sign = adjoint ? +1.0 : -1.0;
      for (int i = 0; i < dim; ++i) {
        double ph = sign * evals[i] * h[k];
        double cp = std::cos(ph), sp = std::sin(ph);
        double ai = a[i], bi = b[i];
        ar[i] = ai * cp - bi * sp;
        br[i] = ai * sp + bi * cp;
      }
      psi_re.noalias() = v * ar;
      psi_im.noalias() = v * br;
      ++done;
      double t_after = adjoint ? seg_t0[k] + s * h[k]
                               : seg_t0[k] + (s + 1) * h[k];
      if (done % stride == 0 || done == total_steps) sample(t_after);
    }
  }

  result.final_state.amp.real() = psi_re;
  result.final_state.amp.imag() = psi_im;
  return result;
}

}  // namespace

double RampSchedule::total_duration() const {
  double t = 0.0;
  for (const Segment& s : segments) t += s.duration;
  return t;
}

double energy_bound(const SpinBasis& basis, const RampSchedule& schedule) {
  const double n = basis.n_ions;
  double worst = 0.0;
  for (const Segment& s : schedule.segments) {
    double bx = std::max(std::abs(s.bx_begin), std::abs(s.bx_end));
    double delta = std::max(std::abs(s.delta_begin), std::abs(s.delta_end));
    worst = std::max(worst, delta * n / 2 + std::abs(schedule.lambda) * n * n / 4 +
                                bx * n / 2);
  }
  return worst;
}

double default_dt(const SpinBasis& basis, const RampSchedule& schedule) {
  double max_e = energy_bound(basis, schedule);
  if (max_e <= 0.0) return schedule.total_duration();
  return 0.05 / max_e;
}

PropagationResult propagate(const StateVector& initial,
                            const RampSchedule& schedule,
                            const PropagateOptions& opts) {
  return propagate_impl(initial, schedule, opts, false);
}

PropagationResult propagate_adjoint(const StateVector& initial,
                                    const RampSchedule& schedule,
                                    const PropagateOptions& opts) {
  return propagate_impl(initial, schedule, opts, true);
}

void free_evolve(StateVector& s, double omega0, double t) {
  free_evolve_phase(s, omega0 * t);
}

void free_evolve_phase(StateVector& s, double phi) {
  // Reducing mod 2pi changes half-integer-m phases only by a global sign;
  // relative phases involve integer m differences and are exact.
  double r = std::fmod(phi, two_pi);
  for (int i = 0; i < s.basis.dim(); ++i)
    s.amp[i] *= std::polar(1.0, -s.basis.m_of(i) * r);
}

AdiabaticityReport adiabaticity_report(const PropagationResult& result,
                                       double floor) {
  AdiabaticityReport rep;
  rep.min_overlap = result.min_tracked_overlap;
  rep.t_at_min = result.t_at_min;
  for (const TrajectorySample& s : result.trajectory)
    if (s.t == result.t_at_min) rep.gap_at_min = s.gap;
  rep.passed = rep.min_overlap >= floor;
  return rep;
}

}  // namespace spinmz::dynamics
