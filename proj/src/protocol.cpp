#include "spinmz/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "spinmz/errors.hpp"
#include "spinmz/parallel.hpp"

namespace spinmz::protocol {

namespace {

using dynamics::PropagateOptions;
using dynamics::RampSchedule;
using dynamics::Segment;
using dynamics::Tracking;

Segment split_segment(const ProtocolConfig& c) {
  return {c.ramp_duration(), c.alpha, 0.0, 0.0, 0.0};
}

Segment recombine_up_segment(const ProtocolConfig& c) {
  return {c.ramp_duration(), 0.0, c.alpha, 0.0, 0.0};
}

Segment recombine_down_segment(const ProtocolConfig& c) {
  double d = c.recombine_sign * c.delta_recombine;
  return {c.ramp_duration(), c.alpha, 0.0, d, d};
}

// One dt for every stage so the pole-pullback scan discretizes the
// recombiner exactly as the stage-by-stage pipeline does.
double resolve_dt(const ProtocolConfig& c, const SpinBasis& basis) {
  if (c.dt > 0) return c.dt;
  RampSchedule all{{split_segment(c), recombine_up_segment(c),
                    recombine_down_segment(c)},
                   c.lambda};
  return dynamics::default_dt(basis, all);
}

PropagateOptions stage_options(const ProtocolConfig& c, const SpinBasis& basis,
                               Tracking tracking) {
  PropagateOptions o;
  o.dt = resolve_dt(c, basis);
  o.tracking = tracking;
  o.n_samples = c.n_samples;
  return o;
}

PoleReadout finish_readout(const StateVector& s, const ProtocolConfig& c,
                           double pair_overlap, double two_level_overlap) {
  PoleReadout r;
  r.p_plus = std::norm(s.amp[0]);
  r.p_minus = std::norm(s.amp[s.basis.dim() - 1]);
  r.leakage = std::max(0.0, 1.0 - r.p_plus - r.p_minus);
  r.min_pair_overlap = pair_overlap;
  r.min_two_level_overlap = two_level_overlap;
  r.adiabatic = pair_overlap >= c.adiabatic_floor &&
                two_level_overlap >= c.adiabatic_floor;
  r.leakage_ok = r.leakage <= c.leakage_tol;
  return r;
}

RunRecord make_record(const ProtocolConfig& c, const SplitResult& split,
                      const PoleReadout& read, double phase, double omega0) {
  RunRecord rec;
  rec.n_ions = c.n_ions;
  rec.phase = phase;
  rec.omega0 = omega0;
  rec.duration = c.total_duration();
  rec.cat_fidelity = split.cat_fidelity;
  rec.min_even_overlap = split.min_even_overlap;
  rec.min_pair_overlap = read.min_pair_overlap;
  rec.min_two_level_overlap = read.min_two_level_overlap;
  rec.p_plus = read.p_plus;
  rec.p_minus = read.p_minus;
  rec.leakage = read.leakage;
  rec.shots = c.shots;
  rec.adiabatic = split.adiabatic && read.adiabatic;
  rec.leakage_ok = read.leakage_ok;
  if (c.shots > 0) {
    Counts counts =
        sample_measurements(read.p_plus, read.p_minus, c.shots, c.rng_seed);
    rec.counts_plus = counts.n_plus;
    rec.counts_minus = counts.n_minus;
    rec.counts_leak = counts.n_leak;
  }
  return rec;
}

std::uint64_t splitmix64_u(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

void validate(const ProtocolConfig& c) {
  if (c.n_ions < 1) throw ConfigError("protocol: n_ions must be >= 1");
  if (!(c.lambda > 0))
    throw ConfigError("protocol: lambda must be > 0 (got " +
                      std::to_string(c.lambda) + ")");
  if (!(c.alpha > 0)) throw ConfigError("protocol: alpha must be > 0");
  if (!(c.beta > 0)) throw ConfigError("protocol: beta must be > 0");
  if (!(c.delta_recombine > 0) || !(c.delta_recombine < c.lambda / 4))
    throw ConfigError(
        "protocol: delta_recombine must lie in (0, lambda/4); the pole "
        "mapping is only monotonic inside that window");
  if (c.recombine_sign != 1 && c.recombine_sign != -1)
    throw ConfigError("protocol: recombine_sign must be +1 or -1");
  if (c.t_free < 0) throw ConfigError("protocol: t_free must be >= 0");
  if (c.dt < 0) throw ConfigError("protocol: dt must be >= 0");
  if (!(c.adiabatic_floor > 0) || c.adiabatic_floor > 1)
    throw ConfigError("protocol: adiabatic_floor must be in (0, 1]");
  if (!(c.leakage_tol > 0) || c.leakage_tol >= 1)
    throw ConfigError("protocol: leakage_tol must be in (0, 1)");
  if (c.shots < 0) throw ConfigError("protocol: shots must be >= 0");
  if (c.n_samples < 2) throw ConfigError("protocol: n_samples must be >= 2");
}

SplitResult beam_split(const ProtocolConfig& c) {
  validate(c);
  SpinBasis basis{c.n_ions};
  StateVector s0 = spin_coherent_x(basis, +1);
  RampSchedule sched{{split_segment(c)}, c.lambda};
  auto res = dynamics::propagate(
      s0, sched, stage_options(c, basis, Tracking::even_ground));
  SplitResult r{std::move(res.final_state), 0.0, res.min_tracked_overlap,
                res.norm_drift, false};
  r.cat_fidelity = std::norm(overlap(cat_state(basis, 0.0), r.state));
  r.adiabatic = r.min_even_overlap >= c.adiabatic_floor;
  return r;
}

PoleReadout recombine_and_read(const StateVector& state,
                               const ProtocolConfig& c) {
  validate(c);
  if (state.basis.n_ions != c.n_ions)
    throw ConfigError("protocol: state dimension does not match n_ions");
  const SpinBasis& basis = state.basis;
  auto up = dynamics::propagate(
      state, RampSchedule{{recombine_up_segment(c)}, c.lambda},
      stage_options(c, basis, Tracking::parity_ground_pair));
  auto down = dynamics::propagate(
      up.final_state, RampSchedule{{recombine_down_segment(c)}, c.lambda},
      stage_options(c, basis, Tracking::two_lowest));
  return finish_readout(down.final_state, c, up.min_tracked_overlap,
                        down.min_tracked_overlap);
}

RunRecord run_mz_sequence_phase(const ProtocolConfig& c, double phase) {
  SplitResult split = beam_split(c);
  StateVector s = split.state;
  dynamics::free_evolve_phase(s, phase);
  PoleReadout read = recombine_and_read(s, c);
  return make_record(c, split, read, phase, 0.0);
}

RunRecord run_mz_sequence(const ProtocolConfig& c, double omega0) {
  RunRecord rec = run_mz_sequence_phase(c, omega0 * c.t_free);
  rec.omega0 = omega0;
  return rec;
}

RecombinerFunctional recombiner_functional(const ProtocolConfig& c) {
  validate(c);
  SpinBasis basis{c.n_ions};
  auto pull_back = [&](int pole_index, double& pair_ov, double& two_ov) {
    auto down = dynamics::propagate_adjoint(
        basis_state(basis, pole_index),
        RampSchedule{{recombine_down_segment(c)}, c.lambda},
        stage_options(c, basis, Tracking::two_lowest));
    auto up = dynamics::propagate_adjoint(
        down.final_state, RampSchedule{{recombine_up_segment(c)}, c.lambda},
        stage_options(c, basis, Tracking::parity_ground_pair));
    pair_ov = up.min_tracked_overlap;
    two_ov = down.min_tracked_overlap;
    return up.final_state;
  };
  double pair_p, two_p, pair_m, two_m;
  StateVector w_plus = pull_back(0, pair_p, two_p);
  StateVector w_minus = pull_back(basis.dim() - 1, pair_m, two_m);
  RecombinerFunctional fn{std::move(w_plus), std::move(w_minus),
                          std::min(pair_p, pair_m), std::min(two_p, two_m),
                          false};
  fn.adiabatic = fn.min_pair_overlap >= c.adiabatic_floor &&
                 fn.min_two_level_overlap >= c.adiabatic_floor;
  return fn;
}

FringeFit fit_fringe(const std::vector<double>& phi,
                     const std::vector<double>& p, double nu_min,
                     double nu_max) {
  FringeFit fit;
  const int n = static_cast<int>(phi.size());
  if (n < 4 || p.size() != phi.size() || !(nu_max > nu_min) || !(nu_min > 0))
    return fit;

  // p ~ c0 + a cos(nu phi) + b sin(nu phi): linear in (c0, a, b) at fixed
  // nu, so scan nu and keep the best normal-equation solve.
  auto solve_at = [&](double nu, Eigen::Vector3d& coef) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
      Eigen::Vector3d row(1.0, std::cos(nu * phi[i]), std::sin(nu * phi[i]));
      m += row * row.transpose();
      rhs += row * p[i];
    }
    Eigen::LDLT<Eigen::Matrix3d> ldlt(m);
    if (ldlt.info() != Eigen::Success) return std::numeric_limits<double>::max();
    coef = ldlt.solve(rhs);
    double ss = 0;
    for (int i = 0; i < n; ++i) {
      double model =
          coef[0] + coef[1] * std::cos(nu * phi[i]) + coef[2] * std::sin(nu * phi[i]);
      ss += (p[i] - model) * (p[i] - model);
    }
    return ss;
  };

  const int n_scan = 101;
  double best_nu = nu_min, best_ss = std::numeric_limits<double>::max();
  for (int k = 0; k < n_scan; ++k) {
    double nu = nu_min + (nu_max - nu_min) * k / (n_scan - 1);
    Eigen::Vector3d coef;
    double ss = solve_at(nu, coef);
    if (ss < best_ss) {
      best_ss = ss;
      best_nu = nu;
    }
  }
  // parabolic refinement on the residual, then a golden-ratio polish
  double h = (nu_max - nu_min) / (n_scan - 1);
  double lo = std::max(nu_min, best_nu - h), hi = std::min(nu_max, best_nu + h);
  for (int it = 0; it < 60 && hi - lo > 1e-12 * best_nu; ++it) {
    double m1 = lo + 0.381966 * (hi - lo);
    double m2 = hi - 0.381966 * (hi - lo);
    Eigen::Vector3d c1, c2;
    if (solve_at(m1, c1) < solve_at(m2, c2))
      hi = m2;
    else
      lo = m1;
  }
  best_nu = 0.5 * (lo + hi);
  Eigen::Vector3d coef;
  best_ss = solve_at(best_nu, coef);
  if (best_ss == std::numeric_limits<double>::max()) return fit;

  double r = std::hypot(coef[1], coef[2]);
  fit.frequency = best_nu;
  fit.amplitude = 2.0 * r;
  fit.offset = coef[0] - r;
  fit.phase_offset = r > 0 ? std::atan2(coef[2], coef[1]) / best_nu : 0.0;
  double floor_c = std::max(0.0, fit.offset);
  double denom = fit.amplitude + 2.0 * floor_c;
  fit.visibility =
      denom > 0 ? std::clamp(fit.amplitude / denom, 0.0, 1.0) : 0.0;
  fit.rms_residual = std::sqrt(best_ss / n);
  fit.ok = true;
  return fit;
}

FringeResult fringe_scan(const ProtocolConfig& c,
                         const std::vector<double>& phase_grid, int threads) {
  validate(c);
  if (phase_grid.size() < 8)
    throw ConfigError("protocol: fringe scan needs at least 8 phase points");

  SpinBasis basis{c.n_ions};
  FringeResult out{phase_grid, {},  {},  {},  FringeFit{}, 0.0,
                   beam_split(c), 1.0, 1.0, 0.0};

  // Pull each pole projector back through the fixed recombiner:
  // p(phi) = |<U_rec^dag pole | psi_split(phi)>|^2.
  RecombinerFunctional fn = recombiner_functional(c);
  out.min_pair_overlap = fn.min_pair_overlap;
  out.min_two_level_overlap = fn.min_two_level_overlap;

  Eigen::VectorXcd q_plus =
      fn.w_plus.amp.conjugate().cwiseProduct(out.split.state.amp);
  Eigen::VectorXcd q_minus =
      fn.w_minus.amp.conjugate().cwiseProduct(out.split.state.amp);

  const int dim = basis.dim();
  const std::size_t npts = phase_grid.size();
  out.p_pole_a.resize(npts);
  out.p_pole_b.resize(npts);
  out.leakage.resize(npts);
  parallel_for(npts, threads, [&](std::size_t k) {
    double phi = std::fmod(phase_grid[k], 2.0 * M_PI);
    cplx s_plus = 0, s_minus = 0;
    for (int i = 0; i < dim; ++i) {
      cplx ph = std::polar(1.0, -basis.m_of(i) * phi);
      s_plus += q_plus[i] * ph;
      s_minus += q_minus[i] * ph;
    }
    double pa = std::norm(s_plus), pb = std::norm(s_minus);
    if (c.shots > 0) {
      Counts counts =
          sample_measurements(pa, pb, c.shots, mix_seed(c.rng_seed, k));
      pa = static_cast<double>(counts.n_plus) / c.shots;
      pb = static_cast<double>(counts.n_minus) / c.shots;
    }
    out.p_pole_a[k] = pa;
    out.p_pole_b[k] = pb;
    out.leakage[k] = std::max(0.0, 1.0 - pa - pb);
  });
  out.max_leakage = *std::max_element(out.leakage.begin(), out.leakage.end());

  // Witness: one grid point through the stage-by-stage pipeline. The two
  // routes share the discretization, so disagreement means a defect.
  {
    StateVector s = out.split.state;
    dynamics::free_evolve_phase(s, phase_grid[0]);
    PoleReadout full = recombine_and_read(s, c);
    double phi = std::fmod(phase_grid[0], 2.0 * M_PI);
    cplx s_plus = 0, s_minus = 0;
    for (int i = 0; i < dim; ++i) {
      cplx ph = std::polar(1.0, -basis.m_of(i) * phi);
      s_plus += q_plus[i] * ph;
      s_minus += q_minus[i] * ph;
    }
    if (std::abs(std::norm(s_plus) - full.p_plus) > 1e-9 ||
        std::abs(std::norm(s_minus) - full.p_minus) > 1e-9)
      throw NumericsError(
          "protocol: pole-pullback scan disagrees with the stage-by-stage "
          "pipeline at the witness point");
  }

  double nu_center = static_cast<double>(c.n_ions);
  out.fit = fit_fringe(out.phase_grid, out.p_pole_a,
                       std::max(0.25, nu_center - 0.5), nu_center + 0.5);
  out.visibility = out.fit.visibility;
  return out;
}

std::array<double, 2> ideal_pole_probabilities(int n_ions, double phase) {
  if (n_ions < 1) throw ConfigError("ideal_pole_probabilities: n_ions >= 1");
  double half = 0.5 * n_ions * phase;
  double cc = std::cos(half), ss = std::sin(half);
  return {cc * cc, ss * ss};
}

Counts sample_measurements(double p_plus, double p_minus, long long shots,
                           std::uint64_t seed) {
  if (shots < 0) throw ConfigError("sample_measurements: shots must be >= 0");
  if (p_plus < -1e-12 || p_minus < -1e-12 || p_plus + p_minus > 1 + 1e-9)
    throw ConfigError("sample_measurements: probabilities out of range");
  p_plus = std::clamp(p_plus, 0.0, 1.0);
  p_minus = std::clamp(p_minus, 0.0, 1.0 - p_plus);
  std::mt19937_64 eng(splitmix64_u(seed));
  Counts counts;
  for (long long i = 0; i < shots; ++i) {
    double u = uniform01(eng);
    if (u < p_plus)
      ++counts.n_plus;
    else if (u < p_plus + p_minus)
      ++counts.n_minus;
    else
      ++counts.n_leak;
  }
  return counts;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64_u(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

}  // namespace spinmz::protocol
