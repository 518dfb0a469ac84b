#include "spinmz/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinmz/decoherence.hpp"
#include "spinmz/errors.hpp"

namespace spinmz::metrology {

namespace {

void require_hermitian(const Eigen::MatrixXcd& m, const char* who) {
  if (m.rows() != m.cols())
    throw ValidationError(std::string(who) + ": matrix is not square");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ValidationError(std::string(who) + ": matrix is not Hermitian");
}

}  // namespace

Eigen::MatrixXcd sld(const Eigen::MatrixXcd& rho,
                     const Eigen::MatrixXcd& drho) {
  require_hermitian(rho, "sld(rho)");
  require_hermitian(drho, "sld(drho)");
  if (rho.rows() != drho.rows())
    throw ValidationError("sld: rho and drho sizes differ");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  if (es.info() != Eigen::Success)
    throw NumericsError("sld: eigensolve of rho failed");
  const Eigen::VectorXd& p = es.eigenvalues();
  const Eigen::MatrixXcd& u = es.eigenvectors();

  double cutoff = 1e-12 * std::abs(rho.trace().real());
  Eigen::MatrixXcd d = u.adjoint() * drho * u;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (int i = 0; i < rho.rows(); ++i) {
    for (int j = 0; j < rho.cols(); ++j) {
      double w = p[i] + p[j];
      if (w > cutoff) a(i, j) = 2.0 * d(i, j) / w;
    }
  }
  return u * a * u.adjoint();
}

double qfi(const SpinBasis& basis, double omega0, double t, double gamma) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw ValidationError("qfi: interrogation time must be finite and >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ValidationError("qfi: gamma must be finite and >= 0");

  lindblad::DensityMatrix rho = lindblad::dephase_analytic(
      lindblad::ghz_initial(basis), {omega0, gamma, false}, t);

  int dim = basis.dim();
  Eigen::MatrixXcd drho(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double dm = basis.m_of(i) - basis.m_of(j);
      drho(i, j) = cplx(0.0, -dm * t) * rho.rho(i, j);
    }
  }
  Eigen::MatrixXcd l = sld(rho.rho, drho);
  return (rho.rho * l * l).trace().real();
}

double qfi_closed_form(int n_ions, double t, double gamma) {
  double n = static_cast<double>(n_ions);
  return n * n * t * t * std::exp(-2.0 * gamma * t * n * n);
}

double cramer_rao(double qfi_value, double k_runs) {
  if (!(qfi_value > 0.0))
    throw ValidationError("cramer_rao: Fisher information must be > 0");
  if (!(k_runs >= 1.0))
    throw ValidationError("cramer_rao: need at least one run");
  return 1.0 / std::sqrt(k_runs * qfi_value);
}

MetrologyCurve uncertainty_curve(const std::vector<int>& n_grid, double t,
                                 double k_runs, double gamma0, double omega0) {
  if (n_grid.empty())
    throw ValidationError("uncertainty_curve: empty ion-number grid");
  if (!(t > 0.0)) throw ValidationError("uncertainty_curve: t must be > 0");
  if (!(k_runs >= 1.0))
    throw ValidationError("uncertainty_curve: need at least one run");
  if (!(gamma0 >= 0.0))
    throw ValidationError("uncertainty_curve: gamma0 must be >= 0");

  MetrologyCurve curve;
  for (int n : n_grid) {
    if (n < 1)
      throw ValidationError("uncertainty_curve: ion numbers must be >= 1");
    double nn = static_cast<double>(n);
    double ent = cramer_rao(qfi_closed_form(n, t, gamma0), k_runs);
    double sql = std::exp(gamma0 * t) / (std::sqrt(k_runs * nn) * t);
    double hl = 1.0 / (std::sqrt(k_runs) * nn * t);
    curve.n_ions.push_back(n);
    curve.entangled.push_back(ent);
    curve.sql.push_back(sql);
    curve.hl.push_back(hl);
    curve.fractional.push_back(omega0 > 0.0 ? ent / omega0 : 0.0);
  }
  return curve;
}

MonteCarloResult monte_carlo_estimate(const MonteCarloConfig& c, int k,
                                      std::uint64_t seed) {
  protocol::validate(c.protocol);
  if (k < 2) throw ConfigError("monte_carlo: need k >= 2 runs");
  if (c.shots < 1) throw ConfigError("monte_carlo: shots must be >= 1");
  if (!(c.gamma >= 0.0) || !std::isfinite(c.gamma))
    throw ConfigError("monte_carlo: gamma must be finite and >= 0");
  if (!std::isfinite(c.omega0))
    throw ConfigError("monte_carlo: omega0 must be finite");
  if (!(c.protocol.t_free > 0.0))
    throw ConfigError("monte_carlo: interrogation time must be > 0");

  SpinBasis basis{c.protocol.n_ions};
  const int dim = basis.dim();
  const double t = c.protocol.t_free;

  protocol::SplitResult split = protocol::beam_split(c.protocol);
  protocol::RecombinerFunctional fn =
      protocol::recombiner_functional(c.protocol);

  // Decay factors are phase-independent; fold them into the split density
  // matrix once, leaving only the unitary phase per evaluation.
  Eigen::MatrixXcd rho0 = split.state.amp * split.state.amp.adjoint();
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double dm = basis.m_of(i) - basis.m_of(j);
      rho0(i, j) *= std::exp(-c.gamma * dm * dm * t);
    }
  }

  // p±(phi) = <w±| rho(phi) |w±> with rho(phi)_{mm'} = rho0 e^{-i(m-m')phi};
  // phi is the accumulated single-ion phase omega * t (+ trim).
  auto p_of = [&](double phi) {
    cplx acc_p = 0, acc_m = 0;
    for (int i = 0; i < dim; ++i) {
      cplx row_p = std::conj(fn.w_plus.amp[i]);
      cplx row_m = std::conj(fn.w_minus.amp[i]);
      for (int j = 0; j < dim; ++j) {
        cplx ph = std::polar(1.0, -(basis.m_of(i) - basis.m_of(j)) * phi);
        cplx r = rho0(i, j) * ph;
        acc_p += row_p * r * fn.w_plus.amp[j];
        acc_m += row_m * r * fn.w_minus.amp[j];
      }
    }
    return std::array<double, 2>{std::max(0.0, acc_p.real()),
                                 std::max(0.0, acc_m.real())};
  };
  auto slope_at = [&](double phi) {
    double h = 1e-6;
    return (p_of(phi + h)[0] - p_of(phi - h)[0]) / (2.0 * h);
  };

  MonteCarloResult out;
  out.n_runs = k;
  out.crb = cramer_rao(qfi(basis, c.omega0, t, c.gamma),
                       static_cast<double>(c.shots));

  // Calibration: trim the interferometer phase so the operating point sits
  // where the fringe is steepest.
  const double two_pi = 2.0 * M_PI;
  double phi0 = c.omega0 * t;
  double trim = 0.0, best_slope = -1.0;
  for (int s = 0; s < 256; ++s) {
    double cand = two_pi * s / 256.0;
    double sl = std::abs(slope_at(phi0 + cand));
    if (sl > best_slope) {
      best_slope = sl;
      trim = cand;
    }
  }
  out.slope = best_slope;
  // an ideal fringe has slope N/2 at mid-fringe; far below that means the
  // coherence is gone and no estimate is recoverable
  if (best_slope < 1e-6 * c.protocol.n_ions) {
    out.degenerate = true;
    out.delta_omega = std::numeric_limits<double>::quiet_NaN();
    out.mean_omega = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  // Invert on the monotone branch around the operating point. Half the
  // fringe period is pi/N in single-ion phase; stay inside one slope sign.
  double bracket = 0.9 * M_PI / (2.0 * c.protocol.n_ions);
  auto monotone = [&](double b) {
    double prev = p_of(phi0 + trim - b)[0];
    int dir = 0;
    for (int s = 1; s <= 32; ++s) {
      double cur = p_of(phi0 + trim - b + 2.0 * b * s / 32.0)[0];
      int d = cur > prev ? 1 : (cur < prev ? -1 : 0);
      if (d != 0 && dir != 0 && d != dir) return false;
      if (d != 0) dir = d;
      prev = cur;
    }
    return dir != 0;
  };
  if (!monotone(bracket)) {
    bracket *= 0.5;
    if (!monotone(bracket)) {
      out.degenerate = true;
      out.delta_omega = std::numeric_limits<double>::quiet_NaN();
      out.mean_omega = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
  }

  double phi_op = phi0 + trim;
  std::array<double, 2> pp = p_of(phi_op);
  double p_lo = p_of(phi_op - bracket)[0];
  double p_hi = p_of(phi_op + bracket)[0];

  std::vector<double> estimates(k);
  for (int r = 0; r < k; ++r) {
    protocol::Counts counts = protocol::sample_measurements(
        pp[0], pp[1], c.shots, protocol::mix_seed(seed, r));
    double target = static_cast<double>(counts.n_plus) / c.shots;

    double lo = phi_op - bracket, hi = phi_op + bracket;
    double f_lo = p_lo - target, f_hi = p_hi - target;
    double phi_hat;
    if (f_lo == 0.0) {
      phi_hat = lo;
    } else if (f_hi == 0.0) {
      phi_hat = hi;
    } else if (f_lo * f_hi > 0.0) {
      phi_hat = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
      ++out.n_clipped;
    } else {
      for (int it = 0; it < 64; ++it) {
        double mid = 0.5 * (lo + hi);
        double f_mid = p_of(mid)[0] - target;
        if (f_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      phi_hat = 0.5 * (lo + hi);
    }
    estimates[r] = (phi_hat - trim) / t;
  }

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= k;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (k - 1);

  out.mean_omega = mean;
  out.delta_omega = std::sqrt(var);
  return out;
}

}  // namespace spinmz::metrology
