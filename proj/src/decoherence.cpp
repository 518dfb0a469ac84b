#include "spinmz/decoherence.hpp"

#include <cmath>
#include <complex>

#include "spinmz/errors.hpp"

namespace spinmz::lindblad {

namespace {

void check_params(const DephasingParams& p) {
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma))
    throw ValidationError("dephasing rate must be finite and >= 0");
  if (!std::isfinite(p.omega0))
    throw ValidationError("omega0 must be finite");
}

void check_state(const DensityMatrix& dm, const char* who) {
  const auto& r = dm.rho;
  if (r.rows() != dm.basis.dim() || r.cols() != dm.basis.dim())
    throw ValidationError(std::string(who) + ": matrix size does not match basis");
  if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError(std::string(who) + ": density matrix is not Hermitian");
  if (std::abs(r.trace().real() - 1.0) > 1e-10 || std::abs(r.trace().imag()) > 1e-10)
    throw ValidationError(std::string(who) + ": density matrix trace is not 1");
}

}  // namespace

double effective_rate(const DephasingParams& p, const SpinBasis& basis) {
  double n = static_cast<double>(basis.n_ions);
  return p.collective_rate ? p.gamma * n * n : p.gamma;
}

DensityMatrix from_pure(const StateVector& s) {
  DensityMatrix dm(s.basis);
  dm.rho = s.amp * s.amp.adjoint();
  return dm;
}

DensityMatrix ghz_initial(const SpinBasis& basis) {
  return from_pure(cat_state(basis, 0.0));
}

DensityMatrix dephase_analytic(const DensityMatrix& rho0,
                               const DephasingParams& p, double t) {
  check_params(p);
  check_state(rho0, "dephase_analytic");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw ValidationError("evolution time must be finite and >= 0");

  const SpinBasis& basis = rho0.basis;
  double g = effective_rate(p, basis);
  DensityMatrix out(basis);
  for (int i = 0; i < basis.dim(); ++i) {
    for (int j = 0; j < basis.dim(); ++j) {
      double dm = basis.m_of(i) - basis.m_of(j);
      cplx factor = std::exp(cplx(-g * dm * dm * t, -p.omega0 * dm * t));
      out.rho(i, j) = rho0.rho(i, j) * factor;
    }
  }
  return out;
}

DensityMatrix dephase_numeric(const DensityMatrix& rho0,
                              const DephasingParams& p, double t, double dt) {
  check_params(p);
  check_state(rho0, "dephase_numeric");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw ValidationError("evolution time must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ValidationError("step size must be finite and > 0");

  const SpinBasis& basis = rho0.basis;
  int dim = basis.dim();
  double g = effective_rate(p, basis);
  double n = static_cast<double>(basis.n_ions);

  // Fastest mode of the generator: |s| = gamma_eff dm^2 + |omega0| dm at
  // dm = N. Keep dt |s| inside the RK4 stability region with margin.
  double rate_scale = g * n * n + std::abs(p.omega0) * n;
  if (dt * rate_scale > 2.0)
    throw NumericsError("dephasing step size too large for the RK4 stencil");

  Eigen::VectorXd m(dim);
  for (int i = 0; i < dim; ++i) m[i] = basis.m_of(i);
  Eigen::VectorXd m2 = m.cwiseProduct(m);

  auto rhs = [&](const Eigen::MatrixXcd& r) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd jr = m.asDiagonal() * r;
    Eigen::MatrixXcd rj = r * m.asDiagonal();
    Eigen::MatrixXcd deriv = cplx(0.0, -p.omega0) * (jr - rj);
    if (g != 0.0) {
      deriv += g * (2.0 * (jr * m.asDiagonal()) - m2.asDiagonal() * r -
                    r * m2.asDiagonal());
    }
    return deriv;
  };

  DensityMatrix out(basis);
  out.rho = rho0.rho;
  if (t == 0.0) return out;

  long steps = std::max(1L, static_cast<long>(std::ceil(t / dt)));
  double h = t / static_cast<double>(steps);

  Eigen::MatrixXcd k1, k2, k3, k4;
  for (long s = 0; s < steps; ++s) {
    k1 = rhs(out.rho);
    k2 = rhs(out.rho + 0.5 * h * k1);
    k3 = rhs(out.rho + 0.5 * h * k2);
    k4 = rhs(out.rho + h * k3);
    out.rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.hermitize();
  }

  double drift = std::abs(out.rho.trace().real() - rho0.trace_real()) +
                 std::abs(out.rho.trace().imag());
  if (drift > 1e-10)
    throw NumericsError("dephasing integration lost trace beyond 1e-10");
  return out;
}

double coherence_magnitude(const DensityMatrix& rho) {
  return std::abs(rho.rho(0, rho.basis.dim() - 1));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.basis.n_ions != b.basis.n_ions)
    throw ValidationError("trace_distance: basis mismatch");
  Eigen::MatrixXcd d = a.rho - b.rho;
  d = 0.5 * (d + d.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericsError("trace_distance eigensolve failed");
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::MatrixXcd h = 0.5 * (rho.rho + rho.rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericsError("density matrix eigensolve failed");
  return es.eigenvalues().minCoeff();
}

}  // namespace spinmz::lindblad
