#pragma once

#include "spinmz/collective_spin.hpp"

namespace spinmz::lindblad {

struct DensityMatrix {
  SpinBasis basis;
  Eigen::MatrixXcd rho;

  explicit DensityMatrix(const SpinBasis& b)
      : basis(b), rho(Eigen::MatrixXcd::Zero(b.dim(), b.dim())) {}

  double trace_real() const { return rho.trace().real(); }
  double purity() const { return (rho * rho).trace().real(); }
  void hermitize() { rho = 0.5 * (rho + rho.adjoint()).eval(); }
};

// Correlated dephasing along Jz. gamma is the single-ion effective rate:
// a GHZ coherence then decays as exp(-gamma N^2 t). The collective_rate
// switch reads the same gamma as already collective (effective rate
// N^2 gamma), the alternative interpretation kept for sensitivity studies.
struct DephasingParams {
  double omega0 = 0.0;  // rad/s
  double gamma = 0.0;   // 1/s, >= 0
  bool collective_rate = false;
};

double effective_rate(const DephasingParams& p, const SpinBasis& basis);

DensityMatrix from_pure(const StateVector& s);
DensityMatrix ghz_initial(const SpinBasis& basis);  // |cat(0)><cat(0)|

// Closed-form solution in the Jz eigenbasis: entry (m, m') picks up
// exp(-i omega0 (m-m') t) * exp(-gamma_eff (m-m')^2 t); diagonal untouched.
DensityMatrix dephase_analytic(const DensityMatrix& rho0,
                               const DephasingParams& p, double t);

// Fixed-step RK4 on rho' = -i omega0 [Jz, rho] + gamma_eff (2 Jz rho Jz
// - Jz^2 rho - rho Jz^2), evaluated with matrix products so it stays an
// independent route from the closed form. Re-hermitized every step.
DensityMatrix dephase_numeric(const DensityMatrix& rho0,
                              const DephasingParams& p, double t, double dt);

// |<+N/2| rho |-N/2>|, the cat coherence.
double coherence_magnitude(const DensityMatrix& rho);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double min_eigenvalue(const DensityMatrix& rho);

}  // namespace spinmz::lindblad
