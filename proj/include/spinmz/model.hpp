#pragma once

#include <string>
#include <vector>

#include "spinmz/collective_spin.hpp"

namespace spinmz::model {

// Effective giant-spin Hamiltonian H = delta*Jz - bx*Jx - lambda*Jz^2.
// All three coefficients are angular frequencies (rad/s).
struct HamiltonianParams {
  double delta = 0.0;
  double bx = 0.0;
  double lambda = 0.0;
};

TridiagonalOperator build_hamiltonian(const SpinBasis& basis,
                                      const HamiltonianParams& p);

// Lab-frame inputs the effective coefficients derive from.
struct PhysicalParams {
  double nu = 0.0;            // trap frequency (rad/s)
  double omega_z = 0.0;       // Raman Rabi frequency (rad/s)
  double eta_z = 0.0;         // Lamb-Dicke parameter (dimensionless)
  double big_delta = 0.0;     // beat-note minus trap detuning (rad/s)
  double gamma0_prime = 0.0;  // scattering-path rate (1/s)
  double delta_prime = 0.0;   // scattering-path detuning (rad/s)
  int n_ions = 0;
};

// lambda = 8 Omega_z^2 eta_z^2 / (N Delta), the published strength of the
// Jz^2 term. The companion boson-ladder validation measures the prefactor
// independently and reports the ratio; nothing is renormalized here.
double lambda_from_physical(double omega_z, double eta_z, double big_delta,
                            int n_ions);

// gamma0 = gamma0' Omega_z^2 / Delta'^2, single-ion effective dephasing rate.
double gamma0_from_physical(double gamma0_prime, double omega_z,
                            double delta_prime);

// Non-fatal regime advisories (|Delta| not << nu, Delta' not >> gamma0').
std::vector<std::string> advisory_checks(const PhysicalParams& p);

}  // namespace spinmz::model
