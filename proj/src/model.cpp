#include "spinmz/model.hpp"

#include <cmath>

#include "spinmz/errors.hpp"

namespace spinmz::model {

TridiagonalOperator build_hamiltonian(const SpinBasis& basis,
                                      const HamiltonianParams& p) {
  if (!std::isfinite(p.delta) || !std::isfinite(p.bx) || !std::isfinite(p.lambda))
    throw ConfigError("hamiltonian coefficients must be finite");
  TridiagonalOperator h(basis);
  for (int i = 0; i < basis.dim(); ++i) {
    double m = basis.m_of(i);
    h.diag[i] = p.delta * m - p.lambda * m * m;
  }
  TridiagonalOperator jx = op_jx(basis);
  h.off = -p.bx * jx.off;
  return h;
}

double lambda_from_physical(double omega_z, double eta_z, double big_delta,
                            int n_ions) {
  if (n_ions < 1) throw ConfigError("ion count must be >= 1");
  if (big_delta == 0.0) throw ConfigError("beat-note detuning must be nonzero");
  return 8.0 * omega_z * omega_z * eta_z * eta_z / (n_ions * big_delta);
}

double gamma0_from_physical(double gamma0_prime, double omega_z,
                            double delta_prime) {
  if (delta_prime == 0.0) throw ConfigError("scattering detuning must be nonzero");
  double r = omega_z / delta_prime;
  return gamma0_prime * r * r;
}

std::vector<std::string> advisory_checks(const PhysicalParams& p) {
  std::vector<std::string> notes;
  if (p.nu > 0.0 && std::abs(p.big_delta) > 0.1 * p.nu)
    notes.push_back("detuning is not small against the trap frequency "
                    "(|Delta|/nu > 0.1); the dispersive expansion degrades");
  if (p.delta_prime != 0.0 && p.gamma0_prime > 0.0 &&
      std::abs(p.delta_prime) < 10.0 * p.gamma0_prime)
    notes.push_back("scattering detuning is not large against gamma0' "
                    "(|Delta'| < 10 gamma0'); the adiabatic-elimination rate "
                    "formula degrades");
  return notes;
}

}  // namespace spinmz::model
