#include "spinmz/circuit_readout.hpp"

#include <bit>
#include <cmath>

#include "spinmz/dynamics.hpp"
#include "spinmz/errors.hpp"

namespace spinmz::circuit {

namespace {

constexpr double sqrt_half = 0.70710678118654752440;

void check_qubit(const FullRegisterState& s, int qubit) {
  if (qubit < 1 || qubit > s.n_qubits)
    throw ConfigError("qubit index " + std::to_string(qubit) +
                      " outside 1.." + std::to_string(s.n_qubits));
}

// qubit q occupies bit position n - q (qubit 1 = most significant)
unsigned bit_of(const FullRegisterState& s, int qubit) {
  return 1u << (s.n_qubits - qubit);
}

}  // namespace

FullRegisterState embed_dicke(const StateVector& s) {
  const int n = s.basis.n_ions;
  if (n > max_register_qubits)
    throw ConfigError("register readout supports at most " +
                      std::to_string(max_register_qubits) + " ions, got " +
                      std::to_string(n));
  const unsigned size = 1u << n;

  // 1/sqrt(C(n, w)) per up-spin count w
  std::vector<double> weight(n + 1);
  double log_fact_n = std::lgamma(n + 1.0);
  for (int w = 0; w <= n; ++w) {
    double log_c = log_fact_n - std::lgamma(w + 1.0) - std::lgamma(n - w + 1.0);
    weight[w] = std::exp(-0.5 * log_c);
  }

  FullRegisterState full{n, Eigen::VectorXcd(size)};
  for (unsigned b = 0; b < size; ++b) {
    int w = std::popcount(b);
    full.amp[b] = s.amp[n - w] * weight[w];  // index i = n - (up-spin count)
  }
  return full;
}

FullRegisterState apply_cnot_fanout(const FullRegisterState& s, int control) {
  check_qubit(s, control);
  const unsigned size = 1u << s.n_qubits;
  const unsigned cbit = bit_of(s, control);
  const unsigned rest = (size - 1) ^ cbit;
  FullRegisterState out{s.n_qubits, Eigen::VectorXcd(size)};
  for (unsigned b = 0; b < size; ++b)
    out.amp[(b & cbit) ? (b ^ rest) : b] = s.amp[b];
  return out;
}

FullRegisterState apply_hadamard(const FullRegisterState& s, int qubit) {
  check_qubit(s, qubit);
  const unsigned size = 1u << s.n_qubits;
  const unsigned qbit = bit_of(s, qubit);
  FullRegisterState out{s.n_qubits, Eigen::VectorXcd(size)};
  for (unsigned b = 0; b < size; ++b) {
    if (b & qbit) continue;
    cplx down = s.amp[b], up = s.amp[b | qbit];
    out.amp[b] = sqrt_half * (down + up);
    out.amp[b | qbit] = sqrt_half * (down - up);
  }
  return out;
}

std::array<double, 2> qubit_marginal(const FullRegisterState& s, int qubit) {
  check_qubit(s, qubit);
  const unsigned size = 1u << s.n_qubits;
  const unsigned qbit = bit_of(s, qubit);
  std::array<double, 2> p{0.0, 0.0};
  for (unsigned b = 0; b < size; ++b) p[(b & qbit) ? 1 : 0] += std::norm(s.amp[b]);
  return p;
}

ReadoutProbabilities readout_sequence(const StateVector& psi_p_prime) {
  FullRegisterState reg = embed_dicke(psi_p_prime);
  reg = apply_cnot_fanout(reg, 1);
  reg = apply_hadamard(reg, 1);
  auto p = qubit_marginal(reg, 1);
  return {p[0], p[1]};
}

ReadoutProbabilities readout_sequence(const StateVector& psi_p, double omega0,
                                      double t) {
  StateVector s = psi_p;
  dynamics::free_evolve(s, omega0, t);
  return readout_sequence(s);
}

}  // namespace spinmz::circuit
