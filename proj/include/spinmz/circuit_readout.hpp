#pragma once

#include <array>

#include "spinmz/collective_spin.hpp"

namespace spinmz::circuit {

// Computational-basis register for the individually-addressed readout.
// Qubit 1 is the most significant bit; a set bit means spin-up. Capped at
// 14 qubits (2^14 amplitudes) since this route only targets small N.
struct FullRegisterState {
  int n_qubits = 0;
  Eigen::VectorXcd amp;

  double norm() const { return amp.norm(); }
};

inline constexpr int max_register_qubits = 14;

// |j,m> -> normalized symmetric superposition of the C(N, j+m) bitstrings
// with j+m up-spins; linear extension over the Dicke amplitudes.
FullRegisterState embed_dicke(const StateVector& s);

// Flips every qubit except the control when the control is up.
FullRegisterState apply_cnot_fanout(const FullRegisterState& s, int control);

// H|down> = (|down>+|up>)/sqrt(2), H|up> = (|down>-|up>)/sqrt(2).
FullRegisterState apply_hadamard(const FullRegisterState& s, int qubit);

// {p_down, p_up} of the given qubit.
std::array<double, 2> qubit_marginal(const FullRegisterState& s, int qubit);

struct ReadoutProbabilities {
  double p_first_down = 0.0;  // carries the cos^2(N omega0 T / 2) branch
  double p_first_up = 0.0;
};

// CNOT fan-out from ion 1, Hadamard on ion 1, measure ion 1. Input is the
// post-free-evolution collective state.
ReadoutProbabilities readout_sequence(const StateVector& psi_p_prime);

// Convenience: free-evolves psi_p by omega0 * t first.
ReadoutProbabilities readout_sequence(const StateVector& psi_p, double omega0,
                                      double t);

}  // namespace spinmz::circuit
