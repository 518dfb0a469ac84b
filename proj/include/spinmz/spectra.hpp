#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "spinmz/collective_spin.hpp"
#include "spinmz/model.hpp"

namespace spinmz::spectra {

// Lowest k eigenpairs, energies ascending. Eigenvectors are real (the
// Hamiltonian is real symmetric), columns of `vectors`, sign-fixed so the
// largest-m entry above noise is positive.
struct EigenSystem {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;  // dim x k
};

// Full solve of a real symmetric tridiagonal operator, truncated to the
// k lowest pairs. Structure-exploiting (tridiagonal QR), never densifies.
EigenSystem eigensystem(const TridiagonalOperator& h, int k);

Eigen::VectorXd eigenvalues_only(const TridiagonalOperator& h);

// Same solve for a raw (diag, off) pair with no spin basis attached; also
// serves the boson-ladder sectors, which are tridiagonal in the Fock basis.
EigenSystem tridiagonal_eigensystem(const Eigen::VectorXd& diag,
                                    const Eigen::VectorXd& off, int k);

// At delta = 0 the Hamiltonian commutes with the amplitude reflection
// c_m -> c_{-m}; folding onto the even/odd sectors halves the dimension
// and keeps exact parity labels through quasi-degeneracies.
enum class Parity : std::int8_t { even = +1, odd = -1 };

struct FoldedTridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
};

// Requires reflection-symmetric h (delta = 0); throws otherwise.
FoldedTridiagonal parity_fold(const TridiagonalOperator& h, Parity sector);

// Lifts a folded-sector vector back to the full basis.
Eigen::VectorXd parity_unfold(const SpinBasis& basis, Parity sector,
                              const Eigen::VectorXd& folded);

// Ground pair of the even/odd sectors at delta = 0: energies and the
// unfolded eigenvectors. Used for splitter diagnostics and stable gap
// evaluation deep in the quasi-degenerate regime.
struct ParityGroundPair {
  double e_even = 0.0;
  double e_odd = 0.0;
  Eigen::VectorXd v_even;
  Eigen::VectorXd v_odd;
};

ParityGroundPair parity_ground_pair(const TridiagonalOperator& h);

// gap(Bx) sweep of the two lowest levels at fixed delta, lambda.
struct SpectrumSweep {
  int n_ions = 0;
  double delta = 0.0;
  double lambda = 0.0;
  std::vector<double> bx;
  std::vector<double> e0;
  std::vector<double> e1;
  std::vector<double> gap;
  // +1 when the ground level is the even-sector one, -1 odd, 0 when delta
  // breaks parity and no label applies.
  std::vector<std::int8_t> ground_parity;
};

// Grid points are independent; evaluated by `threads` workers with the
// output order fixed by the grid regardless of scheduling.
SpectrumSweep spectrum_sweep(const SpinBasis& basis, double delta,
                             double lambda, const std::vector<double>& bx_grid,
                             int threads);

// Largest grid Bx whose gap is below eps; 0 when the gap never dips.
double degeneracy_threshold(const SpectrumSweep& sweep, double eps);

// Columns bx,e0,e1,gap in rad/s; '#' comment header carries the snapshot.
void write_sweep_csv(const SpectrumSweep& sweep, std::ostream& out);

}  // namespace spinmz::spectra
