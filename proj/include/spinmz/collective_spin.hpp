#pragma once

#include <complex>

#include <Eigen/Dense>

namespace spinmz {

using cplx = std::complex<double>;

// Symmetric (maximal j = N/2) sector of N spin-1/2 ions. Basis index
// i = 0..N maps to the Jz eigenvalue m = N/2 - i, so index 0 is the fully
// stretched m = +N/2 state and index N is m = -N/2. Half-integer m values
// are exact in double precision.
struct SpinBasis {
  int n_ions;

  explicit SpinBasis(int n);

  int dim() const { return n_ions + 1; }
  double j() const { return 0.5 * n_ions; }
  int twice_j() const { return n_ions; }
  double m_of(int index) const { return 0.5 * (n_ions - 2 * index); }
  int twice_m_of(int index) const { return n_ions - 2 * index; }
  int index_of_twice_m(int twice_m) const;

  bool operator==(const SpinBasis& o) const { return n_ions == o.n_ions; }
};

// Normalized ket in the Dicke basis of `basis`.
struct StateVector {
  SpinBasis basis;
  Eigen::VectorXcd amp;

  explicit StateVector(const SpinBasis& b)
      : basis(b), amp(Eigen::VectorXcd::Zero(b.dim())) {}

  double norm() const { return amp.norm(); }
  void renormalize();
};

// Real symmetric tridiagonal operator in the Dicke basis: diag has dim
// entries, off has dim-1 entries and couples index i with i+1.
struct TridiagonalOperator {
  SpinBasis basis;
  Eigen::VectorXd diag;
  Eigen::VectorXd off;

  explicit TridiagonalOperator(const SpinBasis& b)
      : basis(b),
        diag(Eigen::VectorXd::Zero(b.dim())),
        off(Eigen::VectorXd::Zero(b.dim() > 1 ? b.dim() - 1 : 0)) {}

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  Eigen::MatrixXd dense() const;
};

TridiagonalOperator op_jz(const SpinBasis& basis);
TridiagonalOperator op_jz2(const SpinBasis& basis);
TridiagonalOperator op_jx(const SpinBasis& basis);

// Extremal Jx eigenstate: orientation +1 gives the +N/2 eigenvector of Jx
// (binomial amplitudes, all positive), -1 the -N/2 one (alternating signs).
// Physically prepared from the all-down state by a resonant pi/2 pulse.
StateVector spin_coherent_x(const SpinBasis& basis, int orientation);

// (|m=+N/2> + e^{i rel_phase} |m=-N/2>)/sqrt(2)
StateVector cat_state(const SpinBasis& basis, double rel_phase);

StateVector basis_state(const SpinBasis& basis, int index);

cplx overlap(const StateVector& a, const StateVector& b);  // <a|b>
double expectation(const TridiagonalOperator& op, const StateVector& s);

}  // namespace spinmz
