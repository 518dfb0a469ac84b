#include "spinmz/collective_spin.hpp"

#include <cmath>

#include "spinmz/errors.hpp"

namespace spinmz {

SpinBasis::SpinBasis(int n) : n_ions(n) {
  if (n < 1) throw ConfigError("ion count must be >= 1, got " + std::to_string(n));
}

int SpinBasis::index_of_twice_m(int twice_m) const {
  int i = (n_ions - twice_m) / 2;
  if ((n_ions - twice_m) % 2 != 0 || i < 0 || i >= dim())
    throw Error("2m = " + std::to_string(twice_m) + " not in basis for N = " +
                std::to_string(n_ions));
  return i;
}

void StateVector::renormalize() {
  double n = amp.norm();
  if (n <= 0.0) throw Error("cannot normalize a zero state");
  amp /= n;
}

Eigen::VectorXcd TridiagonalOperator::apply(const Eigen::VectorXcd& v) const {
  const int n = basis.dim();
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    cplx acc = diag[i] * v[i];
    if (i > 0) acc += off[i - 1] * v[i - 1];
    if (i + 1 < n) acc += off[i] * v[i + 1];
    out[i] = acc;
  }
  return out;
}

Eigen::MatrixXd TridiagonalOperator::dense() const {
  const int n = basis.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    if (i + 1 < n) {
      m(i, i + 1) = off[i];
      m(i + 1, i) = off[i];
    }
  }
  return m;
}

TridiagonalOperator op_jz(const SpinBasis& basis) {
  TridiagonalOperator op(basis);
  for (int i = 0; i < basis.dim(); ++i) op.diag[i] = basis.m_of(i);
  return op;
}

TridiagonalOperator op_jz2(const SpinBasis& basis) {
  TridiagonalOperator op(basis);
  for (int i = 0; i < basis.dim(); ++i) {
    double m = basis.m_of(i);
    op.diag[i] = m * m;
  }
  return op;
}

TridiagonalOperator op_jx(const SpinBasis& basis) {
  // <m+1| Jx |m> = sqrt(j(j+1) - m(m+1)) / 2; entry off[i] couples
  // m_i = j-i with m_i - 1, i.e. uses m = m_i - 1 in the formula above.
  TridiagonalOperator op(basis);
  const double j = basis.j();
  for (int i = 0; i + 1 < basis.dim(); ++i) {
    double m = basis.m_of(i + 1);
    op.off[i] = 0.5 * std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return op;
}

StateVector spin_coherent_x(const SpinBasis& basis, int orientation) {
  if (orientation != 1 && orientation != -1)
    throw ConfigError("spin_coherent_x orientation must be +1 or -1");
  const int n = basis.n_ions;
  StateVector s(basis);
  for (int i = 0; i <= n; ++i) {
    double lg = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
    double a = std::exp(0.5 * lg - 0.5 * n * std::log(2.0));
    if (orientation < 0 && (i % 2)) a = -a;
    s.amp[i] = a;
  }
  return s;
}

StateVector cat_state(const SpinBasis& basis, double rel_phase) {
  StateVector s(basis);
  s.amp[0] = 1.0 / std::sqrt(2.0);
  s.amp[basis.dim() - 1] = std::polar(1.0 / std::sqrt(2.0), rel_phase);
  return s;
}

StateVector basis_state(const SpinBasis& basis, int index) {
  if (index < 0 || index >= basis.dim())
    throw Error("basis index out of range: " + std::to_string(index));
  StateVector s(basis);
  s.amp[index] = 1.0;
  return s;
}

cplx overlap(const StateVector& a, const StateVector& b) {
  if (!(a.basis == b.basis)) throw Error("overlap of states in different bases");
  return a.amp.dot(b.amp);  // Eigen conjugates the left factor
}

double expectation(const TridiagonalOperator& op, const StateVector& s) {
  if (!(op.basis == s.basis)) throw Error("operator/state basis mismatch");
  return s.amp.dot(op.apply(s.amp)).real();
}

}  // namespace spinmz
