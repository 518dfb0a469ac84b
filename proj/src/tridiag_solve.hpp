#pragma once

#include <Eigen/Dense>

namespace spinmz::detail {

// Symmetric tridiagonal eigensolve with a convergence guarantee. Eigen's
// implicit-shift QL handles almost every step, but stalls at its iteration
// cap on mirror-degenerate diagonals (exact -lambda m^2 pairs with small
// couplings, a few hundred times per million ramp steps). Those instances
// fall through to cyclic Jacobi, which converges unconditionally on
// symmetric input. Eigenvalues ascending; `evecs` is filled only when
// want_vectors is set. Returns false only for empty input.
bool tridiagonal_eigen(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                       Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& workspace,
                       bool want_vectors, Eigen::VectorXd& evals,
                       Eigen::MatrixXd& evecs);

}  // namespace spinmz::detail
