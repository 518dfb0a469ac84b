#include "tridiag_solve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace spinmz::detail {

namespace {

// Cyclic Jacobi with accumulated rotations. Quadratic cost is irrelevant at
// these dimensions and only the stalled instances ever reach it.
void jacobi_fallback(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                     bool want_vectors, Eigen::VectorXd& evals,
                     Eigen::MatrixXd& evecs) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.diagonal() = diag;
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = off[i];
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  const double scale = a.cwiseAbs().maxCoeff() + 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off_norm = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off_norm += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off_norm) <= 1e-15 * scale) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * scale) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int i = 0; i < n; ++i) {
          double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a(x, x) < a(y, y); });
  evals.resize(n);
  if (want_vectors) evecs.resize(n, n);
  for (int k = 0; k < n; ++k) {
    evals[k] = a(order[k], order[k]);
    if (want_vectors) evecs.col(k) = v.col(order[k]);
  }
}

}  // namespace

bool tridiagonal_eigen(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                       Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& workspace,
                       bool want_vectors, Eigen::VectorXd& evals,
                       Eigen::MatrixXd& evecs) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return false;
  if (n == 1) {
    evals = diag;
    if (want_vectors) evecs = Eigen::MatrixXd::Ones(1, 1);
    return true;
  }
  workspace.computeFromTridiagonal(
      diag, off,
      want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (workspace.info() == Eigen::Success) {
    evals = workspace.eigenvalues();
    if (want_vectors) evecs = workspace.eigenvectors();
    return true;
  }
  jacobi_fallback(diag, off, want_vectors, evals, evecs);
  return true;
}

}  // namespace spinmz::detail
