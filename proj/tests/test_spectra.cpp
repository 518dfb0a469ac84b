#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spinmz/errors.hpp"
#include "spinmz/model.hpp"
#include "spinmz/spectra.hpp"
#include "support/dense_jacobi.hpp"

using namespace spinmz;
using spectra::Parity;

namespace {

TridiagonalOperator make_h(int n, double delta, double bx, double lambda) {
  return model::build_hamiltonian(SpinBasis(n), {delta, bx, lambda});
}

}  // namespace

TEST_CASE("tridiagonal solve matches the dense Jacobi oracle") {
  auto h = make_h(10, 0.37, 1.9, 0.83);
  auto sys = spectra::eigensystem(h, h.basis.dim());
  auto dense = oracle::jacobi_eigenvalues(h.dense());
  double scale = std::abs(dense.front()) + std::abs(dense.back());
  for (int i = 0; i < h.basis.dim(); ++i)
    CHECK(sys.energies[i] == doctest::Approx(dense[i]).epsilon(1e-10).scale(scale));
}

TEST_CASE("eigenpairs: residuals, orthonormality, ascending order") {
  auto h = make_h(12, -0.21, 3.4, 1.1);
  const int k = 5;
  auto sys = spectra::eigensystem(h, k);
  double hnorm = h.dense().cwiseAbs().rowwise().sum().maxCoeff();
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXcd v = sys.vectors.col(c).cast<cplx>();
    double res = (h.apply(v) - sys.energies[c] * v).norm();
    CHECK(res <= 1e-9 * hnorm);
  }
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      double want = a == b ? 1.0 : 0.0;
      CHECK(std::abs(sys.vectors.col(a).dot(sys.vectors.col(b)) - want) <= 1e-9);
    }
  for (int c = 0; c + 1 < k; ++c) CHECK(sys.energies[c] <= sys.energies[c + 1]);
}

TEST_CASE("exact pole degeneracy at bx=0, delta=0") {
  auto h = make_h(2, 0.0, 0.0, 1.0);
  auto sys = spectra::eigensystem(h, 3);
  CHECK(sys.energies[0] == -1.0);
  CHECK(sys.energies[1] == -1.0);
  CHECK(sys.energies[2] == 0.0);
  CHECK(sys.energies[1] - sys.energies[0] == 0.0);
  // degenerate pair reported in the pole basis, not rotated
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v = sys.vectors.col(c).cwiseAbs();
    CHECK(v.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.minCoeff() <= 1e-12);
  }
}

TEST_CASE("pole gap N*delta at delta=lambda/4") {
  auto h = make_h(10, 0.25, 0.0, 1.0);
  auto sys = spectra::eigensystem(h, 2);
  CHECK(sys.energies[1] - sys.energies[0] ==
        doctest::Approx(10 * 0.25).epsilon(1e-9));
}

TEST_CASE("strong-field limit: gap approaches bx") {
  double bx = 50.0 * 1.0 * 10;
  auto h = make_h(10, 0.0, bx, 1.0);
  auto ev = spectra::eigenvalues_only(h);
  CHECK(ev[1] - ev[0] == doctest::Approx(bx).epsilon(0.05));
  // first correction is -lambda (N-1)/2
  CHECK(ev[1] - ev[0] == doctest::Approx(bx - 4.5).epsilon(1e-4));
}

TEST_CASE("ground even, first excited odd at delta=0") {
  // Below the bifurcation bx ~ lambda*n the even/odd splitting collapses
  // exponentially, so only probe points with a resolvable gap.
  int resolved = 0;
  for (double bx : {2.0, 5.0, 8.0, 12.0, 20.0}) {
    for (int n : {7, 10}) {
      auto h = make_h(n, 0.0, bx, 1.0);
      auto sys = spectra::eigensystem(h, 2);
      if (sys.energies[1] - sys.energies[0] <= 1e-6) continue;
      ++resolved;
      const int dim = n + 1;
      for (int i = 0; i < dim; ++i) {
        CHECK(std::abs(sys.vectors(i, 0) - sys.vectors(dim - 1 - i, 0)) <= 1e-9);
        CHECK(std::abs(sys.vectors(i, 1) + sys.vectors(dim - 1 - i, 1)) <= 1e-9);
      }
    }
  }
  CHECK(resolved >= 5);
}

TEST_CASE("parity fold reproduces the projected dense blocks") {
  for (int n : {4, 5}) {
    auto h = make_h(n, 0.0, 1.3, 0.7);
    const int dim = n + 1;
    for (Parity p : {Parity::even, Parity::odd}) {
      auto f = spectra::parity_fold(h, p);
      const int fdim = static_cast<int>(f.diag.size());
      // rows of the fold map, checked via unfold of unit vectors
      Eigen::MatrixXd basis_rows(fdim, dim);
      for (int k = 0; k < fdim; ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(fdim);
        e[k] = 1.0;
        basis_rows.row(k) = spectra::parity_unfold(h.basis, p, e).transpose();
      }
      Eigen::MatrixXd projected = basis_rows * h.dense() * basis_rows.transpose();
      Eigen::MatrixXd folded = Eigen::MatrixXd::Zero(fdim, fdim);
      for (int i = 0; i < fdim; ++i) {
        folded(i, i) = f.diag[i];
        if (i + 1 < fdim) folded(i, i + 1) = folded(i + 1, i) = f.off[i];
      }
      CHECK((projected - folded).cwiseAbs().maxCoeff() <= 1e-12);
      // fold basis is orthonormal
      Eigen::MatrixXd gram = basis_rows * basis_rows.transpose();
      CHECK((gram - Eigen::MatrixXd::Identity(fdim, fdim)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  CHECK_THROWS_AS(spectra::parity_fold(make_h(4, 0.5, 1.0, 1.0), Parity::even),
                  NumericsError);
}

TEST_CASE("parity ground pair agrees with the generic two lowest") {
  auto h = make_h(8, 0.0, 6.0, 1.0);
  auto pair = spectra::parity_ground_pair(h);
  auto sys = spectra::eigensystem(h, 2);
  CHECK(pair.e_even == doctest::Approx(sys.energies[0]).epsilon(1e-12));
  CHECK(pair.e_odd == doctest::Approx(sys.energies[1]).epsilon(1e-12));
  CHECK(std::abs(pair.v_even.dot(sys.vectors.col(0))) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(pair.v_odd.dot(sys.vectors.col(1))) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sweep: gap column, parity labels, exact tie at bx=0") {
  SpinBasis b(10);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(i * 0.5);
  auto sweep = spectra::spectrum_sweep(b, 0.0, 1.0, grid, 2);
  REQUIRE(sweep.bx.size() == grid.size());
  CHECK(sweep.gap[0] == 0.0);
  CHECK(sweep.e0[0] == sweep.e1[0]);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(sweep.gap[i] == sweep.e1[i] - sweep.e0[i]);
    CHECK(sweep.gap[i] >= 0.0);
    if (grid[i] > 0) CHECK(sweep.ground_parity[i] == +1);
  }
}

TEST_CASE("sweep output is identical at every thread count") {
  SpinBasis b(9);
  std::vector<double> grid;
  for (int i = 0; i <= 25; ++i) grid.push_back(0.3 * i);
  auto s1 = spectra::spectrum_sweep(b, 0.1, 1.0, grid, 1);
  auto s4 = spectra::spectrum_sweep(b, 0.1, 1.0, grid, 4);
  auto s7 = spectra::spectrum_sweep(b, 0.1, 1.0, grid, 7);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(s1.e0[i] == s4.e0[i]);
    CHECK(s1.e1[i] == s4.e1[i]);
    CHECK(s1.e0[i] == s7.e0[i]);
    CHECK(s1.gap[i] == s7.gap[i]);
  }
}

TEST_CASE("degeneracy threshold picks the largest flat point") {
  spectra::SpectrumSweep s;
  s.bx = {0.0, 1.0, 2.0, 3.0, 4.0};
  s.gap = {0.0, 1e-9, 2e-7, 0.5, 1.2};
  CHECK(spectra::degeneracy_threshold(s, 1e-6) == 2.0);
  CHECK(spectra::degeneracy_threshold(s, 1e-12) == 0.0);
}

TEST_CASE("sweep csv has snapshot header and parseable rows") {
  SpinBasis b(2);
  auto sweep = spectra::spectrum_sweep(b, 0.0, 1.0, {0.0, 1.0, 2.0}, 1);
  std::ostringstream os;
  spectra::write_sweep_csv(sweep, os);
  std::string text = os.str();
  CHECK(text.find("# n_ions=2") != std::string::npos);
  CHECK(text.find("bx,e0,e1,gap\n") != std::string::npos);
  int rows = 0;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#' && line.find("bx,") != 0) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("invalid eigenpair requests are rejected") {
  auto h = make_h(4, 0.0, 1.0, 1.0);
  CHECK_THROWS_AS(spectra::eigensystem(h, 0), ConfigError);
  CHECK_THROWS_AS(spectra::eigensystem(h, 99), ConfigError);
  CHECK_THROWS_AS(
      spectra::spectrum_sweep(SpinBasis(4), 0.0, 1.0, {}, 1), ConfigError);
}
