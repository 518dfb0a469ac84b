#include "spinmz/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "spinmz/errors.hpp"
#include "spinmz/parallel.hpp"
#include "spinmz/units.hpp"
#include "tridiag_solve.hpp"

namespace spinmz::spectra {

namespace {

constexpr double sqrt_half = 0.70710678118654752440;

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  // Canonical phase: the largest-m (lowest-index) entry above noise is
  // positive. Parity-odd vectors have exact zeros; 1e-8 clears roundoff
  // on normalized vectors without skipping genuine structure.
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-8) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

}  // namespace

EigenSystem tridiagonal_eigensystem(const Eigen::VectorXd& diag,
                                    const Eigen::VectorXd& off, int k) {
  const int dim = static_cast<int>(diag.size());
  if (k < 1 || k > dim)
    throw ConfigError("requested " + std::to_string(k) + " eigenpairs of a dim-" +
                      std::to_string(dim) + " operator");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ws;
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  detail::tridiagonal_eigen(diag, off, ws, true, evals, evecs);
  EigenSystem sys;
  sys.energies = evals.head(k);
  sys.vectors = evecs.leftCols(k);
  for (int c = 0; c < k; ++c) fix_sign(sys.vectors.col(c));
  return sys;
}

EigenSystem eigensystem(const TridiagonalOperator& h, int k) {
  return tridiagonal_eigensystem(h.diag, h.off, k);
}

Eigen::VectorXd eigenvalues_only(const TridiagonalOperator& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ws;
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  detail::tridiagonal_eigen(h.diag, h.off, ws, false, evals, evecs);
  return evals;
}

FoldedTridiagonal parity_fold(const TridiagonalOperator& h, Parity sector) {
  const int dim = h.basis.dim();
  const int pairs = dim / 2;             // reflection pairs (i, dim-1-i)
  const bool has_middle = (dim % 2) == 1;  // m = 0 state, N even

  double scale = h.diag.cwiseAbs().maxCoeff() + h.off.cwiseAbs().maxCoeff() + 1.0;
  for (int i = 0; i < pairs; ++i)
    if (std::abs(h.diag[i] - h.diag[dim - 1 - i]) > 1e-12 * scale)
      throw NumericsError("parity fold requires a reflection-symmetric operator (delta = 0)");

  FoldedTridiagonal f;
  if (sector == Parity::even) {
    const int n = pairs + (has_middle ? 1 : 0);
    f.diag.resize(n);
    f.off.resize(n - 1);
    for (int i = 0; i < pairs; ++i) f.diag[i] = h.diag[i];
    for (int i = 0; i + 1 < pairs; ++i) f.off[i] = h.off[i];
    if (has_middle) {
      f.diag[pairs] = h.diag[pairs];
      f.off[pairs - 1] = std::sqrt(2.0) * h.off[pairs - 1];
    } else {
      // adjacent partners at the fold edge contribute their coupling
      f.diag[pairs - 1] += h.off[pairs - 1];
    }
  } else {
    f.diag.resize(pairs);
    f.off.resize(pairs - 1);
    for (int i = 0; i < pairs; ++i) f.diag[i] = h.diag[i];
    for (int i = 0; i + 1 < pairs; ++i) f.off[i] = h.off[i];
    if (!has_middle) f.diag[pairs - 1] -= h.off[pairs - 1];
  }
  return f;
}

Eigen::VectorXd parity_unfold(const SpinBasis& basis, Parity sector,
                              const Eigen::VectorXd& folded) {
  const int dim = basis.dim();
  const int pairs = dim / 2;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < pairs; ++i) {
    full[i] = sqrt_half * folded[i];
    full[dim - 1 - i] = (sector == Parity::even ? 1.0 : -1.0) * sqrt_half * folded[i];
  }
  if ((dim % 2) == 1 && sector == Parity::even) full[pairs] = folded[pairs];
  return full;
}

ParityGroundPair parity_ground_pair(const TridiagonalOperator& h) {
  ParityGroundPair out;
  for (Parity p : {Parity::even, Parity::odd}) {
    FoldedTridiagonal f = parity_fold(h, p);
    EigenSystem sys = tridiagonal_eigensystem(f.diag, f.off, 1);
    Eigen::VectorXd v = parity_unfold(h.basis, p, sys.vectors.col(0));
    fix_sign(v);
    if (p == Parity::even) {
      out.e_even = sys.energies[0];
      out.v_even = std::move(v);
    } else {
      out.e_odd = sys.energies[0];
      out.v_odd = std::move(v);
    }
  }
  return out;
}

SpectrumSweep spectrum_sweep(const SpinBasis& basis, double delta,
                             double lambda, const std::vector<double>& bx_grid,
                             int threads) {
  if (bx_grid.empty()) throw ConfigError("spectrum sweep needs a nonempty Bx grid");
  SpectrumSweep sweep;
  sweep.n_ions = basis.n_ions;
  sweep.delta = delta;
  sweep.lambda = lambda;
  sweep.bx = bx_grid;
  const std::size_t n = bx_grid.size();
  sweep.e0.resize(n);
  sweep.e1.resize(n);
  sweep.gap.resize(n);
  sweep.ground_parity.assign(n, 0);

  parallel_for(n, threads, [&](std::size_t i) {
    model::HamiltonianParams p{delta, bx_grid[i], lambda};
    TridiagonalOperator h = model::build_hamiltonian(basis, p);
    if (delta == 0.0 && basis.dim() > 1) {
      // Sector-split evaluation: exact degeneracy at Bx = 0 comes out as an
      // exact tie, and the even/odd labels survive arbitrarily small gaps.
      FoldedTridiagonal fe = parity_fold(h, Parity::even);
      FoldedTridiagonal fo = parity_fold(h, Parity::odd);
      double ee = tridiagonal_eigensystem(fe.diag, fe.off, 1).energies[0];
      double eo = fo.diag.size() > 0
                      ? tridiagonal_eigensystem(fo.diag, fo.off, 1).energies[0]
                      : std::numeric_limits<double>::infinity();
      sweep.e0[i] = std::min(ee, eo);
      sweep.e1[i] = std::max(ee, eo);
      sweep.ground_parity[i] = (ee <= eo) ? +1 : -1;
    } else {
      Eigen::VectorXd ev = eigenvalues_only(h);
      sweep.e0[i] = ev[0];
      sweep.e1[i] = ev.size() > 1 ? ev[1] : ev[0];
    }
    sweep.gap[i] = sweep.e1[i] - sweep.e0[i];
  });
  return sweep;
}

double degeneracy_threshold(const SpectrumSweep& sweep, double eps) {
  double best = 0.0;
  for (std::size_t i = 0; i < sweep.bx.size(); ++i)
    if (sweep.gap[i] < eps) best = std::max(best, sweep.bx[i]);
  return best;
}

void write_sweep_csv(const SpectrumSweep& sweep, std::ostream& out) {
  using units::format_double;
  out << "# two lowest levels of delta*Jz - bx*Jx - lambda*Jz^2, rad/s\n";
  out << "# n_ions=" << sweep.n_ions << " delta=" << format_double(sweep.delta)
      << " lambda=" << format_double(sweep.lambda) << "\n";
  out << "bx,e0,e1,gap\n";
  for (std::size_t i = 0; i < sweep.bx.size(); ++i) {
    out << format_double(sweep.bx[i]) << ',' << format_double(sweep.e0[i])
        << ',' << format_double(sweep.e1[i]) << ','
        << format_double(sweep.gap[i]) << "\n";
  }
}

}  // namespace spinmz::spectra
