#include "spinmz/boson_validation.hpp"

#include <cmath>

#include "spinmz/errors.hpp"
#include "spinmz/parallel.hpp"
#include "spinmz/spectra.hpp"

namespace spinmz::boson {

void validate(const SpinBosonSystem& sys) {
  if (sys.n_max < 4)
    throw ConfigError("spin-boson: n_max must be >= 4 to resolve a displaced "
                      "oscillator");
  if (!(sys.big_delta > 0.0))
    throw ConfigError("spin-boson: big_delta must be > 0");
  if (sys.omega_z < 0.0 || sys.eta_z < 0.0)
    throw ConfigError("spin-boson: omega_z and eta_z must be >= 0");
  long composite =
      static_cast<long>(sys.basis.dim()) * (static_cast<long>(sys.n_max) + 1);
  if (composite > 20000)
    throw ConfigError("spin-boson: composite dimension " +
                      std::to_string(composite) +
                      " too large for dense per-sector diagonalization");
}

double sector_coupling(const SpinBosonSystem& sys, int index) {
  double m = sys.basis.m_of(index);
  return 2.0 * m * sys.omega_z * sys.eta_z /
         std::sqrt(static_cast<double>(sys.basis.n_ions));
}

std::vector<SectorMatrix> build_spin_boson(const SpinBosonSystem& sys) {
  validate(sys);
  int n_fock = sys.n_max + 1;
  std::vector<SectorMatrix> sectors;
  sectors.reserve(sys.basis.dim());
  for (int i = 0; i < sys.basis.dim(); ++i) {
    SectorMatrix s;
    s.m = sys.basis.m_of(i);
    s.coupling = sector_coupling(sys, i);
    s.diag.resize(n_fock);
    s.off.resize(n_fock - 1);
    for (int n = 0; n < n_fock; ++n) s.diag[n] = sys.big_delta * n;
    for (int n = 0; n + 1 < n_fock; ++n)
      s.off[n] = -s.coupling * std::sqrt(static_cast<double>(n + 1));
    double disp = s.coupling / sys.big_delta;
    s.cutoff_ok = disp * disp <= 0.25 * sys.n_max;
    sectors.push_back(std::move(s));
  }
  return sectors;
}

std::vector<SectorSpectrum> sector_spectra(const SpinBosonSystem& sys,
                                           int threads) {
  std::vector<SectorMatrix> blocks = build_spin_boson(sys);
  std::vector<SectorSpectrum> out(blocks.size());
  parallel_for(blocks.size(), threads, [&](std::size_t i) {
    const SectorMatrix& b = blocks[i];
    auto es = spectra::tridiagonal_eigensystem(
        b.diag, b.off, static_cast<int>(b.diag.size()));
    out[i] = SectorSpectrum{b.m, b.coupling, std::move(es.energies),
                            b.cutoff_ok};
  });
  return out;
}

PrefactorReport effective_prefactor(const SpinBosonSystem& sys, int threads) {
  std::vector<SectorSpectrum> spectra_by_m = sector_spectra(sys, threads);

  // need at least two distinct m^2 values for the quadratic fit
  double first_m2 = spectra_by_m.front().m * spectra_by_m.front().m;
  bool distinct = false;
  for (const auto& s : spectra_by_m)
    if (std::abs(s.m * s.m - first_m2) > 1e-12) distinct = true;
  if (!distinct)
    throw ConfigError(
        "spin-boson: prefactor fit needs at least two distinct |m| sectors");

  // least squares for E0 = intercept - c * m^2
  double sx = 0, sxx = 0, sy = 0, sxy = 0;
  double n_pts = static_cast<double>(spectra_by_m.size());
  for (const auto& s : spectra_by_m) {
    double x = s.m * s.m, y = s.energies[0];
    sx += x;
    sxx += x * x;
    sy += y;
    sxy += x * y;
  }
  double det = n_pts * sxx - sx * sx;
  double slope = (n_pts * sxy - sx * sy) / det;

  PrefactorReport rep;
  rep.c_measured = -slope;
  rep.intercept = (sy * sxx - sx * sxy) / det;
  rep.cutoff_ok = true;
  for (const auto& s : spectra_by_m) {
    double model = rep.intercept - rep.c_measured * s.m * s.m;
    rep.fit_residual = std::max(rep.fit_residual,
                                std::abs(s.energies[0] - model));
    rep.cutoff_ok = rep.cutoff_ok && s.cutoff_ok;
  }

  double n_ions = static_cast<double>(sys.basis.n_ions);
  double omege2 = sys.omega_z * sys.omega_z * sys.eta_z * sys.eta_z;
  rep.c_polaron = 4.0 * omege2 / (n_ions * sys.big_delta);
  rep.c_published = 8.0 * omege2 / (n_ions * sys.big_delta);
  rep.ratio_to_polaron =
      rep.c_polaron > 0.0 ? rep.c_measured / rep.c_polaron : 0.0;
  rep.ratio_to_published =
      rep.c_published > 0.0 ? rep.c_measured / rep.c_published : 0.0;
  rep.residual_ok = rep.fit_residual <= 1e-8 * sys.big_delta;
  return rep;
}

}  // namespace spinmz::boson
