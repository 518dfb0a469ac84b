#include <cmath>

#include "doctest.h"
#include "spinmz/boson_validation.hpp"
#include "spinmz/errors.hpp"

using namespace spinmz;
using namespace spinmz::boson;

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

SpinBosonSystem reference_system() {
  // weak displacement: g_max / Delta = 0.02
  return SpinBosonSystem{SpinBasis(4), 60, two_pi * 50e3, 0.1, two_pi * 500e3};
}

}  // namespace

TEST_CASE("sector couplings are 2 m Omega eta / sqrt(N)") {
  SpinBosonSystem sys = reference_system();
  double unit = 2.0 * sys.omega_z * sys.eta_z / 2.0;  // sqrt(N) = 2
  for (int i = 0; i <= 4; ++i)
    CHECK(sector_coupling(sys, i) ==
          doctest::Approx((2.0 - i) * unit).epsilon(1e-14));

  SpinBosonSystem off = sys;
  off.omega_z = 0.0;
  for (int i = 0; i <= 4; ++i) CHECK(sector_coupling(off, i) == 0.0);
}

TEST_CASE("m = 0 sector is the bare oscillator") {
  SpinBosonSystem sys = reference_system();
  auto spectra = sector_spectra(sys, 1);
  REQUIRE(spectra.size() == 5);
  const auto& mid = spectra[2];
  REQUIRE(mid.m == 0.0);
  for (int n = 0; n <= sys.n_max; ++n)
    CHECK(mid.energies[n] ==
          doctest::Approx(sys.big_delta * n).epsilon(1e-12));
}

TEST_CASE("opposite-m sectors are isospectral") {
  SpinBosonSystem sys = reference_system();
  auto spectra = sector_spectra(sys, 1);
  for (int i = 0; i <= 1; ++i) {
    const auto& a = spectra[i];
    const auto& b = spectra[4 - i];
    REQUIRE(a.m == -b.m);
    CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() <
          1e-10 * sys.big_delta);
  }
}

TEST_CASE("ground energies match -g^2/Delta, levels match Delta n - c m^2") {
  SpinBosonSystem sys = reference_system();
  auto spectra = sector_spectra(sys, 1);
  double c_exact = 4.0 * sys.omega_z * sys.omega_z * sys.eta_z * sys.eta_z /
                   (4.0 * sys.big_delta);
  for (const auto& s : spectra) {
    double e0_exact = -s.coupling * s.coupling / sys.big_delta;
    CHECK(std::abs(s.energies[0] - e0_exact) < 1e-9 * sys.big_delta);
    // the displaced ladder keeps the oscillator spacing
    for (int n = 0; n <= sys.n_max / 2; ++n) {
      double level = sys.big_delta * n - c_exact * s.m * s.m;
      CHECK(std::abs(s.energies[n] - level) < 1e-6 * sys.big_delta);
    }
  }
}

TEST_CASE("prefactor fit recovers the polaron value, half the published one") {
  SpinBosonSystem sys = reference_system();
  PrefactorReport rep = effective_prefactor(sys, 1);

  CHECK(rep.fit_residual <= 1e-8 * sys.big_delta);
  CHECK(rep.residual_ok);
  CHECK(rep.cutoff_ok);
  CHECK(rep.c_measured ==
        doctest::Approx(rep.c_polaron).epsilon(1e-6));
  CHECK(rep.ratio_to_polaron == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.ratio_to_published == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rep.c_published == doctest::Approx(2.0 * rep.c_polaron).epsilon(1e-14));
  CHECK(std::abs(rep.intercept) < 1e-8 * sys.big_delta);
}

TEST_CASE("interferometer-scale parameters give the published lambda scale") {
  // 8 Omega^2 eta^2 / (N Delta) = 2pi * 8 kHz at these drive settings; the
  // exact block-diagonal answer is half of that.
  SpinBosonSystem sys{SpinBasis(10), 80, two_pi * 1e6, 0.1, two_pi * 1e6};
  PrefactorReport rep = effective_prefactor(sys, 1);
  double published = 8.0 * std::pow(sys.omega_z * sys.eta_z, 2) /
                     (10.0 * sys.big_delta);
  CHECK(published == doctest::Approx(two_pi * 8000.0).epsilon(1e-12));
  CHECK(rep.ratio_to_published == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rep.residual_ok);
}

TEST_CASE("spectra converge in the Fock cutoff") {
  SpinBosonSystem coarse = reference_system();
  coarse.n_max = 40;
  SpinBosonSystem fine = coarse;
  fine.n_max = 60;  // +50%

  auto a = sector_spectra(coarse, 1);
  auto b = sector_spectra(fine, 1);
  // levels near the truncation edge are cutoff artifacts by construction;
  // the physical statement is about the converged lower half of the ladder
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int n = 0; n <= coarse.n_max / 2; ++n)
      CHECK(std::abs(a[i].energies[n] - b[i].energies[n]) <=
            1e-9 * coarse.big_delta);
}

TEST_CASE("sector solve order does not depend on the thread count") {
  SpinBosonSystem sys = reference_system();
  auto serial = sector_spectra(sys, 1);
  auto threaded = sector_spectra(sys, 3);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].m == threaded[i].m);
    CHECK((serial[i].energies - threaded[i].energies).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("over-displaced sectors are flagged") {
  // g_{m=2} / Delta = 2, displacement 4 > n_max / 4 = 2
  SpinBosonSystem sys{SpinBasis(4), 8, two_pi * 100e3, 1.0, two_pi * 100e3};
  auto blocks = build_spin_boson(sys);
  CHECK_FALSE(blocks.front().cutoff_ok);
  CHECK(blocks[2].cutoff_ok);  // m = 0 never displaces

  PrefactorReport rep = effective_prefactor(sys, 1);
  CHECK_FALSE(rep.cutoff_ok);
}

TEST_CASE("spin-boson validation errors") {
  SpinBosonSystem sys = reference_system();

  SpinBosonSystem small = sys;
  small.n_max = 3;
  CHECK_THROWS_AS(validate(small), ConfigError);

  SpinBosonSystem flat = sys;
  flat.big_delta = 0.0;
  CHECK_THROWS_AS(validate(flat), ConfigError);

  SpinBosonSystem negative = sys;
  negative.eta_z = -0.1;
  CHECK_THROWS_AS(validate(negative), ConfigError);

  SpinBosonSystem huge{SpinBasis(40), 600, two_pi * 1e5, 0.1, two_pi * 1e6};
  CHECK_THROWS_AS(validate(huge), ConfigError);

  SpinBosonSystem single{SpinBasis(1), 20, two_pi * 1e5, 0.1, two_pi * 1e6};
  CHECK_THROWS_AS(effective_prefactor(single, 1), ConfigError);
}
