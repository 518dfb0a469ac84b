#include <cmath>
#include <complex>

#include "doctest.h"
#include "spinmz/decoherence.hpp"
#include "spinmz/dynamics.hpp"
#include "spinmz/errors.hpp"

using namespace spinmz;
using namespace spinmz::lindblad;

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

double max_entry_diff(const DensityMatrix& a, const DensityMatrix& b) {
  return (a.rho - b.rho).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("ghz projector structure") {
  SpinBasis basis(6);
  DensityMatrix dm = ghz_initial(basis);

  CHECK(dm.trace_real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dm.purity() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((dm.rho - dm.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

  // only the four corner entries are populated, each 1/2
  for (int i = 0; i <= 6; ++i) {
    for (int j = 0; j <= 6; ++j) {
      bool corner = (i == 0 || i == 6) && (j == 0 || j == 6);
      double expect = corner ? 0.5 : 0.0;
      CHECK(std::abs(dm.rho(i, j) - cplx(expect, 0)) < 1e-15);
    }
  }
  CHECK(coherence_magnitude(dm) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("analytic corner entry carries exp(-gamma N^2 t - i omega0 N t)") {
  SpinBasis basis(5);
  double gamma = 3.0, omega0 = two_pi * 40.0, t = 0.02;
  DephasingParams p{omega0, gamma, false};

  DensityMatrix in = ghz_initial(basis);
  DensityMatrix out = dephase_analytic(in, p, t);
  double n = 5.0;
  cplx expect = 0.5 * std::exp(cplx(-gamma * n * n * t, -omega0 * n * t));
  CHECK(std::abs(out.rho(0, 5) - expect) < 1e-14);
  CHECK(std::abs(out.rho(5, 0) - std::conj(expect)) < 1e-14);
  // populations untouched, bit for bit
  CHECK(out.rho(0, 0) == in.rho(0, 0));
  CHECK(out.rho(5, 5) == in.rho(5, 5));
}

TEST_CASE("two-ion cat coherence drops by exp(-2) when gamma t = 1/2") {
  SpinBasis basis(2);
  DephasingParams p{0.0, 4.0, false};
  DensityMatrix out = dephase_analytic(ghz_initial(basis), p, 0.125);
  // delta-m = 2 across the cat corner: exponent gamma * 4 * t = 2
  CHECK(coherence_magnitude(out) ==
        doctest::Approx(0.5 * std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("gamma = 0 reduces to unitary phase evolution") {
  SpinBasis basis(4);
  double omega0 = two_pi * 123.0, t = 3.7e-3;

  StateVector s = spin_coherent_x(basis, +1);
  DensityMatrix evolved = dephase_analytic(from_pure(s), {omega0, 0.0, false}, t);

  StateVector u = s;
  dynamics::free_evolve(u, omega0, t);
  CHECK(trace_distance(evolved, from_pure(u)) < 1e-12);
  CHECK(evolved.purity() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("analytic map is a semigroup") {
  SpinBasis basis(7);
  DephasingParams p{two_pi * 55.0, 2.5, false};
  DensityMatrix rho0 = from_pure(spin_coherent_x(basis, -1));

  DensityMatrix direct = dephase_analytic(rho0, p, 0.03);
  DensityMatrix stepped =
      dephase_analytic(dephase_analytic(rho0, p, 0.01), p, 0.02);
  CHECK(max_entry_diff(direct, stepped) < 1e-14);
}

TEST_CASE("rk4 route matches the closed form") {
  SpinBasis basis(10);
  double gamma = 5.0, omega0 = two_pi * 30.0, t = 0.02;
  DephasingParams p{omega0, gamma, false};
  DensityMatrix rho0 = from_pure(spin_coherent_x(basis, +1));

  DensityMatrix num = dephase_numeric(rho0, p, t, 2e-6);
  DensityMatrix ana = dephase_analytic(rho0, p, t);
  CHECK(trace_distance(num, ana) < 1e-8);

  CHECK(std::abs(num.trace_real() - 1.0) < 1e-10);
  CHECK((num.rho - num.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(min_eigenvalue(num) > -1e-9);
  CHECK(num.purity() < rho0.purity());
}

TEST_CASE("rk4 error drops ~16x per step halving") {
  SpinBasis basis(4);
  double gamma = 10.0, omega0 = two_pi * 1000.0, t = 5e-3;
  DephasingParams p{omega0, gamma, false};
  DensityMatrix rho0 = from_pure(spin_coherent_x(basis, +1));
  DensityMatrix ana = dephase_analytic(rho0, p, t);

  double e1 = trace_distance(dephase_numeric(rho0, p, t, 2e-5), ana);
  double e2 = trace_distance(dephase_numeric(rho0, p, t, 1e-5), ana);
  REQUIRE(e1 > 1e-12);  // above rounding noise, so the ratio is meaningful
  REQUIRE(e2 > 0.0);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.35));
}

TEST_CASE("diagonal populations are a fixed point of the rk4 route") {
  SpinBasis basis(5);
  DensityMatrix rho0(basis);
  Eigen::VectorXd pops(6);
  pops << 0.05, 0.2, 0.3, 0.25, 0.15, 0.05;
  rho0.rho = pops.cast<cplx>().asDiagonal();

  DensityMatrix out =
      dephase_numeric(rho0, {two_pi * 200.0, 8.0, false}, 0.01, 1e-5);
  CHECK(max_entry_diff(out, rho0) < 1e-12);
}

TEST_CASE("fitted decay exponent scales as N^2") {
  double gamma = 2.0, t = 0.01;
  for (int n : {2, 4, 8}) {
    SpinBasis basis(n);
    DensityMatrix out =
        dephase_numeric(ghz_initial(basis), {0.0, gamma, false}, t, 1e-5);
    double exponent = -std::log(2.0 * coherence_magnitude(out)) / (gamma * t);
    CHECK(std::abs(exponent / (n * n) - 1.0) < 0.01);
  }
}

TEST_CASE("collective_rate switch rescales gamma by N^2") {
  SpinBasis basis(4);
  DensityMatrix rho0 = from_pure(spin_coherent_x(basis, +1));
  double gamma = 0.7, t = 0.01;

  DensityMatrix collective =
      dephase_analytic(rho0, {0.0, gamma, true}, t);
  DensityMatrix scaled =
      dephase_analytic(rho0, {0.0, gamma * 16.0, false}, t);
  CHECK(max_entry_diff(collective, scaled) < 1e-16);
}

TEST_CASE("40-ion clock anchor: exponent near 0.1005 over one interrogation") {
  SpinBasis basis(40);
  double gamma0 = 0.0125664, t = 5e-3;
  DensityMatrix out = dephase_analytic(ghz_initial(basis), {0.0, gamma0, false}, t);

  double exponent = -std::log(2.0 * coherence_magnitude(out));
  CHECK(exponent == doctest::Approx(gamma0 * 1600.0 * t).epsilon(1e-12));
  CHECK(exponent == doctest::Approx(0.1005).epsilon(1e-3));
  CHECK(coherence_magnitude(out) == doctest::Approx(0.45219).epsilon(1e-4));
}

TEST_CASE("input validation and stability rejection") {
  SpinBasis basis(3);
  DensityMatrix good = ghz_initial(basis);

  CHECK_THROWS_AS(dephase_analytic(good, {0.0, -1.0, false}, 0.1),
                  ValidationError);
  CHECK_THROWS_AS(dephase_analytic(good, {0.0, 1.0, false}, -0.1),
                  ValidationError);

  DensityMatrix skew = good;
  skew.rho(0, 3) += cplx(0.0, 1e-3);
  CHECK_THROWS_AS(dephase_analytic(skew, {0.0, 1.0, false}, 0.1),
                  ValidationError);

  DensityMatrix heavy = good;
  heavy.rho *= 1.5;
  CHECK_THROWS_AS(dephase_numeric(heavy, {0.0, 1.0, false}, 0.1, 1e-4),
                  ValidationError);

  // dt * (gamma N^2 + omega0 N) far outside the stability region
  CHECK_THROWS_AS(dephase_numeric(good, {two_pi * 1e6, 0.0, false}, 1e-3, 1e-3),
                  NumericsError);
  CHECK_THROWS_AS(dephase_numeric(good, {0.0, 1.0, false}, 0.1, 0.0),
                  ValidationError);
}

TEST_CASE("trace distance basics") {
  SpinBasis basis(3);
  DensityMatrix a = from_pure(basis_state(basis, 0));
  DensityMatrix b = from_pure(basis_state(basis, 2));
  DensityMatrix cat = ghz_initial(basis);

  CHECK(trace_distance(a, a) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(trace_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_distance(a, cat) ==
        doctest::Approx(trace_distance(cat, a)).epsilon(1e-12));

  SpinBasis other(5);
  CHECK_THROWS_AS(trace_distance(a, ghz_initial(other)), ValidationError);
}
