#include <bit>
#include <cmath>

#include "doctest.h"
#include "spinmz/circuit_readout.hpp"
#include "spinmz/dynamics.hpp"
#include "spinmz/errors.hpp"
#include "spinmz/protocol.hpp"

using namespace spinmz;
using namespace spinmz::circuit;

namespace {

StateVector random_dicke(const SpinBasis& basis) {
  StateVector s(basis);
  for (int i = 0; i < basis.dim(); ++i)
    s.amp[i] = cplx(std::sin(1.7 * i + 0.4), std::cos(0.9 * i * i));
  s.renormalize();
  return s;
}

}  // namespace

TEST_CASE("dicke embedding: explicit small cases") {
  // |1,0> -> (|ud> + |du>)/sqrt(2); qubit 1 is the high bit, set = up
  SpinBasis b2{2};
  auto full = embed_dicke(basis_state(b2, 1));
  CHECK(std::abs(full.amp[0b10] - cplx(M_SQRT1_2, 0)) <= 1e-15);
  CHECK(std::abs(full.amp[0b01] - cplx(M_SQRT1_2, 0)) <= 1e-15);
  CHECK(std::abs(full.amp[0b00]) <= 1e-15);
  CHECK(std::abs(full.amp[0b11]) <= 1e-15);

  // stretched state |5/2,-5/2> -> all down
  SpinBasis b5{5};
  auto down = embed_dicke(basis_state(b5, 5));
  CHECK(std::abs(down.amp[0] - cplx(1, 0)) <= 1e-15);
  for (unsigned i = 1; i < 32; ++i) CHECK(std::abs(down.amp[i]) <= 1e-15);
}

TEST_CASE("dicke embedding is an isometry") {
  for (int n : {1, 3, 8}) {
    SpinBasis basis{n};
    auto s = random_dicke(basis);
    auto full = embed_dicke(s);
    CHECK(full.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SpinBasis big{15};
  CHECK_THROWS_AS(embed_dicke(StateVector(big)), ConfigError);
}

TEST_CASE("embedding intertwines the collective Jz") {
  for (int n : {2, 5, 8}) {
    SpinBasis basis{n};
    auto s = random_dicke(basis);
    // apply Jz in the Dicke basis, then embed
    StateVector jz_s = s;
    for (int i = 0; i < basis.dim(); ++i) jz_s.amp[i] *= basis.m_of(i);
    auto lhs = embed_dicke(jz_s);
    // embed, then apply sum_i sigma_z^i / 2 (diagonal: popcount - n/2)
    auto rhs = embed_dicke(s);
    for (unsigned b = 0; b < (1u << n); ++b)
      rhs.amp[b] *= std::popcount(b) - 0.5 * n;
    CHECK((lhs.amp - rhs.amp).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("cnot fan-out moves the stretched states correctly") {
  SpinBasis b5{5};
  // all up: control is up, every other ion flips
  auto all_up = apply_cnot_fanout(embed_dicke(basis_state(b5, 0)), 1);
  CHECK(std::abs(all_up.amp[0b10000] - cplx(1, 0)) <= 1e-15);
  // all down: control is down, nothing happens
  auto all_down = apply_cnot_fanout(embed_dicke(basis_state(b5, 5)), 1);
  CHECK(std::abs(all_down.amp[0] - cplx(1, 0)) <= 1e-15);
}

TEST_CASE("gates are unitary and self-inverse") {
  SpinBasis basis{6};
  auto reg = embed_dicke(random_dicke(basis));
  auto after = apply_cnot_fanout(apply_cnot_fanout(reg, 1), 1);
  CHECK((after.amp - reg.amp).cwiseAbs().maxCoeff() <= 1e-15);
  auto hh = apply_hadamard(apply_hadamard(reg, 3), 3);
  CHECK((hh.amp - reg.amp).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(apply_hadamard(reg, 2).norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(apply_hadamard(reg, 0), ConfigError);
  CHECK_THROWS_AS(apply_cnot_fanout(reg, 7), ConfigError);
}

TEST_CASE("readout reproduces the explicit five-ion amplitudes") {
  // free-evolved cat -> cos(5 phi/2)|ddddd> + i sin(5 phi/2)|uDDDD>
  SpinBasis b5{5};
  double phi = 0.37;
  StateVector s = cat_state(b5, 0.0);
  dynamics::free_evolve_phase(s, phi);
  auto reg = apply_hadamard(apply_cnot_fanout(embed_dicke(s), 1), 1);
  double half = 2.5 * phi;
  CHECK(std::abs(reg.amp[0b00000] - cplx(std::cos(half), 0)) <= 1e-14);
  CHECK(std::abs(reg.amp[0b10000] - cplx(0, std::sin(half))) <= 1e-14);
}

TEST_CASE("readout probabilities match the collective closed form") {
  for (int n : {1, 2, 3, 5, 10}) {
    SpinBasis basis{n};
    for (double phi : {0.0, 0.21, 2.0 * M_PI / (3.0 * n), 1.4}) {
      StateVector s = cat_state(basis, 0.0);
      dynamics::free_evolve_phase(s, phi);
      auto probs = readout_sequence(s);
      auto ideal = protocol::ideal_pole_probabilities(n, phi);
      CHECK(std::abs(probs.p_first_down - ideal[0]) <= 1e-12);
      CHECK(std::abs(probs.p_first_up - ideal[1]) <= 1e-12);
      CHECK(probs.p_first_down + probs.p_first_up ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("five-ion worked example: probabilities (1/4, 3/4)") {
  SpinBasis b5{5};
  double phi = 2.0 * M_PI / 15.0;  // 5 phi / 2 = pi / 3
  auto probs = readout_sequence(cat_state(b5, 0.0), phi, 1.0);
  CHECK(probs.p_first_down == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(probs.p_first_up == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("both readout routes agree on the simulated pipeline state") {
  // The register circuit is exact on any state; the collective recombiner
  // carries its own ramp diabatism, so the routes match at the config's
  // adiabaticity level, not to machine precision.
  const double tau = 2 * M_PI;
  protocol::ProtocolConfig c;
  c.n_ions = 4;
  c.lambda = tau * 8000;
  c.alpha = tau * 1e5;
  c.beta = tau * 5e7;
  c.delta_recombine = tau * 1000;
  auto split = protocol::beam_split(c);
  REQUIRE(split.adiabatic);
  for (double phi : {0.0, 0.3, 1.0}) {
    StateVector s = split.state;
    dynamics::free_evolve_phase(s, phi);
    auto circ = readout_sequence(s);
    auto coll = protocol::recombine_and_read(s, c);
    CHECK(std::abs(circ.p_first_down - coll.p_plus) <= 0.05);
    CHECK(std::abs(circ.p_first_up - coll.p_minus) <= 0.05);
  }
}
