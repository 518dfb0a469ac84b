#include <doctest.h>

#include <cmath>

#include "spinmz/errors.hpp"
#include "spinmz/units.hpp"

using namespace spinmz;

static constexpr double two_pi = 6.283185307179586476925286766559;

TEST_CASE("frequency literals: Hz-family means cycles, bare means rad/s") {
  CHECK(units::parse_frequency("1MHz") == doctest::Approx(two_pi * 1e6).epsilon(1e-15));
  CHECK(units::parse_frequency("100kHz") == doctest::Approx(two_pi * 1e5).epsilon(1e-15));
  CHECK(units::parse_frequency("2pi*100kHz") ==
        doctest::Approx(units::parse_frequency("100kHz")).epsilon(1e-15));
  CHECK(units::parse_frequency("2pi*8000") == doctest::Approx(two_pi * 8000));
  CHECK(units::parse_frequency("512.5") == doctest::Approx(512.5));
  CHECK(units::parse_frequency(" 3GHz ") == doctest::Approx(two_pi * 3e9));
  CHECK(units::parse_frequency("-0.25Hz") == doctest::Approx(-two_pi * 0.25));
  CHECK_THROWS_AS(units::parse_frequency("10mHz"), ConfigError);
  CHECK_THROWS_AS(units::parse_frequency("fast"), ConfigError);
}

TEST_CASE("time and ramp-rate literals") {
  CHECK(units::parse_time("5ms") == doctest::Approx(5e-3));
  CHECK(units::parse_time("250us") == doctest::Approx(2.5e-4));
  CHECK(units::parse_time("3") == doctest::Approx(3.0));
  CHECK_THROWS_AS(units::parse_time("5min"), ConfigError);

  CHECK(units::parse_ramp_rate("50kHz/ms") == doctest::Approx(two_pi * 5e4 / 1e-3));
  CHECK(units::parse_ramp_rate("2pi*50kHz/ms") == doctest::Approx(two_pi * 5e7));
  CHECK(units::parse_ramp_rate("1000") == doctest::Approx(1000.0));  // rad/s^2
  CHECK_THROWS_AS(units::parse_ramp_rate("50kHz/fortnight"), ConfigError);
}

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, two_pi * 8000, 1e-300, -0.0, 5.0265482457436691e4}) {
    CHECK(units::parse_number(units::format_double(v)) == v);
  }
  CHECK(units::format_double(0.5) == "0.5");
  CHECK(units::format_double(1e6) == "1e+06");
}

TEST_CASE("strict plain numbers") {
  CHECK(units::parse_number("-2.5e-3") == doctest::Approx(-2.5e-3));
  CHECK_THROWS_AS(units::parse_number("1.0x"), ConfigError);
  CHECK_THROWS_AS(units::parse_number(""), ConfigError);
}
