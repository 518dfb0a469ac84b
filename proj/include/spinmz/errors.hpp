#pragma once

#include <stdexcept>
#include <string>

namespace spinmz {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config files, out-of-range parameters,
// unknown keys. Maps to CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// A run completed but a physics check failed (adiabaticity floor,
// leakage bound, ...). Maps to CLI exit code 1 when fatal; most
// validation outcomes are reported as flags instead of thrown.
struct ValidationError : Error {
  using Error::Error;
};

// Numerical machinery failed (eigensolver did not converge, step size
// rejected). Carries enough context to reproduce.
struct NumericsError : Error {
  using Error::Error;
};

}  // namespace spinmz
