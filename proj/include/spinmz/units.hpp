#pragma once

#include <string>

namespace spinmz::units {

// All frequencies inside the library are angular (rad/s). Config literals:
//
//   freq  :=  ["2pi*"] number [hz-unit]
//   time  :=  number [time-unit]            (default s)
//   rate  :=  freq "/" time-unit            (ramp slopes, rad/s^2)
//
// A number carrying a Hz-family unit (Hz, kHz, MHz, GHz) is a cycle count
// per second and is converted by 2*pi on parse; a bare number is already
// rad/s (equivalently 1/s for decay rates). The "2pi*" prefix makes the
// angular factor explicit: "2pi*100kHz" and "100kHz" parse to the same
// value, while "2pi*8000" is 2*pi*8000 rad/s.
double parse_frequency(const std::string& text);

// Seconds. Units: s, ms, us, ns.
double parse_time(const std::string& text);

// rad/s^2, e.g. "2pi*50kHz/ms".
double parse_ramp_rate(const std::string& text);

double parse_number(const std::string& text);  // plain double, strict

// Shortest decimal form that round-trips through parse_number.
std::string format_double(double v);

}  // namespace spinmz::units
