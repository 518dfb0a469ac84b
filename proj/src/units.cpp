#include "spinmz/units.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "spinmz/errors.hpp"

namespace spinmz::units {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// Parses a double at the front of `s`, returns chars consumed.
size_t eat_number(const std::string& s, double* out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) throw ConfigError("expected a number in '" + s + "'");
  *out = v;
  return static_cast<size_t>(end - begin);
}

bool hz_scale(const std::string& unit, double* scale) {
  if (unit == "Hz") { *scale = 1.0; return true; }
  if (unit == "kHz") { *scale = 1e3; return true; }
  if (unit == "MHz") { *scale = 1e6; return true; }
  if (unit == "GHz") { *scale = 1e9; return true; }
  return false;
}

bool time_scale(const std::string& unit, double* scale) {
  if (unit == "s") { *scale = 1.0; return true; }
  if (unit == "ms") { *scale = 1e-3; return true; }
  if (unit == "us") { *scale = 1e-6; return true; }
  if (unit == "ns") { *scale = 1e-9; return true; }
  return false;
}

}  // namespace

double parse_frequency(const std::string& text) {
  std::string s = strip(text);
  bool explicit_2pi = false;
  if (s.rfind("2pi*", 0) == 0) {
    explicit_2pi = true;
    s = s.substr(4);
  }
  double v = 0;
  size_t used = eat_number(s, &v);
  std::string unit = strip(s.substr(used));
  if (unit.empty()) return explicit_2pi ? two_pi * v : v;
  double scale = 0;
  if (!hz_scale(unit, &scale))
    throw ConfigError("unknown frequency unit '" + unit + "' in '" + text + "'");
  // Hz-family literals are cycles/s; both spellings land on the same rad/s.
  return two_pi * v * scale;
}

double parse_time(const std::string& text) {
  std::string s = strip(text);
  double v = 0;
  size_t used = eat_number(s, &v);
  std::string unit = strip(s.substr(used));
  if (unit.empty()) return v;
  double scale = 0;
  if (!time_scale(unit, &scale))
    throw ConfigError("unknown time unit '" + unit + "' in '" + text + "'");
  return v * scale;
}

double parse_ramp_rate(const std::string& text) {
  std::string s = strip(text);
  size_t slash = s.rfind('/');
  if (slash == std::string::npos)
    return parse_frequency(s);  // already rad/s^2
  std::string denom = strip(s.substr(slash + 1));
  double scale = 0;
  if (!time_scale(denom, &scale))
    throw ConfigError("unknown time unit '" + denom + "' in '" + text + "'");
  return parse_frequency(strip(s.substr(0, slash))) / scale;
}

double parse_number(const std::string& text) {
  std::string s = strip(text);
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ConfigError("expected a plain number, got '" + text + "'");
  return v;
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace spinmz::units
