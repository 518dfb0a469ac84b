#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace spinmz::config {

// INI-style run configuration:
//
//   # comment (also ';'); blank lines ignored
//   [section]
//   key = value        # unit-suffixed literals per units.hpp
//
// Keys live inside sections; duplicates and keys before the first section
// header are errors. Values keep their verbatim (trimmed) spelling so the
// snapshot written to the run log re-parses to the same configuration.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string text;  // original source

  static ConfigFile parse(const std::string& text);  // throws ConfigError
  static ConfigFile load(const std::string& path);

  bool has_section(const std::string& section) const {
    return sections.count(section) != 0;
  }
};

// Strict schema access: every lookup is recorded, and finish() rejects any
// key or section the command never asked about, so typos fail loudly
// instead of silently falling back to defaults.
class Reader {
 public:
  explicit Reader(const ConfigFile& file) : file_(file) {}

  bool has(const std::string& section, const std::string& key) const;

  // required unless a default is supplied
  std::string get_string(const std::string& section, const std::string& key);
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  double get_number(const std::string& section, const std::string& key);
  double get_number(const std::string& section, const std::string& key,
                    double fallback);
  double get_frequency(const std::string& section, const std::string& key);
  double get_frequency(const std::string& section, const std::string& key,
                       double fallback);
  double get_time(const std::string& section, const std::string& key);
  double get_time(const std::string& section, const std::string& key,
                  double fallback);
  double get_ramp_rate(const std::string& section, const std::string& key);
  long long get_int(const std::string& section, const std::string& key);
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback);
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback);
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback);

  // marks a section as recognized even when none of its keys were read
  void allow_section(const std::string& section);

  void finish() const;  // throws ConfigError on unconsumed keys/sections

 private:
  std::string raw(const std::string& section, const std::string& key);
  const std::string* raw_if_present(const std::string& section,
                                    const std::string& key);

  const ConfigFile& file_;
  std::set<std::pair<std::string, std::string>> seen_;
  std::set<std::string> sections_seen_;
};

}  // namespace spinmz::config
