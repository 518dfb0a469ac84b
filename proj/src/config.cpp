#include "spinmz/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "spinmz/errors.hpp"
#include "spinmz/units.hpp"

namespace spinmz::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find_first_of("#;");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  cfg.text = text;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty section name");
      cfg.sections[section];  // a section may legitimately stay empty
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value, got '" + body + "'");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key outside any [section]");
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    if (value.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty value for key '" + key + "'");
    auto [it, inserted] = cfg.sections[section].emplace(key, value);
    (void)it;
    if (!inserted)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "' in [" + section + "]");
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool Reader::has(const std::string& section, const std::string& key) const {
  auto s = file_.sections.find(section);
  return s != file_.sections.end() && s->second.count(key) != 0;
}

const std::string* Reader::raw_if_present(const std::string& section,
                                          const std::string& key) {
  seen_.insert({section, key});
  sections_seen_.insert(section);
  auto s = file_.sections.find(section);
  if (s == file_.sections.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::string Reader::raw(const std::string& section, const std::string& key) {
  const std::string* v = raw_if_present(section, key);
  if (!v)
    throw ConfigError("config: missing required key '" + key + "' in [" +
                      section + "]");
  return *v;
}

std::string Reader::get_string(const std::string& section,
                               const std::string& key) {
  return raw(section, key);
}

std::string Reader::get_string(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) {
  const std::string* v = raw_if_present(section, key);
  return v ? *v : fallback;
}

namespace {

template <typename Fn>
double parse_with_context(const std::string& section, const std::string& key,
                          const std::string& text, Fn&& fn) {
  try {
    return fn(text);
  } catch (const Error& e) {
    throw ConfigError("config: key '" + key + "' in [" + section +
                      "]: " + e.what());
  }
}

}  // namespace

double Reader::get_number(const std::string& section, const std::string& key) {
  return parse_with_context(section, key, raw(section, key),
                            units::parse_number);
}

double Reader::get_number(const std::string& section, const std::string& key,
                          double fallback) {
  const std::string* v = raw_if_present(section, key);
  return v ? parse_with_context(section, key, *v, units::parse_number)
           : fallback;
}

double Reader::get_frequency(const std::string& section,
                             const std::string& key) {
  return parse_with_context(section, key, raw(section, key),
                            units::parse_frequency);
}

double Reader::get_frequency(const std::string& section,
                             const std::string& key, double fallback) {
  const std::string* v = raw_if_present(section, key);
  return v ? parse_with_context(section, key, *v, units::parse_frequency)
           : fallback;
}

double Reader::get_time(const std::string& section, const std::string& key) {
  return parse_with_context(section, key, raw(section, key),
                            units::parse_time);
}

double Reader::get_time(const std::string& section, const std::string& key,
                        double fallback) {
  const std::string* v = raw_if_present(section, key);
  return v ? parse_with_context(section, key, *v, units::parse_time)
           : fallback;
}

double Reader::get_ramp_rate(const std::string& section,
                             const std::string& key) {
  return parse_with_context(section, key, raw(section, key),
                            units::parse_ramp_rate);
}

long long Reader::get_int(const std::string& section, const std::string& key) {
  double v = get_number(section, key);
  long long n = static_cast<long long>(v);
  if (static_cast<double>(n) != v)
    throw ConfigError("config: key '" + key + "' in [" + section +
                      "] must be an integer");
  return n;
}

long long Reader::get_int(const std::string& section, const std::string& key,
                          long long fallback) {
  return has(section, key) ? get_int(section, key)
                           : (raw_if_present(section, key), fallback);
}

std::uint64_t Reader::get_u64(const std::string& section,
                              const std::string& key, std::uint64_t fallback) {
  const std::string* v = raw_if_present(section, key);
  if (!v) return fallback;
  try {
    // stoull wraps negatives around instead of throwing
    if (v->find('-') != std::string::npos)
      throw std::invalid_argument("negative");
    std::size_t used = 0;
    unsigned long long parsed = std::stoull(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' in [" + section +
                      "] must be an unsigned integer");
  }
}

bool Reader::get_bool(const std::string& section, const std::string& key,
                      bool fallback) {
  const std::string* v = raw_if_present(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "yes" || *v == "1") return true;
  if (*v == "false" || *v == "no" || *v == "0") return false;
  throw ConfigError("config: key '" + key + "' in [" + section +
                    "] must be a boolean (true/false)");
}

void Reader::allow_section(const std::string& section) {
  sections_seen_.insert(section);
}

void Reader::finish() const {
  for (const auto& [section, keys] : file_.sections) {
    if (!sections_seen_.count(section))
      throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : keys) {
      (void)value;
      if (!seen_.count({section, key}))
        throw ConfigError("config: unknown key '" + key + "' in [" + section +
                          "]");
    }
  }
}

}  // namespace spinmz::config
