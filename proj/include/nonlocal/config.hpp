#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nonlocal/errors.hpp"

namespace nonlocal {

// Flat sectioned key-value configuration:
//
//   # comment
//   [section]
//   key = value
//
// One nesting level only; values are uninterpreted strings until a typed
// accessor parses them. Every syntactic or type problem throws config_error
// with the offending line or key named.

struct ConfigFile {
  // section -> key -> value, plus the raw text for fingerprinting.
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string raw;

  bool has_section(const std::string& s) const { return sections.count(s) > 0; }
  bool has_key(const std::string& s, const std::string& k) const {
    auto it = sections.find(s);
    return it != sections.end() && it->second.count(k) > 0;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const char* ws = " \t\r";
  const std::size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline ConfigFile parse_config_text(const std::string& text) {
  ConfigFile cfg;
  cfg.raw = text;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("config line " + std::to_string(lineno) +
                           ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error("config line " + std::to_string(lineno) +
                           ": empty section name");
      cfg.sections[section];  // empty sections are legal
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key = value");
    if (section.empty())
      throw config_error("config line " + std::to_string(lineno) +
                         ": key outside of any [section]");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineno) +
                         ": empty key");
    auto [it, inserted] = cfg.sections[section].emplace(key, value);
    (void)it;
    if (!inserted)
      throw config_error("config line " + std::to_string(lineno) +
                         ": duplicate key '" + key + "' in [" + section + "]");
  }
  return cfg;
}

inline ConfigFile load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

inline const std::string& get_string(const ConfigFile& cfg,
                                     const std::string& section,
                                     const std::string& key) {
  auto sit = cfg.sections.find(section);
  if (sit == cfg.sections.end())
    throw config_error("missing config section [" + section + "]");
  auto kit = sit->second.find(key);
  if (kit == sit->second.end())
    throw config_error("missing config key '" + key + "' in [" + section + "]");
  return kit->second;
}

inline std::string get_string_or(const ConfigFile& cfg,
                                 const std::string& section,
                                 const std::string& key,
                                 const std::string& fallback) {
  return cfg.has_key(section, key) ? get_string(cfg, section, key) : fallback;
}

namespace detail {

inline double parse_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.empty()) throw config_error(where + ": empty numeric value");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw config_error(where + ": cannot parse number from '" + t + "'");
  return v;
}

inline long long parse_long(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.empty()) throw config_error(where + ": empty integer value");
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw config_error(where + ": cannot parse integer from '" + t + "'");
  return v;
}

}  // namespace detail

inline double get_double(const ConfigFile& cfg, const std::string& section,
                         const std::string& key) {
  return detail::parse_double(get_string(cfg, section, key),
                              "[" + section + "] " + key);
}

inline double get_double_or(const ConfigFile& cfg, const std::string& section,
                            const std::string& key, double fallback) {
  if (!cfg.has_key(section, key)) return fallback;
  return get_double(cfg, section, key);
}

inline long long get_long(const ConfigFile& cfg, const std::string& section,
                          const std::string& key) {
  return detail::parse_long(get_string(cfg, section, key),
                            "[" + section + "] " + key);
}

inline long long get_long_or(const ConfigFile& cfg, const std::string& section,
                             const std::string& key, long long fallback) {
  if (!cfg.has_key(section, key)) return fallback;
  return get_long(cfg, section, key);
}

inline int get_int_or(const ConfigFile& cfg, const std::string& section,
                      const std::string& key, int fallback) {
  return static_cast<int>(get_long_or(cfg, section, key, fallback));
}

// Whitespace-separated list of numbers, e.g. "0.25 0.0625 0.015625".
inline std::vector<double> get_double_list(const ConfigFile& cfg,
                                           const std::string& section,
                                           const std::string& key) {
  const std::string& text = get_string(cfg, section, key);
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok)
    out.push_back(
        detail::parse_double(tok, "[" + section + "] " + key));
  if (out.empty())
    throw config_error("[" + section + "] " + key + ": empty list");
  return out;
}

}  // namespace nonlocal
