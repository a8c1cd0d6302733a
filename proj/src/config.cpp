#include "frameflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "frameflow/errors.hpp"

namespace frameflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path.string());
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile config;
  config.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
      }
      config.sections_[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    config.sections_[section][key] = value;
  }
  return config;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> ConfigFile::find(const std::string& section,
                                            const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) {
    return std::nullopt;
  }
  const auto k = s->second.find(key);
  if (k == s->second.end()) {
    return std::nullopt;
  }
  return k->second;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  return find(section, key).value_or(fallback);
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  const auto value = find(section, key);
  if (!value) {
    return fallback;
  }
  char* end = nullptr;
  const double parsed = std::strtod(value->c_str(), &end);
  if (end == value->c_str() || *end != '\0') {
    throw ConfigError(section + "." + key + ": cannot parse '" + *value + "' as a number");
  }
  return parsed;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  const auto value = find(section, key);
  if (!value) {
    return fallback;
  }
  char* end = nullptr;
  const long parsed = std::strtol(value->c_str(), &end, 10);
  if (end == value->c_str() || *end != '\0') {
    throw ConfigError(section + "." + key + ": cannot parse '" + *value + "' as an integer");
  }
  return static_cast<int>(parsed);
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
  const auto value = find(section, key);
  if (!value) {
    return fallback;
  }
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(value->c_str(), &end, 10);
  if (end == value->c_str() || *end != '\0') {
    throw ConfigError(section + "." + key + ": cannot parse '" + *value + "' as an integer");
  }
  return parsed;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  const auto value = find(section, key);
  if (!value) {
    return fallback;
  }
  std::string v = *value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw ConfigError(section + "." + key + ": cannot parse '" + *value + "' as a boolean");
}

std::vector<double> ConfigFile::get_double_list(const std::string& section, const std::string& key,
                                                const std::vector<double>& fallback) const {
  const auto value = find(section, key);
  if (!value) {
    return fallback;
  }
  std::vector<double> out;
  std::size_t start = 0;
  const std::string& text = *value;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      comma = text.size();
    }
    const std::string cell = trim(text.substr(start, comma - start));
    if (!cell.empty()) {
      char* end = nullptr;
      const double parsed = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw ConfigError(section + "." + key + ": cannot parse '" + cell + "' as a number");
      }
      out.push_back(parsed);
    }
    start = comma + 1;
  }
  if (out.empty()) {
    throw ConfigError(section + "." + key + ": empty list");
  }
  return out;
}

void ConfigFile::apply_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' must have section.key=value form");
  }
  const std::string target = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const std::size_t dot = target.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= target.size()) {
    throw ConfigError("override '" + assignment + "' must have section.key=value form");
  }
  sections_[target.substr(0, dot)][target.substr(dot + 1)] = value;
}

void ConfigFile::require_known_keys(const std::string& section,
                                    const std::set<std::string>& known) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) {
    return;
  }
  for (const auto& [key, value] : s->second) {
    if (known.count(key) == 0) {
      throw ConfigError("unknown config key [" + section + "] " + key);
    }
  }
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t ConfigFile::content_hash() const {
  std::string flat;
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, value] : entries) {
      flat += section;
      flat += '\x1f';
      flat += key;
      flat += '\x1f';
      flat += value;
      flat += '\x1e';
    }
  }
  return fnv1a64(flat.data(), flat.size());
}

}  // namespace frameflow
