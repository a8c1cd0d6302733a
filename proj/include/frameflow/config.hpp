#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace frameflow {

// Plain-text key/value configuration grouped into [sections]. Lines are
// `key = value`; '#' and ';' start comments. Consumers declare the keys they
// understand; anything else is rejected with the offending key named.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::filesystem::path& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> find(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const;

  // Overrides take `section.key=value` form.
  void apply_override(const std::string& assignment);

  // Throws ConfigError when a present section holds a key outside `known`.
  void require_known_keys(const std::string& section, const std::set<std::string>& known) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

  // Stable content hash for run manifests.
  std::uint64_t content_hash() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::string origin_;
};

std::uint64_t fnv1a64(const void* data, std::size_t size);

}  // namespace frameflow
