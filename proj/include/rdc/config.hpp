#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rdc {

/// Flat key = value configuration with dotted section keys.
/// Lines starting with '#' (or after a '#') are comments; blank lines skipped.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  /// Throws ConfigError naming the key when missing.
  std::string require(const std::string& key) const;
  double require_double(const std::string& key) const;
  int require_int(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace rdc
