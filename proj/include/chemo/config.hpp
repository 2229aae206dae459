#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chemo/model.hpp"

namespace chemo {

/// Flat `key = value` file. '#' starts a comment; blank lines are skipped.
/// Duplicate keys are rejected at parse time.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> number_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Throws ConfigError naming the first key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
};

/// Model keys: n, R, k, sigma, M_lo, M_hi, mode. Missing keys are errors
/// except mode (default blowup).
ModelParams parse_model_params(const KeyValueConfig& cfg, Mode* mode_out = nullptr);

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

}  // namespace chemo
