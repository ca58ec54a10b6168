#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annokn/pipeline.hpp"

namespace annokn {

/// `key = value` lines; blank lines and `#` comments are skipped. Typed
/// getters throw ConfigError naming the key on a bad value.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  std::optional<std::string> get(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long long> get_int(const std::string& key) const;
  std::optional<std::uint64_t> get_u64(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  /// Comma-separated doubles.
  std::optional<std::vector<double>> get_doubles(const std::string& key) const;

  std::string require(const std::string& key) const;

  /// Throws ConfigError on the first key not in `allowed`.
  void check_keys(const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> entries_;
};

/// Keys understood by apply_pipeline_keys.
const std::vector<std::string>& pipeline_keys();

/// Overwrites fields of `config` for every pipeline key present.
void apply_pipeline_keys(const KeyValueConfig& kv, PipelineConfig& config);

/// "a,b,c" (explicit, descending) or "auto:<count>:<min_ratio>".
void parse_lambda_grid(const std::string& spec, PipelineConfig& config);

std::vector<std::string> split_commas(const std::string& text);

}  // namespace annokn
