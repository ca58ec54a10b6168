#include "annokn/config.hpp"

#include <charconv>
#include <fstream>

#include "annokn/error.hpp"

namespace annokn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key, "cannot parse '" + text + "'");
  return value;
}

}  // namespace

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string piece = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(number, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(number, "empty key");
    out.entries_[key] = trim(line.substr(eq + 1));
  }
  return out;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  return parse(in);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_number<double>(key, *v);
}

std::optional<long long> KeyValueConfig::get_int(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_number<long long>(key, *v);
}

std::optional<std::uint64_t> KeyValueConfig::get_u64(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_number<std::uint64_t>(key, *v);
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + *v + "'");
}

std::optional<std::vector<double>> KeyValueConfig::get_doubles(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::vector<double> out;
  for (const auto& piece : split_commas(*v)) out.push_back(parse_number<double>(key, piece));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::string KeyValueConfig::require(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ConfigError(key, "missing required key");
  return *v;
}

void KeyValueConfig::check_keys(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : entries_) {
    bool known = false;
    for (const auto& a : allowed) known = known || a == key;
    if (!known) throw ConfigError(key, "unknown key");
  }
}

const std::vector<std::string>& pipeline_keys() {
  static const std::vector<std::string> keys = {
      "lambda0_grid", "cv_folds",    "d",          "tau2",          "max_outer_iter", "outer_tol",
      "q",            "frac_train",  "pseudo_splits", "solver_tol", "max_sweeps",     "ridge_scale"};
  return keys;
}

void parse_lambda_grid(const std::string& spec, PipelineConfig& config) {
  if (spec.rfind("auto", 0) == 0) {
    config.lambda0_grid.clear();
    const auto first = spec.find(':');
    if (first == std::string::npos) return;
    const auto second = spec.find(':', first + 1);
    config.grid_size = static_cast<int>(parse_number<long long>("lambda0_grid", spec.substr(first + 1, second - first - 1)));
    if (second != std::string::npos) config.grid_min_ratio = parse_number<double>("lambda0_grid", spec.substr(second + 1));
    return;
  }
  config.lambda0_grid.clear();
  for (const auto& piece : split_commas(spec)) config.lambda0_grid.push_back(parse_number<double>("lambda0_grid", piece));
  if (config.lambda0_grid.empty()) throw ConfigError("lambda0_grid", "empty grid");
}

void apply_pipeline_keys(const KeyValueConfig& kv, PipelineConfig& config) {
  if (auto v = kv.get("lambda0_grid")) parse_lambda_grid(*v, config);
  if (auto v = kv.get_int("cv_folds")) config.cv_folds = static_cast<int>(*v);
  if (auto v = kv.get_double("d")) config.d = *v;
  if (auto v = kv.get_double("tau2")) config.tau2 = *v;
  if (auto v = kv.get_int("max_outer_iter")) config.max_outer_iter = static_cast<int>(*v);
  if (auto v = kv.get_double("outer_tol")) config.outer_tol = *v;
  if (auto v = kv.get_double("q")) config.q = *v;
  if (auto v = kv.get_double("frac_train")) config.frac_train = *v;
  if (auto v = kv.get_int("pseudo_splits")) config.pseudo_splits = static_cast<int>(*v);
  if (auto v = kv.get_double("solver_tol")) config.solver.tol = *v;
  if (auto v = kv.get_int("max_sweeps")) config.solver.max_sweeps = static_cast<int>(*v);
  if (auto v = kv.get_double("ridge_scale")) config.ridge_scale = *v;
}

}  // namespace annokn
