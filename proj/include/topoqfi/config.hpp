#pragma once

#include "topoqfi/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace topoqfi {

/// Config validation failure carrying every problem found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out = "invalid config:";
    for (const auto& e : errors) out += "\n  - " + e;
    return out;
  }
  std::vector<std::string> errors_;
};

struct ModelConfig {
  std::string family;
  std::map<std::string, double> params;  // family-specific keys: m, t1, t2, phi, M, N
  bool flatten = false;
  std::optional<std::vector<double>> flat_energies;

  bool operator==(const ModelConfig&) const = default;
};

struct SpeedLimitConfig {
  double q_min = 0.01;
  double q_max = 1.0;
  int n_q = 32;
  double v0 = 1.0;

  bool operator==(const SpeedLimitConfig&) const = default;
};

/// Validated run configuration; all numeric ranges checked before any compute.
struct RunConfig {
  ModelConfig model;
  int nx = 64;
  int ny = 64;
  std::vector<int> filled = {1};  // 1-based band indices
  std::vector<double> q_list = {0.02, 0.05, 0.1, 0.2};
  Direction directions = Direction::Averaged;
  int n_alpha = 16;
  double beta = std::numeric_limits<double>::infinity();
  bool bounds = true;
  SpeedLimitConfig speedlimit;
  std::string output = "out";
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const = default;
};

/// Parse and validate; throws ConfigError listing all validation errors (or
/// the syntax error with its line number).
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& j);
inline RunConfig parse_config(const char* text) { return parse_config(std::string(text)); }

nlohmann::json serialize_config(const RunConfig& config);

/// Number of bands of the configured family (2 for every registered family).
int model_dim(const ModelConfig& model);

}  // namespace topoqfi
