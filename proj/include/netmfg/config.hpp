#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "netmfg/environment.hpp"
#include "netmfg/orchestrator.hpp"
#include "netmfg/types.hpp"

namespace netmfg {

/// Parse or validation failure. `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& key, const std::string& message);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Everything needed to reproduce a batch of trials.
struct ExperimentConfig {
  Hyperparams hp;
  GameKind::Kind game = GameKind::Kind::Cluster;
  std::vector<StateIndex> targets;  // empty: the four corners
  GridSpec grid;
  int trials = 10;
  std::uint64_t base_seed = 0;
  MetricsOptions metrics;
  std::string output_dir = "out";

  GameKind game_kind() const;
  /// Hyperparams of trial `index` (seed = base_seed + index).
  Hyperparams trial_hyperparams(int index) const;
  void validate() const;
};

/// Flat `key = value` text with `#` comments. Omitted keys keep their
/// defaults; unknown keys, duplicates, bad values and range violations throw
/// ConfigError carrying the line number.
ExperimentConfig parse_config(const std::string& text);

/// Sets one key from its textual value (used by parse_config and sweeps).
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line = 0);

/// Every key in sorted order, one `key = value` per line.
std::string serialise_config(const ExperimentConfig& cfg);

/// Stable 64-bit FNV-1a hash (hex) of the sorted key = value lines, excluding output_dir.
std::string config_digest(const ExperimentConfig& cfg);

/// All recognised keys, sorted.
std::vector<std::string> config_keys();

/// `%.17g`: enough digits to reproduce the binary double exactly.
std::string format_double(double v);

}  // namespace netmfg
