#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "netmfg/config.hpp"

namespace netmfg {

/// Overrides accepted on the command line.
struct RunOverrides {
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
};

/// Root for relative output directories.
inline constexpr const char* kOutputRootEnv = "NETMFG_OUTPUT_ROOT";

/// Resolves the output directory: explicit override, else the config's
/// output_dir (relative paths are placed under $NETMFG_OUTPUT_ROOT if set).
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg, const RunOverrides& ov);

/// Runs every trial of `cfg` into `dir`: trial_<seed>.csv per trial,
/// aggregate.csv and config.txt (the resolved config).
void execute_runs(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& log);

struct SweepVariant {
  std::string name;   // key=value pairs joined by ','
  std::string label;  // values only, joined by ','
  ExperimentConfig cfg;
};

/// `vary` lists (`key=v1,v2,...`) form a cross product; each `also` value is
/// one extra variant on top of the base config.
std::vector<SweepVariant> expand_sweep(const ExperimentConfig& base, const std::vector<std::string>& vary,
                                       const std::vector<std::string>& also);

/// Manifest schema: variant,label,digest,aggregate_csv (paths relative to the manifest).
void execute_sweep(const std::vector<SweepVariant>& variants, const std::filesystem::path& dir, std::ostream& log);

/// Recomputes aggregate.csv from the trial CSVs in `dir` (digest from config.txt).
void execute_aggregate(const std::filesystem::path& dir, const std::filesystem::path& out, std::ostream& log);

/// Entry point for `netmfg run|sweep|aggregate ...`; returns the exit status.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netmfg
