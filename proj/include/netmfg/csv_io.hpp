#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "netmfg/metrics.hpp"

namespace netmfg {

// Trial schema:     k,metric,value
// Aggregate schema: k,metric,mean,std,n_trials
// Reals use %.17g, lines end in LF. Rows are ordered by k, then by metric in
// the order exploitability, avg_return, policy_divergence.

std::string trial_csv(const RunLog& log);
std::string aggregate_csv(std::span<const AggregateRow> rows);

/// Parses trial CSV text; throws std::runtime_error on a schema violation.
RunLog parse_trial_csv(const std::string& text, std::uint64_t seed = 0, std::string digest = {});

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace netmfg
