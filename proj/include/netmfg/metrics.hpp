#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netmfg/environment.hpp"
#include "netmfg/types.hpp"

namespace netmfg {

struct RunState;

enum class Metric { Exploitability, AvgReturn, PolicyDivergence };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& name);

struct MetricRow {
  int k = 0;
  Metric metric = Metric::AvgReturn;
  double value = 0.0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

/// Time-indexed metrics of one trial.
class RunLog {
 public:
  RunLog() = default;
  RunLog(std::uint64_t seed, std::string config_digest) : seed_(seed), digest_(std::move(config_digest)) {}

  /// Throws std::logic_error on a duplicate (k, metric) or a decreasing k.
  void record(int k, Metric metric, double value);

  std::span<const MetricRow> rows() const { return rows_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& config_digest() const { return digest_; }
  void set_config_digest(std::string digest) { digest_ = std::move(digest); }

  /// Value recorded for (k, metric), if any.
  std::optional<double> find(int k, Metric metric) const;
  /// All (k, value) pairs of one metric in k order.
  std::vector<std::pair<int, double>> series(Metric metric) const;

  friend bool operator==(const RunLog&, const RunLog&) = default;

 private:
  std::uint64_t seed_ = 0;
  std::string digest_;
  std::vector<MetricRow> rows_;
};

/// (1/N) sum_i sup_s ||pi_i(s) - pi_0(s)||_1
double policy_divergence(std::span<const Policy> policies);

/// Arithmetic mean of per-agent discounted returns.
double average_return(std::span<const double> per_agent_discounted_returns);

/// Approximate exploitability on a copy of `snapshot`. Agent 0 deviates and
/// runs `probe_loops` iterations of the learning core while every other policy
/// stays frozen. Returns the deviator's best per-loop discounted return minus
/// the mean (over the same loops) of the other agents' mean return. With a
/// single agent the baseline is the deviator's own first-loop return.
double exploitability_approx(const RunState& snapshot, int probe_loops, const Hyperparams& hp,
                             const GameKind& game, const GridSpec& grid);

struct AggregateRow {
  int k = 0;
  Metric metric = Metric::AvgReturn;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t n_trials = 0;
};

/// Mean and divisor-n standard deviation per (k, metric) across trials.
/// Throws std::invalid_argument if the logs carry different config digests.
std::vector<AggregateRow> aggregate_trials(std::span<const RunLog> logs);

}  // namespace netmfg
