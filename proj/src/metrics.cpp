#include "netmfg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "netmfg/orchestrator.hpp"

namespace netmfg {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::Exploitability: return "exploitability";
    case Metric::AvgReturn: return "avg_return";
    case Metric::PolicyDivergence: return "policy_divergence";
  }
  return "?";
}

Metric metric_from_string(const std::string& name) {
  if (name == "exploitability") return Metric::Exploitability;
  if (name == "avg_return") return Metric::AvgReturn;
  if (name == "policy_divergence") return Metric::PolicyDivergence;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

void RunLog::record(int k, Metric metric, double value) {
  if (!rows_.empty() && k < rows_.back().k) throw std::logic_error("RunLog: k must be non-decreasing");
  for (auto it = rows_.rbegin(); it != rows_.rend() && it->k == k; ++it) {
    if (it->metric == metric) throw std::logic_error("RunLog: duplicate (k, metric)");
  }
  rows_.push_back({k, metric, value});
}

std::optional<double> RunLog::find(int k, Metric metric) const {
  for (const auto& row : rows_) {
    if (row.k == k && row.metric == metric) return row.value;
  }
  return std::nullopt;
}

std::vector<std::pair<int, double>> RunLog::series(Metric metric) const {
  std::vector<std::pair<int, double>> out;
  for (const auto& row : rows_) {
    if (row.metric == metric) out.emplace_back(row.k, row.value);
  }
  return out;
}

double policy_divergence(std::span<const Policy> policies) {
  if (policies.empty()) throw std::invalid_argument("policy_divergence: no policies");
  const Policy& ref = policies[0];
  double total = 0.0;
  for (std::size_t i = 1; i < policies.size(); ++i) {
    double sup = 0.0;
    for (StateIndex s = 0; s < ref.n_states(); ++s) {
      const auto a = policies[i].row(s);
      const auto b = ref.row(s);
      double l1 = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) l1 += std::abs(a[j] - b[j]);
      sup = std::max(sup, l1);
    }
    total += sup;
  }
  return total / static_cast<double>(policies.size());
}

double average_return(std::span<const double> per_agent_discounted_returns) {
  if (per_agent_discounted_returns.empty()) throw std::invalid_argument("average_return: no agents");
  double sum = 0.0;
  for (double v : per_agent_discounted_returns) sum += v;
  return sum / static_cast<double>(per_agent_discounted_returns.size());
}

double exploitability_approx(const RunState& snapshot, int probe_loops, const Hyperparams& hp,
                             const GameKind& game, const GridSpec& grid) {
  if (probe_loops < 1) throw std::invalid_argument("exploitability_approx: probe_loops must be >= 1");
  RunState fork = snapshot;
  const std::size_t n = fork.n_agents();
  std::vector<char> learners(n, 0);
  learners[0] = 1;
  const std::vector<char> no_skip(n, 0);

  double best = -std::numeric_limits<double>::infinity();
  double first = 0.0;
  double others_total = 0.0;
  for (int l = 0; l < probe_loops; ++l) {
    const std::vector<double> returns = learning_core(fork, hp, game, grid, learners);
    apply_policy_update(fork, hp, learners, no_skip);
    best = std::max(best, returns[0]);
    if (l == 0) first = returns[0];
    if (n > 1) {
      double sum = 0.0;
      for (std::size_t i = 1; i < n; ++i) sum += returns[i];
      others_total += sum / static_cast<double>(n - 1);
    }
  }
  const double baseline = n > 1 ? others_total / probe_loops : first;
  return best - baseline;
}

std::vector<AggregateRow> aggregate_trials(std::span<const RunLog> logs) {
  if (logs.empty()) return {};
  for (const auto& log : logs) {
    if (log.config_digest() != logs[0].config_digest())
      throw std::invalid_argument("aggregate_trials: logs come from different configs");
  }
  std::map<std::pair<int, Metric>, std::vector<double>> grouped;
  for (const auto& log : logs) {
    for (const auto& row : log.rows()) grouped[{row.k, row.metric}].push_back(row.value);
  }
  std::vector<AggregateRow> out;
  out.reserve(grouped.size());
  for (const auto& [key, values] : grouped) {
    // Sort so the floating-point sums do not depend on trial order.
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / n;
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    out.push_back({key.first, key.second, mean, std::sqrt(sq / n), v.size()});
  }
  return out;
}

}  // namespace netmfg
