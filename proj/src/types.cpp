#include "netmfg/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netmfg {

void GridSpec::validate() const {
  if (width < 1 || height < 1) throw std::invalid_argument("grid width and height must be >= 1");
}

const char* action_name(Action a) {
  switch (a) {
    case Action::Stay: return "stay";
    case Action::North: return "north";
    case Action::South: return "south";
    case Action::East: return "east";
    case Action::West: return "west";
  }
  return "?";
}

Table::Table(std::size_t n_states, std::size_t n_actions, double fill)
    : n_states_(n_states), n_actions_(n_actions), data_(n_states * n_actions, fill) {}

void Policy::renormalise() {
  for (StateIndex s = 0; s < n_states(); ++s) {
    auto r = row(s);
    double sum = 0.0;
    for (double& p : r) {
      if (!(p > 0.0)) p = 0.0;
      sum += p;
    }
    if (sum <= 0.0) {
      std::fill(r.begin(), r.end(), 1.0 / static_cast<double>(r.size()));
      continue;
    }
    for (double& p : r) p /= sum;
  }
}

bool Policy::is_row_stochastic(double tol) const {
  for (StateIndex s = 0; s < n_states(); ++s) {
    double sum = 0.0;
    for (double p : row(s)) {
      if (p < 0.0 || p > 1.0 + tol || !std::isfinite(p)) return false;
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

void Hyperparams::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (K < 0) fail("K must be >= 0");
  if (M_pg < 0) fail("M_pg must be >= 0");
  if (M_td < 0) fail("M_td must be >= 0");
  if (C < 0) fail("C must be >= 0");
  if (L < 0) fail("L must be >= 0");
  if (E < 0) fail("E must be >= 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (!(beta > 0.0)) fail("beta must be > 0");
  if (!(eta > 0.0)) fail("eta must be > 0");
  if (!(lambda >= 0.0)) fail("lambda must be >= 0");
  if (tau.kind == TauSchedule::Kind::Fixed && !(tau.value > 0.0)) fail("tau_value must be > 0");
  if (!(p_inf > 0.0 && p_inf <= 1.0)) fail("p_inf must lie in (0, 1]");
  if (!(delta_mix > 0.0 && delta_mix <= 1.0)) fail("delta_mix must lie in (0, 1]");
  if (n_agents < 1) fail("n_agents must be >= 1");
  if (!(broadcast_radius_fraction >= 0.0 && broadcast_radius_fraction <= 1.0))
    fail("broadcast_radius_fraction must lie in [0, 1]");
  if (!(fail_prob >= 0.0 && fail_prob <= 1.0)) fail("fail_prob must lie in [0, 1]");
  if (population_add && population_add->k_add < 0) fail("population_add_k must be >= 0");
}

double entropy_h(std::span<const double> u, double lambda) {
  double sum = 0.0;
  for (double p : u) {
    if (p < 0.0 || !std::isfinite(p)) throw std::invalid_argument("entropy_h: entries must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("entropy_h: vector must sum to 1");
  if (lambda == 0.0) return 0.0;
  double h = 0.0;
  for (double p : u) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return lambda * h;
}

double q_max(double gamma, double lambda, std::size_t n_actions) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("q_max: gamma must lie in [0, 1)");
  return (1.0 + lambda * std::log(static_cast<double>(n_actions))) / (1.0 - gamma);
}

Policy uniform_policy(std::size_t n_states, std::size_t n_actions) {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("uniform_policy: empty dimensions");
  return Policy(n_states, n_actions, 1.0 / static_cast<double>(n_actions));
}

EmpiricalDistribution empirical_distribution(std::span<const StateIndex> states, std::size_t n_states) {
  if (states.empty()) throw std::invalid_argument("empirical_distribution: no agents");
  EmpiricalDistribution mu;
  mu.n_agents = states.size();
  mu.counts.assign(n_states, 0);
  for (StateIndex s : states) {
    if (s >= n_states) throw std::out_of_range("empirical_distribution: state out of range");
    ++mu.counts[s];
  }
  mu.probs.resize(n_states);
  const double n = static_cast<double>(mu.n_agents);
  for (std::size_t s = 0; s < n_states; ++s) mu.probs[s] = static_cast<double>(mu.counts[s]) / n;
  return mu;
}

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::Centralised: return "centralised";
    case Architecture::Independent: return "independent";
    case Architecture::Networked: return "networked";
  }
  return "?";
}

std::string to_string(Algorithm a) { return a == Algorithm::Replay ? "replay" : "theoretical"; }

std::string to_string(SigmaMode m) { return m == SigmaMode::Return ? "return" : "index"; }

}  // namespace netmfg
