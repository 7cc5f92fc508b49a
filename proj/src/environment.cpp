#include "netmfg/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netmfg {

GameKind GameKind::target_agreement(const GridSpec& grid, std::vector<StateIndex> targets) {
  GameKind g;
  g.kind = Kind::TargetAgreement;
  if (targets.empty()) {
    const std::size_t w = grid.width - 1;
    const std::size_t h = grid.height - 1;
    targets = {grid.index(0, 0), grid.index(w, 0), grid.index(0, h), grid.index(w, h)};
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  }
  g.targets = std::move(targets);
  return g;
}

bool GameKind::is_target(StateIndex s) const {
  return std::find(targets.begin(), targets.end(), s) != targets.end();
}

void GameKind::validate(const GridSpec& grid) const {
  if (kind != Kind::TargetAgreement) return;
  if (targets.empty()) throw std::invalid_argument("target agreement needs at least one target");
  auto sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("targets must be distinct");
  if (sorted.back() >= grid.n_states()) throw std::invalid_argument("target out of bounds");
}

StateIndex step_dynamics(StateIndex state, Action action, const GridSpec& grid) {
  std::size_t x = grid.x_of(state);
  std::size_t y = grid.y_of(state);
  switch (action) {
    case Action::Stay: break;
    case Action::North: if (y > 0) --y; break;
    case Action::South: if (y + 1 < grid.height) ++y; break;
    case Action::East: if (x + 1 < grid.width) ++x; break;
    case Action::West: if (x > 0) --x; break;
  }
  return grid.index(x, y);
}

double reward_raw(StateIndex state, const EmpiricalDistribution& mu, const GameKind& game) {
  const double share = mu[state];
  if (game.kind == GameKind::Kind::Cluster) return std::log(share);
  // Strictly more than the agent itself must be present.
  const bool shared = mu.counts[state] > 1;
  if (game.is_target(state) && shared) return share;
  return -1.0;
}

double reward_normalise(double raw, const GameKind& game, std::size_t n_agents) {
  double r = 0.0;
  if (game.kind == GameKind::Kind::Cluster) {
    if (n_agents <= 1) return 0.0;
    const double lo = std::log(1.0 / static_cast<double>(n_agents));
    r = (raw - lo) / (-lo);
  } else {
    r = (raw + 1.0) / 2.0;
  }
  return std::clamp(r, 0.0, 1.0);
}

StepResult env_step_all(std::span<const StateIndex> states, std::span<const Action> actions,
                        const GameKind& game, const GridSpec& grid) {
  if (states.size() != actions.size()) throw std::invalid_argument("env_step_all: length mismatch");
  StepResult out;
  out.distribution = empirical_distribution(states, grid.n_states());
  const std::size_t n = states.size();
  out.rewards.resize(n);
  out.next_states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.rewards[i] = reward_normalise(reward_raw(states[i], out.distribution, game), game, n);
    out.next_states[i] = step_dynamics(states[i], actions[i], grid);
  }
  return out;
}

std::string to_string(const GameKind& game) {
  return game.kind == GameKind::Kind::Cluster ? "cluster" : "target_agreement";
}

}  // namespace netmfg
