#pragma once

#include <span>
#include <vector>

#include "netmfg/types.hpp"

namespace netmfg {

/// Reward structure of the two coordination games.
struct GameKind {
  enum class Kind { Cluster, TargetAgreement };
  Kind kind = Kind::Cluster;
  std::vector<StateIndex> targets;  // TargetAgreement only

  static GameKind cluster() { return {}; }
  /// Defaults to the four grid corners when `targets` is empty.
  static GameKind target_agreement(const GridSpec& grid, std::vector<StateIndex> targets = {});

  bool is_target(StateIndex s) const;
  void validate(const GridSpec& grid) const;
};

struct StepResult {
  std::vector<StateIndex> next_states;
  std::vector<double> rewards;
  EmpiricalDistribution distribution;  // measured at the pre-step states
};

/// Deterministic one-cell move; off-grid moves leave the state unchanged.
/// North decrements y, South increments y, West decrements x, East increments x.
StateIndex step_dynamics(StateIndex state, Action action, const GridSpec& grid);

/// Cluster: log mu(s). TargetAgreement: mu(s) on a target shared with others, else -1.
double reward_raw(StateIndex state, const EmpiricalDistribution& mu, const GameKind& game);

/// Affine map of the game's raw range onto [0, 1].
double reward_normalise(double raw, const GameKind& game, std::size_t n_agents);

/// Synchronous step of the whole population. Rewards use the distribution of
/// the current states; all agents then move.
StepResult env_step_all(std::span<const StateIndex> states, std::span<const Action> actions,
                        const GameKind& game, const GridSpec& grid);

std::string to_string(const GameKind& game);

}  // namespace netmfg
