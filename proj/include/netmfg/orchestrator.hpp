#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "netmfg/comms.hpp"
#include "netmfg/environment.hpp"
#include "netmfg/learning.hpp"
#include "netmfg/metrics.hpp"
#include "netmfg/rng.hpp"
#include "netmfg/types.hpp"

namespace netmfg {

/// One executed environment step of one agent.
struct StepRecord {
  StateIndex s = 0;
  std::size_t a = 0;
  double r = 0.0;
};

/// Last two steps taken under the current outer iteration. Together they form
/// the lagged SARSA tuple zeta_{t-2}.
class TrajectoryLag {
 public:
  void reset() { count_ = 0; }
  void push(const StepRecord& rec) {
    older_ = newer_;
    newer_ = rec;
    if (count_ < 2) ++count_;
  }
  bool complete() const { return count_ == 2; }
  Transition transition() const { return {older_.s, older_.a, older_.r, newer_.s, newer_.a}; }

 private:
  StepRecord older_;
  StepRecord newer_;
  int count_ = 0;
};

/// Live system state. Per-agent data is stored as parallel arrays of length N.
struct RunState {
  long long t = 0;
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<StateIndex> states;
  std::vector<Policy> policies;
  std::vector<QTable> qtables;
  std::vector<ReplayBuffer> buffers;
  std::vector<double> sigmas;
  std::vector<Rng> rngs;
  std::vector<TrajectoryLag> lags;

  Rng population_rng;  // states of joining agents
  Rng failure_rng;     // update-failure draws
  std::vector<char> last_skip;  // failure flags of the most recent iteration, per learner slot

  std::size_t n_agents() const { return states.size(); }
};

/// What a synchronous step produced for every agent.
struct StepOutcome {
  std::vector<double> rewards;
  std::vector<double> bonuses;  // h(pi_i(s_i)) at the pre-step state
};

/// Uniform policies, Q at q_max, uniform-random initial cells from the seed.
RunState make_initial_state(const Hyperparams& hp, const GridSpec& grid);

/// Every agent samples from its own policy and rng, the population steps
/// synchronously and t advances by one.
StepOutcome take_step(RunState& run, const GameKind& game, const GridSpec& grid, double lambda);

/// Runs E steps under the current policies and returns each agent's
/// sum_e gamma^e (r + h(pi(s))) with e counted from the start of the phase.
std::vector<double> evaluate_sigma(RunState& run, int E, double gamma, double lambda, const GameKind& game,
                                   const GridSpec& grid);

/// Independent Bernoulli(p_fail) skip flags, one per learner.
std::vector<char> inject_update_failure(int k, double p_fail, std::size_t n_learners, Rng& rng);

/// Appends n_add agents with uniform policies, q_max tables, empty buffers,
/// uniform-random cells drawn from `rng` and rng substreams keyed by index.
void population_add_event(RunState& run, std::size_t n_add, Rng& rng, const Hyperparams& hp,
                          const GridSpec& grid);

/// Q reset, two warm-up steps, then M_pg x (M_td steps + one lagged
/// transition per learner). The replay algorithm buffers the transitions and
/// replays them L times; the theoretical algorithm applies each one at once
/// with beta_m. `learners` flags the agents that learn (others only act).
/// Returns every agent's discounted return over the M_pg x M_td steps.
std::vector<double> learning_core(RunState& run, const Hyperparams& hp, const GameKind& game,
                                  const GridSpec& grid, std::span<const char> learners);

/// PMA step for every learner whose skip flag is clear.
void apply_policy_update(RunState& run, const Hyperparams& hp, std::span<const char> learners,
                         std::span<const char> skip);

/// C rounds of build graph, adopt, step.
void communication_phase(RunState& run, const Hyperparams& hp, const GameKind& game, const GridSpec& grid,
                         int k);

struct MetricsOptions {
  int exploitability_every = 2;  // 0 disables the probe
  int exploitability_loops = 40;
};

/// Networked learning from a single run with per-step TD updates.
RunLog run_theoretical(const Hyperparams& hp, const GameKind& game, const GridSpec& grid,
                       const MetricsOptions& opts = {});

/// Networked learning with an experience replay buffer.
RunLog run_replay(const Hyperparams& hp, const GameKind& game, const GridSpec& grid,
                  const MetricsOptions& opts = {});

/// Dispatches on hp.algorithm.
RunLog run_experiment(const Hyperparams& hp, const GameKind& game, const GridSpec& grid,
                      const MetricsOptions& opts = {});

/// Called after every completed outer iteration with the live state.
using IterationObserver = std::function<void(const RunState&)>;

RunLog run_experiment(const Hyperparams& hp, const GameKind& game, const GridSpec& grid,
                      const MetricsOptions& opts, const IterationObserver& observer);

}  // namespace netmfg
