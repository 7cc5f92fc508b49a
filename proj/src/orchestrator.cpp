#include "netmfg/orchestrator.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace netmfg {

namespace {

constexpr int kWarmupSteps = 2;

std::vector<char> learner_mask(const Hyperparams& hp, std::size_t n) {
  std::vector<char> mask(n, hp.architecture == Architecture::Centralised ? 0 : 1);
  if (n > 0) mask[0] = 1;
  return mask;
}

StateIndex random_cell(Rng& rng, const GridSpec& grid) {
  return std::uniform_int_distribution<StateIndex>(0, grid.n_states() - 1)(rng);
}

}  // namespace

RunState make_initial_state(const Hyperparams& hp, const GridSpec& grid) {
  RunState run;
  run.seed = hp.seed;
  run.population_rng = make_stream(hp.seed, kPopulationStream);
  run.failure_rng = make_stream(hp.seed, kFailureStream);
  Rng init = make_stream(hp.seed, kInitialStateStream);

  const std::size_t n = hp.n_agents;
  const std::size_t n_states = grid.n_states();
  const double q0 = q_max(hp.gamma, hp.lambda, kNumActions);
  run.states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) run.states.push_back(random_cell(init, grid));
  run.policies.assign(n, uniform_policy(n_states, kNumActions));
  run.qtables.assign(n, QTable(n_states, kNumActions, q0));
  run.buffers.assign(n, ReplayBuffer(static_cast<std::size_t>(std::max(hp.M_pg, 0))));
  run.sigmas.assign(n, 0.0);
  run.lags.assign(n, TrajectoryLag{});
  run.rngs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) run.rngs.push_back(make_stream(hp.seed, i));
  return run;
}

StepOutcome take_step(RunState& run, const GameKind& game, const GridSpec& grid, double lambda) {
  const std::size_t n = run.n_agents();
  std::vector<Action> actions(n);
  StepOutcome out;
  out.bonuses.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = run.policies[i].row(run.states[i]);
    actions[i] = action_from_index(sample_categorical(row, run.rngs[i]));
    if (lambda != 0.0) out.bonuses[i] = entropy_h(row, lambda);
  }
  StepResult step = env_step_all(run.states, actions, game, grid);
  for (std::size_t i = 0; i < n; ++i) {
    run.lags[i].push({run.states[i], to_index(actions[i]), step.rewards[i]});
  }
  run.states = std::move(step.next_states);
  out.rewards = std::move(step.rewards);
  ++run.t;
  return out;
}

std::vector<double> evaluate_sigma(RunState& run, int E, double gamma, double lambda, const GameKind& game,
                                   const GridSpec& grid) {
  std::vector<double> sigma(run.n_agents(), 0.0);
  double discount = 1.0;
  for (int e = 0; e < E; ++e) {
    const StepOutcome out = take_step(run, game, grid, lambda);
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] += discount * (out.rewards[i] + out.bonuses[i]);
    discount *= gamma;
  }
  return sigma;
}

std::vector<char> inject_update_failure(int /*k*/, double p_fail, std::size_t n_learners, Rng& rng) {
  if (!(p_fail >= 0.0 && p_fail <= 1.0)) throw std::invalid_argument("inject_update_failure: p_fail outside [0, 1]");
  std::vector<char> skip(n_learners, 0);
  if (p_fail == 0.0) return skip;
  for (auto& flag : skip) flag = uniform01(rng) < p_fail ? 1 : 0;
  return skip;
}

void population_add_event(RunState& run, std::size_t n_add, Rng& rng, const Hyperparams& hp,
                          const GridSpec& grid) {
  const std::size_t n_states = grid.n_states();
  const double q0 = q_max(hp.gamma, hp.lambda, kNumActions);
  for (std::size_t j = 0; j < n_add; ++j) {
    const std::size_t index = run.n_agents();
    run.states.push_back(random_cell(rng, grid));
    run.policies.push_back(uniform_policy(n_states, kNumActions));
    run.qtables.emplace_back(n_states, kNumActions, q0);
    run.buffers.emplace_back(static_cast<std::size_t>(std::max(hp.M_pg, 0)));
    run.sigmas.push_back(0.0);
    run.lags.emplace_back();
    run.rngs.push_back(make_stream(run.seed, index));
  }
}

std::vector<double> learning_core(RunState& run, const Hyperparams& hp, const GameKind& game,
                                  const GridSpec& grid, std::span<const char> learners) {
  const std::size_t n = run.n_agents();
  const std::size_t n_states = grid.n_states();
  const double q0 = q_max(hp.gamma, hp.lambda, kNumActions);
  const bool replay = hp.algorithm == Algorithm::Replay;

  // Regulariser of the frozen policy per (learner, state) for the TD target.
  std::vector<std::vector<double>> bonus(n);
  for (std::size_t i = 0; i < n; ++i) {
    run.lags[i].reset();
    if (!learners[i]) continue;
    run.qtables[i] = QTable(n_states, kNumActions, q0);
    run.buffers[i].clear();
    run.buffers[i].set_capacity(static_cast<std::size_t>(hp.M_pg));
    bonus[i].assign(n_states, 0.0);
    if (hp.lambda != 0.0) {
      for (StateIndex s = 0; s < n_states; ++s) bonus[i][s] = entropy_h(run.policies[i].row(s), hp.lambda);
    }
  }

  BetaSchedule schedule{hp.beta_schedule, hp.beta, 16.0};
  if (!replay && schedule.kind == BetaSchedule::Kind::Theoretical)
    schedule.t0 = t0_of(hp.gamma, hp.delta_mix, hp.p_inf);

  for (int w = 0; w < kWarmupSteps; ++w) take_step(run, game, grid, hp.lambda);

  std::vector<double> returns(n, 0.0);
  double discount = 1.0;
  for (int m = 0; m < hp.M_pg; ++m) {
    for (int j = 0; j < hp.M_td; ++j) {
      const StepOutcome out = take_step(run, game, grid, hp.lambda);
      for (std::size_t i = 0; i < n; ++i) returns[i] += discount * (out.rewards[i] + out.bonuses[i]);
      discount *= hp.gamma;
    }
    const double beta_m = replay ? hp.beta : beta_at(schedule, m, hp.gamma);
    for (std::size_t i = 0; i < n; ++i) {
      if (!learners[i] || !run.lags[i].complete()) continue;
      const Transition zeta = run.lags[i].transition();
      if (replay) run.buffers[i].push(zeta);
      else td_update_with_bonus(run.qtables[i], zeta, bonus[i][zeta.s], beta_m, hp.gamma);
    }
  }

  if (replay) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!learners[i]) continue;
      run.qtables[i] = buffer_replay(run.buffers[i], std::move(run.qtables[i]), run.policies[i], hp.L, hp.beta,
                                     hp.lambda, hp.gamma, run.rngs[i]);
    }
  }
  return returns;
}

void apply_policy_update(RunState& run, const Hyperparams& hp, std::span<const char> learners,
                         std::span<const char> skip) {
  for (std::size_t i = 0; i < run.n_agents(); ++i) {
    if (!learners[i] || skip[i]) continue;
    run.policies[i] = pma_update(run.qtables[i], run.policies[i], hp.eta, hp.lambda);
  }
}

void communication_phase(RunState& run, const Hyperparams& hp, const GameKind& game, const GridSpec& grid,
                         int k) {
  const int rounds = hp.effective_C();
  if (rounds <= 0) return;
  const Temperature tau = tau_at(hp.tau, hp.K, k);
  for (int c = 0; c < rounds; ++c) {
    // The network follows the agents, so it is rebuilt from the current cells each round.
    const CommGraph g = build_graph(run.states, grid, hp.broadcast_radius_fraction);
    RoundResult round = communication_round(run.policies, run.sigmas, g, tau, run.rngs);
    run.policies = std::move(round.policies);
    run.sigmas = std::move(round.sigmas);
    take_step(run, game, grid, hp.lambda);
  }
}

namespace {

RunLog run_loop(const Hyperparams& hp, const GameKind& game, const GridSpec& grid, const MetricsOptions& opts,
                const IterationObserver& observer) {
  hp.validate();
  grid.validate();
  game.validate(grid);

  RunState run = make_initial_state(hp, grid);
  RunLog log(hp.seed, "");

  for (int k = 0; k <= hp.K; ++k) {
    run.k = k;
    if (hp.population_add && hp.population_add->k_add == k && hp.population_add->n_add > 0)
      population_add_event(run, hp.population_add->n_add, run.population_rng, hp, grid);

    // Metrics of pi_k: divergence now, exploitability on a fork, return from
    // this iteration's sampling phase.
    log.record(k, Metric::PolicyDivergence, policy_divergence(run.policies));
    if (opts.exploitability_every > 0 && k % opts.exploitability_every == 0) {
      log.record(k, Metric::Exploitability,
                 exploitability_approx(run, opts.exploitability_loops, hp, game, grid));
    }

    if (k == hp.K) {
      // Closing measurement of pi_K: sampling only, nobody learns.
      const std::vector<char> none(run.n_agents(), 0);
      log.record(k, Metric::AvgReturn, average_return(learning_core(run, hp, game, grid, none)));
      break;
    }

    const std::vector<char> learners = learner_mask(hp, run.n_agents());
    log.record(k, Metric::AvgReturn, average_return(learning_core(run, hp, game, grid, learners)));

    // Skip flags per agent slot; only learners draw.
    std::vector<char> skip(run.n_agents(), 0);
    if (hp.architecture == Architecture::Centralised) {
      skip[0] = inject_update_failure(k, hp.fail_prob, 1, run.failure_rng)[0];
    } else {
      skip = inject_update_failure(k, hp.fail_prob, run.n_agents(), run.failure_rng);
    }
    run.last_skip = skip;
    apply_policy_update(run, hp, learners, skip);

    if (hp.architecture == Architecture::Centralised && !skip[0]) {
      for (std::size_t i = 1; i < run.n_agents(); ++i) run.policies[i] = run.policies[0];
    }

    if (hp.algorithm == Algorithm::Replay || hp.sigma_mode == SigmaMode::Return) {
      run.sigmas = evaluate_sigma(run, hp.E, hp.gamma, hp.lambda, game, grid);
    } else {
      for (std::size_t i = 0; i < run.n_agents(); ++i) run.sigmas[i] = static_cast<double>(i);
    }

    communication_phase(run, hp, game, grid, k);
    if (observer) observer(run);
  }
  return log;
}

}  // namespace

RunLog run_theoretical(const Hyperparams& hp, const GameKind& game, const GridSpec& grid,
                       const MetricsOptions& opts) {
  Hyperparams h = hp;
  h.algorithm = Algorithm::Theoretical;
  return run_loop(h, game, grid, opts, {});
}

RunLog run_replay(const Hyperparams& hp, const GameKind& game, const GridSpec& grid, const MetricsOptions& opts) {
  Hyperparams h = hp;
  h.algorithm = Algorithm::Replay;
  return run_loop(h, game, grid, opts, {});
}

RunLog run_experiment(const Hyperparams& hp, const GameKind& game, const GridSpec& grid,
                      const MetricsOptions& opts) {
  return run_loop(hp, game, grid, opts, {});
}

RunLog run_experiment(const Hyperparams& hp, const GameKind& game, const GridSpec& grid,
                      const MetricsOptions& opts, const IterationObserver& observer) {
  return run_loop(hp, game, grid, opts, observer);
}

}  // namespace netmfg
