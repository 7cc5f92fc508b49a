#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace netmfg {

using StateIndex = std::size_t;

/// Rectangular grid of cells. Cell (x, y) has state index y * width + x.
struct GridSpec {
  std::size_t width = 8;
  std::size_t height = 8;

  std::size_t n_states() const { return width * height; }
  StateIndex index(std::size_t x, std::size_t y) const { return y * width + x; }
  std::size_t x_of(StateIndex s) const { return s % width; }
  std::size_t y_of(StateIndex s) const { return s / width; }

  void validate() const;
};

enum class Action : std::uint8_t { Stay = 0, North = 1, South = 2, East = 3, West = 4 };

inline constexpr std::size_t kNumActions = 5;

inline Action action_from_index(std::size_t a) { return static_cast<Action>(a); }
inline std::size_t to_index(Action a) { return static_cast<std::size_t>(a); }
const char* action_name(Action a);

// Row-major |S| x |A| table of doubles shared by Policy and QTable.
class Table {
 public:
  Table() = default;
  Table(std::size_t n_states, std::size_t n_actions, double fill);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  double& at(StateIndex s, std::size_t a) { return data_[s * n_actions_ + a]; }
  double at(StateIndex s, std::size_t a) const { return data_[s * n_actions_ + a]; }

  std::span<double> row(StateIndex s) { return {data_.data() + s * n_actions_, n_actions_}; }
  std::span<const double> row(StateIndex s) const {
    return {data_.data() + s * n_actions_, n_actions_};
  }

  std::span<const double> values() const { return data_; }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> data_;
};

/// Row-stochastic table: row s is the action distribution at state s.
class Policy : public Table {
 public:
  Policy() = default;
  Policy(std::size_t n_states, std::size_t n_actions, double fill) : Table(n_states, n_actions, fill) {}

  /// Clamps negatives to zero and rescales each row to sum to one.
  void renormalise();
  /// True when every row is a probability vector within `tol`.
  bool is_row_stochastic(double tol = 1e-9) const;

  friend bool operator==(const Policy&, const Policy&) = default;
};

/// Action-value table updated by TD learning.
class QTable : public Table {
 public:
  QTable() = default;
  QTable(std::size_t n_states, std::size_t n_actions, double fill) : Table(n_states, n_actions, fill) {}

  friend bool operator==(const QTable&, const QTable&) = default;
};

/// Fraction of the population at each state. Entries are count / n_agents.
struct EmpiricalDistribution {
  std::vector<double> probs;
  std::vector<std::size_t> counts;
  std::size_t n_agents = 0;

  double operator[](StateIndex s) const { return probs[s]; }
  std::size_t size() const { return probs.size(); }
};

/// SARSA tuple (s, a, r, s', a').
struct Transition {
  StateIndex s = 0;
  std::size_t a = 0;
  double r = 0.0;
  StateIndex s_next = 0;
  std::size_t a_next = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

enum class Architecture { Centralised, Independent, Networked };
enum class Algorithm { Replay, Theoretical };
// How the theoretical algorithm tags policies before adoption. The replay
// algorithm always uses the E-step discounted return.
enum class SigmaMode { AgentIndex, Return };

struct TauSchedule {
  enum class Kind { Annealed, Fixed, MaxSelection };
  Kind kind = Kind::Annealed;
  double value = 100.0;  // used by Fixed only
};

struct BetaSchedule {
  enum class Kind { Fixed, Theoretical };
  Kind kind = Kind::Fixed;
  double beta = 0.1;   // Fixed
  double t0 = 16.0;    // Theoretical
};

struct PopulationEvent {
  int k_add = 0;
  std::size_t n_add = 0;
};

/// Every learning, loop and scenario parameter of a single run.
struct Hyperparams {
  int K = 200;
  int M_pg = 500;
  int M_td = 1;
  int C = 1;
  int L = 100;
  int E = 100;
  double gamma = 0.9;
  double beta = 0.1;
  BetaSchedule::Kind beta_schedule = BetaSchedule::Kind::Fixed;
  double eta = 0.01;
  double lambda = 0.0;
  TauSchedule tau;
  double p_inf = 1.0;
  double delta_mix = 1.0;
  std::size_t n_agents = 250;
  double broadcast_radius_fraction = 1.0;
  Architecture architecture = Architecture::Networked;
  Algorithm algorithm = Algorithm::Replay;
  SigmaMode sigma_mode = SigmaMode::AgentIndex;
  double fail_prob = 0.0;
  std::optional<PopulationEvent> population_add;
  std::uint64_t seed = 0;

  /// Communication rounds actually executed; zero unless networked.
  int effective_C() const { return architecture == Architecture::Networked ? C : 0; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// -lambda * sum u log u with 0 log 0 = 0.
double entropy_h(std::span<const double> u, double lambda);

/// (1 + lambda log n_actions) / (1 - gamma).
double q_max(double gamma, double lambda, std::size_t n_actions);

Policy uniform_policy(std::size_t n_states, std::size_t n_actions);

EmpiricalDistribution empirical_distribution(std::span<const StateIndex> states, std::size_t n_states);

std::string to_string(Architecture a);
std::string to_string(Algorithm a);
std::string to_string(SigmaMode m);

}  // namespace netmfg
