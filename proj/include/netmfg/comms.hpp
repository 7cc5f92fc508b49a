#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "netmfg/rng.hpp"
#include "netmfg/types.hpp"

namespace netmfg {

/// Undirected graph over agents, stored as sorted adjacency lists.
class CommGraph {
 public:
  CommGraph() = default;
  explicit CommGraph(std::size_t n) : adjacency_(n) {}

  /// Adds edge {i, j}. Self-loops and duplicates are ignored.
  void add_edge(std::size_t i, std::size_t j);
  bool has_edge(std::size_t i, std::size_t j) const;

  std::size_t size() const { return adjacency_.size(); }
  std::size_t edge_count() const;
  std::span<const std::size_t> neighbours(std::size_t i) const { return adjacency_[i]; }
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Softmax temperature. The max-selection temperature stands for tau -> 0:
/// the highest sigma wins with ties going to the lowest agent index.
class Temperature {
 public:
  explicit Temperature(double value);
  static Temperature max_selection() { return Temperature(); }

  bool is_max_selection() const { return max_selection_; }
  double value() const { return value_; }

 private:
  Temperature() : value_(0.0), max_selection_(true) {}
  double value_;
  bool max_selection_ = false;
};

/// Edge {i, j} iff the Euclidean distance between the agents' cells is at most
/// radius_fraction times the grid diagonal.
CommGraph build_graph(std::span<const StateIndex> states, const GridSpec& grid, double radius_fraction);

/// Agent i together with its graph neighbours, ascending.
std::vector<std::size_t> neighbourhood(std::size_t i, const CommGraph& g);

/// tau_0 = 10000 / 10^ceil((K - 1) / 10), multiplied by 10 at every k' <= k with k' mod 10 == 1.
Temperature tau_at(const TauSchedule& schedule, int K, int k);

/// Draws j from `candidates` with probability proportional to exp(sigma_j / tau).
/// `sigmas` is indexed by agent. Max selection consumes no randomness.
std::size_t softmax_adopt(std::span<const std::size_t> candidates, std::span<const double> sigmas,
                          const Temperature& tau, Rng& rng);

struct RoundResult {
  std::vector<Policy> policies;
  std::vector<double> sigmas;
  std::vector<std::size_t> adopted;  // source agent per agent
};

/// One synchronous adoption round: every agent selects from its neighbourhood
/// using the pre-round snapshot; agent i draws from rngs[i].
RoundResult communication_round(std::span<const Policy> policies, std::span<const double> sigmas,
                                const CommGraph& g, const Temperature& tau, std::span<Rng> rngs);

/// Longest shortest path; nullopt when the graph is disconnected.
std::optional<std::size_t> graph_diameter(const CommGraph& g);

/// BFS distances from `source`; unreachable vertices hold SIZE_MAX.
std::vector<std::size_t> bfs_distances(const CommGraph& g, std::size_t source);

/// (1 - 1/d)^C when C < d, else 0.
double f_of(int C, int d);

}  // namespace netmfg
