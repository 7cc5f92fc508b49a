#include "netmfg/comms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace netmfg {

void CommGraph::add_edge(std::size_t i, std::size_t j) {
  if (i == j) return;
  auto insert = [](std::vector<std::size_t>& list, std::size_t v) {
    auto it = std::lower_bound(list.begin(), list.end(), v);
    if (it == list.end() || *it != v) list.insert(it, v);
  };
  insert(adjacency_.at(i), j);
  insert(adjacency_.at(j), i);
}

bool CommGraph::has_edge(std::size_t i, std::size_t j) const {
  const auto& list = adjacency_.at(i);
  return std::binary_search(list.begin(), list.end(), j);
}

std::size_t CommGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency_) total += list.size();
  return total / 2;
}

std::vector<std::pair<std::size_t, std::size_t>> CommGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    for (std::size_t j : adjacency_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

Temperature::Temperature(double value) : value_(value) {
  if (!(value > 0.0)) throw std::invalid_argument("temperature must be > 0");
}

CommGraph build_graph(std::span<const StateIndex> states, const GridSpec& grid, double radius_fraction) {
  const std::size_t n = states.size();
  CommGraph g(n);
  const double dw = static_cast<double>(grid.width - 1);
  const double dh = static_cast<double>(grid.height - 1);
  const double threshold = radius_fraction * std::sqrt(dw * dw + dh * dh);

  // Agents sharing a cell are always within range of each other, so only
  // distinct occupied cells need a distance test.
  std::vector<std::vector<std::size_t>> by_cell(grid.n_states());
  std::vector<StateIndex> occupied;
  for (std::size_t i = 0; i < n; ++i) {
    if (states[i] >= grid.n_states()) throw std::out_of_range("build_graph: state out of range");
    if (by_cell[states[i]].empty()) occupied.push_back(states[i]);
    by_cell[states[i]].push_back(i);
  }

  std::vector<std::vector<std::size_t>> adjacency(n);
  for (StateIndex a : occupied) {
    const double ax = static_cast<double>(grid.x_of(a));
    const double ay = static_cast<double>(grid.y_of(a));
    for (StateIndex b : occupied) {
      const double dx = ax - static_cast<double>(grid.x_of(b));
      const double dy = ay - static_cast<double>(grid.y_of(b));
      if (std::sqrt(dx * dx + dy * dy) > threshold) continue;
      for (std::size_t i : by_cell[a]) {
        for (std::size_t j : by_cell[b]) {
          if (i != j) adjacency[i].push_back(j);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = adjacency[i];
    std::sort(list.begin(), list.end());
    for (std::size_t j : list) {
      if (i < j) g.add_edge(i, j);
    }
  }
  return g;
}

std::vector<std::size_t> neighbourhood(std::size_t i, const CommGraph& g) {
  if (i >= g.size()) throw std::out_of_range("neighbourhood: agent out of range");
  const auto nb = g.neighbours(i);
  std::vector<std::size_t> out(nb.begin(), nb.end());
  out.insert(std::lower_bound(out.begin(), out.end(), i), i);
  return out;
}

Temperature tau_at(const TauSchedule& schedule, int K, int k) {
  if (k < 0) throw std::invalid_argument("tau_at: negative k");
  switch (schedule.kind) {
    case TauSchedule::Kind::Fixed: return Temperature(schedule.value);
    case TauSchedule::Kind::MaxSelection: return Temperature::max_selection();
    case TauSchedule::Kind::Annealed: break;
  }
  const int decades = K > 1 ? (K - 1 + 9) / 10 : 0;
  // Indices j in [0, k] with j mod 10 == 1.
  const int steps = k >= 1 ? (k - 1) / 10 + 1 : 0;
  return Temperature(1e4 * std::pow(10.0, static_cast<double>(steps - decades)));
}

std::size_t softmax_adopt(std::span<const std::size_t> candidates, std::span<const double> sigmas,
                          const Temperature& tau, Rng& rng) {
  if (candidates.empty()) throw std::invalid_argument("softmax_adopt: empty neighbourhood");
  std::size_t best = candidates[0];
  for (std::size_t j : candidates) {
    if (sigmas[j] > sigmas[best] || (sigmas[j] == sigmas[best] && j < best)) best = j;
  }
  if (tau.is_max_selection()) return best;

  const double top = sigmas[best];
  std::vector<double> weights(candidates.size());
  double total = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    weights[c] = std::exp((sigmas[candidates[c]] - top) / tau.value());
    total += weights[c];
  }
  const double u = uniform01(rng) * total;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (weights[c] > 0.0) last_positive = c;
    cum += weights[c];
    if (u < cum) return candidates[c];
  }
  return candidates[last_positive];
}

RoundResult communication_round(std::span<const Policy> policies, std::span<const double> sigmas,
                                const CommGraph& g, const Temperature& tau, std::span<Rng> rngs) {
  const std::size_t n = policies.size();
  if (sigmas.size() != n || g.size() != n || rngs.size() != n)
    throw std::invalid_argument("communication_round: length mismatch");
  RoundResult out;
  out.adopted.resize(n);
  out.sigmas.resize(n);
  out.policies.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto candidates = neighbourhood(i, g);
    const std::size_t j = softmax_adopt(candidates, sigmas, tau, rngs[i]);
    out.adopted[i] = j;
    out.sigmas[i] = sigmas[j];
    out.policies.push_back(policies[j]);
  }
  return out;
}

std::vector<std::size_t> bfs_distances(const CommGraph& g, std::size_t source) {
  constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.size(), kUnreached);
  std::deque<std::size_t> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop_front();
    for (std::size_t w : g.neighbours(v)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        frontier.push_back(w);
      }
    }
  }
  return dist;
}

std::optional<std::size_t> graph_diameter(const CommGraph& g) {
  std::size_t diameter = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (std::size_t d : bfs_distances(g, s)) {
      if (d == std::numeric_limits<std::size_t>::max()) return std::nullopt;
      diameter = std::max(diameter, d);
    }
  }
  return diameter;
}

double f_of(int C, int d) {
  if (d < 1 || C < 0) throw std::invalid_argument("f_of: need d >= 1 and C >= 0");
  if (C >= d) return 0.0;
  return std::pow(1.0 - 1.0 / static_cast<double>(d), C);
}

}  // namespace netmfg
