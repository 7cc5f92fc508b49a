#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netmfg/rng.hpp"
#include "netmfg/types.hpp"

namespace netmfg {

// ---------------------------------------------------------------------------
// TD learning
// ---------------------------------------------------------------------------

/// Stochastic TD step on entry (s, a):
///   Q(s,a) <- Q(s,a) - beta * (Q(s,a) - r - h(pi(s)) - gamma * Q(s', a'))
void td_update(QTable& q, const Transition& zeta, const Policy& pi, double beta, double lambda,
               double gamma);

/// Same update with the regulariser value h(pi(s)) supplied by the caller.
inline void td_update_with_bonus(QTable& q, const Transition& zeta, double bonus, double beta,
                                 double gamma) {
  double& entry = q.at(zeta.s, zeta.a);
  entry -= beta * (entry - zeta.r - bonus - gamma * q.at(zeta.s_next, zeta.a_next));
}

/// 16 (1 + gamma)^2 / ((1 - gamma) delta_mix p_inf)^2
double t0_of(double gamma, double delta_mix, double p_inf);

/// Fixed: the constant. Theoretical: 2 / ((1 - gamma)(t0 + m - 1)).
double beta_at(const BetaSchedule& schedule, long long m, double gamma);

// ---------------------------------------------------------------------------
// Policy mirror ascent
// ---------------------------------------------------------------------------

/// <u, q> + lambda H(u) - ||u - pi||^2 / (2 eta)
double pma_objective(std::span<const double> u, std::span<const double> q_row,
                     std::span<const double> pi_row, double eta, double lambda);

/// Euclidean projection of `v` onto the probability simplex (sort based).
std::vector<double> project_to_simplex(std::span<const double> v);

struct PmaDiagnostics {
  std::size_t rows_not_converged = 0;
  std::size_t max_iterations_used = 0;
};

/// Per-state maximiser of pma_objective over the simplex.
///
/// lambda == 0 reduces to projecting pi(s) + eta q(s, .) onto the simplex.
/// For lambda > 0 the maximiser is interior and satisfies the stationarity
/// condition q_a - lambda (log u_a + 1) - (u_a - pi_a) / eta = nu for a common
/// multiplier nu. Each u_a(nu) is found by Newton on log u_a, and nu by
/// bisection on sum_a u_a(nu) = 1.
Policy pma_update(const QTable& q, const Policy& pi, double eta, double lambda,
                  PmaDiagnostics* diagnostics = nullptr);

/// Single-row version of pma_update.
std::vector<double> pma_row(std::span<const double> q_row, std::span<const double> pi_row, double eta,
                            double lambda, PmaDiagnostics* diagnostics = nullptr);

// ---------------------------------------------------------------------------
// Experience replay
// ---------------------------------------------------------------------------

class BufferOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-iteration transition store, emptied at the start of every outer loop.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 0) : capacity_(capacity) { transitions_.reserve(capacity); }

  /// Appends in arrival order. Throws BufferOverflow when full.
  void push(const Transition& zeta);
  void clear() { transitions_.clear(); }
  void set_capacity(std::size_t capacity);

  std::size_t size() const { return transitions_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return transitions_.empty(); }
  std::span<const Transition> transitions() const { return transitions_; }

 private:
  std::size_t capacity_;
  std::vector<Transition> transitions_;
};

/// L passes over the buffer; each pass shuffles with `rng` then applies the
/// TD update to every stored transition in order. Beta stays fixed.
QTable buffer_replay(const ReplayBuffer& buf, QTable q, const Policy& pi, int L, double beta, double lambda,
                     double gamma, Rng& rng);

}  // namespace netmfg
