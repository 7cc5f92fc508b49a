#include "netmfg/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace netmfg {

void td_update(QTable& q, const Transition& zeta, const Policy& pi, double beta, double lambda,
               double gamma) {
  td_update_with_bonus(q, zeta, entropy_h(pi.row(zeta.s), lambda), beta, gamma);
}

double t0_of(double gamma, double delta_mix, double p_inf) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("t0_of: gamma must lie in [0, 1)");
  const double denom = (1.0 - gamma) * delta_mix * p_inf;
  if (denom == 0.0) throw std::invalid_argument("t0_of: zero denominator");
  return 16.0 * (1.0 + gamma) * (1.0 + gamma) / (denom * denom);
}

double beta_at(const BetaSchedule& schedule, long long m, double gamma) {
  if (m < 0) throw std::invalid_argument("beta_at: negative iteration");
  if (schedule.kind == BetaSchedule::Kind::Fixed) return schedule.beta;
  const double denom = schedule.t0 + static_cast<double>(m) - 1.0;
  if (!(denom > 0.0)) throw std::invalid_argument("beta_at: t0 + m - 1 must be positive");
  return 2.0 / ((1.0 - gamma) * denom);
}

double pma_objective(std::span<const double> u, std::span<const double> q_row,
                     std::span<const double> pi_row, double eta, double lambda) {
  double linear = 0.0;
  double dist2 = 0.0;
  double ent = 0.0;
  for (std::size_t a = 0; a < u.size(); ++a) {
    linear += u[a] * q_row[a];
    const double d = u[a] - pi_row[a];
    dist2 += d * d;
    if (u[a] > 0.0) ent -= u[a] * std::log(u[a]);
  }
  return linear + lambda * ent - dist2 / (2.0 * eta);
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cum += v[order[j]];
    const double candidate = (cum - 1.0) / static_cast<double>(j + 1);
    if (v[order[j]] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

namespace {

constexpr int kNewtonCap = 100;
constexpr int kBisectionCap = 200;

// Solves lambda * x + exp(x) / eta = c for x <= 0 and returns u = exp(x),
// capped at 1. The left side is convex and increasing, so Newton started to
// the right of the root decreases monotonically onto it.
double solve_coordinate(double c, double eta, double lambda, int& iterations) {
  const double inv_eta = 1.0 / eta;
  if (inv_eta - c <= 0.0) return 1.0;
  double x = 0.0;
  for (int it = 0; it < kNewtonCap; ++it) {
    const double ex = std::exp(x);
    const double f = lambda * x + ex * inv_eta - c;
    const double step = f / (lambda + ex * inv_eta);
    x -= step;
    iterations = std::max(iterations, it + 1);
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return std::exp(x);
}

std::vector<double> entropic_row(std::span<const double> q_row, std::span<const double> pi_row, double eta,
                                 double lambda, PmaDiagnostics* diag) {
  const std::size_t n = q_row.size();
  if (n == 1) return {1.0};
  const double inv_eta = 1.0 / eta;
  const double uniform = 1.0 / static_cast<double>(n);
  // base_a - nu is the right-hand side c_a of the coordinate equation.
  std::vector<double> base(n);
  for (std::size_t a = 0; a < n; ++a) base[a] = q_row[a] - lambda + pi_row[a] * inv_eta;

  // At nu = base_a - (lambda log(1/n) + 1/(n eta)) coordinate a sits exactly at 1/n.
  const double shift = lambda * std::log(uniform) + uniform * inv_eta;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double b : base) {
    lo = std::min(lo, b - shift);
    hi = std::max(hi, b - shift);
  }

  int newton_iters = 0;
  std::vector<double> u(n);
  auto evaluate = [&](double nu) {
    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      u[a] = solve_coordinate(base[a] - nu, eta, lambda, newton_iters);
      sum += u[a];
    }
    return sum;
  };

  int it = 0;
  bool converged = false;
  for (; it < kBisectionCap; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      converged = true;
      break;
    }
    if (evaluate(mid) > 1.0) lo = mid;
    else hi = mid;
  }
  evaluate(0.5 * (lo + hi));
  if (diag) {
    if (!converged) ++diag->rows_not_converged;
    diag->max_iterations_used = std::max<std::size_t>(diag->max_iterations_used, static_cast<std::size_t>(it));
  }
  return u;
}

void normalise(std::vector<double>& u) {
  double sum = 0.0;
  for (double& p : u) {
    if (!(p > 0.0)) p = 0.0;
    sum += p;
  }
  for (double& p : u) p /= sum;
}

}  // namespace

std::vector<double> pma_row(std::span<const double> q_row, std::span<const double> pi_row, double eta,
                            double lambda, PmaDiagnostics* diagnostics) {
  if (!(eta > 0.0)) throw std::invalid_argument("pma_update: eta must be > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("pma_update: lambda must be >= 0");
  std::vector<double> u;
  if (lambda == 0.0) {
    std::vector<double> v(q_row.size());
    for (std::size_t a = 0; a < v.size(); ++a) v[a] = pi_row[a] + eta * q_row[a];
    u = project_to_simplex(v);
  } else {
    u = entropic_row(q_row, pi_row, eta, lambda, diagnostics);
  }
  normalise(u);
  return u;
}

Policy pma_update(const QTable& q, const Policy& pi, double eta, double lambda, PmaDiagnostics* diagnostics) {
  Policy out = pi;
  for (StateIndex s = 0; s < pi.n_states(); ++s) {
    const auto row = pma_row(q.row(s), pi.row(s), eta, lambda, diagnostics);
    std::copy(row.begin(), row.end(), out.row(s).begin());
  }
  return out;
}

void ReplayBuffer::push(const Transition& zeta) {
  if (transitions_.size() >= capacity_) throw BufferOverflow("replay buffer is full");
  transitions_.push_back(zeta);
}

void ReplayBuffer::set_capacity(std::size_t capacity) {
  if (capacity < transitions_.size()) throw BufferOverflow("capacity below current size");
  capacity_ = capacity;
  transitions_.reserve(capacity);
}

QTable buffer_replay(const ReplayBuffer& buf, QTable q, const Policy& pi, int L, double beta, double lambda,
                     double gamma, Rng& rng) {
  if (L <= 0 || buf.empty()) return q;
  std::vector<double> bonus(pi.n_states(), 0.0);
  if (lambda != 0.0) {
    for (StateIndex s = 0; s < pi.n_states(); ++s) bonus[s] = entropy_h(pi.row(s), lambda);
  }
  std::vector<Transition> order(buf.transitions().begin(), buf.transitions().end());
  for (int pass = 0; pass < L; ++pass) {
    std::shuffle(order.begin(), order.end(), rng);
    for (const Transition& zeta : order) td_update_with_bonus(q, zeta, bonus[zeta.s], beta, gamma);
  }
  return q;
}

}  // namespace netmfg
