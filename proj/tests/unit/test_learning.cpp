#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "netmfg/learning.hpp"
#include "netmfg/rng.hpp"

using namespace netmfg;

namespace {

// Projection by bisection on the threshold theta of sum max(v - theta, 0) = 1.
std::vector<double> projection_by_bisection(const std::vector<double>& v) {
  double lo = *std::min_element(v.begin(), v.end()) - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (double x : v) s += std::max(x - mid, 0.0);
    (s > 1.0 ? lo : hi) = mid;
  }
  std::vector<double> u;
  for (double x : v) u.push_back(std::max(x - 0.5 * (lo + hi), 0.0));
  return u;
}

// Maximises a concave function on [lo, hi].
double ternary_max(const std::function<double(double)>& f, double lo, double hi, double* arg = nullptr) {
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) lo = m1;
    else hi = m2;
  }
  const double x = 0.5 * (lo + hi);
  if (arg) *arg = x;
  return f(x);
}

double best_two(const std::vector<double>& q, const std::vector<double>& pi, double eta, double lambda) {
  return ternary_max(
      [&](double p) {
        const std::vector<double> u{p, 1.0 - p};
        return pma_objective(u, q, pi, eta, lambda);
      },
      0.0, 1.0);
}

double best_three(const std::vector<double>& q, const std::vector<double>& pi, double eta, double lambda) {
  return ternary_max(
      [&](double a) {
        return ternary_max(
            [&](double b) {
              const std::vector<double> u{a, b, std::max(0.0, 1.0 - a - b)};
              return pma_objective(u, q, pi, eta, lambda);
            },
            0.0, 1.0 - a);
      },
      0.0, 1.0);
}

std::vector<double> random_simplex(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> u(n);
  double s = 0.0;
  for (auto& x : u) s += (x = e(rng));
  for (auto& x : u) x /= s;
  return u;
}

}  // namespace

TEST_CASE("td update examples") {
  QTable q(2, 2, 5.0);
  const Policy pi = uniform_policy(2, 2);
  const Transition z{0, 1, 1.0, 1, 0};
  td_update(q, z, pi, 0.1, 0.0, 0.9);
  CHECK(q.at(0, 1) == doctest::Approx(5.05).epsilon(1e-14));
  CHECK(q.at(0, 0) == 5.0);

  QTable same(2, 2, 5.0);
  td_update(same, z, pi, 0.0, 0.0, 0.9);
  CHECK(same == QTable(2, 2, 5.0));

  // Entry already on the target r + h + gamma Q(s', a').
  QTable fixed(2, 2, 2.0);
  const double h = std::log(2.0) * 0.5;
  fixed.at(0, 1) = 1.0 + h + 0.9 * 2.0;
  const QTable before = fixed;
  td_update(fixed, z, pi, 0.3, 0.5, 0.9);
  CHECK(fixed == before);
}

TEST_CASE("td update contracts towards the target") {
  Rng rng = make_stream(3, 0);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  const Policy pi = uniform_policy(3, 2);
  for (int rep = 0; rep < 200; ++rep) {
    QTable q(3, 2, 0.0);
    for (StateIndex s = 0; s < 3; ++s)
      for (std::size_t a = 0; a < 2; ++a) q.at(s, a) = val(rng);
    const Transition z{rep % 3u, rep % 2u, val(rng), (rep + 1) % 3u, (rep / 2) % 2u};
    if (z.s == z.s_next && z.a == z.a_next) continue;
    const double target = z.r + 0.9 * q.at(z.s_next, z.a_next);
    const double gap = std::abs(q.at(z.s, z.a) - target);
    td_update(q, z, pi, 0.25, 0.0, 0.9);
    CHECK(std::abs(q.at(z.s, z.a) - target) == doctest::Approx(0.75 * gap).epsilon(1e-9));
  }
}

TEST_CASE("learning-rate schedules") {
  CHECK(t0_of(0.9, 1.0, 1.0) == doctest::Approx(5776.0).epsilon(1e-12));
  CHECK(t0_of(0.0, 1.0, 1.0) == doctest::Approx(16.0));
  const BetaSchedule fixed{BetaSchedule::Kind::Fixed, 0.1, 16.0};
  CHECK(beta_at(fixed, 0, 0.9) == 0.1);
  CHECK(beta_at(fixed, 12345, 0.9) == 0.1);
  const BetaSchedule theo{BetaSchedule::Kind::Theoretical, 0.1, 5776.0};
  CHECK(beta_at(theo, 0, 0.9) == doctest::Approx(2.0 / (0.1 * 5775.0)).epsilon(1e-12));
  CHECK(beta_at(theo, 0, 0.9) == doctest::Approx(3.46e-3).epsilon(1e-3));
  CHECK(beta_at(theo, 10, 0.9) < beta_at(theo, 9, 0.9));
}

TEST_CASE("pma objective") {
  const std::vector<double> u{1.0, 0.0};
  const std::vector<double> q{2.0, 0.0};
  const std::vector<double> pi{0.5, 0.5};
  CHECK(pma_objective(u, q, pi, 1.0, 0.0) == doctest::Approx(1.75).epsilon(1e-14));
  CHECK(pma_objective(pi, q, pi, 0.3, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  const std::vector<double> zero{0.0, 0.0};
  CHECK(pma_objective(pi, zero, pi, 0.3, 0.0) == 0.0);
}

TEST_CASE("projection matches threshold bisection") {
  Rng rng = make_stream(5, 0);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  for (int rep = 0; rep < 10000; ++rep) {
    std::vector<double> v(2 + rep % 6);
    for (auto& x : v) x = val(rng);
    const auto got = project_to_simplex(v);
    const auto want = projection_by_bisection(v);
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(got[i] >= 0.0);
      CHECK(std::abs(got[i] - want[i]) < 1e-9);
      sum += got[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pma closed form examples") {
  QTable q(1, 2, 0.0);
  q.at(0, 0) = 1.0;
  const Policy pi = uniform_policy(1, 2);
  const Policy small = pma_update(q, pi, 0.01, 0.0);
  CHECK(small.at(0, 0) == doctest::Approx(0.505).epsilon(1e-12));
  CHECK(small.at(0, 1) == doctest::Approx(0.495).epsilon(1e-12));
  const Policy greedy = pma_update(q, pi, 1000.0, 0.0);
  CHECK(std::abs(greedy.at(0, 0) - 1.0) < 1e-9);
  CHECK(std::abs(greedy.at(0, 1)) < 1e-9);

  Rng rng = make_stream(6, 0);
  for (int rep = 0; rep < 100; ++rep) {
    Policy p(1, 5, 0.0);
    const auto row = random_simplex(5, rng);
    std::copy(row.begin(), row.end(), p.row(0).begin());
    const Policy out = pma_update(QTable(1, 5, 3.7), p, 0.5, 0.0);
    for (std::size_t a = 0; a < 5; ++a) CHECK(out.at(0, a) == doctest::Approx(p.at(0, a)).epsilon(1e-12));
  }
}

TEST_CASE("pma without entropy beats a 1e-3 grid on three actions") {
  Rng rng = make_stream(7, 0);
  std::uniform_real_distribution<double> qv(0.0, 10.0);
  for (double eta : {0.01, 1.0, 1000.0}) {
    for (int rep = 0; rep < 5; ++rep) {
      const std::vector<double> q{qv(rng), qv(rng), qv(rng)};
      const auto pi = random_simplex(3, rng);
      const auto u = pma_row(q, pi, eta, 0.0);
      const double got = pma_objective(u, q, pi, eta, 0.0);
      double grid = -1e300;
      for (int i = 0; i <= 1000; ++i) {
        for (int j = 0; i + j <= 1000; ++j) {
          const std::vector<double> c{i * 1e-3, j * 1e-3, (1000 - i - j) * 1e-3};
          grid = std::max(grid, pma_objective(c, q, pi, eta, 0.0));
        }
      }
      CHECK(got >= grid - 1e-12);
      CHECK(got - grid <= 1e-4);
    }
  }
}

TEST_CASE("pma with entropy reaches the concave maximum") {
  Rng rng = make_stream(8, 0);
  std::uniform_real_distribution<double> qv(0.0, 10.0);
  for (double lambda : {0.01, 0.1, 1.0, 5.0}) {
    for (double eta : {0.01, 0.1, 1.0, 100.0}) {
      for (int rep = 0; rep < 3; ++rep) {
        const std::vector<double> q2{qv(rng), qv(rng)};
        const auto pi2 = random_simplex(2, rng);
        PmaDiagnostics diag;
        const auto u2 = pma_row(q2, pi2, eta, lambda, &diag);
        CHECK(diag.rows_not_converged == 0);
        CHECK(pma_objective(u2, q2, pi2, eta, lambda) >= best_two(q2, pi2, eta, lambda) - 1e-8);

        const std::vector<double> q3{qv(rng), qv(rng), qv(rng)};
        const auto pi3 = random_simplex(3, rng);
        const auto u3 = pma_row(q3, pi3, eta, lambda);
        CHECK(u3[0] + u3[1] + u3[2] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pma_objective(u3, q3, pi3, eta, lambda) >= best_three(q3, pi3, eta, lambda) - 1e-8);
      }
    }
  }
}

TEST_CASE("pma with entropy handles rows with zero mass") {
  const std::vector<double> q{0.0, 50.0, 0.0};
  const std::vector<double> pi{1.0, 0.0, 0.0};
  const auto u = pma_row(q, pi, 1.0, 0.05);
  for (double x : u) CHECK(x > 0.0);
  CHECK(pma_objective(u, q, pi, 1.0, 0.05) >= best_three(q, pi, 1.0, 0.05) - 1e-8);
}

TEST_CASE("replay buffer capacity") {
  ReplayBuffer buf(3);
  CHECK(buf.empty());
  buf.push({0, 0, 0.0, 0, 0});
  CHECK(buf.size() == 1);
  buf.push({1, 0, 0.0, 0, 0});
  buf.push({2, 0, 0.0, 0, 0});
  CHECK(buf.size() == 3);
  CHECK(buf.transitions()[1].s == 1);
  CHECK_THROWS_AS(buf.push({3, 0, 0.0, 0, 0}), BufferOverflow);
  buf.clear();
  CHECK(buf.size() == 0);
  CHECK(buf.capacity() == 3);
}

TEST_CASE("buffer replay") {
  const Policy pi = uniform_policy(2, 2);
  ReplayBuffer buf(8);
  buf.push({0, 1, 0.4, 1, 0});

  QTable q0(2, 2, 10.0);
  Rng rng = make_stream(1, 0);
  CHECK(buffer_replay(buf, q0, pi, 0, 0.1, 0.2, 0.9, rng) == q0);

  QTable seq = q0;
  for (int l = 0; l < 7; ++l) td_update(seq, buf.transitions()[0], pi, 0.1, 0.2, 0.9);
  CHECK(buffer_replay(buf, q0, pi, 7, 0.1, 0.2, 0.9, rng) == seq);

  for (StateIndex s = 0; s < 2; ++s) buf.push({s, 1 - s, 0.1 * s, 1 - s, s});
  buf.push({1, 1, 0.9, 0, 1});
  Rng a = make_stream(42, 0);
  Rng b = make_stream(42, 0);
  const QTable qa = buffer_replay(buf, q0, pi, 20, 0.1, 0.2, 0.9, a);
  const QTable qb = buffer_replay(buf, q0, pi, 20, 0.1, 0.2, 0.9, b);
  CHECK(qa == qb);
  CHECK(a() == b());
}
