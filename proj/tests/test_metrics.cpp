#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "cgas/common.hpp"
#include "cgas/equilibrium.hpp"
#include "cgas/kernel.hpp"
#include "cgas/metrics.hpp"
#include "cgas/reference.hpp"
#include "cgas/transport.hpp"

using namespace cgas;

namespace {

DiscreteMeasure random_measure(std::mt19937_64& rng, int d, std::size_t n, bool uniform_weights, double spread = 1.0) {
  std::uniform_real_distribution<double> u(-spread, spread), w(0.1, 1.0);
  std::vector<double> pts(n * d), ws(n);
  for (auto& x : pts) x = u(rng);
  if (uniform_weights) return DiscreteMeasure::uniform(SpaceDim(d), pts);
  double s = 0.0;
  for (auto& x : ws) s += (x = w(rng));
  for (auto& x : ws) x /= s;
  return DiscreteMeasure(SpaceDim(d), pts, ws);
}

// Measures on the x-axis of R^2: W1 = int |F - G|.
double w1_on_line(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<std::pair<double, double>> events;
  for (std::size_t i = 0; i < mu.size(); ++i) events.emplace_back(mu.atom(i)[0], mu.weight(i));
  for (std::size_t j = 0; j < nu.size(); ++j) events.emplace_back(nu.atom(j)[0], -nu.weight(j));
  std::sort(events.begin(), events.end());
  double cdf = 0.0, total = 0.0;
  for (std::size_t k = 0; k + 1 < events.size(); ++k) {
    cdf += events[k].second;
    total += std::abs(cdf) * (events[k + 1].first - events[k].first);
  }
  return total;
}

// Uniform measures of equal size: optimal plans are permutations.
double brute_force(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, double truncate) {
  std::vector<std::size_t> perm(mu.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) c += std::pow(std::min(distance(mu.atom(i), nu.atom(perm[i])), truncate), p);
    best = std::min(best, c / static_cast<double>(perm.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

DiscreteMeasure on_line(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.1, 1.0);
  std::vector<double> pts, ws(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) pts.insert(pts.end(), {u(rng), 0.0});
  for (auto& x : ws) s += (x = w(rng));
  for (auto& x : ws) x /= s;
  return DiscreteMeasure(SpaceDim(2), pts, ws);
}

}  // namespace

TEST_CASE("W1 on a line against the CDF formula") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 30; ++t) {
    const auto mu = on_line(rng, 1 + t % 13), nu = on_line(rng, 2 + (t * 7) % 17);
    CHECK(wasserstein(mu, nu, 1.0) == doctest::Approx(w1_on_line(mu, nu)).epsilon(1e-12));
  }
}

TEST_CASE("permutation oracle for uniform measures") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 5;
    const auto mu = random_measure(rng, 2 + t % 2, n, true, 1.5), nu = random_measure(rng, 2 + t % 2, n, true, 1.5);
    CHECK(wasserstein(mu, nu, 1.0) == doctest::Approx(brute_force(mu, nu, 1.0, 1e300)).epsilon(1e-12));
    CHECK(wasserstein(mu, nu, 2.0) == doctest::Approx(std::sqrt(brute_force(mu, nu, 2.0, 1e300))).epsilon(1e-12));
    CHECK(bounded_lipschitz(mu, nu) == doctest::Approx(brute_force(mu, nu, 1.0, 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("duality gap, feasibility and plan marginals") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto mu = random_measure(rng, 2, 5 + 7 * t, false), nu = random_measure(rng, 2, 3 + 11 * t, false);
    for (double p : {1.0, 2.0}) {
      const auto r = wasserstein_solve(mu, nu, p);
      CHECK(std::abs(r.plan.cost - r.dual_value) <= 1e-9);
      const auto c = reference::cost_matrix(mu, nu, p, kInf);
      for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j)
          CHECK(r.source_potential[i] + r.target_potential[j] <= c[i * nu.size() + j] + 1e-12);
      std::vector<double> row(mu.size(), 0.0), col(nu.size(), 0.0);
      for (const auto& f : r.plan.flows) {
        CHECK(f.mass > 0.0);
        row[f.source] += f.mass;
        col[f.target] += f.mass;
      }
      for (std::size_t i = 0; i < mu.size(); ++i) CHECK(row[i] == doctest::Approx(mu.weight(i)).epsilon(1e-12));
      for (std::size_t j = 0; j < nu.size(); ++j) CHECK(col[j] == doctest::Approx(nu.weight(j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cost matrix matches the serial reference") {
  std::mt19937_64 rng(4);
  const auto mu = random_measure(rng, 3, 40, false), nu = random_measure(rng, 3, 30, false);
  for (double trunc : {kInf, 0.8}) {
    const auto a = build_cost_matrix(mu, nu, 1.0, trunc);
    const auto b = reference::cost_matrix(mu, nu, 1.0, trunc);
    CHECK(a.data == b);
  }
}

TEST_CASE("metric axioms and BL <= W1") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 15; ++t) {
    const auto a = random_measure(rng, 2, 10 + t, false, 2.0), b = random_measure(rng, 2, 7 + 2 * t, false, 2.0),
               c = random_measure(rng, 2, 12, false, 2.0);
    const double ab = wasserstein(a, b, 1.0), ba = wasserstein(b, a, 1.0);
    CHECK(std::abs(ab - ba) <= 1e-12);
    CHECK(wasserstein(a, c, 1.0) <= ab + wasserstein(b, c, 1.0) + 1e-9);
    const double bl = bounded_lipschitz(a, b);
    CHECK(std::abs(bl - bounded_lipschitz(b, a)) <= 1e-12);
    CHECK(bl <= ab + 1e-12);
    CHECK(bounded_lipschitz(a, c) <= bl + bounded_lipschitz(b, c) + 1e-9);
    CHECK(wasserstein(a, a, 1.0) == 0.0);
  }
}

TEST_CASE("BL between Dirac masses") {
  for (double s : {0.0, 0.3, 1.999, 2.0, 5.0}) {
    const auto x = DiscreteMeasure::uniform(SpaceDim(2), {0.0, 0.0});
    const auto y = DiscreteMeasure::uniform(SpaceDim(2), {s, 0.0});
    CHECK(bounded_lipschitz(x, y) == std::min(s, 2.0));
  }
}

TEST_CASE("dual certificate is an admissible BL test function") {
  std::mt19937_64 rng(6);
  const auto mu = random_measure(rng, 2, 25, false, 3.0), nu = random_measure(rng, 2, 18, false, 3.0);
  const auto r = bounded_lipschitz_solve(mu, nu);
  const auto cert = dual_certificate(mu, nu, r.target_potential, 2.0);
  CHECK(cert.value == doctest::Approx(r.value).epsilon(1e-9));
  std::vector<std::pair<std::vector<double>, double>> pts;
  for (std::size_t i = 0; i < mu.size(); ++i) pts.push_back({{mu.atom(i).begin(), mu.atom(i).end()}, cert.source_values[i]});
  for (std::size_t j = 0; j < nu.size(); ++j) pts.push_back({{nu.atom(j).begin(), nu.atom(j).end()}, cert.target_values[j]});
  for (const auto& [x, fx] : pts) {
    CHECK(std::abs(fx) <= 1.0 + 1e-12);
    for (const auto& [y, fy] : pts) CHECK(std::abs(fx - fy) <= distance(x, y) + 1e-12);
  }
}

TEST_CASE("atom cap") {
  std::mt19937_64 rng(7);
  const auto mu = random_measure(rng, 2, 60, true), nu = random_measure(rng, 2, 50, true);
  CHECK_THROWS_AS(wasserstein(mu, nu, 1.0, 100), AtomCapExceeded);
  CHECK_NOTHROW(wasserstein(mu, nu, 1.0, 110));
}

TEST_CASE("push-forward homogeneity") {
  std::mt19937_64 rng(8);
  const auto mu = random_measure(rng, 2, 30, false), nu = random_measure(rng, 2, 40, false);
  const std::vector<double> x0{0.2, -0.1};
  const double w = wasserstein(mu, nu, 1.0);
  for (double s : {0.5, 3.0}) CHECK(wasserstein(push_forward(mu, x0, s), push_forward(nu, x0, s), 1.0) == doctest::Approx(s * w).epsilon(1e-12));
}

TEST_CASE("Wp compact chain") {
  std::mt19937_64 rng(9);
  const auto mu = random_measure(rng, 2, 20, false, 0.7), nu = random_measure(rng, 2, 20, false, 0.7);
  for (double p : {1.0, 2.0, 3.0}) {
    const auto c = wp_compact_chain(mu, nu, 1.0, p);
    CHECK(c.wp_p <= c.bound1 + 1e-12);
    CHECK(c.bound1 <= c.bound2 * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("Coulomb metric of smoothed clouds") {
  const double eps = 0.05, s = 0.4;
  const SmoothedCloud a{DiscreteMeasure::uniform(SpaceDim(2), {0.0, 0.0}), eps};
  const SmoothedCloud b{DiscreteMeasure::uniform(SpaceDim(2), {s, 0.0}), eps};
  CHECK(coulomb_metric_sq(a, b).value == doctest::Approx(2.0 * ball_energy(SpaceDim(2), eps) - 2.0 * std::log(1.0 / s)).epsilon(1e-13));
  CHECK(coulomb_metric_sq(a, a).value == 0.0);
  const SmoothedCloud close{DiscreteMeasure::uniform(SpaceDim(2), {0.05, 0.0}), eps};
  CHECK_THROWS_AS(coulomb_metric_sq(a, close), std::domain_error);

  std::mt19937_64 rng(10);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> pts;
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    while (pts.size() < 24) {
      const std::vector<double> x{u(rng), u(rng)};
      bool ok = true;
      for (std::size_t j = 0; j < pts.size(); j += 2) ok = ok && distance(x, std::span<const double>(pts.data() + j, 2)) >= 2 * eps;
      if (ok) pts.insert(pts.end(), x.begin(), x.end());
    }
    const SmoothedCloud m{DiscreteMeasure::uniform(SpaceDim(2), {pts.begin(), pts.begin() + 12}), eps};
    const SmoothedCloud n{DiscreteMeasure::uniform(SpaceDim(2), {pts.begin() + 12, pts.end()}), eps};
    CHECK(coulomb_metric_sq(m, n).raw > 0.0);
    const auto check = local_transport_check(m, n, 1.0);
    CHECK(check.ratio <= 1.0);
    CHECK(check.w1_lo <= check.w1_hi);
    CHECK(local_transport_check(m, m, 1.0).ratio == 0.0);
  }
}

TEST_CASE("Coulomb metric against the equilibrium measure") {
  const auto eq = solve_equilibrium(Potential::quadratic(), SpaceDim(2));
  // One atom at the origin smoothed at eps: E = E(lambda_eps) - 2 int U^{lambda_eps} dmu_V + E(mu_V).
  const double eps = 0.1;
  const SmoothedCloud c{DiscreteMeasure::uniform(SpaceDim(2), {0.0, 0.0}), eps};
  // U^{mu_V} averaged over B_eps: (1 - eps^2/2)/2 for the circular law.
  const double expected = ball_energy(SpaceDim(2), eps) - 2.0 * 0.5 * (1.0 - 0.5 * eps * eps) + 0.25;
  CHECK(coulomb_metric_sq(c, eq).raw == doctest::Approx(expected).epsilon(1e-9));
}
