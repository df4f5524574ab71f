#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cgas/common.hpp"
#include "cgas/kernel.hpp"
#include "cgas/quadrature.hpp"
#include "cgas/reference.hpp"

using namespace cgas;

namespace {

std::vector<double> in_ball(std::mt19937_64& rng, int d, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(d);
  while (true) {
    double s = 0.0;
    for (auto& c : x) s += (c = u(rng)) * c;
    if (s <= 1.0) break;
  }
  for (auto& c : x) c *= radius;
  return x;
}

PointConfiguration random_config(std::mt19937_64& rng, int d, std::size_t n, double radius) {
  std::vector<double> pts;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = in_ball(rng, d, radius);
    pts.insert(pts.end(), x.begin(), x.end());
  }
  return PointConfiguration(SpaceDim(d), pts);
}

struct McEstimate {
  double mean, se;
};

// E g(eps(U - V) + z), U, V uniform on B_1, by rejection sampling.
McEstimate mc_pair_energy(int d, double eps, double dist, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto u = in_ball(rng, d, eps), v = in_ball(rng, d, eps);
    double r2 = 0.0;
    for (int c = 0; c < d; ++c) {
      const double z = u[c] - v[c] + (c == 0 ? dist : 0.0);
      r2 += z * z;
    }
    const double g = kernel_sq(d, r2);
    s1 += g;
    s2 += g * g;
  }
  const double m = s1 / n;
  return {m, std::sqrt((s2 / n - m * m) / n)};
}

}  // namespace

TEST_CASE("Coulomb constants") {
  CHECK(coulomb_constant(SpaceDim(2)) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(coulomb_constant(SpaceDim(3)) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  CHECK(coulomb_constant(SpaceDim(4)) == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-14));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(ball_volume(3, 2.0) == doctest::Approx(32.0 * kPi / 3.0).epsilon(1e-15));
  const std::vector<double> e{std::exp(1.0), 0.0};
  CHECK(coulomb_kernel(SpaceDim(2), e) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> two{0.0, 2.0, 0.0};
  CHECK(coulomb_kernel(SpaceDim(3), two) == 0.5);
  const std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(coulomb_kernel(SpaceDim(2), zero), SingularityError);
  CHECK_THROWS(SpaceDim(1));
}

TEST_CASE("ball energy closed forms and scaling") {
  CHECK(std::abs(ball_energy(SpaceDim(2), 1.0) - 0.25) < 1e-15);
  CHECK(std::abs(ball_energy(SpaceDim(3), 1.0) - 1.2) < 1e-15);
  CHECK(ball_energy(SpaceDim(2), 0.1) == doctest::Approx(0.25 - std::log(0.1)).epsilon(1e-14));
  CHECK(ball_energy(SpaceDim(3), 0.5) == doctest::Approx(2.4).epsilon(1e-14));
  for (int d : {2, 3, 4}) {
    const auto mc = mc_pair_energy(d, 1.0, 0.0, 200000, 11 + d);
    CHECK(std::abs(mc.mean - ball_energy(SpaceDim(d), 1.0)) < 4.0 * mc.se);
  }
}

TEST_CASE("ball potential matches Newton's theorem and Monte Carlo") {
  for (int d : {2, 3}) {
    CHECK(ball_potential(d, 0.5, 0.8) == kernel_radial(d, 0.8));
    // Inside: average of g(s e_1 - U) over U uniform on B_eps.
    std::mt19937_64 rng(5);
    double s1 = 0.0, s2 = 0.0;
    const std::size_t n = 200000;
    for (std::size_t k = 0; k < n; ++k) {
      auto u = in_ball(rng, d, 0.5);
      u[0] -= 0.3;
      double r2 = 0.0;
      for (double c : u) r2 += c * c;
      const double g = kernel_sq(d, r2);
      s1 += g;
      s2 += g * g;
    }
    const double m = s1 / n, se = std::sqrt((s2 / n - m * m) / n);
    CHECK(std::abs(m - ball_potential(d, 0.5, 0.3)) < 4.0 * se);
  }
}

TEST_CASE("law of |U - V| on the unit ball") {
  for (int d : {2, 3, 5}) {
    const double mass = integrate([d](double r) { return ball_difference_density(d, r); }, 0.0, 2.0, 1e-14);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Mean distance between two uniform points: 128/(45 pi) in the disk, 36/35 in the ball.
  CHECK(integrate([](double r) { return r * ball_difference_density(2, r); }, 0.0, 2.0, 1e-14) ==
        doctest::Approx(128.0 / (45.0 * kPi)).epsilon(1e-12));
  CHECK(integrate([](double r) { return r * ball_difference_density(3, r); }, 0.0, 2.0, 1e-14) ==
        doctest::Approx(36.0 / 35.0).epsilon(1e-12));
}

TEST_CASE("smoothed pair energy") {
  for (int d : {2, 3}) {
    CHECK(smoothed_pair_energy(d, 0.1, 0.25) == kernel_radial(d, 0.25));
    CHECK(smoothed_pair_energy(d, 0.1, 0.2) == kernel_radial(d, 0.2));
    CHECK(smoothed_pair_energy(d, 1.0, 0.0) == doctest::Approx(ball_energy(SpaceDim(d), 1.0)).epsilon(1e-11));
    for (double dist : {0.3, 0.7, 1.5}) {
      const auto mc = mc_pair_energy(d, 0.5, dist, 200000, 100 + d);
      CHECK(std::abs(mc.mean - smoothed_pair_energy(d, 0.5, dist)) < 4.0 * mc.se);
    }
    // Never above g: the smoothed kernel is g(max(s, eps |U - V|)).
    for (double dist : {0.01, 0.05, 0.1, 0.15}) CHECK(smoothed_pair_energy(d, 0.1, dist) <= kernel_radial(d, dist));
  }
}

TEST_CASE("Hamiltonian matches the serial reference") {
  std::mt19937_64 rng(7);
  for (int d : {2, 3}) {
    for (std::size_t n : {1u, 2u, 17u, 200u}) {
      const auto cfg = random_config(rng, d, n, 1.3);
      const Potential V = Potential::radial_polynomial({0.5, 1.0, 0.25});
      const double h = hamiltonian(cfg, V), ref = reference::hamiltonian(cfg, V);
      CHECK(h == doctest::Approx(ref).epsilon(1e-12));
      CHECK(pair_interaction(cfg) == doctest::Approx(reference::pair_interaction(cfg)).epsilon(1e-12));
      if (n > 1) {
        const auto y = in_ball(rng, d, 1.0);
        const double dh = move_delta(cfg, V, n / 2, y);
        PointConfiguration moved = cfg;
        moved.set_point(n / 2, y);
        CHECK(dh == doctest::Approx(reference::hamiltonian(moved, V) - ref).epsilon(1e-9));
        CHECK(dh == doctest::Approx(reference::move_delta(cfg, V, n / 2, y)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("pair interaction is invariant under relabelling") {
  std::mt19937_64 rng(8);
  const auto cfg = random_config(rng, 2, 300, 1.0);
  std::vector<std::size_t> perm(300);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> pts;
  for (auto i : perm) pts.insert(pts.end(), cfg.point(i).begin(), cfg.point(i).end());
  CHECK(pair_interaction(PointConfiguration(SpaceDim(2), pts)) == pair_interaction(cfg));
}

TEST_CASE("coincident points give +inf") {
  const PointConfiguration cfg(SpaceDim(2), std::vector<double>{0.1, 0.2, 0.1, 0.2, 0.5, 0.5});
  const Potential V = Potential::quadratic();
  CHECK(hamiltonian(cfg, V) == kInf);
  const std::vector<double> onto{0.5, 0.5};
  CHECK(move_delta(cfg, V, 0, onto) == kInf);
  CHECK(min_pair_distance(cfg) == 0.0);
}

TEST_CASE("smear gap") {
  std::mt19937_64 rng(9);
  for (int d : {2, 3}) {
    for (int k = 0; k < 20; ++k) {
      const auto x = in_ball(rng, d, 2.0);
      const double t = 0.3 + k * 0.1, eps = 0.02 + 0.02 * k;
      CHECK(smear_gap(Potential::quadratic(t), x, eps) == doctest::Approx(t * eps * eps * d / (d + 2.0)).epsilon(1e-11));
      std::vector<double> a(d, 0.7);
      CHECK(std::abs(smear_gap(Potential::linear(a, 1.0), x, eps)) < 1e-14);
    }
  }
}

TEST_CASE("smoothed empirical energy and regularization identity") {
  std::mt19937_64 rng(10);
  const Potential V = Potential::quadratic(1.0);
  for (int d : {2, 3}) {
    std::vector<double> pts;
    const double eps = 0.02;
    while (pts.size() < 30u * d) {
      const auto x = in_ball(rng, d, 1.0);
      bool ok = true;
      for (std::size_t j = 0; j < pts.size(); j += d)
        ok = ok && distance(x, std::span<const double>(pts.data() + j, d)) >= 2 * eps;
      if (ok) pts.insert(pts.end(), x.begin(), x.end());
    }
    const PointConfiguration cfg(SpaceDim(d), pts);
    const double N = 30.0;
    double smear = 0.0;
    for (std::size_t i = 0; i < 30; ++i) smear += smear_gap(V, cfg.point(i), eps);
    const double lhs = N * N * smoothed_empirical_energy(cfg, V, eps) - N * ball_energy(SpaceDim(d), eps) - N * smear;
    CHECK(lhs == doctest::Approx(reference::hamiltonian(cfg, V)).epsilon(1e-11));
    CHECK_THROWS_AS(smoothed_empirical_energy(cfg, V, 0.5), std::domain_error);
  }
}

TEST_CASE("superharmonicity") {
  const std::vector<double> x{0.1, 0.0, 0.0};
  const auto near = superharmonicity_check(SpaceDim(3), x, 1.0, 100000, 3);
  CHECK(near.lhs + 3.0 * near.std_error < near.rhs);
  // Harmonic away from the smoothing region: equality up to Monte Carlo error.
  const std::vector<double> far{3.0, 0.5};
  const auto h = superharmonicity_check(SpaceDim(2), far, 0.5, 100000, 4);
  CHECK(std::abs(h.lhs - h.rhs) < 4.0 * h.std_error);
}

TEST_CASE("potential of a discrete measure") {
  const DiscreteMeasure mu(SpaceDim(2), {0.0, 0.0, 1.0, 0.0}, {0.25, 0.75});
  const std::vector<double> x{0.0, 1.0};
  CHECK(potential_of_measure(mu, x) == doctest::Approx(-0.75 * 0.5 * std::log(2.0)).epsilon(1e-15));
  const std::vector<double> atom{1.0, 0.0};
  CHECK_THROWS_AS(potential_of_measure(mu, atom), SingularityError);
}
