#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cgas/common.hpp"
#include "cgas/equilibrium.hpp"
#include "cgas/kernel.hpp"
#include "cgas/quadrature.hpp"
#include "cgas/stats.hpp"

using namespace cgas;

TEST_CASE("circular law from the quadratic potential") {
  const auto eq = solve_equilibrium(Potential::quadratic(), SpaceDim(2));
  CHECK(std::abs(eq.support_radius() - 1.0) < 1e-10);
  for (double r : {0.0, 0.3, 0.99}) CHECK(eq.density(r) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
  CHECK(eq.density(1.01) == 0.0);
  for (double r : {0.2, 0.5, 0.9}) CHECK(eq.mass_within(r) == doctest::Approx(r * r).epsilon(1e-10));
  CHECK(eq.energy() == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(eq.potential_moment() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(eq.robin() - 1.0) < 1e-8);
  CHECK(std::abs(eq.entropy() - std::log(kPi)) < 1e-8);
  CHECK(eq.weighted_energy() == doctest::Approx(0.75).epsilon(1e-10));
  // U(r) = (1 - r^2)/2 inside, -log r outside.
  for (double r : {0.0, 0.4, 0.8}) CHECK(eq.potential_at(r) == doctest::Approx(0.5 * (1.0 - r * r)).epsilon(1e-9));
  CHECK(eq.potential_at(2.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  const auto el = euler_lagrange_residual(eq);
  CHECK(el.inside_max_abs < 1e-10);
  CHECK(el.outside_min > 0.0);
}

TEST_CASE("uniform ball in dimension 3") {
  const auto eq = solve_equilibrium(Potential::quadratic(), SpaceDim(3));
  CHECK(std::abs(eq.support_radius() - 1.0) < 1e-10);
  CHECK(eq.density(0.5) == doctest::Approx(3.0 / (4.0 * kPi)).epsilon(1e-12));
  CHECK(eq.energy() == doctest::Approx(1.2).epsilon(1e-10));
  CHECK(eq.robin() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(euler_lagrange_residual(eq).inside_max_abs < 1e-10);
}

TEST_CASE("scaling of the support with t |x|^2") {
  for (double t : {0.25, 4.0}) {
    const auto eq = solve_equilibrium(Potential::quadratic(t), SpaceDim(2));
    CHECK(eq.support_radius() == doctest::Approx(1.0 / std::sqrt(t)).epsilon(1e-10));
  }
}

TEST_CASE("quartic potential") {
  const auto eq = solve_equilibrium(Potential::radial_polynomial({0.0, 0.0, 1.0}), SpaceDim(2));
  CHECK(eq.support_radius() == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-10));
  CHECK(eq.density(0.5) == doctest::Approx(4.0 * 0.25 / kPi).epsilon(1e-10));
  CHECK(euler_lagrange_residual(eq).inside_max_abs < 1e-6);
  // Independent energy route: E = int U dmu with U by direct quadrature.
  const double R = eq.support_radius();
  const double e = integrate([&](double r) { return 2.0 * kPi * r * eq.density(r) * eq.potential_exact(r); }, 0.0, R);
  CHECK(eq.energy() == doctest::Approx(e).epsilon(1e-9));
  CHECK(eq.robin() == doctest::Approx(2.0 * eq.potential_exact(0.0)).epsilon(1e-9));
  for (double r : {0.1, 0.45, 0.8}) CHECK(eq.potential_at(r) == doctest::Approx(eq.potential_exact(r)).epsilon(1e-9));
}

TEST_CASE("negative density is rejected") {
  // V = |x|^4 - 2|x|^2 has Delta V < 0 near the origin.
  CHECK_THROWS_AS(solve_equilibrium(Potential::radial_polynomial({0.0, -2.0, 1.0}), SpaceDim(2)), EquilibriumError);
  CHECK_THROWS_AS(solve_equilibrium(Potential::linear({1.0, 0.0}), SpaceDim(2)), std::invalid_argument);
}

TEST_CASE("radial quadrature is exact on polynomials") {
  const RadialQuadrature q(3, 2.0);
  CHECK(q.integrate([](double) { return 1.0; }) == doctest::Approx(ball_volume(3, 2.0)).epsilon(1e-14));
  CHECK(q.integrate([](double r) { return r * r; }) == doctest::Approx(4.0 * kPi * 32.0 / 5.0).epsilon(1e-14));
}

TEST_CASE("sampling from mu_V") {
  const auto eq = solve_equilibrium(Potential::quadratic(), SpaceDim(2));
  const auto s = sample_equilibrium(eq, 20000, 42);
  std::vector<double> radii;
  for (std::size_t i = 0; i < s.size(); ++i) radii.push_back(norm(s.atom(i)));
  CHECK(ks_statistic(radii, [](double r) { return std::min(r * r, 1.0); }) < ks_critical(20000, 0.01));
  CHECK(sample_equilibrium(eq, 10, 1) == sample_equilibrium(eq, 10, 1));
}

TEST_CASE("quantization") {
  const auto eq = solve_equilibrium(Potential::quadratic(), SpaceDim(2));
  const double h = grid_step_for_budget(eq, 4000);
  const auto q = quantize_to_grid(eq, h);
  CHECK(q.measure.size() <= 4000);
  CHECK(q.measure.size() == grid_cell_count(eq, h));
  CHECK(q.coupling_cost <= q.error_bound);
  CHECK(q.coupling_cost > 0.0);
  double total = 0.0;
  for (double w : q.measure.weights()) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // Interior cells all carry h^2 / pi before renormalization; cut boundary cells shift the total slightly.
  std::size_t interior = 0;
  double lo = kInf, hi = 0.0;
  for (std::size_t i = 0; i < q.measure.size(); ++i) {
    if (norm(q.measure.atom(i)) + h < 1.0) {
      const double ratio = q.measure.weight(i) / (h * h / kPi);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ++interior;
    }
  }
  CHECK(hi - lo <= 1e-12);
  CHECK(std::abs(hi - 1.0) <= 1e-5);
  CHECK(interior > 0);
  CHECK(grid_cell_count(eq, 0.9 * h) > 4000);
}

TEST_CASE("integrability constant") {
  CHECK(c_beta_integral(Potential::quadratic(), SpaceDim(2), 2.0) == doctest::Approx(std::log(2.0 * kPi)).epsilon(1e-10));
  CHECK(c_beta_integral(Potential::quadratic(), SpaceDim(3), 2.0) == doctest::Approx(1.5 * std::log(kPi)).epsilon(1e-10));
  RadialProfile log_profile{[](double r) { return std::log1p(r * r); }, [](double r) { return 2.0 * r / (1.0 + r * r); },
                            [](double r) { return 2.0 / (1.0 + r * r); },
                            [](double r, int d) {
                              const double q = 1.0 + r * r;
                              return 2.0 * d / q - 4.0 * r * r / (q * q);
                            }};
  CHECK_THROWS_AS(c_beta_integral(Potential::radial("log", log_profile), SpaceDim(2), 1.0), ModelUndefined);
}
