#include <doctest.h>

#include <cmath>
#include <vector>

#include "cgas/stats.hpp"

using namespace cgas;

TEST_CASE("Clopper-Pearson endpoints") {
  // k = 0: upper end solves (1 - p)^n = alpha / 2.
  const auto a = clopper_pearson(0, 10, 0.99);
  CHECK(a.lo == 0.0);
  CHECK(a.hi == doctest::Approx(1.0 - std::pow(0.005, 0.1)).epsilon(1e-12));
  const auto b = clopper_pearson(10, 10, 0.99);
  CHECK(b.hi == 1.0);
  CHECK(b.lo == doctest::Approx(std::pow(0.005, 0.1)).epsilon(1e-12));
  const auto c = clopper_pearson(37, 200, 0.99);
  CHECK(c.lo < 37.0 / 200.0);
  CHECK(c.hi > 37.0 / 200.0);
  CHECK_THROWS(clopper_pearson(3, 2));
}

TEST_CASE("two-sample chi-square") {
  const std::vector<std::size_t> a{10, 20, 30, 0}, b{20, 40, 60, 0};
  const auto same = chi_square_two_sample(a, b);
  CHECK(same.statistic == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(same.dof == 2);
  CHECK(same.critical == doctest::Approx(9.21034).epsilon(1e-5));
  CHECK_FALSE(same.reject);
  const std::vector<std::size_t> c{100, 10, 10, 0};
  CHECK(chi_square_two_sample(a, c).reject);
}

TEST_CASE("Kolmogorov-Smirnov") {
  std::vector<double> grid;
  for (int k = 0; k < 100; ++k) grid.push_back((k + 0.5) / 100.0);
  CHECK(ks_statistic(grid, [](double x) { return x; }) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(ks_critical(10000, 0.01) == doctest::Approx(0.0162762).epsilon(1e-6));
  CHECK_THROWS(ks_critical(10, 0.1));
}

TEST_CASE("moments and fits") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(x) == 2.5);
  CHECK(variance(x) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(median(x) == 2.5);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  const std::vector<double> y{-1.0, -3.0, -5.0, -7.0};
  const auto fit = linear_fit(x, y);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fit.slope_stderr == doctest::Approx(0.0));
}
