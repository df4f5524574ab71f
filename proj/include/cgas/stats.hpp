#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cgas {

struct Interval {
  double lo;
  double hi;
};

/// Two-sided Clopper–Pearson interval for k successes out of n at the given level.
Interval clopper_pearson(std::size_t k, std::size_t n, double level = 0.99);

struct ChiSquareResult {
  double statistic;
  std::size_t dof;
  double critical;  // upper quantile at the requested level
  bool reject;
};

/// Two-sample chi-square homogeneity test on binned counts; empty bins (in both samples)
/// are dropped.
ChiSquareResult chi_square_two_sample(std::span<const std::size_t> a, std::span<const std::size_t> b,
                                      double alpha = 0.01);

/// sup_x |F_n(x) - F(x)| for the sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Asymptotic one-sample critical value at level alpha (0.01 or 0.05).
double ks_critical(std::size_t n, double alpha = 0.01);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double median(std::vector<double> x);

struct LinearFit {
  double slope;
  double intercept;
  double slope_stderr;
  std::size_t points;
};
/// Ordinary least squares y = intercept + slope x; needs two distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace cgas
