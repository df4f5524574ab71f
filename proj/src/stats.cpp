#include "cgas/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>

#include "cgas/common.hpp"

namespace cgas {

Interval clopper_pearson(std::size_t k, std::size_t n, double level) {
  if (n == 0 || k > n) throw std::invalid_argument("bad binomial counts");
  const double alpha = 1.0 - level;
  const double K = static_cast<double>(k), N = static_cast<double>(n);
  Interval out{0.0, 1.0};
  if (k > 0) out.lo = boost::math::quantile(boost::math::beta_distribution<double>(K, N - K + 1.0), 0.5 * alpha);
  if (k < n) out.hi = boost::math::quantile(boost::math::beta_distribution<double>(K + 1.0, N - K), 1.0 - 0.5 * alpha);
  return out;
}

ChiSquareResult chi_square_two_sample(std::span<const std::size_t> a, std::span<const std::size_t> b,
                                      double alpha) {
  if (a.size() != b.size()) throw std::invalid_argument("bin counts differ in length");
  double na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    na += static_cast<double>(a[k]);
    nb += static_cast<double>(b[k]);
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("empty sample");
  const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
  KahanSum stat;
  std::size_t bins = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double x = static_cast<double>(a[k]), y = static_cast<double>(b[k]);
    if (x + y == 0.0) continue;
    ++bins;
    const double diff = ka * x - kb * y;
    stat += diff * diff / (x + y);
  }
  if (bins < 2) throw std::invalid_argument("need at least two nonempty bins");
  ChiSquareResult out;
  out.statistic = stat.value();
  out.dof = bins - 1;
  out.critical = boost::math::quantile(boost::math::chi_squared_distribution<double>(static_cast<double>(out.dof)),
                                       1.0 - alpha);
  out.reject = out.statistic > out.critical;
  return out;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  // Quantiles of the Kolmogorov distribution.
  double c;
  if (alpha == 0.01)
    c = 1.62762;
  else if (alpha == 0.05)
    c = 1.35810;
  else
    throw std::invalid_argument("supported levels are 0.01 and 0.05");
  return c / std::sqrt(static_cast<double>(n));
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("empty sample");
  KahanSum s;
  for (double v : x) s += v;
  return s.value() / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("need two observations");
  const double m = mean(x);
  KahanSum s;
  for (double v : x) s += (v - m) * (v - m);
  return s.value() / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("empty sample");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need two paired observations");
  const double mx = mean(x), my = mean(y);
  KahanSum sxx, sxy;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx.value() == 0.0) throw std::invalid_argument("x values are all equal");
  LinearFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  fit.points = x.size();
  fit.slope_stderr = 0.0;
  if (x.size() > 2) {
    KahanSum rss;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double e = y[k] - fit.intercept - fit.slope * x[k];
      rss += e * e;
    }
    fit.slope_stderr = std::sqrt(rss.value() / static_cast<double>(x.size() - 2) / sxx.value());
  }
  return fit;
}

}  // namespace cgas
