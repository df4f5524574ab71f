#include "cgas/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cgas/common.hpp"
#include "cgas/kernel.hpp"

namespace cgas {

EquilibriumStats equilibrium_stats(const RadialEquilibrium& eq) {
  return {eq.energy(), eq.potential_moment(), eq.entropy(), eq.robin(), eq.weighted_energy()};
}

BoundConstants concentration_constants(const EquilibriumStats& stats, const Potential& potential, SpaceDim dim,
                                  double C, double D, MetricTag metric) {
  if (!(C > 0.0)) throw std::invalid_argument("transport constant must be positive");
  const int d = dim.value();
  double sup = -kInf;
  if (potential.is_radial()) {
    const auto& lap = potential.profile().laplacian;
    for (int k = 0; k <= 4096; ++k) sup = std::max(sup, lap(16.0 * k / 4096.0, d));
  } else {
    const int per_axis = d <= 3 ? 33 : 9;
    std::vector<int> idx(d, 0);
    std::vector<double> x(d);
    while (true) {
      for (int c = 0; c < d; ++c) x[c] = -4.0 + 8.0 * idx[c] / (per_axis - 1);
      sup = std::max(sup, potential.laplacian(x));
      int c = 0;
      while (c < d && ++idx[c] == per_axis) idx[c++] = 0;
      if (c == d) break;
    }
  }
  if (sup > D * (1.0 + 1e-12)) throw std::invalid_argument("Laplacian of V exceeds D on the sample grid");

  BoundConstants k;
  k.dim = dim;
  k.metric = metric;
  k.C = C;
  k.D = D;
  k.a = 1.0 / (8.0 * C);
  k.b = 0.5 * (1.0 / C + ball_energy(dim, 1.0) + D / (2.0 * (d + 2)));
  k.c_of_beta = [stats, potential, dim](double beta) {
    return 0.5 * beta * stats.potential_moment - stats.entropy + c_beta_integral(potential, dim, beta);
  };
  return k;
}

double concentration_log_bound(const BoundConstants& k, std::size_t n, double r, double beta) {
  const double N = static_cast<double>(n);
  const int d = k.dim.value();
  KahanSum s;
  s += -k.a * beta * N * N * r * r;
  if (d == 2) s += 0.25 * beta * N * std::log(N);
  s += k.b * beta * std::pow(N, 2.0 - 2.0 / d);
  s += k.c_of_beta(beta) * N;
  return s.value();
}

double concentration_bound(const BoundConstants& k, std::size_t n, double r, double beta) {
  return std::min(1.0, std::exp(concentration_log_bound(k, n, r, beta)));
}

double ginibre_log_bound(std::size_t n, double r, double C) {
  const double N = static_cast<double>(n);
  return -N * N * r * r / (4.0 * C) + 0.5 * N * std::log(N) + N * (1.0 / C + 1.5 - std::log(kPi));
}

double ginibre_bound(std::size_t n, double r, double C) {
  return std::min(1.0, std::exp(ginibre_log_bound(n, r, C)));
}

double domain_constant(SpaceDim dim, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
  return ball_volume(dim.value(), 4.0 * R);
}

double r_threshold(std::size_t n, SpaceDim dim, double v) {
  const double N = static_cast<double>(n);
  if (dim.value() == 2) return v * std::sqrt(std::log(N) / N);
  return v * std::pow(N, -1.0 / dim.value());
}

double partition_lower_bound(const EquilibriumStats& stats, std::size_t n, double beta) {
  const double N = static_cast<double>(n);
  return -N * N * 0.5 * beta * stats.weighted_energy + N * (0.5 * beta * stats.energy + stats.entropy);
}

double ginibre_log_z(std::size_t n) {
  const double N = static_cast<double>(n);
  KahanSum s;
  s += N * std::log(kPi);
  s += -0.5 * N * (N + 1.0) * std::log(N);
  for (std::size_t k = 1; k <= n; ++k) s += std::lgamma(static_cast<double>(k) + 1.0);
  return s.value();
}

double v_star(const Potential& potential, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  const auto& v = potential.profile().value;
  const auto& slope = potential.profile().slope;
  // Push the right end out until V is increasing there and above everything seen so far.
  double hi = std::max(2.0 * r, r + 1.0);
  double best = v(r);
  for (int k = 0;; ++k) {
    if (k > 80) throw std::domain_error("V is unbounded below at infinity");
    best = std::min(best, v(hi));
    if (slope(hi) > 0.0 && v(hi) > best) break;
    hi *= 2.0;
  }
  constexpr int kGrid = 8192;
  double arg = r;
  best = v(r);
  for (int k = 1; k <= kGrid; ++k) {
    const double s = r + (hi - r) * k / kGrid;
    if (v(s) < best) best = v(s), arg = s;
  }
  const double step = (hi - r) / kGrid;
  double a = std::max(r, arg - step), b = std::min(hi, arg + step);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = v(x1), f2 = v(x2);
  while (b - a > 1e-13 * std::max(1.0, b)) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = v(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = v(x2);
    }
  }
  return std::min({best, f1, f2, v(r)});
}

}  // namespace cgas
