#include "cgas/kernel.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "cgas/common.hpp"
#include "cgas/quadrature.hpp"

namespace cgas {

namespace {

// Chunk length for O(N) sums; fixed so the reduction tree does not depend on threads.
constexpr std::size_t kChunk = 1024;
constexpr std::size_t kParallelMoveThreshold = 8192;

std::vector<std::size_t> canonical_order(const PointConfiguration& config) {
  const auto d = static_cast<std::size_t>(config.dim().value());
  const auto coords = config.coords();
  std::vector<std::size_t> order(config.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t c = 0; c < d; ++c) {
      const double xa = coords[a * d + c], xb = coords[b * d + c];
      if (xa != xb) return xa < xb;
    }
    return a < b;
  });
  return order;
}

}  // namespace

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

double ball_volume(int d, double radius) {
  return std::pow(kPi, 0.5 * d) * std::pow(radius, d) / std::tgamma(0.5 * d + 1.0);
}

CoulombConstants coulomb_constants(SpaceDim dim) {
  const int d = dim.value();
  if (d == 2) return {2.0 * kPi, 1.0};
  return {(d - 2) * sphere_area(d), static_cast<double>(d - 2)};
}

double coulomb_constant(SpaceDim dim) { return coulomb_constants(dim).c_d; }

double coulomb_kernel(SpaceDim dim, std::span<const double> x) {
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  if (r2 == 0.0) throw SingularityError("Coulomb kernel evaluated at the origin");
  return kernel_sq(dim.value(), r2);
}

double pair_interaction(const PointConfiguration& config) {
  const int d = config.dim().value();
  const auto n = config.size();
  if (n < 2) return 0.0;
  const auto order = canonical_order(config);
  std::vector<double> pts(n * static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < n; ++a) {
    const auto p = config.point(order[a]);
    std::copy(p.begin(), p.end(), pts.begin() + static_cast<std::ptrdiff_t>(a * d));
  }
  std::vector<double> rows(n, 0.0);
  int coincident = 0;
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) reduction(| : coincident)
  for (std::ptrdiff_t a = 0; a < sn; ++a) {
    const double* xa = pts.data() + a * d;
    KahanSum row;
    for (std::ptrdiff_t b = a + 1; b < sn; ++b) {
      const double* xb = pts.data() + b * d;
      double r2 = 0.0;
      for (int c = 0; c < d; ++c) {
        const double t = xa[c] - xb[c];
        r2 += t * t;
      }
      if (r2 == 0.0) {
        coincident = 1;
        break;
      }
      row += kernel_sq(d, r2);
    }
    rows[a] = row.value();
  }
  if (coincident) return kInf;
  KahanSum total;
  for (double r : rows) total += r;
  return 2.0 * total.value();
}

double hamiltonian(const PointConfiguration& config, const Potential& potential) {
  const double pairs = pair_interaction(config);
  if (pairs == kInf) return kInf;
  const auto order = canonical_order(config);
  KahanSum ext;
  for (std::size_t a : order) ext += potential.value(config.point(a));
  KahanSum h;
  h += pairs;
  h += static_cast<double>(config.size()) * ext.value();
  return h.value();
}

double move_delta(const PointConfiguration& config, const Potential& potential, std::size_t i,
                  std::span<const double> y) {
  const int d = config.dim().value();
  const auto n = config.size();
  const auto xi = config.point(i);
  if (std::equal(xi.begin(), xi.end(), y.begin())) return 0.0;
  const auto coords = config.coords();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  int coincident = 0;
  const auto body = [&](std::size_t ch) {
    KahanSum s;
    const std::size_t lo = ch * kChunk, hi = std::min(n, lo + kChunk);
    for (std::size_t j = lo; j < hi; ++j) {
      if (j == i) continue;
      const double* xj = coords.data() + j * d;
      double r2new = 0.0, r2old = 0.0;
      for (int c = 0; c < d; ++c) {
        const double a = y[c] - xj[c], b = xi[c] - xj[c];
        r2new += a * a;
        r2old += b * b;
      }
      if (r2new == 0.0) return 1;
      s += kernel_sq(d, r2new) - kernel_sq(d, r2old);
    }
    partial[ch] = s.value();
    return 0;
  };
  if (n >= kParallelMoveThreshold) {
    const auto sc = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for reduction(| : coincident)
    for (std::ptrdiff_t ch = 0; ch < sc; ++ch) coincident |= body(static_cast<std::size_t>(ch));
  } else {
    for (std::size_t ch = 0; ch < chunks; ++ch) coincident |= body(ch);
  }
  if (coincident) return kInf;
  KahanSum total;
  for (double p : partial) total += p;
  return 2.0 * total.value() +
         static_cast<double>(n) * (potential.value(y) - potential.value(xi));
}

double ball_energy(SpaceDim dim, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("ball_energy needs eps > 0");
  const int d = dim.value();
  if (d == 2) return -std::log(eps) + 0.25;
  return std::pow(eps, 2 - d) * 2.0 * d / (d + 2.0);
}

double ball_potential(int d, double eps, double s) {
  if (s >= eps) return kernel_radial(d, s);
  const double q = (s * s) / (eps * eps);
  if (d == 2) return -std::log(eps) + 0.5 * (1.0 - q);
  return std::pow(eps, 2 - d) * (0.5 * d - 0.5 * (d - 2) * q);
}

double ball_difference_density(int d, double r) {
  if (r <= 0.0 || r >= 2.0) return 0.0;
  // |S| r^{d-1} vol(B_1 cap (B_1 + r e_1)) / vol(B_1), the lens fraction being a regularized
  // incomplete beta function.
  const double lens = boost::math::ibeta(0.5 * (d + 1), 0.5, 1.0 - 0.25 * r * r);
  return sphere_area(d) * std::pow(r, d - 1) * lens / ball_volume(d, 1.0);
}

double smoothed_pair_energy(int d, double eps, double dist) {
  if (!(eps > 0.0)) throw std::invalid_argument("smoothing radius must be positive");
  if (dist >= 2.0 * eps) return kernel_radial(d, dist);
  // The sphere average of g at radius t around a point at distance s is g(max(s, t)), so the
  // energy is E g(max(dist, eps |U - V|)) with U, V independent uniform on B_1.
  auto p = [d](double r) { return ball_difference_density(d, r); };
  const double t = dist / eps;
  double inner = 0.0;
  if (dist > 0.0) inner = kernel_radial(d, dist) * integrate(p, 0.0, t, 1e-13);
  const double outer = integrate([&](double r) { return kernel_radial(d, eps * r) * p(r); }, t, 2.0, 1e-13,
                                 dist == 0.0);
  return inner + outer;
}

double min_pair_distance(const PointConfiguration& config) {
  const auto n = config.size();
  double best = kInf;
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) reduction(min : best)
  for (std::ptrdiff_t a = 0; a < sn; ++a)
    for (std::size_t b = static_cast<std::size_t>(a) + 1; b < n; ++b)
      best = std::min(best, squared_distance(config.point(static_cast<std::size_t>(a)), config.point(b)));
  return std::sqrt(best);
}

double smoothed_empirical_energy(const PointConfiguration& config, const Potential& potential,
                                 double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("smoothing radius must be positive");
  const double sep = min_pair_distance(config);
  if (sep < 2.0 * eps)
    throw std::domain_error("points closer than 2 eps; smoothed energy is not exact here");
  const double n = static_cast<double>(config.size());
  KahanSum smeared;
  for (std::size_t i : canonical_order(config)) {
    const auto x = config.point(i);
    smeared += potential.value(x) + smear_gap(potential, x, eps);
  }
  KahanSum e;
  e += pair_interaction(config) / (n * n);
  e += ball_energy(config.dim(), eps) / n;
  e += smeared.value() / n;
  return e.value();
}

SmearEstimate smear_gap_estimate(const Potential& potential, std::span<const double> x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("smoothing radius must be positive");
  const int d = static_cast<int>(x.size());
  const double v0 = potential.value(x);
  std::vector<double> y(x.size());
  auto apply = [&](const BallRule& rule) {
    KahanSum s;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const auto u = rule.node(k);
      for (int c = 0; c < d; ++c) y[c] = x[c] + eps * u[c];
      s += rule.weights[k] * (potential.value(y) - v0);
    }
    return s.value();
  };
  const double coarse = apply(coarse_ball_rule(d));
  const double fine = apply(fine_ball_rule(d));
  return {fine, std::fabs(fine - coarse)};
}

double smear_gap(const Potential& potential, std::span<const double> x, double eps) {
  const auto est = smear_gap_estimate(potential, x, eps);
  const double tol = 1e-10 * (1.0 + std::fabs(potential.value(x)));
  if (est.error > tol) throw QuadratureError("smoothing quadrature did not converge", est.error);
  return est.value;
}

SuperharmonicityResult superharmonicity_check(SpaceDim dim, std::span<const double> x, double radius,
                                              std::size_t n_mc, std::uint64_t seed) {
  const int d = dim.value();
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const double rhs = coulomb_kernel(dim, x);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  std::vector<double> u(d), v(d);
  auto draw = [&](std::vector<double>& p) {
    double s = 0.0;
    for (auto& c : p) {
      c = normal(rng);
      s += c * c;
    }
    const double r = radius * std::pow(unif(rng), 1.0 / d) / std::sqrt(s);
    for (auto& c : p) c *= r;
  };
  KahanSum sum, sum_sq;
  std::size_t used = 0;
  while (used < n_mc) {
    draw(u);
    draw(v);
    double r2 = 0.0;
    for (int c = 0; c < d; ++c) {
      const double z = x[c] + u[c] - v[c];
      r2 += z * z;
    }
    if (r2 == 0.0) continue;
    const double g = kernel_sq(d, r2);
    sum += g;
    sum_sq += g * g;
    ++used;
  }
  const double m = sum.value() / static_cast<double>(n_mc);
  const double var = std::max(0.0, sum_sq.value() / static_cast<double>(n_mc) - m * m);
  return {m, std::sqrt(var / static_cast<double>(n_mc)), rhs};
}

double potential_of_measure(const DiscreteMeasure& measure, std::span<const double> x) {
  const int d = measure.dim().value();
  KahanSum s;
  for (std::size_t k = 0; k < measure.size(); ++k) {
    const double r2 = squared_distance(x, measure.atom(k));
    if (r2 == 0.0) throw SingularityError("potential evaluated at an atom");
    s += measure.weight(k) * kernel_sq(d, r2);
  }
  return s.value();
}

}  // namespace cgas
