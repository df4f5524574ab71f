#include "cgas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cgas/common.hpp"
#include "cgas/equilibrium.hpp"
#include "cgas/kernel.hpp"
#include "cgas/quadrature.hpp"

namespace cgas {

namespace {

void check_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t cap) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("measures live in different dimensions");
  if (mu.size() + nu.size() > cap)
    throw AtomCapExceeded("transport problem has " + std::to_string(mu.size() + nu.size()) +
                          " atoms, above the cap of " + std::to_string(cap) +
                          "; quantize the measures first");
}

OtResult solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& cost) {
  auto sol = solve_transport(mu.weights(), nu.weights(), cost);
  OtResult out;
  out.plan.flows = std::move(sol.flows);
  out.plan.cost = std::max(sol.cost, 0.0);
  out.source_potential = std::move(sol.source_potential);
  out.target_potential = std::move(sol.target_potential);
  out.dual_value = sol.dual_value;
  return out;
}

void check_separation(const DiscreteMeasure& m, double eps) {
  const auto n = m.size();
  const double min2 = 4.0 * eps * eps;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (squared_distance(m.atom(a), m.atom(b)) < min2)
        throw std::domain_error("smoothed cloud atoms closer than 2 eps");
}

// sum_{i,j} w_i v_j g(x_i - y_j) with compensated row sums reduced in row order.
double cross_energy(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const int d = mu.dim().value();
  const auto m = static_cast<std::ptrdiff_t>(mu.size());
  std::vector<double> rows(mu.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    KahanSum row;
    for (std::size_t j = 0; j < nu.size(); ++j)
      row += nu.weight(j) * kernel_sq(d, squared_distance(mu.atom(static_cast<std::size_t>(i)), nu.atom(j)));
    rows[static_cast<std::size_t>(i)] = mu.weight(static_cast<std::size_t>(i)) * row.value();
  }
  KahanSum total;
  for (double r : rows) total += r;
  return total.value();
}

}  // namespace

CostMatrix build_cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                             double truncate_at) {
  if (!(p >= 1.0)) throw std::invalid_argument("transport exponent must be >= 1");
  CostMatrix c{mu.size(), nu.size(), std::vector<double>(mu.size() * nu.size())};
  const auto m = static_cast<std::ptrdiff_t>(mu.size());
  const std::size_t n = nu.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const auto x = mu.atom(static_cast<std::size_t>(i));
    double* row = c.data.data() + static_cast<std::size_t>(i) * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = std::min(distance(x, nu.atom(j)), truncate_at);
      row[j] = p == 1.0 ? r : (p == 2.0 ? r * r : std::pow(r, p));
    }
  }
  return c;
}

OtResult wasserstein_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                           std::size_t atom_cap) {
  check_pair(mu, nu, atom_cap);
  auto out = solve(mu, nu, build_cost_matrix(mu, nu, p));
  out.value = std::pow(out.plan.cost, 1.0 / p);
  return out;
}

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, std::size_t atom_cap) {
  return wasserstein_solve(mu, nu, p, atom_cap).value;
}

OtResult bounded_lipschitz_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t atom_cap) {
  check_pair(mu, nu, atom_cap);
  auto out = solve(mu, nu, build_cost_matrix(mu, nu, 1.0, 2.0));
  out.value = out.plan.cost;
  return out;
}

double bounded_lipschitz(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t atom_cap) {
  return bounded_lipschitz_solve(mu, nu, atom_cap).value;
}

DualCertificate dual_certificate(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 std::span<const double> target_potential, double truncate_at) {
  if (target_potential.size() != nu.size()) throw std::invalid_argument("potential size mismatch");
  auto f = [&](std::span<const double> z) {
    double best = kInf;
    for (std::size_t j = 0; j < nu.size(); ++j)
      best = std::min(best, std::min(distance(z, nu.atom(j)), truncate_at) - target_potential[j]);
    return best;
  };
  DualCertificate cert;
  for (std::size_t i = 0; i < mu.size(); ++i) cert.source_values.push_back(f(mu.atom(i)));
  for (std::size_t j = 0; j < nu.size(); ++j) cert.target_values.push_back(f(nu.atom(j)));
  double lo = kInf, hi = -kInf;
  for (double x : cert.source_values) lo = std::min(lo, x), hi = std::max(hi, x);
  for (double x : cert.target_values) lo = std::min(lo, x), hi = std::max(hi, x);
  const double shift = 0.5 * (lo + hi);
  KahanSum value;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    cert.source_values[i] -= shift;
    value += mu.weight(i) * cert.source_values[i];
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    cert.target_values[j] -= shift;
    value += -nu.weight(j) * cert.target_values[j];
  }
  cert.value = value.value();
  return cert;
}

double min_cross_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  double best = kInf;
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) best = std::min(best, squared_distance(mu.atom(i), nu.atom(j)));
  return std::sqrt(best);
}

double smoothed_cloud_energy(const SmoothedCloud& cloud) {
  const auto& m = cloud.centers;
  check_separation(m, cloud.eps);
  const int d = m.dim().value();
  const auto n = static_cast<std::ptrdiff_t>(m.size());
  std::vector<double> rows(m.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t a = 0; a < n; ++a) {
    const auto i = static_cast<std::size_t>(a);
    KahanSum row;
    for (std::size_t j = i + 1; j < m.size(); ++j)
      row += m.weight(j) * kernel_sq(d, squared_distance(m.atom(i), m.atom(j)));
    rows[i] = m.weight(i) * row.value();
  }
  KahanSum pairs, squares;
  for (double r : rows) pairs += r;
  for (double w : m.weights()) squares += w * w;
  return 2.0 * pairs.value() + ball_energy(m.dim(), cloud.eps) * squares.value();
}

CoulombMetricValue coulomb_metric_sq(const SmoothedCloud& mu, const SmoothedCloud& nu) {
  if (mu.centers.dim() != nu.centers.dim()) throw std::invalid_argument("dimension mismatch");
  if (mu.eps != nu.eps) throw std::invalid_argument("smoothing radii differ");
  if (mu.centers == nu.centers) return {0.0, 0.0};
  if (min_cross_distance(mu.centers, nu.centers) < 2.0 * mu.eps)
    throw std::domain_error("cross-cloud atoms closer than 2 eps");
  KahanSum e;
  e += smoothed_cloud_energy(mu);
  e += smoothed_cloud_energy(nu);
  e += -2.0 * cross_energy(mu.centers, nu.centers);
  const double raw = e.value();
  return {std::max(raw, 0.0), raw};
}

CoulombMetricValue coulomb_metric_sq(const SmoothedCloud& mu, const RadialEquilibrium& eq) {
  const auto& m = mu.centers;
  if (m.dim() != eq.dim()) throw std::invalid_argument("dimension mismatch");
  const int d = m.dim().value();
  const auto& rule = fine_ball_rule(d);
  std::vector<double> smeared(m.size());
  const auto n = static_cast<std::ptrdiff_t>(m.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t a = 0; a < n; ++a) {
    const auto x = m.atom(static_cast<std::size_t>(a));
    KahanSum s;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const auto u = rule.node(k);
      double r2 = 0.0;
      for (int c = 0; c < d; ++c) {
        const double z = x[c] + mu.eps * u[c];
        r2 += z * z;
      }
      s += rule.weights[k] * eq.potential_at(std::sqrt(r2));
    }
    smeared[static_cast<std::size_t>(a)] = m.weight(static_cast<std::size_t>(a)) * s.value();
  }
  KahanSum cross;
  for (double v : smeared) cross += v;
  KahanSum e;
  e += smoothed_cloud_energy(mu);
  e += eq.energy();
  e += -2.0 * cross.value();
  const double raw = e.value();
  return {std::max(raw, 0.0), raw};
}

DiscreteMeasure push_forward(const DiscreteMeasure& measure, std::span<const double> x0, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  const int d = measure.dim().value();
  if (x0.size() != static_cast<std::size_t>(d)) throw std::invalid_argument("centre has wrong dimension");
  std::vector<double> coords(measure.coords().begin(), measure.coords().end());
  for (std::size_t k = 0; k < coords.size(); ++k) coords[k] = scale * (coords[k] - x0[k % d]);
  const auto w = measure.weights();
  return DiscreteMeasure(measure.dim(), std::move(coords), std::vector<double>(w.begin(), w.end()));
}

LocalTransportCheck local_transport_check(const SmoothedCloud& mu, const SmoothedCloud& nu, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
  for (const auto* c : {&mu, &nu})
    for (std::size_t i = 0; i < c->centers.size(); ++i)
      if (norm(c->centers.atom(i)) > R - c->eps) throw std::domain_error("smoothed cloud leaves B_R");
  LocalTransportCheck out{};
  out.domain_constant = ball_volume(mu.centers.dim().value(), 4.0 * R);
  if (mu.centers == nu.centers && mu.eps == nu.eps) return out;
  const double w1 = wasserstein(mu.centers, nu.centers, 1.0);
  const double d = mu.centers.dim().value();
  // Shared smoothing contracts W1; each smoothing moves mass by eps d / (d + 1) on average.
  out.w1_lo = std::max(0.0, w1 - 2.0 * mu.eps * d / (d + 1.0));
  out.w1_hi = w1;
  out.w1_sq = out.w1_hi * out.w1_hi;
  out.energy = coulomb_metric_sq(mu, nu).value;
  out.ratio = out.w1_sq / (out.domain_constant * out.energy);
  return out;
}

WpChain wp_compact_chain(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double M, double p) {
  if (!(M >= 1.0)) throw std::invalid_argument("M must be >= 1");
  for (const auto* m : {&mu, &nu})
    for (std::size_t i = 0; i < m->size(); ++i)
      if (norm(m->atom(i)) > M) throw std::domain_error("measure leaves B_M");
  const double scale = std::pow(2.0 * M, p - 1.0);
  const double w1 = wasserstein(mu, nu, 1.0);
  return {wasserstein_solve(mu, nu, p).plan.cost, scale * w1, M * scale * bounded_lipschitz(mu, nu)};
}

}  // namespace cgas
