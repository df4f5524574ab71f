#include "cgas/reference.hpp"

#include <cmath>

#include "cgas/common.hpp"
#include "cgas/kernel.hpp"

namespace cgas::reference {

double pair_interaction(const PointConfiguration& config) {
  const int d = config.dim().value();
  KahanSum s;
  for (std::size_t i = 0; i < config.size(); ++i)
    for (std::size_t j = 0; j < config.size(); ++j) {
      if (i == j) continue;
      const double r2 = squared_distance(config.point(i), config.point(j));
      if (r2 == 0.0) return kInf;
      s += kernel_sq(d, r2);
    }
  return s.value();
}

double hamiltonian(const PointConfiguration& config, const Potential& potential) {
  const double pairs = reference::pair_interaction(config);
  if (pairs == kInf) return kInf;
  KahanSum ext;
  for (std::size_t i = 0; i < config.size(); ++i) ext += potential.value(config.point(i));
  return pairs + static_cast<double>(config.size()) * ext.value();
}

double move_delta(const PointConfiguration& config, const Potential& potential, std::size_t i,
                  std::span<const double> y) {
  PointConfiguration moved = config;
  moved.set_point(i, y);
  const double after = reference::hamiltonian(moved, potential);
  if (after == kInf) return kInf;
  return after - reference::hamiltonian(config, potential);
}

std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                double truncate_at) {
  std::vector<double> c(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) {
      double r = distance(mu.atom(i), nu.atom(j));
      if (r > truncate_at) r = truncate_at;
      c[i * nu.size() + j] = p == 1.0 ? r : std::pow(r, p);
    }
  return c;
}

}  // namespace cgas::reference
