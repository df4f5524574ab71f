#pragma once

#include <span>
#include <vector>

#include "cgas/measure.hpp"
#include "cgas/potential.hpp"

/// Serial, unoptimised versions of the parallel kernels. Kept for tests and benchmarks.
namespace cgas::reference {

/// Ordered-pair sum in input order, one running compensated sum.
double pair_interaction(const PointConfiguration& config);
double hamiltonian(const PointConfiguration& config, const Potential& potential);
/// Full recomputation of both energies.
double move_delta(const PointConfiguration& config, const Potential& potential, std::size_t i,
                  std::span<const double> y);
/// Dense |x_i - y_j|^p cost matrix, row-major.
std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                double truncate_at);

}  // namespace cgas::reference
