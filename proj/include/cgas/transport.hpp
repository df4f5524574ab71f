#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cgas {

/// Dense row-major cost matrix of a transportation problem.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct Flow {
  std::size_t source;
  std::size_t target;
  double mass;
};

struct TransportSolution {
  double cost = 0.0;
  /// Value of the feasible dual (u, v) below; cost - dual_value is the duality gap.
  double dual_value = 0.0;
  /// u_i + v_j <= c_ij for all i, j (v is the c-transform of u).
  std::vector<double> source_potential;
  std::vector<double> target_potential;
  /// Nonzero flows, ordered by (source, target).
  std::vector<Flow> flows;
  std::size_t pivots = 0;
};

/// Exact min-cost transportation by the primal network simplex on the complete bipartite
/// graph (block-search pivoting, strongly feasible spanning trees, ties broken by arc index).
/// Supplies and demands must be positive with equal totals (within 1e-12).
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const CostMatrix& cost);

}  // namespace cgas
