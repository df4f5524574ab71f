#pragma once

#include <cstddef>
#include <functional>

#include "cgas/equilibrium.hpp"
#include "cgas/measure.hpp"
#include "cgas/potential.hpp"

namespace cgas {

enum class MetricTag { BL, W1 };

struct EquilibriumStats {
  double energy;            // E(mu_V)
  double potential_moment;  // int V dmu_V
  double entropy;           // S(mu_V)
  double robin;             // e_V
  double weighted_energy;   // E_V(mu_V)
};

EquilibriumStats equilibrium_stats(const RadialEquilibrium& eq);

/// Constants of the concentration bound for potentials with bounded Laplacian.
struct BoundConstants {
  SpaceDim dim{2};
  MetricTag metric = MetricTag::BL;
  double C = 0.0;
  double D = 0.0;
  double a = 0.0;  // 1 / (8C)
  double b = 0.0;  // (1/C + E(lambda_1) + D / (2(d+2))) / 2
  /// c(beta) = (beta/2) int V dmu_V - S(mu_V) + log int exp(-beta/2 (V - 1_{d=2} log(1+|x|^2))).
  std::function<double(double)> c_of_beta;
};

/// Throws std::invalid_argument if C <= 0 or if Delta V exceeds D somewhere on a sample grid
/// (radii in [0, 16] for radial V, the cube [-4, 4]^d otherwise).
BoundConstants concentration_constants(const EquilibriumStats& stats, const Potential& potential, SpaceDim dim,
                                  double C, double D, MetricTag metric = MetricTag::BL);

/// -a beta N^2 r^2 + 1_{d=2} (beta/4) N log N + b beta N^{2-2/d} + c(beta) N.
double concentration_log_bound(const BoundConstants& k, std::size_t n, double r, double beta);
/// min(1, exp(log bound)).
double concentration_bound(const BoundConstants& k, std::size_t n, double r, double beta);

/// -N^2 r^2 / (4C) + (1/2) N log N + N (1/C + 3/2 - log pi).
double ginibre_log_bound(std::size_t n, double r, double C);
double ginibre_bound(std::size_t n, double r, double C);

/// vol(B_{4R}).
double domain_constant(SpaceDim dim, double R);

/// v sqrt(log N / N) for d = 2, v N^{-1/d} for d >= 3.
double r_threshold(std::size_t n, SpaceDim dim, double v);

/// log of the lower bound -N^2 (beta/2) E_V(mu_V) + N ((beta/2) E(mu_V) + S(mu_V)).
double partition_lower_bound(const EquilibriumStats& stats, std::size_t n, double beta);

/// log Z for (d, beta, V) = (2, 2, |x|^2): N log pi - N(N+1)/2 log N + sum_{k<=N} log k!.
double ginibre_log_z(std::size_t n);

/// min_{|x| >= r} V(x) for radial V. Throws std::domain_error if V decreases without bound.
double v_star(const Potential& potential, double r);

}  // namespace cgas
