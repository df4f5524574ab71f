#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "cgas/measure.hpp"
#include "cgas/potential.hpp"

namespace cgas {

struct CoulombConstants {
  double c_d;      // Poisson constant: -Delta g = c_d delta_0
  double alpha_d;  // grad g(x) = -alpha_d x / |x|^d
};

CoulombConstants coulomb_constants(SpaceDim dim);
double coulomb_constant(SpaceDim dim);
/// Surface area |S^{d-1}|.
double sphere_area(int d);
double ball_volume(int d, double radius);

/// g as a function of the squared distance; no singularity check.
inline double kernel_sq(int d, double r2) {
  switch (d) {
    case 2:
      return -0.5 * std::log(r2);
    case 3:
      return 1.0 / std::sqrt(r2);
    default:
      return std::pow(r2, 0.5 * (2 - d));
  }
}

/// g as a function of the distance r > 0.
inline double kernel_radial(int d, double r) {
  return d == 2 ? -std::log(r) : (d == 3 ? 1.0 / r : std::pow(r, 2 - d));
}

/// log(1/|x|) for d = 2, |x|^{2-d} for d >= 3. Throws SingularityError at x = 0.
double coulomb_kernel(SpaceDim dim, std::span<const double> x);

/// sum_{i != j} g(x_i - x_j) over ordered pairs, accumulated in a canonical order
/// (lexicographically sorted points, compensated row sums, rows reduced serially), so the
/// result is independent of the point labelling and of the OpenMP thread count.
/// Returns +inf when two points coincide.
double pair_interaction(const PointConfiguration& config);

/// H_N = sum_{i != j} g(x_i - x_j) + N sum_i V(x_i); +inf on coincident points.
double hamiltonian(const PointConfiguration& config, const Potential& potential);

/// H(config with x_i := y) - H(config) in O(N); +inf if y hits another particle.
double move_delta(const PointConfiguration& config, const Potential& potential, std::size_t i,
                  std::span<const double> y);

/// Coulomb energy of the uniform probability measure on the ball of radius eps.
double ball_energy(SpaceDim dim, double eps);

/// Potential of the uniform probability measure on B_eps at distance s from its centre.
double ball_potential(int d, double eps, double s);

/// E(delta_0 * lambda_eps, delta_z * lambda_eps) for |z| = dist >= 0. Equals g(dist) when
/// dist >= 2 eps; a one-dimensional integral against the law of |U - V| otherwise.
/// At dist = 0 this is E(lambda_eps).
double smoothed_pair_energy(int d, double eps, double dist);
/// Density of |U - V| for U, V independent uniform on the unit ball of R^d (support [0, 2]).
double ball_difference_density(int d, double r);

/// Smallest pairwise distance (+inf for a single point).
double min_pair_distance(const PointConfiguration& config);

/// E_V of the empirical measure convolved with lambda_eps. Requires pairwise separation
/// >= 2 eps (throws std::domain_error otherwise), where the smoothed pair energies are exact.
double smoothed_empirical_energy(const PointConfiguration& config, const Potential& potential,
                                 double eps);

struct SmearEstimate {
  double value;
  double error;
};

/// (V * lambda_eps - V)(x) with an error estimate from the refined ball rule.
SmearEstimate smear_gap_estimate(const Potential& potential, std::span<const double> x, double eps);
/// Same, throwing QuadratureError when the two rules disagree beyond 1e-10 (1 + |V(x)|).
double smear_gap(const Potential& potential, std::span<const double> x, double eps);

struct SuperharmonicityResult {
  double lhs;
  double std_error;
  double rhs;
};

/// Monte Carlo estimate of the double ball average of g(x + u - v) over lambda_R x lambda_R,
/// against g(x).
SuperharmonicityResult superharmonicity_check(SpaceDim dim, std::span<const double> x, double radius,
                                              std::size_t n_mc, std::uint64_t seed);

/// U^mu(x) = sum_k w_k g(x - p_k). Throws SingularityError if x is an atom.
double potential_of_measure(const DiscreteMeasure& measure, std::span<const double> x);

}  // namespace cgas
