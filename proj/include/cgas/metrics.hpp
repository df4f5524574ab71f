#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "cgas/measure.hpp"
#include "cgas/transport.hpp"

namespace cgas {

class RadialEquilibrium;

inline constexpr std::size_t kDefaultAtomCap = 8192;

/// The combined atom count of an OT problem exceeds the cap; quantize first.
class AtomCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct TransportPlan {
  std::vector<Flow> flows;
  /// sum_ij c_ij pi_ij with the ground cost of the problem (|x - y|^p, not its p-th root).
  double cost = 0.0;
};

struct OtResult {
  double value = 0.0;  // W_p = cost^{1/p}, or d_BL
  TransportPlan plan;
  /// Feasible Kantorovich pair: u_i + v_j <= c(x_i, y_j).
  std::vector<double> source_potential;
  std::vector<double> target_potential;
  double dual_value = 0.0;
};

/// Dense cost matrix min(|x_i - y_j|, truncate_at)^p, rows assembled in parallel.
CostMatrix build_cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                             double truncate_at = std::numeric_limits<double>::infinity());

OtResult wasserstein_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                           std::size_t atom_cap = kDefaultAtomCap);
double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                   std::size_t atom_cap = kDefaultAtomCap);

/// d_BL as the transport cost for the ground metric min(|x - y|, 2).
OtResult bounded_lipschitz_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 std::size_t atom_cap = kDefaultAtomCap);
double bounded_lipschitz(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         std::size_t atom_cap = kDefaultAtomCap);

/// Test function on supp(mu) and supp(nu) recovered from target potentials v:
/// f(z) = min_j (c(z, y_j) - v_j), centred so that max f = -min f.
/// It is 1-Lipschitz for the ground metric c; `value` = int f dmu - int f dnu.
struct DualCertificate {
  std::vector<double> source_values;
  std::vector<double> target_values;
  double value = 0.0;
};
DualCertificate dual_certificate(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 std::span<const double> target_potential,
                                 double truncate_at = std::numeric_limits<double>::infinity());

/// mu * lambda_eps: centres with a common smoothing radius.
struct SmoothedCloud {
  DiscreteMeasure centers;
  double eps;
};

struct CoulombMetricValue {
  double value;  // max(raw, 0)
  double raw;
};

/// Minimal distance between atoms of the two measures.
double min_cross_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Coulomb energy of a smoothed cloud: sum_{i != j} w_i w_j g(x_i - x_j) + E(lambda_eps) sum w_i^2.
/// Needs intra-cloud separation >= 2 eps.
double smoothed_cloud_energy(const SmoothedCloud& cloud);

/// E(mu - nu) for smoothed clouds with equal eps. All intra- and cross-separations must be
/// >= 2 eps (std::domain_error otherwise); equal inputs return exactly 0.
CoulombMetricValue coulomb_metric_sq(const SmoothedCloud& mu, const SmoothedCloud& nu);
/// E(cloud - mu_V) for a radial equilibrium; the smoothed equilibrium potential is
/// integrated with the fine ball rule.
CoulombMetricValue coulomb_metric_sq(const SmoothedCloud& mu, const RadialEquilibrium& eq);

/// Atoms mapped by x -> scale (x - x0).
DiscreteMeasure push_forward(const DiscreteMeasure& measure, std::span<const double> x0, double scale);

struct LocalTransportCheck {
  double w1_lo;
  double w1_hi;
  double w1_sq;  // w1_hi^2
  double energy;
  double domain_constant;
  double ratio;  // w1_sq / (domain_constant * energy); 0 for identical clouds
};

/// W1(mu, nu)^2 against vol(B_{4R}) E(mu - nu) for smoothed clouds inside B_R.
/// W1 of the smoothed clouds lies in [W1(centres) - 2 eps d/(d+1), W1(centres)]; the upper end is used.
LocalTransportCheck local_transport_check(const SmoothedCloud& mu, const SmoothedCloud& nu, double R);

struct WpChain {
  double wp_p;    // W_p^p
  double bound1;  // (2M)^{p-1} W1
  double bound2;  // M (2M)^{p-1} d_BL
};

/// Both measures must lie in the closed ball B_M, M >= 1.
WpChain wp_compact_chain(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double M, double p);

}  // namespace cgas
