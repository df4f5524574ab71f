#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "cgas/measure.hpp"
#include "cgas/potential.hpp"

namespace cgas {

/// solve_equilibrium could not produce a ball-supported equilibrium measure.
class EquilibriumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (H_beta) fails: exp(-beta/2 (V - 1_{d=2} log(1 + |x|^2))) is not integrable.
class ModelUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed composite Gauss–Legendre table for int_{B_R} f(|x|) dx = |S^{d-1}| int_0^R f(r) r^{d-1} dr.
/// Construction checks that monomials r^k, k < order, come out exact to 1e-13.
class RadialQuadrature {
 public:
  RadialQuadrature(int dim, double radius, int panels = 8, int order = 32);
  double integrate(const std::function<double(double)>& f) const;
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Equilibrium measure of a radial potential, supported on the ball B_{R_V}, with density
/// Delta V / (2 c_d) there. Immutable; share freely between threads.
class RadialEquilibrium {
 public:
  SpaceDim dim() const noexcept;
  double support_radius() const noexcept;
  const Potential& potential() const noexcept;
  /// Density with respect to Lebesgue measure at radius r (0 outside the support).
  double density(double r) const;
  /// mu_V(B_r).
  double mass_within(double r) const;
  /// U^{mu_V}(r), from a cubic Hermite table inside the support and g(r) outside.
  double potential_at(double r) const;
  /// U^{mu_V}(r) by direct quadrature (slow; used to build the table).
  double potential_exact(double r) const;
  double energy() const noexcept;
  double potential_moment() const noexcept;
  double entropy() const noexcept;
  double robin() const noexcept;
  /// E_V(mu_V) = E(mu_V) + int V dmu_V.
  double weighted_energy() const noexcept;

 private:
  friend RadialEquilibrium solve_equilibrium(const Potential& potential, SpaceDim dim);
  struct Data;
  explicit RadialEquilibrium(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

/// Throws EquilibriumError ("density negative", "not normalizable", "support not a ball for
/// this V") and std::invalid_argument for non-radial potentials.
RadialEquilibrium solve_equilibrium(const Potential& potential, SpaceDim dim);

double radial_potential(const RadialEquilibrium& eq, double r);
double equilibrium_energy(const RadialEquilibrium& eq);
double robin_constant(const RadialEquilibrium& eq);
double entropy(const RadialEquilibrium& eq);

struct ElResidual {
  double inside_max_abs;  // max_{r <= R_V} |2U + V - e_V|
  double outside_min;     // min_{R_V < r <= 4 R_V} (2U + V - e_V)
};
/// Residual on `grid_size` equispaced radii in each of [0, R_V] and (R_V, 4 R_V].
/// Uses the direct quadrature for U, not the table.
ElResidual euler_lagrange_residual(const RadialEquilibrium& eq, int grid_size = 64);

/// n i.i.d. draws from mu_V (radius by bisection on the mass function, uniform direction).
DiscreteMeasure sample_equilibrium(const RadialEquilibrium& eq, std::size_t n, std::uint64_t seed);

struct QuantizedEquilibrium {
  DiscreteMeasure measure;
  double h;
  /// sum_k int_{cell k} |x - c_k| dmu_V(x): cost of the cell-to-centre coupling, an upper
  /// bound for W1 (and d_BL) between mu_V and the quantization.
  double coupling_cost;
  /// The a priori bound h sqrt(d) / 2.
  double error_bound;
};

/// Atoms at the centres of the cells of the grid h (Z + 1/2)^d that meet B_{R_V}; weights are
/// the cell masses, renormalised to sum to one.
QuantizedEquilibrium quantize_to_grid(const RadialEquilibrium& eq, double h);

/// Number of grid cells of step h meeting the open ball B_{R_V}.
std::size_t grid_cell_count(const RadialEquilibrium& eq, double h);
/// Smallest step (to 0.1%) whose grid has at most `max_atoms` cells meeting the support.
double grid_step_for_budget(const RadialEquilibrium& eq, std::size_t max_atoms);

/// log int exp(-beta/2 (V(x) - 1_{d=2} log(1 + |x|^2))) dx for radial V. Throws ModelUndefined
/// when the integrand does not decay.
double c_beta_integral(const Potential& potential, SpaceDim dim, double beta);

}  // namespace cgas
