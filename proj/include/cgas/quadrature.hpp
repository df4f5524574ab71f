#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cgas {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule; thread-safe.
const GaussLegendre& gauss_legendre(int n);

/// Composite 64-node Gauss–Legendre on [a, b]. The panel count doubles until two
/// successive estimates agree to `tol * (1 + |I|)`; throws QuadratureError otherwise.
/// `grade_left` places panels geometrically toward `a`, for integrands with a weak
/// singularity there (s log s, ...).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, bool grade_left = false);

/// Fixed-panel variant used where the rule must be fully deterministic and cheap.
double integrate_fixed(const std::function<double(double)>& f, double a, double b, int panels,
                       int order = 64);

/// Quadrature rule for the uniform probability measure on the unit ball of R^d:
/// nodes are d-vectors (row-major), weights sum to 1.
struct BallRule {
  int dim = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t k) const {
    return {nodes.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Sphere rule on S^{d-1} with weights summing to 1.
struct SphereRule {
  int dim = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// 26-point Lebedev rule on S^2 (degree 7).
SphereRule lebedev26();
/// Equispaced trapezoid rule on the circle (exact for trigonometric degree < n).
SphereRule circle_rule(int n);
/// Product rule on S^{d-1}, recursive over polar angles, `m` Gauss nodes per angle
/// and 2m points on the innermost circle.
SphereRule product_sphere_rule(int dim, int m);

/// Radial Gauss rule (n nodes, weight d r^{d-1} on [0,1]) times a sphere rule.
BallRule make_ball_rule(int radial_nodes, const SphereRule& sphere);

/// Coarse rule for smoothing integrals: 32 radial nodes with 64 angles (d=2),
/// Lebedev-26 (d=3), product rule (d>=4).
const BallRule& coarse_ball_rule(int dim);
/// Refined companion of coarse_ball_rule used for the error estimate.
const BallRule& fine_ball_rule(int dim);

}  // namespace cgas
