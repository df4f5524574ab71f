#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cgas {

/// V(x) = v(|x|). `slope_over_r` is v'(r)/r, kept separate so that it stays finite at r = 0.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::function<double(double)> slope_over_r;
  std::function<double(double, int)> laplacian;
};

/// External potential with value, gradient and Laplacian callbacks. Cheap to copy.
class Potential {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;
  using LaplacianFn = std::function<double(std::span<const double>)>;

  /// t |x|^2, t > 0.
  static Potential quadratic(double t = 1.0);
  /// sum_k coeffs[k] |x|^{2k}; the top coefficient must be positive.
  static Potential radial_polynomial(std::vector<double> coeffs);
  /// <a, x> + c0. Not confining; used for smoothing checks.
  static Potential linear(std::vector<double> a, double c0 = 0.0);
  /// Radial potential from a profile; `kappa` is the growth exponent if known.
  static Potential radial(std::string name, RadialProfile profile, std::optional<double> kappa = {});
  static Potential custom(std::string name, ValueFn value, GradientFn gradient, LaplacianFn laplacian);

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  double laplacian(std::span<const double> x) const;

  bool is_radial() const noexcept;
  /// Throws std::logic_error for non-radial potentials.
  const RadialProfile& profile() const;
  /// kappa > 0 with liminf V/|x|^kappa > 0, when known.
  std::optional<double> growth_kappa() const noexcept;
  /// D with sup Delta V <= D in dimension d, when finite and known.
  std::optional<double> laplacian_sup(int d) const;
  const std::string& name() const noexcept;
  /// Polynomial coefficients when built by radial_polynomial/quadratic.
  const std::vector<double>& polynomial_coeffs() const noexcept;

 private:
  struct Impl;
  explicit Potential(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace cgas
