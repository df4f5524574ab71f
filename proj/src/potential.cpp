#include "cgas/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace cgas {

struct Potential::Impl {
  std::string name;
  ValueFn value;
  GradientFn gradient;
  LaplacianFn laplacian;
  std::optional<RadialProfile> profile;
  std::optional<double> kappa;
  std::vector<double> coeffs;
};

Potential::Potential(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Potential Potential::radial(std::string name, RadialProfile p, std::optional<double> kappa) {
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  impl->kappa = kappa;
  impl->value = [v = p.value](std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return v(std::sqrt(s));
  };
  impl->gradient = [g = p.slope_over_r](std::span<const double> x, std::span<double> out) {
    double s = 0.0;
    for (double c : x) s += c * c;
    const double k = g(std::sqrt(s));
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = k * x[i];
  };
  impl->laplacian = [l = p.laplacian](std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return l(std::sqrt(s), static_cast<int>(x.size()));
  };
  impl->profile = std::move(p);
  return Potential(std::move(impl));
}

Potential Potential::radial_polynomial(std::vector<double> coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() < 2 || !(coeffs.back() > 0.0))
    throw std::invalid_argument("radial polynomial needs a positive top coefficient of degree >= 2");
  for (double a : coeffs)
    if (!std::isfinite(a)) throw std::invalid_argument("non-finite polynomial coefficient");
  RadialProfile p;
  // Horner in r^2.
  p.value = [c = coeffs](double r) {
    const double s = r * r;
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
    return acc;
  };
  p.slope_over_r = [c = coeffs](double r) {
    const double s = r * r;
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * s + 2.0 * static_cast<double>(k) * c[k];
    return acc;
  };
  p.slope = [g = p.slope_over_r](double r) { return r * g(r); };
  p.laplacian = [c = coeffs](double r, int d) {
    const double s = r * r;
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
      const double kk = static_cast<double>(k);
      acc = acc * s + 2.0 * kk * (2.0 * kk + d - 2.0) * c[k];
    }
    return acc;
  };
  std::string name;
  if (coeffs.size() == 2 && coeffs[0] == 0.0) {
    name = coeffs[1] == 1.0 ? "|x|^2" : std::to_string(coeffs[1]) + "|x|^2";
  } else {
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (coeffs[k] == 0.0) continue;
      if (!name.empty()) name += " + ";
      name += std::to_string(coeffs[k]) + (k == 0 ? "" : "|x|^" + std::to_string(2 * k));
    }
  }
  const double kappa = 2.0 * static_cast<double>(coeffs.size() - 1);
  Potential out = radial(name, std::move(p), kappa);
  auto impl = std::make_shared<Impl>(*out.impl_);
  impl->coeffs = std::move(coeffs);
  return Potential(std::move(impl));
}

Potential Potential::quadratic(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("quadratic potential needs t > 0");
  return radial_polynomial({0.0, t});
}

Potential Potential::linear(std::vector<double> a, double c0) {
  auto impl = std::make_shared<Impl>();
  impl->name = "linear";
  impl->value = [a, c0](std::span<const double> x) {
    double s = c0;
    for (std::size_t i = 0; i < x.size(); ++i) s += a[i] * x[i];
    return s;
  };
  impl->gradient = [a](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a[i];
  };
  impl->laplacian = [](std::span<const double>) { return 0.0; };
  return Potential(std::move(impl));
}

Potential Potential::custom(std::string name, ValueFn value, GradientFn gradient, LaplacianFn laplacian) {
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  impl->value = std::move(value);
  impl->gradient = std::move(gradient);
  impl->laplacian = std::move(laplacian);
  return Potential(std::move(impl));
}

double Potential::value(std::span<const double> x) const { return impl_->value(x); }
void Potential::gradient(std::span<const double> x, std::span<double> out) const { impl_->gradient(x, out); }
double Potential::laplacian(std::span<const double> x) const { return impl_->laplacian(x); }
bool Potential::is_radial() const noexcept { return impl_->profile.has_value(); }

const RadialProfile& Potential::profile() const {
  if (!impl_->profile) throw std::logic_error("potential '" + impl_->name + "' is not radial");
  return *impl_->profile;
}

std::optional<double> Potential::growth_kappa() const noexcept { return impl_->kappa; }

std::optional<double> Potential::laplacian_sup(int d) const {
  const auto& c = impl_->coeffs;
  if (c.size() == 2) return 2.0 * d * c[1];
  return std::nullopt;
}

const std::string& Potential::name() const noexcept { return impl_->name; }
const std::vector<double>& Potential::polynomial_coeffs() const noexcept { return impl_->coeffs; }

}  // namespace cgas
