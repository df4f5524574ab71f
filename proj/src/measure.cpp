#include "cgas/measure.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cgas/common.hpp"

namespace cgas {

SpaceDim::SpaceDim(int d) : d_(d) {
  if (d < 2) throw std::invalid_argument("dimension must be >= 2, got " + std::to_string(d));
}

PointConfiguration::PointConfiguration(SpaceDim dim, std::vector<double> coords)
    : dim_(dim), n_(coords.size() / static_cast<std::size_t>(dim.value())), coords_(std::move(coords)) {
  if (coords_.size() % static_cast<std::size_t>(dim.value()) != 0)
    throw std::invalid_argument("coordinate count is not a multiple of the dimension");
  if (n_ == 0) throw std::invalid_argument("configuration needs at least one point");
  for (double c : coords_)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite coordinate");
}

PointConfiguration::PointConfiguration(SpaceDim dim, std::size_t n)
    : PointConfiguration(dim, std::vector<double>(n * static_cast<std::size_t>(dim.value()), 0.0)) {}

void PointConfiguration::set_point(std::size_t i, std::span<const double> x) {
  for (std::size_t c = 0; c < stride(); ++c) {
    if (!std::isfinite(x[c])) throw std::invalid_argument("non-finite coordinate");
    coords_[i * stride() + c] = x[c];
  }
}

DiscreteMeasure::DiscreteMeasure(SpaceDim dim, std::vector<double> coords, std::vector<double> weights)
    : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
  const auto d = static_cast<std::size_t>(dim.value());
  if (weights_.empty()) throw std::invalid_argument("measure needs at least one atom");
  if (coords_.size() != weights_.size() * d)
    throw std::invalid_argument("coordinate count does not match atom count");
  KahanSum total;
  for (double w : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("atom weights must be positive");
    total += w;
  }
  if (std::fabs(total.value() - 1.0) > 1e-12)
    throw std::invalid_argument("atom weights must sum to 1");
  for (double c : coords_)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite atom coordinate");
}

DiscreteMeasure DiscreteMeasure::uniform(SpaceDim dim, std::vector<double> coords) {
  const std::size_t n = coords.size() / static_cast<std::size_t>(dim.value());
  return DiscreteMeasure(dim, std::move(coords), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::vector<double> DiscreteMeasure::mean() const {
  const auto d = static_cast<std::size_t>(dim_.value());
  std::vector<double> m(d, 0.0);
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t c = 0; c < d; ++c) m[c] += weights_[i] * coords_[i * d + c];
  return m;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double t = x[c] - y[c];
    s += t * t;
  }
  return s;
}

double distance(std::span<const double> x, std::span<const double> y) {
  return std::sqrt(squared_distance(x, y));
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace cgas
