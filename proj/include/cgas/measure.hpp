#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cgas {

/// Ambient dimension d >= 2.
class SpaceDim {
 public:
  explicit SpaceDim(int d);
  int value() const noexcept { return d_; }
  operator int() const noexcept { return d_; }
  friend bool operator==(SpaceDim, SpaceDim) = default;

 private:
  int d_;
};

/// N particle positions in R^d, stored row-major. Size and dimension are fixed at
/// construction; coordinates may be updated in place (MCMC moves).
class PointConfiguration {
 public:
  PointConfiguration(SpaceDim dim, std::vector<double> coords);
  PointConfiguration(SpaceDim dim, std::size_t n);

  SpaceDim dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return n_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * stride(), stride()};
  }
  void set_point(std::size_t i, std::span<const double> x);
  std::span<const double> coords() const noexcept { return coords_; }

 private:
  std::size_t stride() const noexcept { return static_cast<std::size_t>(dim_.value()); }
  SpaceDim dim_;
  std::size_t n_;
  std::vector<double> coords_;
};

/// Finite weighted point set with positive weights summing to one (within 1e-12).
class DiscreteMeasure {
 public:
  DiscreteMeasure(SpaceDim dim, std::vector<double> coords, std::vector<double> weights);
  /// Uniform weights 1/n.
  static DiscreteMeasure uniform(SpaceDim dim, std::vector<double> coords);

  SpaceDim dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> atom(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_.value()),
            static_cast<std::size_t>(dim_.value())};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> coords() const noexcept { return coords_; }
  std::vector<double> mean() const;

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  SpaceDim dim_;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

double squared_distance(std::span<const double> x, std::span<const double> y);
double distance(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);

}  // namespace cgas
