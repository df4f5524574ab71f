#include "cgas/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "cgas/common.hpp"
#include "cgas/kernel.hpp"
#include "cgas/quadrature.hpp"

namespace cgas {

RadialQuadrature::RadialQuadrature(int dim, double radius, int panels, int order) {
  if (!(radius > 0.0) || panels < 1 || order < 2) throw std::invalid_argument("bad radial quadrature");
  const auto& gl = gauss_legendre(order);
  const double area = sphere_area(dim);
  const double h = radius / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double r = mid + 0.5 * h * gl.nodes[k];
      nodes_.push_back(r);
      weights_.push_back(0.5 * h * gl.weights[k] * area * std::pow(r, dim - 1));
    }
  }
  for (int k = 0; k < order; ++k) {
    const double got = integrate([k](double r) { return std::pow(r, k); });
    const double want = area * std::pow(radius, k + dim) / (k + dim);
    if (std::fabs(got - want) > 1e-13 * std::max(1.0, std::fabs(want)))
      throw std::logic_error("radial quadrature fails its monomial check");
  }
}

double RadialQuadrature::integrate(const std::function<double(double)>& f) const {
  KahanSum s;
  for (std::size_t k = 0; k < nodes_.size(); ++k) s += weights_[k] * f(nodes_[k]);
  return s.value();
}

namespace {

constexpr int kTableIntervals = 1024;
constexpr double kInnerTol = 1e-12;

}  // namespace

struct RadialEquilibrium::Data {
  SpaceDim dim{2};
  Potential potential = Potential::quadratic();
  RadialProfile profile;
  double c_d = 0.0;
  double area = 0.0;
  double radius = 0.0;
  std::vector<double> u_table;
  std::vector<double> du_table;
  double energy = 0.0;
  double moment = 0.0;
  double entropy = 0.0;

  double density(double r) const {
    return r <= radius ? profile.laplacian(r, dim.value()) / (2.0 * c_d) : 0.0;
  }
  // Divergence theorem on B_r: mu_V(B_r) = |S| r^{d-1} v'(r) / (2 c_d).
  double mass(double r) const {
    if (r >= radius) return 1.0;
    return area * std::pow(r, dim.value()) * profile.slope_over_r(r) / (2.0 * c_d);
  }
  double radial_mass_density(double r) const {
    return area * std::pow(r, dim.value() - 1) * density(r);
  }
  double exact_potential(double r) const {
    const int d = dim.value();
    if (r >= radius) return kernel_radial(d, r);
    auto tail = [&](double s) { return kernel_radial(d, s) * radial_mass_density(s); };
    if (r == 0.0) return integrate(tail, 0.0, radius, kInnerTol, true);
    return kernel_radial(d, r) * mass(r) + integrate(tail, r, radius, kInnerTol);
  }
  // U'(r) = g'(r) m(r) = -alpha_d m(r) / r^{d-1}, written so that r = 0 is harmless.
  double potential_slope(double r) const {
    const int d = dim.value();
    const double alpha = d == 2 ? 1.0 : d - 2.0;
    return -alpha * area * r * profile.slope_over_r(r) / (2.0 * c_d);
  }
  double table_potential(double r) const {
    if (r >= radius) return kernel_radial(dim.value(), r);
    const double h = radius / kTableIntervals;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(r / h), kTableIntervals - 1);
    const double t = r / h - static_cast<double>(k);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * u_table[k] + (t3 - 2 * t2 + t) * h * du_table[k] +
           (-2 * t3 + 3 * t2) * u_table[k + 1] + (t3 - t2) * h * du_table[k + 1];
  }
};

RadialEquilibrium::RadialEquilibrium(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

SpaceDim RadialEquilibrium::dim() const noexcept { return data_->dim; }
double RadialEquilibrium::support_radius() const noexcept { return data_->radius; }
const Potential& RadialEquilibrium::potential() const noexcept { return data_->potential; }
double RadialEquilibrium::density(double r) const { return data_->density(r); }
double RadialEquilibrium::mass_within(double r) const { return data_->mass(r); }
double RadialEquilibrium::potential_at(double r) const { return data_->table_potential(r); }
double RadialEquilibrium::potential_exact(double r) const { return data_->exact_potential(r); }
double RadialEquilibrium::energy() const noexcept { return data_->energy; }
double RadialEquilibrium::potential_moment() const noexcept { return data_->moment; }
double RadialEquilibrium::entropy() const noexcept { return data_->entropy; }
double RadialEquilibrium::robin() const noexcept { return 2.0 * data_->energy + data_->moment; }
double RadialEquilibrium::weighted_energy() const noexcept { return data_->energy + data_->moment; }

RadialEquilibrium solve_equilibrium(const Potential& potential, SpaceDim dim) {
  if (!potential.is_radial()) throw std::invalid_argument("equilibrium solver needs a radial potential");
  auto data = std::make_shared<RadialEquilibrium::Data>();
  data->dim = dim;
  data->potential = potential;
  data->profile = potential.profile();
  data->c_d = coulomb_constant(dim);
  data->area = sphere_area(dim.value());
  data->radius = kInf;
  const int d = dim.value();

  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (!(data->mass(hi) >= 1.0)) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) throw EquilibriumError("not normalizable");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (data->mass(mid) < 1.0 ? lo : hi) = mid;
  }
  const double R = 0.5 * (lo + hi);

  for (int k = 0; k <= 4096; ++k) {
    const double r = R * k / 4096.0;
    if (data->profile.laplacian(r, d) < 0.0) throw EquilibriumError("density negative");
  }
  data->radius = R;

  data->u_table.resize(kTableIntervals + 1);
  data->du_table.resize(kTableIntervals + 1);
  for (int k = 0; k <= kTableIntervals; ++k) {
    const double r = R * k / kTableIntervals;
    data->u_table[k] = data->exact_potential(r);
    data->du_table[k] = data->potential_slope(r);
  }

  const auto& dd = *data;
  data->energy = integrate([&](double r) { return dd.table_potential(r) * dd.radial_mass_density(r); },
                           0.0, R, 1e-12, true);
  data->moment = integrate(
      [&](double r) { return dd.profile.value(r) * dd.radial_mass_density(r); }, 0.0, R, 1e-12);
  data->entropy = -integrate(
      [&](double r) {
        const double rho = dd.density(r);
        return rho > 0.0 ? dd.area * std::pow(r, d - 1) * rho * std::log(rho) : 0.0;
      },
      0.0, R, 1e-12, true);

  RadialEquilibrium eq(std::move(data));
  const auto res = euler_lagrange_residual(eq, 64);
  const double tol = 1e-6 * (1.0 + std::fabs(eq.robin()));
  if (!(res.inside_max_abs <= tol) || !(res.outside_min >= -tol))
    throw EquilibriumError("support not a ball for this V");
  return eq;
}

double radial_potential(const RadialEquilibrium& eq, double r) { return eq.potential_at(r); }
double equilibrium_energy(const RadialEquilibrium& eq) { return eq.energy(); }
double robin_constant(const RadialEquilibrium& eq) { return eq.robin(); }
double entropy(const RadialEquilibrium& eq) { return eq.entropy(); }

ElResidual euler_lagrange_residual(const RadialEquilibrium& eq, int grid_size) {
  const double R = eq.support_radius();
  const double ev = eq.robin();
  const auto& v = eq.potential().profile().value;
  ElResidual res{0.0, kInf};
  for (int k = 0; k < grid_size; ++k) {
    const double r = R * k / (grid_size - 1.0);
    res.inside_max_abs = std::max(res.inside_max_abs, std::fabs(2.0 * eq.potential_exact(r) + v(r) - ev));
  }
  for (int k = 1; k <= grid_size; ++k) {
    const double r = R + 3.0 * R * k / grid_size;
    res.outside_min = std::min(res.outside_min, 2.0 * eq.potential_exact(r) + v(r) - ev);
  }
  return res;
}

DiscreteMeasure sample_equilibrium(const RadialEquilibrium& eq, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample size must be positive");
  const int d = eq.dim().value();
  const double R = eq.support_radius();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif;
  std::normal_distribution<double> normal;
  std::vector<double> coords(n * static_cast<std::size_t>(d));
  std::vector<double> z(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = unif(rng);
    double lo = 0.0, hi = R;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (eq.mass_within(mid) < u ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    double s = 0.0;
    do {
      s = 0.0;
      for (auto& c : z) {
        c = normal(rng);
        s += c * c;
      }
    } while (s == 0.0);
    s = std::sqrt(s);
    for (int c = 0; c < d; ++c) coords[i * d + c] = r * z[c] / s;
  }
  return DiscreteMeasure::uniform(eq.dim(), std::move(coords));
}

namespace {

struct CellIntegral {
  double mass = 0.0;
  double moment = 0.0;  // int |x - centre| dmu
};

class CellIntegrator {
 public:
  CellIntegrator(const RadialEquilibrium& eq, int max_depth)
      : eq_(eq), d_(eq.dim().value()), R_(eq.support_radius()), max_depth_(max_depth),
        smooth_(gauss_legendre(4)), rough_(gauss_legendre(3)) {}

  CellIntegral cell(const std::vector<double>& lo, double h, const std::vector<double>& centre) const {
    // Split once at the centre so |x - centre| is smooth on every piece.
    CellIntegral total;
    for_each_child(lo, h, [&](const std::vector<double>& clo, double ch) {
      const auto part = piece(clo, ch, centre, 1);
      total.mass += part.mass;
      total.moment += part.moment;
    });
    return total;
  }

 private:
  template <class F>
  void for_each_child(const std::vector<double>& lo, double h, F&& f) const {
    const double ch = 0.5 * h;
    std::vector<double> clo(d_);
    for (int mask = 0; mask < (1 << d_); ++mask) {
      for (int c = 0; c < d_; ++c) clo[c] = lo[c] + ((mask >> c) & 1 ? ch : 0.0);
      f(clo, ch);
    }
  }

  CellIntegral piece(const std::vector<double>& lo, double h, const std::vector<double>& centre,
                     int depth) const {
    double near2 = 0.0, far2 = 0.0;
    for (int c = 0; c < d_; ++c) {
      const double a = lo[c], b = lo[c] + h;
      const double n = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(std::fabs(a), std::fabs(b));
      const double f = std::max(std::fabs(a), std::fabs(b));
      near2 += n * n;
      far2 += f * f;
    }
    if (near2 >= R_ * R_) return {};
    if (far2 <= R_ * R_) return tensor(lo, h, centre, smooth_);
    if (depth >= max_depth_) return tensor(lo, h, centre, rough_);
    CellIntegral total;
    for_each_child(lo, h, [&](const std::vector<double>& clo, double ch) {
      const auto part = piece(clo, ch, centre, depth + 1);
      total.mass += part.mass;
      total.moment += part.moment;
    });
    return total;
  }

  CellIntegral tensor(const std::vector<double>& lo, double h, const std::vector<double>& centre,
                      const GaussLegendre& gl) const {
    const int q = static_cast<int>(gl.nodes.size());
    std::vector<int> idx(d_, 0);
    std::vector<double> x(d_);
    CellIntegral out;
    const double scale = std::pow(0.5 * h, d_);
    while (true) {
      double w = scale, r2 = 0.0, dist2 = 0.0;
      for (int c = 0; c < d_; ++c) {
        x[c] = lo[c] + 0.5 * h * (1.0 + gl.nodes[idx[c]]);
        w *= gl.weights[idx[c]];
        r2 += x[c] * x[c];
        dist2 += (x[c] - centre[c]) * (x[c] - centre[c]);
      }
      const double r = std::sqrt(r2);
      if (r <= R_) {
        const double m = w * eq_.density(r);
        out.mass += m;
        out.moment += m * std::sqrt(dist2);
      }
      int c = 0;
      while (c < d_ && ++idx[c] == q) idx[c++] = 0;
      if (c == d_) break;
    }
    return out;
  }

  const RadialEquilibrium& eq_;
  int d_;
  double R_;
  int max_depth_;
  const GaussLegendre& smooth_;
  const GaussLegendre& rough_;
};

}  // namespace

QuantizedEquilibrium quantize_to_grid(const RadialEquilibrium& eq, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid step must be positive");
  const int d = eq.dim().value();
  const double R = eq.support_radius();
  const auto K = static_cast<long>(std::ceil(R / h));
  const long side = 2 * K;
  long total = 1;
  for (int c = 0; c < d; ++c) {
    total *= side;
    if (total > 100'000'000) throw std::invalid_argument("grid too fine");
  }
  const CellIntegrator integrator(eq, d == 2 ? 6 : 3);
  std::vector<CellIntegral> cells(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 64)
  for (long flat = 0; flat < total; ++flat) {
    std::vector<double> lo(d), centre(d);
    long rest = flat;
    for (int c = d - 1; c >= 0; --c) {
      const long k = rest % side - K;
      rest /= side;
      lo[c] = h * static_cast<double>(k);
      centre[c] = lo[c] + 0.5 * h;
    }
    cells[static_cast<std::size_t>(flat)] = integrator.cell(lo, h, centre);
  }
  KahanSum mass, moment;
  std::vector<double> coords, weights;
  for (long flat = 0; flat < total; ++flat) {
    const auto& cell = cells[static_cast<std::size_t>(flat)];
    if (!(cell.mass > 0.0)) continue;
    long rest = flat;
    std::vector<double> centre(d);
    for (int c = d - 1; c >= 0; --c) {
      centre[c] = h * (static_cast<double>(rest % side - K) + 0.5);
      rest /= side;
    }
    coords.insert(coords.end(), centre.begin(), centre.end());
    weights.push_back(cell.mass);
    mass += cell.mass;
    moment += cell.moment;
  }
  const double m = mass.value();
  for (auto& w : weights) w /= m;
  return {DiscreteMeasure(eq.dim(), std::move(coords), std::move(weights)), h, moment.value() / m,
          0.5 * h * std::sqrt(static_cast<double>(d))};
}

std::size_t grid_cell_count(const RadialEquilibrium& eq, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid step must be positive");
  const int d = eq.dim().value();
  const double R = eq.support_radius();
  const auto K = static_cast<long>(std::ceil(R / h));
  // Count by recursion over coordinates, tracking the squared distance of the nearest corner.
  std::function<std::size_t(int, double)> count = [&](int c, double near2) -> std::size_t {
    if (near2 >= R * R) return 0;
    if (c == d) return 1;
    std::size_t total = 0;
    for (long k = -K; k < K; ++k) {
      const double a = h * static_cast<double>(k), b = a + h;
      const double n = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(std::fabs(a), std::fabs(b));
      total += count(c + 1, near2 + n * n);
    }
    return total;
  };
  return count(0, 0.0);
}

double grid_step_for_budget(const RadialEquilibrium& eq, std::size_t max_atoms) {
  if (max_atoms < 1) throw std::invalid_argument("atom budget must be positive");
  const int d = eq.dim().value();
  const double vol = std::pow(kPi, 0.5 * d) * std::pow(eq.support_radius(), d) / std::tgamma(0.5 * d + 1.0);
  double h = std::pow(vol / static_cast<double>(max_atoms), 1.0 / d);
  while (grid_cell_count(eq, h) > max_atoms) h *= 1.001;
  return h;
}

double c_beta_integral(const Potential& potential, SpaceDim dim, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!potential.is_radial()) throw std::invalid_argument("c_beta_integral needs a radial potential");
  const int d = dim.value();
  const auto& v = potential.profile().value;
  const double area = sphere_area(d);
  auto log_f = [&](double r) {
    const double w = v(r) - (d == 2 ? std::log1p(r * r) : 0.0);
    return std::log(area) + (d - 1) * std::log(r) - 0.5 * beta * w;
  };
  // Scan a geometric grid for the peak and the point past which the integrand stays
  // below 1e-16 times the peak.
  std::vector<double> grid, vals;
  for (int k = -160; k <= 240; ++k) {
    const double r = std::exp2(k / 4.0);
    grid.push_back(r);
    vals.push_back(log_f(r));
  }
  double peak = -kInf;
  for (double x : vals)
    if (std::isfinite(x)) peak = std::max(peak, x);
  if (!std::isfinite(peak) || vals.back() > peak - 37.0 || std::isnan(vals.back()))
    throw ModelUndefined("model undefined at this beta: integrand does not decay");
  std::size_t cut = vals.size() - 1;
  while (cut > 0 && vals[cut - 1] < peak - 37.0) --cut;
  const double r_max = grid[cut];
  const double I = integrate([&](double r) { return std::exp(log_f(r) - peak); }, 0.0, r_max, 1e-12);
  return peak + std::log(I);
}

}  // namespace cgas
