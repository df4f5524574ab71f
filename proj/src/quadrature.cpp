#include "cgas/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "cgas/common.hpp"

namespace cgas {

namespace {

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) <= 1e-15) break;
    }
    // Recompute the derivative at the converged node.
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (x * p1 - p2) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

double panel_sum(const std::function<double(double)>& f, const std::vector<double>& breaks,
                 const GaussLegendre& gl) {
  KahanSum total;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p], hi = breaks[p + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    KahanSum s;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) s += gl.weights[k] * f(mid + half * gl.nodes[k]);
    total += half * s.value();
  }
  return total.value();
}

std::vector<double> breakpoints(double a, double b, int panels, bool graded) {
  std::vector<double> br(panels + 1);
  for (int k = 0; k <= panels; ++k) {
    const double t = static_cast<double>(k) / panels;
    br[k] = a + (b - a) * (graded ? t * t * t : t);
  }
  br[panels] = b;
  return br;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 bool grade_left) {
  if (a == b) return 0.0;
  const auto& gl = gauss_legendre(64);
  int panels = 1;
  double prev = panel_sum(f, breakpoints(a, b, panels, grade_left), gl);
  double diff = kInf;
  for (int level = 0; level < 12; ++level) {
    panels *= 2;
    const double cur = panel_sum(f, breakpoints(a, b, panels, grade_left), gl);
    diff = std::fabs(cur - prev);
    if (diff <= tol * (1.0 + std::fabs(cur))) return cur;
    prev = cur;
  }
  throw QuadratureError("composite Gauss-Legendre did not converge", diff);
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b, int panels,
                       int order) {
  return panel_sum(f, breakpoints(a, b, panels, false), gauss_legendre(order));
}

SphereRule lebedev26() {
  SphereRule rule;
  rule.dim = 3;
  auto push = [&](double x, double y, double z, double w) {
    rule.nodes.insert(rule.nodes.end(), {x, y, z});
    rule.weights.push_back(w);
  };
  for (int axis = 0; axis < 3; ++axis)
    for (double s : {1.0, -1.0}) {
      double v[3] = {0, 0, 0};
      v[axis] = s;
      push(v[0], v[1], v[2], 1.0 / 21.0);
    }
  const double h = 1.0 / std::sqrt(2.0);
  for (int zero = 0; zero < 3; ++zero)
    for (double s1 : {1.0, -1.0})
      for (double s2 : {1.0, -1.0}) {
        double v[3];
        int k = 0;
        for (int axis = 0; axis < 3; ++axis) v[axis] = axis == zero ? 0.0 : (k++ == 0 ? s1 : s2) * h;
        push(v[0], v[1], v[2], 4.0 / 105.0);
      }
  const double c = 1.0 / std::sqrt(3.0);
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0})
      for (double sz : {1.0, -1.0}) push(sx * c, sy * c, sz * c, 9.0 / 280.0);
  return rule;
}

SphereRule circle_rule(int n) {
  SphereRule rule;
  rule.dim = 2;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * kPi * (k + 0.5) / n;
    rule.nodes.insert(rule.nodes.end(), {std::cos(t), std::sin(t)});
    rule.weights.push_back(1.0 / n);
  }
  return rule;
}

SphereRule product_sphere_rule(int dim, int m) {
  if (dim == 2) return circle_rule(2 * m);
  const SphereRule inner = product_sphere_rule(dim - 1, m);
  const auto& gl = gauss_legendre(m);
  std::vector<double> ct, st, wt;
  double wsum = 0.0;
  if (dim == 3) {
    for (int k = 0; k < m; ++k) {
      ct.push_back(gl.nodes[k]);
      st.push_back(std::sqrt(1.0 - gl.nodes[k] * gl.nodes[k]));
      wt.push_back(gl.weights[k]);
    }
  } else {
    for (int k = 0; k < m; ++k) {
      const double th = 0.5 * kPi * (gl.nodes[k] + 1.0);
      ct.push_back(std::cos(th));
      st.push_back(std::sin(th));
      wt.push_back(gl.weights[k] * std::pow(std::sin(th), dim - 2));
    }
  }
  for (double w : wt) wsum += w;
  SphereRule rule;
  rule.dim = dim;
  const std::size_t ni = inner.weights.size();
  for (std::size_t k = 0; k < ct.size(); ++k)
    for (std::size_t j = 0; j < ni; ++j) {
      rule.nodes.push_back(ct[k]);
      for (int c = 0; c < dim - 1; ++c) rule.nodes.push_back(st[k] * inner.nodes[j * (dim - 1) + c]);
      rule.weights.push_back(wt[k] / wsum * inner.weights[j]);
    }
  return rule;
}

BallRule make_ball_rule(int radial_nodes, const SphereRule& sphere) {
  const int d = sphere.dim;
  const auto& gl = gauss_legendre(radial_nodes);
  BallRule rule;
  rule.dim = d;
  for (int k = 0; k < radial_nodes; ++k) {
    const double r = 0.5 * (gl.nodes[k] + 1.0);
    const double wr = 0.5 * gl.weights[k] * d * std::pow(r, d - 1);
    for (std::size_t j = 0; j < sphere.weights.size(); ++j) {
      for (int c = 0; c < d; ++c) rule.nodes.push_back(r * sphere.nodes[j * d + c]);
      rule.weights.push_back(wr * sphere.weights[j]);
    }
  }
  return rule;
}

namespace {

const BallRule& cached_rule(int dim, bool fine) {
  static std::mutex mu;
  static std::map<std::pair<int, bool>, BallRule> cache;
  std::lock_guard lock(mu);
  const auto key = std::make_pair(dim, fine);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  BallRule rule;
  if (dim == 2)
    rule = fine ? make_ball_rule(64, circle_rule(128)) : make_ball_rule(32, circle_rule(64));
  else if (dim == 3)
    rule = fine ? make_ball_rule(64, product_sphere_rule(3, 16)) : make_ball_rule(32, lebedev26());
  else
    rule = fine ? make_ball_rule(32, product_sphere_rule(dim, 8))
                : make_ball_rule(16, product_sphere_rule(dim, 4));
  return cache.emplace(key, std::move(rule)).first->second;
}

}  // namespace

const BallRule& coarse_ball_rule(int dim) { return cached_rule(dim, false); }
const BallRule& fine_ball_rule(int dim) { return cached_rule(dim, true); }

}  // namespace cgas
