#include "cgas/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>

#include "cgas/bounds.hpp"
#include "cgas/common.hpp"
#include "cgas/kernel.hpp"
#include "cgas/metrics.hpp"
#include "cgas/reference.hpp"
#include "cgas/sampler.hpp"
#include "cgas/stats.hpp"

namespace cgas {

namespace {

using I = std::int64_t;

I as_int(std::size_t v) { return static_cast<I>(v); }

// Work items run in any order; results land by index and the first failing index is rethrown.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long k = 0; k < static_cast<long long>(n); ++k) {
    try {
      body(static_cast<std::size_t>(k));
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> uniform_in_ball(std::mt19937_64& rng, int d, double radius) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  std::vector<double> x(d);
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& c : x) {
      c = gauss(rng);
      s += c * c;
    }
  } while (s == 0.0);
  const double scale = radius * std::pow(unif(rng), 1.0 / d) / std::sqrt(s);
  for (auto& c : x) c *= scale;
  return x;
}

std::vector<double> unit_vector(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> gauss;
  std::vector<double> x(d);
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& c : x) {
      c = gauss(rng);
      s += c * c;
    }
  } while (s == 0.0);
  for (auto& c : x) c /= std::sqrt(s);
  return x;
}

Potential model_potential(const ModelSpec& m) { return m.potential.build(); }

struct Reference {
  QuantizedEquilibrium q;
  std::size_t atoms;
};

Reference quantized_reference(const RadialEquilibrium& eq, std::size_t budget, std::size_t n) {
  auto q = quantize_to_grid(eq, grid_step_for_budget(eq, budget - n));
  const std::size_t atoms = q.measure.size();
  return {std::move(q), atoms};
}

struct TailRow {
  double r;
  std::size_t count;        // d - coupling >= r: contained in the true event
  std::size_t count_point;  // d >= r
  Interval cp;
};

std::vector<TailRow> tail_rows(const std::vector<double>& dist, double coupling, const std::vector<double>& r_grid) {
  std::vector<TailRow> rows;
  for (double r : r_grid) {
    TailRow row{r, 0, 0, {}};
    for (double x : dist) {
      if (x - coupling >= r) ++row.count;
      if (x >= r) ++row.count_point;
    }
    row.cp = clopper_pearson(row.count, dist.size(), 0.99);
    rows.push_back(row);
  }
  return rows;
}

// Slope of log frequency against N^2 r^2 with a separate intercept per N.
struct GroupedFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
};

GroupedFit within_group_slope(const std::map<std::size_t, std::vector<std::pair<double, double>>>& groups) {
  KahanSum sxx, sxy;
  GroupedFit out;
  for (const auto& [n, pts] : groups) {
    if (pts.size() < 2) continue;
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) mx += x, my += y;
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    for (auto [x, y] : pts) {
      sxx += (x - mx) * (x - mx);
      sxy += (x - mx) * (y - my);
    }
    out.points += pts.size();
  }
  if (sxx.value() > 0.0) out.slope = sxy.value() / sxx.value();
  return out;
}

void store_configurations(Table& table, std::size_t n, const std::vector<PointConfiguration>& configs,
                          std::size_t keep) {
  for (std::size_t k = 0; k < std::min(keep, configs.size()); ++k) {
    const auto& c = configs[k];
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::vector<Cell> row{as_int(n), as_int(k), as_int(i)};
      for (double x : c.point(i)) row.emplace_back(x);
      table.add(std::move(row));
    }
  }
}

Table& configuration_table(ExperimentReport& report, int d) {
  std::vector<std::string> cols{"n", "replica", "particle"};
  for (int c = 0; c < d; ++c) cols.push_back("x" + std::to_string(c));
  return report.add_table("configurations", cols);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

double laplacian_bound(const ModelSpec& m, double configured) {
  if (configured > 0.0) return configured;
  const auto sup = model_potential(m).laplacian_sup(m.dim);
  if (!sup) throw ConfigError("D must be configured for this potential");
  return *sup;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"transport-sweep", "concentration", "ginibre", "mesoscopic",
                                              "tightness",       "lemmas",        "bounds"};
  return names;
}

ExperimentReport run_experiment(const std::string& name, const HarnessConfig& config) {
  const auto& names = experiment_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument("unknown experiment " + name);
  const std::uint64_t seed = stream_seed(config.seed, static_cast<std::uint64_t>(it - names.begin()) + 1);
  if (name == "transport-sweep") return run_transport_sweep(config.transport_sweep, seed);
  if (name == "concentration") return run_concentration(config.concentration, seed);
  if (name == "ginibre") return run_ginibre(config.ginibre, seed);
  if (name == "mesoscopic") return run_mesoscopic(config.mesoscopic, seed);
  if (name == "tightness") return run_tightness(config.tightness, seed);
  if (name == "lemmas") return run_lemma_suite(config.lemmas, seed);
  return run_bounds_report(config.bounds);
}

std::vector<PointConfiguration> draw_gas(const ModelSpec& model, const RadialEquilibrium& eq, std::size_t n,
                                         std::size_t replicas, std::uint64_t seed) {
  std::vector<std::optional<PointConfiguration>> slots(replicas);
  if (model.use_ginibre()) {
    parallel_for(replicas, [&](std::size_t k) {
      try {
        slots[k] = ginibre_sample(n, stream_seed(seed, k));
      } catch (const std::exception& e) {
        throw std::runtime_error("replica " + std::to_string(k) + ": " + e.what());
      }
    });
  } else {
    const GasModel gas = make_gas_model(SpaceDim(model.dim), model_potential(model), model.beta, n);
    SamplerConfig sc;
    sc.burn_in_sweeps = model.mcmc.burn_in_sweeps;
    sc.thin_sweeps = model.mcmc.thin_sweeps;
    sc.target_acceptance = model.mcmc.target_acceptance;
    sc.adapt_window_sweeps = model.mcmc.adapt_window_sweeps;
    sc.samples = 1;
    sc.master_seed = seed;
    sc.replicas = replicas;
    parallel_for(replicas, [&](std::size_t k) {
      auto run = run_chain(gas, sc, init_chain(gas, sc, k, &eq));
      slots[k] = std::move(run.samples.front());
    });
  }
  std::vector<PointConfiguration> out;
  out.reserve(replicas);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

RankMoments kostlan_oracle(std::size_t n, std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<KahanSum> s1(n), s2(n);
  std::vector<double> moduli(n);
  const double N = static_cast<double>(n);
  for (std::size_t t = 0; t < draws; ++t) {
    for (std::size_t k = 0; k < n; ++k) {
      std::gamma_distribution<double> gamma(static_cast<double>(k + 1), 1.0);
      moduli[k] = std::sqrt(gamma(rng) / N);
    }
    std::sort(moduli.begin(), moduli.end());
    for (std::size_t k = 0; k < n; ++k) {
      s1[k] += moduli[k];
      s2[k] += moduli[k] * moduli[k];
    }
  }
  RankMoments out;
  const double M = static_cast<double>(draws);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = s1[k].value() / M;
    const double var = std::max(0.0, (s2[k].value() - M * m * m) / (M - 1.0));
    out.mean.push_back(m);
    out.std_error.push_back(std::sqrt(var / M));
  }
  return out;
}

ExperimentReport run_transport_sweep(const TransportSweepConfig& cfg, std::uint64_t seed) {
  ExperimentReport report;
  report.experiment = "transport_sweep";
  auto& table = report.add_table("pairs", {"pair_id", "d", "R", "eps", "n_atoms", "w1_lo", "w1_hi", "energy", "C_D",
                                           "ratio", "kind"});
  for (int d : cfg.dims) {
    const std::uint64_t dseed = stream_seed(seed, static_cast<std::uint64_t>(d));
    std::vector<LocalTransportCheck> checks(cfg.pairs);
    std::vector<std::size_t> sizes(cfg.pairs);
    std::vector<SmoothedCloud> first;
    parallel_for(cfg.pairs, [&](std::size_t p) {
      std::mt19937_64 rng(stream_seed(dseed, p));
      std::uniform_int_distribution<std::size_t> pick(cfg.min_atoms, cfg.max_atoms);
      const std::size_t n = pick(rng);
      std::vector<double> pts;
      std::size_t rejected = 0;
      const double min_sq = 4.0 * cfg.eps * cfg.eps;
      while (pts.size() < 2 * n * d) {
        const auto x = uniform_in_ball(rng, d, cfg.R - cfg.eps);
        bool ok = true;
        for (std::size_t j = 0; ok && j < pts.size(); j += d)
          ok = squared_distance(x, std::span<const double>(pts.data() + j, d)) >= min_sq;
        if (ok) {
          pts.insert(pts.end(), x.begin(), x.end());
        } else if (++rejected > cfg.retry_budget) {
          throw std::runtime_error("cannot place separated clouds: d=" + std::to_string(d) + " n_atoms=" +
                                   std::to_string(n) + " eps=" + std::to_string(cfg.eps) +
                                   " R=" + std::to_string(cfg.R) + " after " + std::to_string(cfg.retry_budget) +
                                   " rejections");
        }
      }
      std::exponential_distribution<double> expo;
      auto weights = [&] {
        std::vector<double> w(n);
        double s = 0.0;
        for (auto& x : w) s += (x = expo(rng));
        for (auto& x : w) x /= s;
        return w;
      };
      const std::vector<double> a(pts.begin(), pts.begin() + static_cast<long>(n * d));
      const std::vector<double> b(pts.begin() + static_cast<long>(n * d), pts.end());
      SmoothedCloud mu{DiscreteMeasure(SpaceDim(d), a, weights()), cfg.eps};
      SmoothedCloud nu{DiscreteMeasure(SpaceDim(d), b, weights()), cfg.eps};
      checks[p] = local_transport_check(mu, nu, cfg.R);
      sizes[p] = n;
      if (p == 0) {
#pragma omp critical
        first.push_back(mu);
      }
    });
    double max_ratio = 0.0, best_constant = 0.0;
    for (std::size_t p = 0; p < cfg.pairs; ++p) {
      const auto& c = checks[p];
      table.add({as_int(p), I{d}, cfg.R, cfg.eps, as_int(sizes[p]), c.w1_lo, c.w1_hi, c.energy, c.domain_constant,
                 c.ratio, std::string("random")});
      max_ratio = std::max(max_ratio, c.ratio);
      best_constant = std::max(best_constant, c.w1_sq / c.energy);
    }
    const auto control = local_transport_check(first.front(), first.front(), cfg.R);
    table.add({as_int(cfg.pairs), I{d}, cfg.R, cfg.eps, as_int(first.front().centers.size()), control.w1_lo,
               control.w1_hi, control.energy, control.domain_constant, control.ratio, std::string("control")});
    const std::string tag = "d" + std::to_string(d);
    report.check("transport_sweep." + tag + ".max_ratio", max_ratio <= 1.0, max_ratio, 1.0, "oracle",
                 "W1 upper bracket squared against vol(B_4R) E(mu - nu)");
    report.check("transport_sweep." + tag + ".control_ratio", control.ratio == 0.0, control.ratio, 0.0, "identity");
    report.info["max_ratio_" + tag] = max_ratio;
    report.info["empirical_best_constant_" + tag] = best_constant;
  }
  return report;
}

ExperimentReport run_concentration(const ConcentrationConfig& cfg, std::uint64_t seed) {
  ExperimentReport report;
  report.experiment = "concentration";
  const SpaceDim dim(cfg.model.dim);
  const Potential V = model_potential(cfg.model);
  const auto eq = solve_equilibrium(V, dim);
  const auto stats = equilibrium_stats(eq);
  const double beta = cfg.model.beta;
  const double D = laplacian_bound(cfg.model, cfg.D);
  const auto k_bl = concentration_constants(stats, V, dim, cfg.C, D, MetricTag::BL);
  const auto k_w1 = concentration_constants(stats, V, dim, cfg.C, D, MetricTag::W1);
  const bool ginibre_case = dim.value() == 2 && beta == 2.0 && cfg.model.potential.is_ginibre_quadratic();
  report.info["R_V"] = eq.support_radius();
  report.info["sampler"] = cfg.model.use_ginibre() ? "ginibre" : "mcmc";
  report.info["a"] = k_bl.a;
  report.info["b"] = k_bl.b;
  report.info["c_beta"] = k_bl.c_of_beta(beta);

  auto& quant = report.add_table("quantization", {"n", "h", "atoms", "coupling_cost", "error_bound"});
  auto& reps = report.add_table("replicas", {"n", "replica", "w1", "bl", "quant_error", "eps", "energy_gap",
                                             "ratio_bl", "ratio_w1", "max_modulus"});
  auto& tails = report.add_table("tails", {"n", "metric", "r", "count", "count_point", "replicas", "freq", "cp_lo",
                                           "cp_hi", "log_bound", "bound", "log_bound_ginibre", "bound_ginibre",
                                           "violated"});
  auto& fits = report.add_table("tail_fit", {"n", "metric", "slope", "slope_stderr", "points"});
  auto& stored = configuration_table(report, dim.value());

  std::vector<double> medians;
  std::size_t violations = 0, tiny_bound_exceedances = 0;
  double worst_excess = -kInf, best_ratio_bl = 0.0, best_ratio_w1 = 0.0;
  std::map<std::string, std::map<std::size_t, std::vector<std::pair<double, double>>>> slope_data;

  for (std::size_t n : cfg.n_list) {
    const auto ref = quantized_reference(eq, cfg.atom_budget, n);
    quant.add({as_int(n), ref.q.h, as_int(ref.atoms), ref.q.coupling_cost, ref.q.error_bound});
    const auto configs = draw_gas(cfg.model, eq, n, cfg.replicas, stream_seed(seed, n));
    std::vector<double> w1(cfg.replicas), bl(cfg.replicas), eps(cfg.replicas), gap(cfg.replicas);
    parallel_for(cfg.replicas, [&](std::size_t k) {
      const auto emp = empirical_measure(configs[k]);
      w1[k] = wasserstein(emp, ref.q.measure, 1.0);
      bl[k] = bounded_lipschitz(emp, ref.q.measure);
      eps[k] = std::min(std::pow(static_cast<double>(n), -1.0 / dim.value()), 0.5 * min_pair_distance(configs[k]));
      gap[k] = smoothed_empirical_energy(configs[k], V, eps[k]) - eq.weighted_energy();
    });
    for (std::size_t k = 0; k < cfg.replicas; ++k) {
      const double rb = bl[k] * bl[k] / gap[k], rw = w1[k] * w1[k] / gap[k];
      best_ratio_bl = std::max(best_ratio_bl, rb);
      best_ratio_w1 = std::max(best_ratio_w1, rw);
      reps.add({as_int(n), as_int(k), w1[k], bl[k], ref.q.coupling_cost, eps[k], gap[k], rb, rw,
                max_modulus(configs[k])});
    }
    store_configurations(stored, n, configs, cfg.stored_replicas);
    medians.push_back(median(w1));

    for (const auto& [metric, values, constants] :
         {std::tuple{std::string("BL"), &bl, &k_bl}, std::tuple{std::string("W1"), &w1, &k_w1}}) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& row : tail_rows(*values, ref.q.coupling_cost, cfg.r_grid)) {
        const double lb = concentration_log_bound(*constants, n, row.r, beta);
        const double b = concentration_bound(*constants, n, row.r, beta);
        const double lg = ginibre_case ? ginibre_log_bound(n, row.r, cfg.C) : std::nan("");
        const double bg = ginibre_case ? ginibre_bound(n, row.r, cfg.C) : std::nan("");
        bool violated = false;
        for (double bound : {b, bg}) {
          if (!(bound < 1.0)) continue;
          worst_excess = std::max(worst_excess, row.cp.lo - bound);
          if (row.cp.lo > bound) violated = true;
          if (bound < 1e-6 && row.count_point > 0) ++tiny_bound_exceedances;
        }
        violations += violated;
        const double freq = static_cast<double>(row.count_point) / static_cast<double>(cfg.replicas);
        tails.add({as_int(n), metric, row.r, as_int(row.count), as_int(row.count_point), as_int(cfg.replicas), freq,
                   row.cp.lo, row.cp.hi, lb, b, lg, bg, I{violated}});
        if (row.count_point > 0) pts.emplace_back(static_cast<double>(n) * n * row.r * row.r, std::log(freq));
      }
      if (pts.size() >= 2 && pts.front().first != pts.back().first) {
        std::vector<double> x, y;
        for (auto [a, b] : pts) x.push_back(a), y.push_back(b);
        const auto fit = linear_fit(x, y);
        fits.add({as_int(n), metric, fit.slope, fit.slope_stderr, as_int(fit.points)});
      }
      slope_data[metric][n] = std::move(pts);
    }
  }

  report.check("concentration.dominance", violations == 0, static_cast<double>(violations), 0.0, "statistical",
               "rows where the 99% Clopper-Pearson lower end exceeds a bound below 1");
  report.check("concentration.tiny_bound_exceedances", tiny_bound_exceedances == 0,
               static_cast<double>(tiny_bound_exceedances), 0.0, "statistical",
               "observed exceedances where the bound is below 1e-6");
  if (cfg.n_list.size() >= 2)
    report.check("concentration.median_w1_decreasing", strictly_decreasing(medians), medians.back(), medians.front(),
                 "trend", "median W1 to the quantized equilibrium, strictly decreasing in N");
  for (const auto& [metric, groups] : slope_data) {
    const auto fit = within_group_slope(groups);
    report.check("concentration.tail_slope_" + metric, fit.slope < 0.0, fit.slope, 0.0, "trend",
                 "log frequency vs N^2 r^2, one intercept per N, " + std::to_string(fit.points) + " points");
  }
  report.info["max_dominance_excess"] = std::isfinite(worst_excess) ? worst_excess : -1.0;
  report.info["empirical_best_constant_BL"] = best_ratio_bl;
  report.info["empirical_best_constant_W1"] = best_ratio_w1;
  return report;
}

ExperimentReport run_ginibre(const GinibreConfig& cfg, std::uint64_t seed) {
  ExperimentReport report;
  report.experiment = "ginibre";
  const SpaceDim dim(2);
  const auto eq = solve_equilibrium(Potential::quadratic(1.0), dim);
  const auto stats = equilibrium_stats(eq);
  report.info["R_V"] = eq.support_radius();

  auto& reps = report.add_table("replicas", {"n", "replica", "w1", "quant_error", "max_modulus", "mean_sq_modulus",
                                             "trace_error", "trace_tolerance"});
  auto& tails = report.add_table("tails", {"n", "r", "count", "count_point", "replicas", "freq", "cp_lo", "cp_hi",
                                           "log_bound", "bound", "violated"});
  auto& stored = configuration_table(report, 2);

  std::vector<double> medians;
  std::size_t violations = 0;
  double worst_trace = 0.0, pooled_moment = 0.0, ks = 0.0;
  std::size_t largest = 0;
  for (std::size_t n : cfg.n_list) {
    const auto ref = quantized_reference(eq, cfg.atom_budget, n);
    std::vector<std::optional<GinibreDraw>> draws(cfg.replicas);
    std::vector<double> w1(cfg.replicas);
    const std::uint64_t nseed = stream_seed(seed, n);
    parallel_for(cfg.replicas, [&](std::size_t k) {
      try {
        draws[k] = ginibre_draw(n, stream_seed(nseed, k));
      } catch (const std::exception& e) {
        throw std::runtime_error("replica " + std::to_string(k) + ": " + e.what());
      }
      w1[k] = wasserstein(empirical_measure(draws[k]->points), ref.q.measure, 1.0);
    });
    std::vector<double> moduli;
    KahanSum sq;
    std::vector<PointConfiguration> configs;
    for (std::size_t k = 0; k < cfg.replicas; ++k) {
      const auto& pts = draws[k]->points;
      KahanSum re, im, m2;
      for (std::size_t i = 0; i < n; ++i) {
        re += pts.point(i)[0];
        im += pts.point(i)[1];
        const double r2 = pts.point(i)[0] * pts.point(i)[0] + pts.point(i)[1] * pts.point(i)[1];
        m2 += r2;
        sq += r2;
        moduli.push_back(std::sqrt(r2));
      }
      const double err = std::abs(std::complex<double>(re.value(), im.value()) - draws[k]->trace);
      const double tol = 1e-8 * draws[k]->frobenius;
      worst_trace = std::max(worst_trace, err / tol);
      reps.add({as_int(n), as_int(k), w1[k], ref.q.coupling_cost, max_modulus(pts),
                m2.value() / static_cast<double>(n), err, tol});
      if (k < cfg.stored_replicas) configs.push_back(pts);
    }
    store_configurations(stored, n, configs, cfg.stored_replicas);
    medians.push_back(median(w1));
    if (n >= largest) {
      largest = n;
      pooled_moment = sq.value() / static_cast<double>(moduli.size());
      ks = ks_statistic(moduli, [](double r) { return std::min(r * r, 1.0); });
    }
    for (const auto& row : tail_rows(w1, ref.q.coupling_cost, cfg.r_grid)) {
      const double lb = ginibre_log_bound(n, row.r, cfg.C), b = ginibre_bound(n, row.r, cfg.C);
      const bool violated = b < 1.0 && row.cp.lo > b;
      violations += violated;
      tails.add({as_int(n), row.r, as_int(row.count), as_int(row.count_point), as_int(cfg.replicas),
                 static_cast<double>(row.count_point) / static_cast<double>(cfg.replicas), row.cp.lo, row.cp.hi, lb, b,
                 I{violated}});
    }
  }

  // Kostlan: sorted moduli against sorted independent sqrt(Gamma(k) / N).
  auto& kost = report.add_table("kostlan", {"rank", "mean_modulus", "std_error", "oracle_mean", "oracle_std_error", "z"});
  const std::size_t kn = cfg.kostlan_n;
  std::vector<std::vector<double>> sorted(cfg.kostlan_replicas);
  const std::uint64_t kseed = stream_seed(seed, 1u << 20);
  parallel_for(cfg.kostlan_replicas, [&](std::size_t k) {
    const auto pts = ginibre_sample(kn, stream_seed(kseed, k));
    std::vector<double> m(kn);
    for (std::size_t i = 0; i < kn; ++i) m[i] = norm(pts.point(i));
    std::sort(m.begin(), m.end());
    sorted[k] = std::move(m);
  });
  const auto oracle = kostlan_oracle(kn, cfg.kostlan_oracle_draws, stream_seed(seed, (1u << 20) + 1));
  double max_z = 0.0;
  for (std::size_t rank = 0; rank < kn; ++rank) {
    std::vector<double> col(cfg.kostlan_replicas);
    for (std::size_t k = 0; k < cfg.kostlan_replicas; ++k) col[k] = sorted[k][rank];
    const double m = mean(col);
    const double se = std::sqrt(variance(col) / static_cast<double>(col.size()));
    const double z = (m - oracle.mean[rank]) / std::hypot(se, oracle.std_error[rank]);
    max_z = std::max(max_z, std::abs(z));
    kost.add({as_int(rank + 1), m, se, oracle.mean[rank], oracle.std_error[rank], z});
  }

  auto& part = report.add_table("partition", {"n", "log_z", "lower_bound", "normalized", "holds"});
  std::size_t part_failures = 0;
  for (std::size_t n = 1; n <= cfg.partition_n_max; ++n) {
    const double N = static_cast<double>(n);
    const double lz = ginibre_log_z(n), lb = partition_lower_bound(stats, n, 2.0);
    const double normalized =
        (lz - 0.5 * N * std::log(N) - N * (std::log(kPi) + 0.5 * std::log(2.0 * kPi) - 1.0)) / (N * N);
    const bool holds = lb <= lz;
    if (n >= 2 && !holds) ++part_failures;
    part.add({as_int(n), lz, lb, normalized, I{holds}});
  }

  report.check("ginibre.trace_identity", worst_trace <= 1.0, worst_trace, 1.0, "identity",
               "max |trace - sum of eigenvalues| / (1e-8 ||M||_F)");
  report.check("ginibre.kostlan_moduli", max_z <= 3.0, max_z, 3.0, "statistical",
               "max |z| over ranks, N = " + std::to_string(kn));
  report.check("ginibre.mean_sq_modulus", std::abs(pooled_moment - 0.5) <= cfg.moment_tolerance, pooled_moment, 0.5,
               "statistical", "pooled mean |x|^2 at N = " + std::to_string(largest) + ", tolerance " +
                                  std::to_string(cfg.moment_tolerance));
  report.check("ginibre.radial_ks", ks < cfg.ks_threshold, ks, cfg.ks_threshold, "statistical",
               "pooled moduli against the circular law at N = " + std::to_string(largest));
  if (cfg.n_list.size() >= 2)
    report.check("ginibre.median_w1_decreasing", strictly_decreasing(medians), medians.back(), medians.front(), "trend",
                 "median W1 to the quantized circular law");
  report.check("ginibre.dominance", violations == 0, static_cast<double>(violations), 0.0, "statistical");
  report.check("ginibre.partition_lower_bound", part_failures == 0, static_cast<double>(part_failures), 0.0,
               "identity", "lower bound <= log Z for N in [2, " + std::to_string(cfg.partition_n_max) + "]");
  // Expected KS offset of one finite-N draw: the mass the one-point density puts outside the unit disk.
  report.info["ks_largest_n"] = ks;
  return report;
}

ExperimentReport run_mesoscopic(const MesoscopicConfig& cfg, std::uint64_t seed) {
  ExperimentReport report;
  report.experiment = "mesoscopic";
  const SpaceDim dim(cfg.model.dim);
  const auto eq = solve_equilibrium(model_potential(cfg.model), dim);
  report.info["R_V"] = eq.support_radius();
  const int d = dim.value();

  auto& reps = report.add_table("replicas", {"n", "replica", "scale", "bl_scaled", "quant_error_scaled", "rate",
                                             "ratio"});
  auto& ratios = report.add_table("ratios", {"n", "median_bl_scaled", "rate", "ratio", "limit"});
  auto& homog = report.add_table("homogeneity", {"n", "scale", "w1", "w1_scaled", "rel_error"});
  auto& ident = report.add_table("identity", {"n", "bl", "bl_unit_scale", "abs_error"});

  std::vector<double> ratio_by_n;
  double worst_homog = 0.0, worst_ident = 0.0;
  for (std::size_t n : cfg.n_list) {
    const double N = static_cast<double>(n);
    const double scale = std::pow(N, cfg.s);
    const double rate = d == 2 ? scale * std::sqrt(std::log(N) / N) : std::pow(N, cfg.s - 1.0 / d);
    const auto ref = quantized_reference(eq, cfg.atom_budget, n);
    const auto q_scaled = push_forward(ref.q.measure, cfg.x0, scale);
    const auto configs = draw_gas(cfg.model, eq, n, cfg.replicas, stream_seed(seed, n));
    std::vector<double> bl(cfg.replicas);
    parallel_for(cfg.replicas, [&](std::size_t k) {
      bl[k] = bounded_lipschitz(push_forward(empirical_measure(configs[k]), cfg.x0, scale), q_scaled);
    });
    const double qerr = std::min(2.0, scale * ref.q.coupling_cost);
    for (std::size_t k = 0; k < cfg.replicas; ++k)
      reps.add({as_int(n), as_int(k), scale, bl[k], qerr, rate, bl[k] / rate});
    const double med = median(bl);
    ratio_by_n.push_back(med / rate);
    ratios.add({as_int(n), med, rate, med / rate, cfg.ratio_factor * ratio_by_n.front()});

    const auto emp = empirical_measure(configs.front());
    const double w1 = wasserstein(emp, ref.q.measure, 1.0);
    const double w1s = wasserstein(push_forward(emp, cfg.x0, scale), q_scaled, 1.0);
    const double rel = std::abs(w1s - scale * w1) / (scale * w1);
    worst_homog = std::max(worst_homog, rel);
    homog.add({as_int(n), scale, w1, w1s, rel});

    const std::vector<double> origin(d, 0.0);
    const double b0 = bounded_lipschitz(emp, ref.q.measure);
    const double b1 = bounded_lipschitz(push_forward(emp, origin, 1.0), push_forward(ref.q.measure, origin, 1.0));
    worst_ident = std::max(worst_ident, std::abs(b1 - b0));
    ident.add({as_int(n), b0, b1, std::abs(b1 - b0)});
  }
  double worst = 0.0;
  for (double r : ratio_by_n) worst = std::max(worst, r / ratio_by_n.front());
  report.check("mesoscopic.ratio_bounded", worst <= cfg.ratio_factor, worst, cfg.ratio_factor, "trend",
               "max over N of ratio(N) / ratio(first N)");
  report.check("mesoscopic.w1_homogeneity", worst_homog <= 1e-9, worst_homog, 1e-9, "identity",
               "W1 of push-forwards equals scale times W1");
  report.check("mesoscopic.unit_scale_identity", worst_ident <= 1e-12, worst_ident, 1e-12, "identity",
               "tau with s = 0, x0 = 0 leaves d_BL unchanged");
  return report;
}

ExperimentReport run_tightness(const TightnessConfig& cfg, std::uint64_t seed) {
  ExperimentReport report;
  report.experiment = "tightness";
  const SpaceDim dim(cfg.model.dim);
  const Potential V = model_potential(cfg.model);
  const auto eq = solve_equilibrium(V, dim);
  const double R = eq.support_radius();
  report.info["R_V"] = R;
  std::vector<double> grid = cfg.r_grid;
  if (std::find(grid.begin(), grid.end(), 2.0 * R) == grid.end()) grid.push_back(2.0 * R);
  std::sort(grid.begin(), grid.end());

  auto& maxes = report.add_table("max_modulus", {"n", "replica", "max_modulus"});
  auto& exc = report.add_table("exceedance", {"n", "r", "v_star", "count", "replicas", "freq", "cp_lo", "cp_hi",
                                              "shape"});
  std::vector<double> vstar;
  for (double r : grid) vstar.push_back(v_star(V, r));

  bool nested = true;
  double freq_at_2r = 0.0;
  std::size_t count_at_2r = 0, largest = 0;
  for (std::size_t n : cfg.n_list) {
    const auto configs = draw_gas(cfg.model, eq, n, cfg.replicas, stream_seed(seed, n));
    std::vector<double> m(cfg.replicas);
    for (std::size_t k = 0; k < cfg.replicas; ++k) {
      m[k] = max_modulus(configs[k]);
      maxes.add({as_int(n), as_int(k), m[k]});
    }
    std::vector<std::size_t> counts;
    for (double r : grid) counts.push_back(static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [r](double x) { return x >= r; })));
    // exp(-c N V_*) through the origin in log scale, over rows with exceedances.
    KahanSum sxy, sxx;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (j > 0 && counts[j] > counts[j - 1]) nested = false;
      if (counts[j] == 0) continue;
      const double x = -static_cast<double>(n) * vstar[j];
      const double y = std::log(static_cast<double>(counts[j]) / static_cast<double>(cfg.replicas));
      sxy += x * y;
      sxx += x * x;
    }
    const double c = sxx.value() > 0.0 ? sxy.value() / sxx.value() : 0.0;
    report.info["fitted_c_n" + std::to_string(n)] = c;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto cp = clopper_pearson(counts[j], cfg.replicas, 0.99);
      const double f = static_cast<double>(counts[j]) / static_cast<double>(cfg.replicas);
      exc.add({as_int(n), grid[j], vstar[j], as_int(counts[j]), as_int(cfg.replicas), f, cp.lo, cp.hi,
               std::exp(-c * static_cast<double>(n) * vstar[j])});
      if (grid[j] == 2.0 * R && n >= largest) {
        largest = n;
        freq_at_2r = f;
        count_at_2r = counts[j];
      }
    }
  }
  report.check("tightness.nested_counts", nested, nested ? 0.0 : 1.0, 0.0, "identity",
               "exceedance counts nonincreasing in r");
  report.check("tightness.exceedance_at_2R", freq_at_2r < cfg.max_probability, freq_at_2r, cfg.max_probability,
               "statistical", "P(max |x_i| >= 2 R_V) at N = " + std::to_string(largest));
  report.info["count_at_2R_largest_n"] = count_at_2r;
  return report;
}

ExperimentReport run_lemma_suite(const LemmaConfig& cfg, std::uint64_t seed) {
  ExperimentReport report;
  report.experiment = "lemmas";

  // Superharmonicity of g under double ball averaging.
  auto& sh = report.add_table("superharmonicity", {"point", "d", "x_norm", "lhs", "std_error", "rhs", "z", "violation"});
  std::size_t sh_violations = 0;
  {
    const std::size_t P = cfg.superharm_points;
    std::vector<SuperharmonicityResult> res(P);
    std::vector<int> dims(P);
    std::vector<double> norms(P);
    const std::uint64_t s = stream_seed(seed, 1);
    parallel_for(P, [&](std::size_t k) {
      const std::size_t half = (P + 1) / 2;
      const int d = k < half ? 2 : 3;
      const std::size_t j = k < half ? k : k - half;
      const std::size_t m = k < half ? half : P - half;
      std::mt19937_64 rng(stream_seed(s, k));
      const double rho = 0.05 + 1.45 * (m > 1 ? static_cast<double>(j) / static_cast<double>(m - 1) : 0.0);
      auto x = unit_vector(rng, d);
      for (auto& c : x) c *= rho;
      dims[k] = d;
      norms[k] = rho;
      res[k] = superharmonicity_check(SpaceDim(d), x, cfg.superharm_radius, cfg.superharm_mc, stream_seed(s, k + P));
    });
    for (std::size_t k = 0; k < P; ++k) {
      const double z = (res[k].lhs - res[k].rhs) / res[k].std_error;
      const bool v = res[k].lhs - res[k].rhs > 3.0 * res[k].std_error;
      sh_violations += v;
      sh.add({as_int(k), I{dims[k]}, norms[k], res[k].lhs, res[k].std_error, res[k].rhs, z, I{v}});
    }
  }

  // Regularization identity for 2 eps separated configurations.
  auto& reg = report.add_table("regularization", {"instance", "d", "n", "eps", "lhs", "rhs", "rel_residual"});
  double worst_reg = 0.0;
  {
    const std::size_t M = cfg.regularization_instances;
    std::vector<std::array<double, 3>> out(M);
    std::vector<std::array<I, 2>> shape(M);
    std::vector<double> eps_used(M);
    const std::uint64_t s = stream_seed(seed, 2);
    parallel_for(M, [&](std::size_t i) {
      std::mt19937_64 rng(stream_seed(s, i));
      const int d = 2 + static_cast<int>(i % 2);
      const std::size_t n = 2 + rng() % 39;
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const double eps = 0.005 + 0.045 * unif(rng);
      const Potential V = (i / 2) % 2 == 0
                              ? Potential::quadratic(0.5 + unif(rng))
                              : Potential::radial_polynomial({1.0 + unif(rng), unif(rng), 0.1 + unif(rng)});
      std::vector<double> pts;
      while (pts.size() < n * d) {
        const auto x = uniform_in_ball(rng, d, 1.5);
        bool ok = true;
        for (std::size_t j = 0; ok && j < pts.size(); j += d)
          ok = distance(x, std::span<const double>(pts.data() + j, d)) >= 2.0 * eps;
        if (ok) pts.insert(pts.end(), x.begin(), x.end());
      }
      const PointConfiguration cfg_pts(SpaceDim(d), pts);
      const double N = static_cast<double>(n);
      KahanSum smear;
      for (std::size_t j = 0; j < n; ++j) smear += smear_gap(V, cfg_pts.point(j), eps);
      const double lhs = N * N * smoothed_empirical_energy(cfg_pts, V, eps) - N * ball_energy(SpaceDim(d), eps) -
                         N * smear.value();
      const double rhs = reference::hamiltonian(cfg_pts, V);
      out[i] = {lhs, rhs, std::abs(lhs - rhs) / std::abs(rhs)};
      shape[i] = {I{d}, as_int(n)};
      eps_used[i] = eps;
    });
    for (std::size_t i = 0; i < M; ++i) {
      worst_reg = std::max(worst_reg, out[i][2]);
      reg.add({as_int(i), shape[i][0], shape[i][1], eps_used[i], out[i][0], out[i][1], out[i][2]});
    }
  }

  // Smear gap: closed form for quadratics, upper bound for radial polynomials.
  auto& smq = report.add_table("smear_quadratic", {"instance", "d", "t", "eps", "x_norm", "gap", "closed_form",
                                                   "abs_error"});
  auto& smb = report.add_table("smear_bound", {"instance", "d", "eps", "x_norm", "gap", "quad_error", "bound",
                                               "holds"});
  double worst_smq = 0.0;
  std::size_t smear_failures = 0;
  {
    const std::uint64_t s = stream_seed(seed, 3);
    for (std::size_t i = 0; i < cfg.smear_instances; ++i) {
      std::mt19937_64 rng(stream_seed(s, i));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const int d = 2 + static_cast<int>(i % 2);
      const double eps = 0.01 + 0.49 * unif(rng);
      const auto x = uniform_in_ball(rng, d, 2.0);
      if (i % 2 == 0 || i % 4 == 1) {
        const double t = 0.1 + 2.0 * unif(rng);
        const double gap = smear_gap(Potential::quadratic(t), x, eps);
        const double closed = t * eps * eps * d / (d + 2.0);
        worst_smq = std::max(worst_smq, std::abs(gap - closed));
        smq.add({as_int(i), I{d}, t, eps, norm(x), gap, closed, std::abs(gap - closed)});
      }
      std::vector<double> coeffs{unif(rng), unif(rng), unif(rng), 0.05 + unif(rng)};
      const Potential V = Potential::radial_polynomial(coeffs);
      const auto est = smear_gap_estimate(V, x, eps);
      double sup = 0.0;
      const double lo = std::max(0.0, norm(x) - eps), hi = norm(x) + eps;
      for (int j = 0; j <= 64; ++j) sup = std::max(sup, V.profile().laplacian(lo + (hi - lo) * j / 64.0, d));
      const double bound = eps * eps / (2.0 * (d + 2)) * sup;
      const bool holds = est.value <= bound + est.error + 1e-12 * (1.0 + std::abs(bound));
      smear_failures += !holds;
      smb.add({as_int(i), I{d}, eps, norm(x), est.value, est.error, bound, I{holds}});
    }
  }

  // Energy smoothing along eps = 2^-k on a fixed pair of clouds.
  auto& sm = report.add_table("energysmoother", {"d", "level", "eps", "energy_eps", "energy", "abs_error"});
  bool smoother_monotone = true;
  double smoother_final = 0.0;
  {
    const std::uint64_t s = stream_seed(seed, 4);
    for (int d : {2, 3}) {
      std::mt19937_64 rng(stream_seed(s, static_cast<std::uint64_t>(d)));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const std::size_t m = cfg.smoother_atoms;
      std::vector<std::vector<double>> xs, ys;
      for (std::size_t j = 0; j < m; ++j) {
        auto x = uniform_in_ball(rng, d, 1.0);
        const auto u = unit_vector(rng, d);
        const double dist = j == 0 ? cfg.smoother_cross_distance
                                   : cfg.smoother_cross_distance + (0.5 - cfg.smoother_cross_distance) * unif(rng);
        auto y = x;
        for (int c = 0; c < d; ++c) y[c] += dist * u[c];
        xs.push_back(std::move(x));
        ys.push_back(std::move(y));
      }
      const double w = 1.0 / static_cast<double>(m * m);
      KahanSum exact;
      for (const auto& x : xs)
        for (const auto& y : ys) exact += w * kernel_radial(d, distance(x, y));
      double prev = kInf;
      for (std::size_t level = 1; level <= cfg.smoother_levels; ++level) {
        const double eps = std::ldexp(1.0, -static_cast<int>(level));
        KahanSum e;
        for (const auto& x : xs)
          for (const auto& y : ys) e += w * smoothed_pair_energy(d, eps, distance(x, y));
        const double err = std::abs(e.value() - exact.value());
        if (err > prev) smoother_monotone = false;
        prev = err;
        sm.add({I{d}, as_int(level), eps, e.value(), exact.value(), err});
        if (level == cfg.smoother_levels && d == 2) smoother_final = err;
      }
    }
  }

  // Separations in [eps, 2 eps): the regularization gap of two points, measured only.
  auto& gap = report.add_table("separation_gap", {"sample", "d", "eps", "separation_over_eps", "smoothed", "exact",
                                                  "gap"});
  for (std::size_t j = 0; j < cfg.gap_samples; ++j) {
    const int d = 2 + static_cast<int>(j % 2);
    const double eps = 0.05;
    const std::size_t half = (cfg.gap_samples + 1) / 2;
    const double q = 1.0 + static_cast<double>(j / 2) / static_cast<double>(half);
    const double sep = q * eps;
    const double smoothed = smoothed_pair_energy(d, eps, sep);
    const double exact = kernel_radial(d, sep);
    gap.add({as_int(j), I{d}, eps, q, smoothed, exact, 2.0 * (smoothed - exact)});
  }

  report.check("lemmas.superharmonicity", sh_violations == 0, static_cast<double>(sh_violations), 0.0, "statistical",
               "grid points with a double ball average above g(x) by more than 3 standard errors");
  report.check("lemmas.regularization_identity", worst_reg < 1e-10, worst_reg, 1e-10, "identity",
               "max relative residual over 2 eps separated instances");
  report.check("lemmas.smear_quadratic", worst_smq < 1e-10, worst_smq, 1e-10, "identity",
               "smear gap of t|x|^2 against t eps^2 d/(d+2)");
  report.check("lemmas.smear_bound", smear_failures == 0, static_cast<double>(smear_failures), 0.0, "oracle",
               "smear gap <= eps^2/(2(d+2)) sup Delta V");
  report.check("lemmas.energysmoother_monotone", smoother_monotone, smoother_monotone ? 0.0 : 1.0, 0.0, "trend",
               "|E_eps - E| nonincreasing along eps = 2^-k");
  report.check("lemmas.energysmoother_final", smoother_final < 1e-3, smoother_final, 1e-3, "oracle",
               "|E_eps - E| at eps = 2^-" + std::to_string(cfg.smoother_levels) + " on the d = 2 instance");
  return report;
}

ExperimentReport run_bounds_report(const BoundsConfig& cfg) {
  ExperimentReport report;
  report.experiment = "bounds";
  const SpaceDim dim(cfg.model.dim);
  const Potential V = model_potential(cfg.model);
  const auto eq = solve_equilibrium(V, dim);
  const auto stats = equilibrium_stats(eq);
  const double D = laplacian_bound(cfg.model, cfg.D);
  report.info["R_V"] = eq.support_radius();

  auto& constants = report.add_table("constants", {"C", "D", "a", "b"});
  std::vector<double> as;
  std::vector<double> Cs = cfg.C_list;
  std::sort(Cs.begin(), Cs.end());
  for (double C : Cs) {
    const auto k = concentration_constants(stats, V, dim, C, D);
    constants.add({C, D, k.a, k.b});
    as.push_back(k.a);
  }
  auto& cb = report.add_table("c_beta", {"beta", "defined", "c_beta", "ratio_log", "ratio_linear"});
  const auto k = concentration_constants(stats, V, dim, Cs.front(), D);
  double small_lo = kInf, small_hi = -kInf, large_lo = kInf, large_hi = -kInf;
  for (double beta : cfg.beta_grid) {
    try {
      const double c = k.c_of_beta(beta);
      const double rl = beta < 1.0 ? c / std::log(1.0 / beta) : std::nan("");
      cb.add({beta, I{1}, c, rl, c / beta});
      if (beta >= 1e-3 && beta <= 1e-1) small_lo = std::min(small_lo, rl), small_hi = std::max(small_hi, rl);
      if (beta >= 1.0 && beta <= 100.0) large_lo = std::min(large_lo, c / beta), large_hi = std::max(large_hi, c / beta);
    } catch (const ModelUndefined&) {
      cb.add({beta, I{0}, std::nan(""), std::nan(""), std::nan("")});
    }
  }
  auto& dc = report.add_table("domain_constant", {"R", "C_D"});
  for (double R : cfg.R_list) dc.add({R, domain_constant(dim, R)});
  auto& rt = report.add_table("r_threshold", {"n", "v", "r_threshold"});
  for (std::size_t n : cfg.n_list) rt.add({as_int(n), cfg.v, r_threshold(n, dim, cfg.v)});

  if (std::isfinite(small_lo)) {
    const bool ok = small_lo >= cfg.small_beta_envelope[0] && small_hi <= cfg.small_beta_envelope[1];
    report.check("bounds.c_beta_small_envelope", ok, ok ? small_hi : (small_lo < cfg.small_beta_envelope[0] ? small_lo : small_hi),
                 cfg.small_beta_envelope[1], "oracle",
                 "c(beta)/log(1/beta) on [1e-3, 1e-1] within [" + std::to_string(cfg.small_beta_envelope[0]) + ", " +
                     std::to_string(cfg.small_beta_envelope[1]) + "]");
  }
  if (std::isfinite(large_lo)) {
    const bool ok = large_lo >= cfg.large_beta_envelope[0] && large_hi <= cfg.large_beta_envelope[1];
    report.check("bounds.c_beta_large_envelope", ok, ok ? large_hi : (large_lo < cfg.large_beta_envelope[0] ? large_lo : large_hi),
                 cfg.large_beta_envelope[1], "oracle",
                 "c(beta)/beta on [1, 100] within [" + std::to_string(cfg.large_beta_envelope[0]) + ", " +
                     std::to_string(cfg.large_beta_envelope[1]) + "]");
  }
  bool a_decreasing = true;
  for (std::size_t j = 1; j < as.size(); ++j) a_decreasing = a_decreasing && as[j] < as[j - 1];
  report.check("bounds.a_decreasing_in_C", a_decreasing, as.back(), as.front(), "identity");
  if (dim.value() == 2 && cfg.model.potential.is_ginibre_quadratic()) {
    const auto g = concentration_constants(stats, V, dim, 10.0, 4.0);
    report.check("bounds.ginibre_b", std::abs(g.b - 0.425) < 1e-12, g.b, 0.425, "identity", "b at C = 10, D = 4");
    const double c2 = g.c_of_beta(2.0);
    report.check("bounds.ginibre_c2", std::abs(c2 - (0.5 + std::log(2.0))) < 1e-8, c2, 0.5 + std::log(2.0), "oracle",
                 "c(2) against 1/2 + log 2");
  }
  return report;
}

}  // namespace cgas
