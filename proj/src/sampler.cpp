#include "cgas/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "cgas/common.hpp"
#include "cgas/kernel.hpp"

extern "C" void openblas_set_num_threads(int);

namespace cgas {

namespace {

constexpr double kAuditTolerance = 1e-7;

void audit(ChainState& state, const GasModel& model) {
  const double full = hamiltonian(state.config, model.potential);
  const double err = std::fabs(state.energy - full) / std::max(std::fabs(full), 1.0);
  state.max_audit_error = std::max(state.max_audit_error, err);
  if (!(err <= kAuditTolerance))
    throw EnergyAuditError("cached energy drifted from recomputation: relative error " + std::to_string(err) +
                           " after " + std::to_string(state.steps) + " steps");
  state.energy = full;
}

ChainState make_state(const GasModel& model, const SamplerConfig& config, std::mt19937_64 rng,
                      PointConfiguration start, double sigma) {
  if (start.size() != model.n_particles || start.dim() != model.dim)
    throw std::invalid_argument("initial configuration does not match the model");
  const double h = hamiltonian(start, model.potential);
  if (!std::isfinite(h)) throw std::runtime_error("initial configuration has coincident points");
  ChainState s{std::move(start), h, 0, rng, sigma};
  s.audit_interval = std::max<std::size_t>(config.audit_interval_steps, 1);
  return s;
}

double default_sigma(const GasModel& model, const SamplerConfig& config, double radius) {
  if (config.initial_step > 0.0) return config.initial_step;
  return 0.5 * radius * std::pow(static_cast<double>(model.n_particles), -1.0 / model.dim.value());
}

}  // namespace

GasModel make_gas_model(SpaceDim dim, Potential potential, double beta, std::size_t n_particles) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (n_particles < 1) throw std::invalid_argument("need at least one particle");
  if (potential.is_radial()) c_beta_integral(potential, dim, beta);
  return {dim, std::move(potential), beta, n_particles};
}

ChainState init_chain(const GasModel& model, const SamplerConfig& config, std::size_t replica_index,
                      const RadialEquilibrium* eq) {
  std::mt19937_64 rng(stream_seed(config.master_seed, replica_index));
  const int d = model.dim.value();
  const std::size_t n = model.n_particles;
  if (eq != nullptr) {
    auto m = sample_equilibrium(*eq, n, rng());
    PointConfiguration start(model.dim, std::vector<double>(m.coords().begin(), m.coords().end()));
    return make_state(model, config, rng, std::move(start), default_sigma(model, config, eq->support_radius()));
  }
  std::normal_distribution<double> normal;
  std::vector<double> coords(n * static_cast<std::size_t>(d));
  for (auto& c : coords) c = normal(rng);
  return make_state(model, config, rng, PointConfiguration(model.dim, std::move(coords)),
                    default_sigma(model, config, 1.0));
}

ChainState init_chain_at(const GasModel& model, const SamplerConfig& config, std::size_t replica_index,
                         PointConfiguration start) {
  std::mt19937_64 rng(stream_seed(config.master_seed, replica_index));
  return make_state(model, config, rng, std::move(start), default_sigma(model, config, 1.0));
}

bool mh_step_with(ChainState& state, const GasModel& model, std::size_t i, std::span<const double> y) {
  std::uniform_real_distribution<double> unif;
  const double u = unif(state.rng);
  const double dh = move_delta(state.config, model.potential, i, y);
  bool accept = false;
  if (dh != kInf) accept = dh <= 0.0 || u < std::exp(-0.5 * model.beta * dh);
  ++state.proposed;
  ++state.steps;
  if (accept) {
    ++state.accepted;
    state.config.set_point(i, y);
    state.energy += dh;
  }
  if (state.steps % state.audit_interval == 0) audit(state, model);
  return accept;
}

void mh_step(ChainState& state, const GasModel& model) {
  const int d = model.dim.value();
  std::uniform_int_distribution<std::size_t> pick(0, state.config.size() - 1);
  std::normal_distribution<double> normal;
  const std::size_t i = pick(state.rng);
  double y[16];
  std::vector<double> big;
  double* p = y;
  if (d > 16) {
    big.resize(d);
    p = big.data();
  }
  const auto x = state.config.point(i);
  for (int c = 0; c < d; ++c) p[c] = x[c] + state.sigma * normal(state.rng);
  mh_step_with(state, model, i, std::span<const double>(p, static_cast<std::size_t>(d)));
}

ChainRun run_chain(const GasModel& model, const SamplerConfig& config, ChainState state) {
  if (config.burn_in_sweeps < 1 || config.thin_sweeps < 1) throw std::invalid_argument("burn-in and thinning must be >= 1");
  const std::size_t n = model.n_particles;
  const std::size_t window = std::max<std::size_t>(config.adapt_window_sweeps, 1) * n;
  std::uint64_t acc0 = state.accepted, prop0 = state.proposed;
  for (std::size_t step = 1; step <= config.burn_in_sweeps * n; ++step) {
    mh_step(state, model);
    if (step % window == 0) {
      const double rate = static_cast<double>(state.accepted - acc0) / static_cast<double>(state.proposed - prop0);
      state.sigma *= std::exp(rate - config.target_acceptance);
      acc0 = state.accepted;
      prop0 = state.proposed;
    }
  }
  ChainRun run;
  run.sigma = state.sigma;
  acc0 = state.accepted;
  prop0 = state.proposed;
  for (std::size_t k = 0; k < config.samples; ++k) {
    for (std::size_t step = 0; step < config.thin_sweeps * n; ++step) mh_step(state, model);
    audit(state, model);
    run.samples.push_back(state.config);
    run.energies.push_back(state.energy);
    run.sample_sigmas.push_back(state.sigma);
  }
  if (state.proposed > prop0)
    run.acceptance = static_cast<double>(state.accepted - acc0) / static_cast<double>(state.proposed - prop0);
  run.max_audit_error = state.max_audit_error;
  return run;
}

GinibreDraw ginibre_draw(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("matrix size must be positive");
  openblas_set_num_threads(1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::vector<std::complex<double>> a(n * n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::complex<double> trace = 0.0;
  KahanSum frob;
  // Column-major; entries drawn row by row so the stream does not depend on the layout.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = normal(rng), im = normal(rng);
      a[j * n + i] = std::complex<double>(re * scale, im * scale);
      if (i == j) trace += std::complex<double>(re, im) * scale;
      frob += (re * re + im * im) * scale * scale;
    }
  std::vector<std::complex<double>> w(n);
  const auto ln = static_cast<lapack_int>(n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', ln, a.data(), ln, w.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("zgeev failed with info = " + std::to_string(info));
  std::vector<double> coords(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto z = w[k];
    coords[2 * k] = z.real();
    coords[2 * k + 1] = z.imag();
  }
  return {PointConfiguration(SpaceDim(2), std::move(coords)), trace, std::sqrt(frob.value())};
}

PointConfiguration ginibre_sample(std::size_t n, std::uint64_t seed) { return ginibre_draw(n, seed).points; }

double max_modulus(const PointConfiguration& config) {
  double best = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) best = std::max(best, norm(config.point(i)));
  return best;
}

DiscreteMeasure empirical_measure(const PointConfiguration& config) {
  return DiscreteMeasure::uniform(config.dim(), std::vector<double>(config.coords().begin(), config.coords().end()));
}

}  // namespace cgas
