#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "cgas/equilibrium.hpp"
#include "cgas/measure.hpp"
#include "cgas/potential.hpp"

namespace cgas {

/// Target P^N_{V,beta} with density proportional to exp(-(beta/2) H_N).
struct GasModel {
  SpaceDim dim;
  Potential potential;
  double beta;
  std::size_t n_particles;
};

/// Validates beta > 0, N >= 1 and, for radial V, the integrability condition at beta.
/// N = 1 is allowed (single-particle marginal checks).
GasModel make_gas_model(SpaceDim dim, Potential potential, double beta, std::size_t n_particles);

/// Lengths are in sweeps of N single-particle proposals.
struct SamplerConfig {
  std::size_t burn_in_sweeps = 1000;
  std::size_t thin_sweeps = 10;
  std::size_t samples = 1;
  double target_acceptance = 0.30;
  /// sigma is rescaled by exp(rate - target) after every window of this many sweeps.
  std::size_t adapt_window_sweeps = 10;
  /// 0 picks 0.5 R_V N^{-1/d}.
  double initial_step = 0.0;
  std::size_t audit_interval_steps = 10000;
  std::uint64_t master_seed = 0;
  std::size_t replicas = 1;
};

class EnergyAuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChainState {
  PointConfiguration config;
  double energy;
  std::uint64_t steps = 0;
  std::mt19937_64 rng;
  double sigma;
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  std::uint64_t audit_interval = 10000;
  double max_audit_error = 0.0;
};

/// Initial points i.i.d. from mu_V when the equilibrium is available, else standard Gaussian.
/// The stream is seeded by stream_seed(master_seed, replica_index).
ChainState init_chain(const GasModel& model, const SamplerConfig& config, std::size_t replica_index,
                      const RadialEquilibrium* eq = nullptr);
/// Same stream, given initial configuration.
ChainState init_chain_at(const GasModel& model, const SamplerConfig& config, std::size_t replica_index,
                         PointConfiguration start);

/// One Metropolis step: uniform particle, Gaussian proposal of std sigma, acceptance
/// min(1, exp(-(beta/2) dH)). Audits the cached energy every audit_interval steps and
/// throws EnergyAuditError on a relative drift above 1e-7.
void mh_step(ChainState& state, const GasModel& model);
/// Proposal given explicitly (detailed-balance tests); returns whether it was accepted.
bool mh_step_with(ChainState& state, const GasModel& model, std::size_t i, std::span<const double> y);

struct ChainRun {
  std::vector<PointConfiguration> samples;
  std::vector<double> energies;
  double sigma = 0.0;                 // frozen step after burn-in
  double acceptance = 0.0;            // after burn-in
  double max_audit_error = 0.0;
  std::vector<double> sample_sigmas;  // sigma at each recorded sample
};

/// Burn-in with step adaptation, then `samples` configurations every `thin_sweeps` sweeps
/// with sigma frozen. Each sample's cached energy is checked against a full recomputation.
ChainRun run_chain(const GasModel& model, const SamplerConfig& config, ChainState state);

struct GinibreDraw {
  PointConfiguration points;        // eigenvalues of M / sqrt(N) in R^2
  std::complex<double> trace;       // trace(M) / sqrt(N)
  double frobenius = 0.0;           // ||M||_F / sqrt(N)
};

/// Eigenvalues of M / sqrt(N), M with independent X + iY entries, X, Y ~ N(0, 1/2),
/// by LAPACK zgeev.
GinibreDraw ginibre_draw(std::size_t n, std::uint64_t seed);
PointConfiguration ginibre_sample(std::size_t n, std::uint64_t seed);

double max_modulus(const PointConfiguration& config);
DiscreteMeasure empirical_measure(const PointConfiguration& config);

}  // namespace cgas
