#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cgas/config.hpp"
#include "cgas/equilibrium.hpp"
#include "cgas/measure.hpp"
#include "cgas/report.hpp"

namespace cgas {

/// Names accepted by run_experiment, in the order `all` runs them.
const std::vector<std::string>& experiment_names();

/// Runs one experiment with the seed stream reserved for it (derived from config.seed).
ExperimentReport run_experiment(const std::string& name, const HarnessConfig& config);

ExperimentReport run_transport_sweep(const TransportSweepConfig& config, std::uint64_t seed);
ExperimentReport run_concentration(const ConcentrationConfig& config, std::uint64_t seed);
ExperimentReport run_ginibre(const GinibreConfig& config, std::uint64_t seed);
ExperimentReport run_mesoscopic(const MesoscopicConfig& config, std::uint64_t seed);
ExperimentReport run_tightness(const TightnessConfig& config, std::uint64_t seed);
ExperimentReport run_lemma_suite(const LemmaConfig& config, std::uint64_t seed);
ExperimentReport run_bounds_report(const BoundsConfig& config);

/// `replicas` independent configurations of the gas of N = n particles; replica k uses only
/// stream_seed(seed, k). Exact Ginibre draws or one MCMC sample per chain, as the model selects.
std::vector<PointConfiguration> draw_gas(const ModelSpec& model, const RadialEquilibrium& eq, std::size_t n,
                                         std::size_t replicas, std::uint64_t seed);

/// Per-rank mean and standard error of the sorted moduli sqrt(Gamma(k, 1) / n), k = 1..n, from
/// independent Gamma variables (Kostlan's description of the Ginibre moduli).
struct RankMoments {
  std::vector<double> mean;
  std::vector<double> std_error;
};
RankMoments kostlan_oracle(std::size_t n, std::size_t draws, std::uint64_t seed);

}  // namespace cgas
