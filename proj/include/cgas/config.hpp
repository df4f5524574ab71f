#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgas/potential.hpp"

namespace cgas {

/// Invalid configuration document (unknown key, wrong type, out-of-range value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PotentialSpec {
  std::string kind = "quadratic";  // "quadratic" (t |x|^2) or "polynomial" (sum_k coeffs[k] |x|^{2k})
  double t = 1.0;
  std::vector<double> coeffs;
  Potential build() const;
  bool is_ginibre_quadratic() const { return kind == "quadratic" && t == 1.0; }
};

struct McmcSpec {
  std::size_t burn_in_sweeps = 2000;
  std::size_t thin_sweeps = 20;
  double target_acceptance = 0.30;
  std::size_t adapt_window_sweeps = 10;
};

struct ModelSpec {
  int dim = 2;
  PotentialSpec potential;
  double beta = 2.0;
  /// "auto" uses the exact Ginibre sampler for (d, beta, V) = (2, 2, |x|^2) and MCMC otherwise.
  std::string sampler = "auto";
  McmcSpec mcmc;
  bool use_ginibre() const;
};

struct TransportSweepConfig {
  std::vector<int> dims{2, 3};
  double R = 1.0;
  std::size_t pairs = 1000;
  std::size_t min_atoms = 2;
  std::size_t max_atoms = 24;
  double eps = 0.01;
  std::size_t retry_budget = 10000;
};

struct ConcentrationConfig {
  ModelSpec model;
  std::vector<std::size_t> n_list{32, 128, 512};
  std::size_t replicas = 200;
  std::vector<double> r_grid{0.01, 0.015, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1, 0.12, 0.15, 0.2, 0.3, 0.5, 1.0};
  /// Transport constant fed to the bounds.
  double C = 1.0;
  /// sup Delta V; 0 takes it from the potential (finite only for quadratics).
  double D = 0.0;
  std::size_t atom_budget = 8192;
  std::size_t stored_replicas = 1;
};

struct GinibreConfig {
  std::vector<std::size_t> n_list{32, 128, 512};
  std::size_t replicas = 50;
  std::vector<double> r_grid{0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  double C = 1.0;
  std::size_t atom_budget = 8192;
  std::size_t kostlan_n = 32;
  std::size_t kostlan_replicas = 500;
  std::size_t kostlan_oracle_draws = 200000;
  std::size_t partition_n_max = 64;
  double ks_threshold = 0.02;
  double moment_tolerance = 0.01;
  std::size_t stored_replicas = 1;
};

struct MesoscopicConfig {
  ModelSpec model;
  double s = 0.25;
  std::vector<double> x0{0.0, 0.0};
  std::vector<std::size_t> n_list{64, 256, 1024};
  std::size_t replicas = 10;
  std::size_t atom_budget = 8192;
  double ratio_factor = 2.0;
};

struct TightnessConfig {
  ModelSpec model;
  std::vector<std::size_t> n_list{64, 256};
  std::size_t replicas = 200;
  std::vector<double> r_grid{0.9, 0.95, 1.0, 1.05, 1.1, 1.15, 1.2, 1.3, 1.5, 2.0};
  double max_probability = 0.05;
};

struct LemmaConfig {
  std::size_t regularization_instances = 100;
  std::size_t superharm_points = 100;
  std::size_t superharm_mc = 20000;
  double superharm_radius = 0.5;
  std::size_t smoother_levels = 8;
  std::size_t smoother_atoms = 12;
  double smoother_cross_distance = 0.004;
  std::size_t smear_instances = 200;
  std::size_t gap_samples = 16;
};

struct BoundsConfig {
  ModelSpec model;
  std::vector<double> C_list{0.1, 1.0, 10.0};
  double D = 0.0;
  std::vector<double> beta_grid{0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 2.0, 3.0, 10.0, 30.0, 100.0};
  std::vector<double> R_list{0.5, 1.0, 2.0};
  std::vector<std::size_t> n_list{2, 8, 32, 128, 512, 2048};
  double v = 1.0;
  /// c(beta) / log(1/beta) must lie in this band for beta in [1e-3, 1e-1] ...
  std::vector<double> small_beta_envelope{0.5, 2.0};
  /// ... and c(beta) / beta in this one for beta in [1, 100].
  std::vector<double> large_beta_envelope{0.1, 2.0};
};

struct HarnessConfig {
  std::uint64_t seed = 20261015;
  TransportSweepConfig transport_sweep;
  ConcentrationConfig concentration;
  GinibreConfig ginibre;
  MesoscopicConfig mesoscopic;
  TightnessConfig tightness;
  LemmaConfig lemmas;
  BoundsConfig bounds;
};

/// Parses and validates a configuration document; absent keys take their defaults,
/// unknown keys are rejected.
HarnessConfig parse_config(const nlohmann::json& doc);
HarnessConfig load_config(const std::string& path);
/// Complete document with every key, in a canonical key order.
nlohmann::json to_json(const HarnessConfig& config);
/// Overrides the replica count of every experiment.
void set_replicas(HarnessConfig& config, std::size_t replicas);
/// Library version string.
const char* version() noexcept;
/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

}  // namespace cgas
