#include "cgas/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cgas {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PotentialSpec, kind, t, coeffs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(McmcSpec, burn_in_sweeps, thin_sweeps, target_acceptance,
                                                adapt_window_sweeps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ModelSpec, dim, potential, beta, sampler, mcmc)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TransportSweepConfig, dims, R, pairs, min_atoms, max_atoms, eps,
                                                retry_budget)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ConcentrationConfig, model, n_list, replicas, r_grid, C, D,
                                                atom_budget, stored_replicas)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GinibreConfig, n_list, replicas, r_grid, C, atom_budget, kostlan_n,
                                                kostlan_replicas, kostlan_oracle_draws, partition_n_max,
                                                ks_threshold, moment_tolerance, stored_replicas)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MesoscopicConfig, model, s, x0, n_list, replicas, atom_budget,
                                                ratio_factor)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TightnessConfig, model, n_list, replicas, r_grid, max_probability)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LemmaConfig, regularization_instances, superharm_points,
                                                superharm_mc, superharm_radius, smoother_levels, smoother_atoms,
                                                smoother_cross_distance, smear_instances, gap_samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BoundsConfig, model, C_list, D, beta_grid, R_list, n_list, v,
                                                small_beta_envelope, large_beta_envelope)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(HarnessConfig, seed, transport_sweep, concentration, ginibre,
                                                mesoscopic, tightness, lemmas, bounds)

Potential PotentialSpec::build() const {
  if (kind == "quadratic") return Potential::quadratic(t);
  if (kind == "polynomial") return Potential::radial_polynomial(coeffs);
  throw ConfigError("unknown potential kind '" + kind + "'");
}

bool ModelSpec::use_ginibre() const {
  const bool exact_case = dim == 2 && beta == 2.0 && potential.is_ginibre_quadratic();
  if (sampler == "ginibre") return true;
  if (sampler == "mcmc") return false;
  return exact_case;
}

namespace {

void reject_unknown(const nlohmann::json& doc, const nlohmann::json& reference, const std::string& path) {
  if (!doc.is_object()) return;
  if (!reference.is_object()) throw ConfigError(path + ": expected a value, got an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!reference.contains(key)) throw ConfigError("unknown key '" + where + "'");
    reject_unknown(value, reference.at(key), where);
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

template <class T>
void require_list(const std::vector<T>& xs, const std::string& name) {
  require(!xs.empty(), name + " must be nonempty");
  for (const T& x : xs) require(x > T(0), name + " entries must be positive");
}

void validate(const ModelSpec& m, const std::string& where) {
  require(m.dim >= 2, where + ".dim must be >= 2");
  require(m.beta > 0.0, where + ".beta must be positive");
  require(m.sampler == "auto" || m.sampler == "mcmc" || m.sampler == "ginibre",
          where + ".sampler must be auto, mcmc or ginibre");
  if (m.sampler == "ginibre")
    require(m.dim == 2 && m.beta == 2.0 && m.potential.is_ginibre_quadratic(),
            where + ": the ginibre sampler needs dim 2, beta 2 and V = |x|^2");
  if (m.potential.kind == "quadratic") {
    require(m.potential.t > 0.0, where + ".potential.t must be positive");
    require(m.potential.coeffs.empty(), where + ".potential.coeffs is only used by kind polynomial");
  } else if (m.potential.kind == "polynomial") {
    require(m.potential.coeffs.size() >= 2 && m.potential.coeffs.back() > 0.0,
            where + ".potential.coeffs needs a positive top coefficient of degree >= 1");
  } else {
    throw ConfigError(where + ".potential.kind must be quadratic or polynomial");
  }
  require(m.mcmc.target_acceptance > 0.0 && m.mcmc.target_acceptance < 1.0,
          where + ".mcmc.target_acceptance must be in (0, 1)");
  require(m.mcmc.thin_sweeps >= 1 && m.mcmc.adapt_window_sweeps >= 1, where + ".mcmc sweep counts must be >= 1");
}

void validate(const HarnessConfig& c) {
  const auto& t = c.transport_sweep;
  require(!t.dims.empty(), "transport_sweep.dims must be nonempty");
  for (int d : t.dims) require(d >= 2, "transport_sweep.dims entries must be >= 2");
  require(t.R > 0.0 && t.eps > 0.0 && 2.0 * t.eps < t.R, "transport_sweep needs 0 < 2 eps < R");
  require(t.min_atoms >= 1 && t.min_atoms <= t.max_atoms, "transport_sweep needs 1 <= min_atoms <= max_atoms");
  require(t.pairs >= 1, "transport_sweep.pairs must be >= 1");

  const auto& k = c.concentration;
  validate(k.model, "concentration.model");
  require_list(k.n_list, "concentration.n_list");
  require_list(k.r_grid, "concentration.r_grid");
  require(k.replicas >= 1, "concentration.replicas must be >= 1");
  require(k.C > 0.0 && k.D >= 0.0, "concentration needs C > 0 and D >= 0");
  for (auto n : k.n_list) require(n < k.atom_budget, "concentration.atom_budget must exceed every N");

  const auto& g = c.ginibre;
  require_list(g.n_list, "ginibre.n_list");
  require_list(g.r_grid, "ginibre.r_grid");
  require(g.replicas >= 1 && g.kostlan_replicas >= 2 && g.kostlan_oracle_draws >= 2,
          "ginibre replica counts too small");
  require(g.kostlan_n >= 1 && g.partition_n_max >= 2, "ginibre.kostlan_n >= 1 and partition_n_max >= 2 required");
  require(g.C > 0.0, "ginibre.C must be positive");
  for (auto n : g.n_list) require(n < g.atom_budget, "ginibre.atom_budget must exceed every N");

  const auto& m = c.mesoscopic;
  validate(m.model, "mesoscopic.model");
  require(m.s >= 0.0 && m.s < 1.0 / m.model.dim, "mesoscopic.s must lie in [0, 1/d)");
  require(m.x0.size() == static_cast<std::size_t>(m.model.dim), "mesoscopic.x0 must have dim entries");
  require_list(m.n_list, "mesoscopic.n_list");
  require(m.replicas >= 1 && m.ratio_factor > 0.0, "mesoscopic needs replicas >= 1 and ratio_factor > 0");
  for (auto n : m.n_list) require(n < m.atom_budget, "mesoscopic.atom_budget must exceed every N");

  const auto& s = c.tightness;
  validate(s.model, "tightness.model");
  require_list(s.n_list, "tightness.n_list");
  require_list(s.r_grid, "tightness.r_grid");
  require(s.replicas >= 1, "tightness.replicas must be >= 1");

  const auto& l = c.lemmas;
  require(l.superharm_radius > 0.0 && l.superharm_mc >= 2, "lemmas superharmonicity settings invalid");
  require(l.smoother_levels >= 1 && l.smoother_atoms >= 1 && l.smoother_cross_distance > 0.0,
          "lemmas smoother settings invalid");

  const auto& b = c.bounds;
  validate(b.model, "bounds.model");
  require_list(b.C_list, "bounds.C_list");
  require_list(b.beta_grid, "bounds.beta_grid");
  require_list(b.R_list, "bounds.R_list");
  require_list(b.n_list, "bounds.n_list");
  for (auto n : b.n_list) require(n >= 2, "bounds.n_list entries must be >= 2");
  require(b.small_beta_envelope.size() == 2 && b.large_beta_envelope.size() == 2,
          "bounds envelopes are [lo, hi] pairs");
}

}  // namespace

HarnessConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(doc, nlohmann::json(HarnessConfig{}), "");
  HarnessConfig config;
  try {
    config = doc.get<HarnessConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value: ") + e.what());
  }
  validate(config);
  return config;
}

HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

nlohmann::json to_json(const HarnessConfig& config) { return nlohmann::json(config); }

void set_replicas(HarnessConfig& config, std::size_t replicas) {
  config.concentration.replicas = replicas;
  config.ginibre.replicas = replicas;
  config.mesoscopic.replicas = replicas;
  config.tightness.replicas = replicas;
}

#ifndef CGAS_VERSION
#define CGAS_VERSION "dev"
#endif

const char* version() noexcept { return CGAS_VERSION; }

std::string config_hash(const nlohmann::json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace cgas
