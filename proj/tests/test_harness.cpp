#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cgas/config.hpp"
#include "cgas/experiments.hpp"
#include "cgas/report.hpp"

using namespace cgas;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

HarnessConfig tiny() {
  HarnessConfig c = parse_config(json::object());
  c.concentration.n_list = {16, 48};
  c.concentration.replicas = 12;
  c.concentration.atom_budget = 1200;
  c.ginibre.n_list = {16, 48};
  c.ginibre.replicas = 6;
  c.ginibre.atom_budget = 1200;
  c.ginibre.kostlan_n = 8;
  c.ginibre.kostlan_replicas = 40;
  c.ginibre.kostlan_oracle_draws = 4000;
  c.ginibre.partition_n_max = 16;
  c.mesoscopic.n_list = {16, 64};
  c.mesoscopic.replicas = 4;
  c.mesoscopic.atom_budget = 1200;
  c.tightness.n_list = {16, 32};
  c.tightness.replicas = 20;
  c.transport_sweep.pairs = 20;
  c.lemmas.regularization_instances = 6;
  c.lemmas.superharm_points = 6;
  c.lemmas.superharm_mc = 2000;
  c.lemmas.smear_instances = 8;
  return c;
}

}  // namespace

TEST_CASE("defaults parse and round-trip") {
  const auto c = parse_config(json::object());
  const json j = to_json(c);
  CHECK(to_json(parse_config(j)) == j);
  CHECK(j.at("concentration").at("n_list") == json({32, 128, 512}));
  CHECK(config_hash(j) == config_hash(to_json(parse_config(j))));
  CHECK(config_hash(j).size() == 16);
  auto k = c;
  k.seed += 1;
  CHECK(config_hash(to_json(k)) != config_hash(j));
}

TEST_CASE("unknown keys and bad values are rejected") {
  CHECK_THROWS_AS(parse_config(json{{"sed", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"concentration", {{"model", {{"betta", 2.0}}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"mesoscopic", {{"s", 0.5}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"ginibre", {{"replicas", "many"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"concentration", {{"model", {{"sampler", "ginibre"}, {"beta", 1.0}}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
  CHECK_NOTHROW(parse_config(json{{"mesoscopic", {{"s", 0.0}}}}));
  const auto c = parse_config(json{{"concentration", {{"model", {{"potential", {{"kind", "polynomial"}, {"coeffs", {0.0, 0.0, 1.0}}}}}}}}});
  CHECK(c.concentration.model.potential.kind == "polynomial");
  CHECK_FALSE(c.concentration.model.use_ginibre());
}

TEST_CASE("CSV formatting") {
  CHECK(format_cell(Cell{0.1}) == "0.10000000000000001");
  CHECK(format_cell(Cell{std::int64_t{-3}}) == "-3");
  CHECK(format_cell(Cell{std::nan("")}) == "nan");
  Table t{"t", {"a", "b"}, {}};
  t.add({std::int64_t{1}, 2.5});
  CHECK_THROWS(t.add({1.0}));
  CHECK(to_csv(t) == "a,b\n1,2.5\n");
  CHECK(t.number(0, "b") == 2.5);
}

TEST_CASE("report files") {
  ExperimentReport r;
  r.experiment = "demo";
  r.add_table("x", {"v"}).add({1.0});
  r.add_table("y", {"w"}).add({std::string("z")});
  r.check("demo.ok", true, 1.0, 2.0, "identity");
  r.info["R_V"] = 1.0;
  const auto dir = std::filesystem::temp_directory_path() / "cgas_report_test";
  std::filesystem::remove_all(dir);
  write_reports({r}, dir.string(), json{{"seed", 1}});
  CHECK(slurp(dir / "demo_x.csv") == "v\n1\n");
  const auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("passed") == true);
  CHECK(summary.at("assertions").at(0).at("kind") == "identity");
  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("experiments").at("demo").at("info").at("R_V") == 1.0);
  CHECK(manifest.at("seed") == 1);
}

TEST_CASE("small experiment runs") {
  const auto c = tiny();
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    const auto r = run_experiment(name, c);
    CHECK_FALSE(r.tables.empty());
    CHECK_FALSE(r.assertions.empty());
    for (const auto& a : r.assertions) {
      CAPTURE(a.name);
      CHECK((a.kind == "identity" || a.kind == "oracle" || a.kind == "statistical" || a.kind == "trend"));
    }
  }
}

TEST_CASE("the transport sweep keeps its control row") {
  auto c = tiny();
  const auto r = run_experiment("transport-sweep", c);
  const auto& t = r.table("pairs");
  CHECK(t.rows.size() == 2 * (c.transport_sweep.pairs + 1));
  CHECK(r.assertion("transport_sweep.d2.control_ratio").passed);
  c.transport_sweep.eps = 0.2;
  c.transport_sweep.min_atoms = c.transport_sweep.max_atoms = 24;
  c.transport_sweep.retry_budget = 50;
  CHECK_THROWS_WITH_AS(run_experiment("transport-sweep", c), doctest::Contains("cannot place"), std::runtime_error);
}

TEST_CASE("results do not depend on the thread count") {
  const auto c = tiny();
  std::vector<std::string> csv[2];
  for (int pass = 0; pass < 2; ++pass) {
    omp_set_num_threads(pass == 0 ? 1 : 4);
    for (const char* name : {"concentration", "ginibre", "transport-sweep"})
      for (const auto& t : run_experiment(name, c).tables) csv[pass].push_back(to_csv(t));
  }
  CHECK(csv[0] == csv[1]);
}

TEST_CASE("MCMC-driven concentration run") {
  auto c = tiny();
  c.concentration.model.beta = 1.0;
  c.concentration.model.mcmc.burn_in_sweeps = 50;
  c.concentration.n_list = {12, 24};
  c.concentration.replicas = 4;
  const auto r = run_concentration(c.concentration, 9);
  CHECK(r.info.at("sampler") == "mcmc");
  CHECK(r.table("replicas").rows.size() == 8);
}
