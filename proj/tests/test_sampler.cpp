#include <doctest.h>

#include <cmath>
#include <vector>

#include "cgas/kernel.hpp"
#include "cgas/reference.hpp"
#include "cgas/sampler.hpp"
#include "cgas/stats.hpp"

using namespace cgas;

TEST_CASE("model validation") {
  CHECK_THROWS(make_gas_model(SpaceDim(2), Potential::quadratic(), 0.0, 10));
  CHECK_THROWS(make_gas_model(SpaceDim(2), Potential::quadratic(), 2.0, 0));
  CHECK_NOTHROW(make_gas_model(SpaceDim(2), Potential::quadratic(), 2.0, 1));
}

TEST_CASE("explicit proposals follow the Metropolis rule") {
  const auto model = make_gas_model(SpaceDim(2), Potential::quadratic(), 2.0, 3);
  SamplerConfig cfg;
  cfg.master_seed = 1;
  auto state = init_chain_at(model, cfg, 0, PointConfiguration(SpaceDim(2), std::vector<double>{0.5, 0.0, -0.5, 0.0, 0.0, 0.5}));
  const double h0 = state.energy;
  CHECK(h0 == doctest::Approx(reference::hamiltonian(state.config, model.potential)).epsilon(1e-14));
  // Downhill moves are always taken.
  const std::vector<double> down{0.0, -0.6};
  const double dh = move_delta(state.config, model.potential, 2, down);
  REQUIRE(dh < 0.0);
  CHECK(mh_step_with(state, model, 2, down));
  CHECK(state.energy == doctest::Approx(h0 + dh).epsilon(1e-14));
  // A far move has acceptance exp(-(beta/2) dH) below machine precision.
  const std::vector<double> far{30.0, 0.0};
  const auto before = state.config.coords();
  const std::vector<double> copy(before.begin(), before.end());
  CHECK_FALSE(mh_step_with(state, model, 0, far));
  CHECK(std::vector<double>(state.config.coords().begin(), state.config.coords().end()) == copy);
  // Coincident proposal: +inf energy change, rejected.
  const std::vector<double> onto(state.config.point(1).begin(), state.config.point(1).end());
  CHECK_FALSE(mh_step_with(state, model, 0, onto));
}

TEST_CASE("single particle marginal") {
  // N = 1, V = |x|^2, beta = 2: density proportional to exp(-|x|^2), variance 1/2 per coordinate.
  const auto model = make_gas_model(SpaceDim(2), Potential::quadratic(), 2.0, 1);
  SamplerConfig cfg;
  cfg.burn_in_sweeps = 500;
  cfg.thin_sweeps = 5;
  cfg.samples = 20000;
  cfg.master_seed = 3;
  const auto run = run_chain(model, cfg, init_chain(model, cfg, 0));
  std::vector<double> xs;
  for (const auto& s : run.samples) xs.insert(xs.end(), s.coords().begin(), s.coords().end());
  CHECK(variance(xs) == doctest::Approx(0.5).epsilon(0.04));
  CHECK(std::abs(mean(xs)) < 0.03);
}

TEST_CASE("chains are reproducible and audited") {
  const auto model = make_gas_model(SpaceDim(2), Potential::quadratic(), 2.0, 32);
  SamplerConfig cfg;
  cfg.burn_in_sweeps = 100;
  cfg.thin_sweeps = 10;
  cfg.samples = 5;
  cfg.master_seed = 4;
  cfg.audit_interval_steps = 500;
  const auto a = run_chain(model, cfg, init_chain(model, cfg, 2));
  const auto b = run_chain(model, cfg, init_chain(model, cfg, 2));
  CHECK(a.energies == b.energies);
  const auto c = run_chain(model, cfg, init_chain(model, cfg, 3));
  CHECK(a.energies != c.energies);
  for (std::size_t k = 0; k < a.samples.size(); ++k)
    CHECK(a.energies[k] == doctest::Approx(reference::hamiltonian(a.samples[k], model.potential)).epsilon(1e-10));
  CHECK(a.max_audit_error < 1e-7);
  CHECK(a.acceptance > 0.0);
  CHECK(a.acceptance < 1.0);
  for (double s : a.sample_sigmas) CHECK(s == a.sigma);
}

TEST_CASE("Ginibre draws") {
  const auto d = ginibre_draw(64, 5);
  CHECK(d.points.size() == 64);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < 64; ++i) re += d.points.point(i)[0], im += d.points.point(i)[1];
  CHECK(std::abs(std::complex<double>(re, im) - d.trace) <= 1e-8 * d.frobenius);
  const auto e = ginibre_draw(64, 5);
  CHECK(std::vector<double>(d.points.coords().begin(), d.points.coords().end()) ==
        std::vector<double>(e.points.coords().begin(), e.points.coords().end()));
  // E ||M / sqrt(N)||_F^2 = N.
  CHECK(d.frobenius * d.frobenius == doctest::Approx(64.0).epsilon(0.1));
  CHECK(max_modulus(d.points) < 1.6);
}
