// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "bioflux/coupler.hpp"
#include "bioflux/io.hpp"

using namespace bioflux;

namespace {

ModelParams small_model() {
  ModelParams p;
  p.m = 2.0;
  p.chi = SensitivitySpec::constant(0.5);
  p.k = ConsumptionSpec::linear(1.0);
  p.f = GrowthSpec::fisher(1.0);
  p.phi = PotentialSpec::gravity(0.3);
  return p;
}

SimState small_state(std::uint64_t seed = 0) {
  Grid g(16, 16, 1.0, 1.0);
  ScenarioSpec sc;
  sc.name = "tuval_plume";
  sc.seed = seed;
  return make_scenario(sc, g, small_model());
}

bool bitwise_equal(const SimState& a, const SimState& b) {
  return a.t == b.t && a.step == b.step && a.n.v == b.n.v && a.c.v == b.c.v &&
         a.u.u == b.u.u && a.u.v == b.u.v;
}

}  // namespace

TEST_CASE("run config validation") {
  RunConfig cfg;
  cfg.tol = 1e-3;  // looser than the supported range
  CHECK_THROWS_AS(cfg.check(), InvalidParameterError);
  cfg.tol = 1e-10;
  cfg.safety = 0.0;
  CHECK_THROWS_AS(cfg.check(), InvalidParameterError);
  cfg.safety = 0.4;
  cfg.dt_policy = DtPolicy::Fixed;
  CHECK_THROWS_AS(cfg.check(), InvalidParameterError);  // fixed needs dt > 0
}

TEST_CASE("quiescent stepping falls back to the viscous bound and the cap") {
  Grid g(8, 8, 1.0, 1.0);
  SimState rest = SimState::initial(g);
  RunConfig cfg;
  ModelParams params = small_model();
  params.f = GrowthSpec::zero();
  // at rest only the viscous bound is finite: safety * h^2 / 4
  double viscous = 0.4 * g.dx * g.dx / 4.0;
  CHECK(pick_dt(rest, params, cfg, 0.0) == doctest::Approx(viscous));
  cfg.dt_cap = 1e-4;
  CHECK(pick_dt(rest, params, cfg, 0.0) == doctest::Approx(1e-4));
  CHECK(pick_dt(rest, params, cfg, 1e-5) == doctest::Approx(1e-5));
}

TEST_CASE("run is deterministic and lands on t_end") {
  ModelParams params = small_model();
  RunConfig cfg;
  cfg.t_end = 0.02;
  cfg.tol = 1e-11;
  SimState a = run(small_state(), params, cfg);
  SimState b = run(small_state(), params, cfg);
  CHECK(bitwise_equal(a, b));
  CHECK(a.t == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("hooks fire at their cadences") {
  ModelParams params = small_model();
  RunConfig cfg;
  cfg.dt_policy = DtPolicy::Fixed;
  cfg.dt = 1e-3;
  cfg.t_end = 0.02;
  cfg.diag_every = 5;
  cfg.checkpoint_every = 8;
  int steps = 0, diags = 0, checkpoints = 0;
  RunHooks hooks;
  hooks.on_step = [&](const SimState&, double) { ++steps; };
  hooks.on_diag = [&](const SimState&, double) { ++diags; };
  hooks.on_checkpoint = [&](const SimState&) { ++checkpoints; };
  run(small_state(), params, cfg, hooks);
  CHECK(steps == 21);        // initial state + 20 steps
  CHECK(diags == 5);         // initial + steps 5, 10, 15, 20
  CHECK(checkpoints == 2);   // steps 8, 16
}

TEST_CASE("snapshot round-trip is bitwise") {
  SimState s = small_state(3);
  s.t = 1.25;
  s.step = 77;
  SimState r = restore(checkpoint(s));
  CHECK(bitwise_equal(s, r));
  CHECK(r.grid().same_as(s.grid()));
}

TEST_CASE("corrupt snapshots are rejected") {
  Snapshot snap = checkpoint(small_state());
  Snapshot bad = snap;
  bad.bytes[0] = 'X';
  CHECK_THROWS_AS(restore(bad), FormatError);

  bad = snap;
  bad.bytes[4] = 99;  // unsupported version
  CHECK_THROWS_AS(restore(bad), FormatError);

  bad = snap;
  bad.bytes.resize(bad.bytes.size() / 2);  // truncated arrays
  CHECK_THROWS_AS(restore(bad), FormatError);

  bad = snap;
  bad.bytes.push_back(0);  // trailing garbage
  CHECK_THROWS_AS(restore(bad), FormatError);
}

TEST_CASE("resuming from a checkpoint reproduces the unsplit run bitwise") {
  ModelParams params = small_model();
  RunConfig cfg;
  cfg.dt_policy = DtPolicy::Fixed;
  cfg.dt = 2e-4;
  cfg.tol = 1e-10;

  SimState s = small_state(1);
  for (int k = 0; k < 30; ++k) s = step(s, params, cfg);
  Snapshot snap = checkpoint(s);
  for (int k = 0; k < 30; ++k) s = step(s, params, cfg);

  SimState r = restore(snap);
  for (int k = 0; k < 30; ++k) r = step(r, params, cfg);
  CHECK(bitwise_equal(s, r));
}

TEST_CASE("adaptive runs also restart bitwise") {
  ModelParams params = small_model();
  RunConfig cfg;
  cfg.tol = 1e-10;
  SimState s = small_state(2);
  for (int k = 0; k < 25; ++k) s = step(s, params, cfg);
  SimState r = restore(checkpoint(s));
  for (int k = 0; k < 25; ++k) {
    s = step(s, params, cfg);
    r = step(r, params, cfg);
  }
  CHECK(bitwise_equal(s, r));
}

TEST_CASE("debug checks accept a healthy trajectory") {
  ModelParams params = small_model();
  RunConfig cfg;
  cfg.debug_checks = true;
  cfg.t_end = 5e-3;
  SimState s = run(small_state(), params, cfg);
  CHECK(s.t == doctest::Approx(5e-3).epsilon(1e-12));
}
