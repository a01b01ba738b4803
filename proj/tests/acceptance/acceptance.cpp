// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: twelve product-level criteria exercised end to end on
// desk-scale problems. Each criterion prints exactly one PASS/FAIL line;
// the exit status is the number of failures. Several criteria share the
// same long runs to keep the total wall time bounded.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "bioflux/diagnostics.hpp"
#include "bioflux/io.hpp"
#include "bioflux/study.hpp"

using namespace bioflux;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, std::function<Outcome()> fn) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0).count();
  if (!out.pass) ++g_failures;
  std::printf("[%2d/12] %s  %s: %s (%.1f s)\n", id,
              out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

// Shared model for the plume-style runs: degenerate diffusion, constant
// sensitivity, linear consumption, downward gravity.
ModelParams plume_model(GrowthSpec f) {
  ModelParams p;
  p.m = 2.0;
  p.chi = SensitivitySpec::constant(0.5);
  p.k = ConsumptionSpec::linear(1.0);
  p.f = std::move(f);
  p.phi = PotentialSpec::gravity(0.3);
  p.c_O = 1.0;
  return p;
}

// ---- shared run A: 64^2 plume, zero growth, 1000 adaptive steps ---------
// feeds criteria 1 (mass law), 2 (oxygen monotonicity), 3 (positivity)
// and 5 (per-step divergence).

struct RunA {
  bool ready = false;
  std::string error;
  double mass0 = 0.0;
  double max_rel_mass_drift = 0.0;
  double worst_maxc_increase = -1.0;   // max over steps of max_c[k+1]-max_c[k]
  double worst_lp_increase = -1.0;     // relative, over p in {1,2,4,inf}
  double min_c = std::numeric_limits<double>::infinity();
  double min_n = std::numeric_limits<double>::infinity();
  double max_div = 0.0;
};

RunA run_a() {
  RunA out;
  Grid g(64, 64, 6.5, 6.5);
  ModelParams params = plume_model(GrowthSpec::zero());
  ScenarioSpec sc;
  sc.name = "tuval_plume";
  SimState s = make_scenario(sc, g, params);
  RunConfig cfg;  // adaptive, safety 0.4, tol 1e-10
  out.mass0 = integrate(s.n);

  const double ps[] = {1.0, 2.0, 4.0};
  double prev_maxc = norm_lp(s.c, std::numeric_limits<double>::infinity());
  double prev_lp[3] = {norm_lp(s.c, 1.0), norm_lp(s.c, 2.0),
                       norm_lp(s.c, 4.0)};
  for (int k = 0; k < 1000; ++k) {
    s = step(s, params, cfg);
    double mass = integrate(s.n);
    out.max_rel_mass_drift = std::max(out.max_rel_mass_drift,
                                      std::fabs(mass - out.mass0) / out.mass0);
    double maxc = norm_lp(s.c, std::numeric_limits<double>::infinity());
    out.worst_maxc_increase = std::max(out.worst_maxc_increase,
                                       maxc - prev_maxc);
    prev_maxc = maxc;
    for (int q = 0; q < 3; ++q) {
      double lp = norm_lp(s.c, ps[q]);
      out.worst_lp_increase = std::max(out.worst_lp_increase,
                                       (lp - prev_lp[q]) / prev_lp[q]);
      prev_lp[q] = lp;
    }
    out.min_c = std::min(out.min_c,
                         *std::min_element(s.c.v.begin(), s.c.v.end()));
    out.min_n = std::min(out.min_n,
                         *std::min_element(s.n.v.begin(), s.n.v.end()));
    out.max_div = std::max(out.max_div,
                           norm_lp(div_from_faces(s.u),
                                   std::numeric_limits<double>::infinity()));
  }
  out.ready = true;
  return out;
}

// ---- shared runs B: three fixed-dt plume runs to T = 50 -----------------
// seeds {0, 0, 1}; feeds criterion 10 (attractor tails) and 4 (oxygen cap).

struct RunB {
  bool ready = false;
  double dt = 0.0;
  double worst_maxc = 0.0;                 // over all runs and diag samples
  std::vector<std::vector<SimState>> histories;  // [seed0, seed0 again, seed1]
};

RunB run_b() {
  RunB out;
  Grid g(64, 64, 6.5, 6.5);
  ModelParams params = plume_model(GrowthSpec::fisher(1.0));
  RunConfig cfg;
  cfg.t_end = 50.0;
  cfg.safety = 0.6;
  cfg.tol = 1e-8;
  cfg.diag_every = 16;

  const std::uint64_t seeds[3] = {0, 0, 1};
  double dt = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed : {std::uint64_t(0), std::uint64_t(1)}) {
    ScenarioSpec sc;
    sc.name = "tuval_plume";
    sc.seed = seed;
    SimState s0 = make_scenario(sc, g, params);
    dt = std::min(dt, pick_dt(s0, params, cfg, 0.0));
  }
  cfg.dt_policy = DtPolicy::Fixed;
  cfg.dt = 0.75 * dt;
  out.dt = cfg.dt;
  std::uint64_t total = std::uint64_t(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  std::uint64_t sample_every = std::max<std::uint64_t>(1, total / 200);

  out.histories.resize(3);
  for (int k = 0; k < 3; ++k) {
    ScenarioSpec sc;
    sc.name = "tuval_plume";
    sc.seed = seeds[k];
    SimState s0 = make_scenario(sc, g, params);
    RunHooks hooks;
    hooks.on_step = [&](const SimState& s, double) {
      if (s.step % sample_every == 0) out.histories[k].push_back(s);
    };
    hooks.on_diag = [&](const SimState& s, double) {
      out.worst_maxc = std::max(
          out.worst_maxc,
          *std::max_element(s.c.v.begin(), s.c.v.end()));
    };
    run(std::move(s0), params, cfg, hooks);
  }
  out.ready = true;
  return out;
}

// ---- criterion 8 helper: one fixed-dt history at a given resolution -----

std::vector<SimState> refinement_history(int N, double dt, int steps) {
  Grid g(N, N, 2.0, 2.0);
  ModelParams params = plume_model(GrowthSpec::fisher(1.0));
  ScenarioSpec sc;
  sc.name = "tuval_plume";
  SimState s = make_scenario(sc, g, params);
  // an O(1) swirl makes the first-order upwind error the dominant term, so
  // halving h (at fixed dt/h) should roughly halve every residual
  s.u = stream_mode_field(g, 1, 1, 2.0);
  RunConfig cfg;
  cfg.dt_policy = DtPolicy::Fixed;
  cfg.dt = dt;
  std::vector<SimState> history;
  history.push_back(s);
  for (int k = 0; k < steps; ++k) {
    s = step(s, params, cfg);
    history.push_back(s);
  }
  return history;
}

}  // namespace

int main() {
  std::printf("bioflux acceptance gate\n");
  std::fflush(stdout);

  RunA a;
  report(1, "exact mass law", [&] {
    a = run_a();
    Outcome o;
    bool conserved = a.max_rel_mass_drift <= 1e-10;

    // Fisher growth: the per-step budget matches dt * integral f(n) exactly
    Grid g(64, 64, 6.5, 6.5);
    ModelParams params = plume_model(GrowthSpec::fisher(1.0));
    ScenarioSpec sc;
    sc.name = "tuval_plume";
    SimState s = make_scenario(sc, g, params);
    RunConfig cfg;
    double worst = 0.0;
    for (int k = 0; k < 300; ++k) {
      double mass_prev = integrate(s.n);
      ScalarField fn(s.grid());
      for (std::size_t q = 0; q < fn.v.size(); ++q)
        fn.v[q] = params.f.eval(s.n.v[q]);
      double fint = integrate(fn);
      double dt = pick_dt(s, params, cfg, 0.0);
      s = step(s, params, cfg);
      worst = std::max(worst, std::fabs(integrate(s.n) - mass_prev -
                                        dt * fint) / (1e-13 * mass_prev));
    }
    o.pass = conserved && worst <= 1.0;
    o.detail = fmt("rel drift %.2e <= 1e-10; fisher budget %.2f of limit",
                   a.max_rel_mass_drift, worst);
    return o;
  });

  report(2, "oxygen maximum principle and Lp decay", [&] {
    if (!a.ready) throw std::runtime_error("criterion-1 run unavailable");
    Outcome o;
    o.pass = a.worst_maxc_increase <= 1e-9 && a.worst_lp_increase <= 1e-12 &&
             a.min_c >= -1e-9;
    o.detail = fmt("max-c step increase %.2e, worst Lp rel increase %.2e",
                   a.worst_maxc_increase, a.worst_lp_increase) +
               fmt(", min c %.2e", a.min_c, 0.0);
    return o;
  });

  report(3, "cell positivity without clamping", [&] {
    if (!a.ready) throw std::runtime_error("criterion-1 run unavailable");
    // a deliberately doubled step must be caught, not clamped
    Grid g(8, 8, 1.0, 1.0);
    ScalarField n(g);
    n.at(4, 4) = 1.0;
    double adv = 8.0 / g.dx;
    FaceVectorField u(g), w(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) u.ux(i, j) = adv;
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) u.vy(i, j) = adv;
    double dt = cell_cfl(n, u, w, 2.0, GrowthSpec::zero());
    CellFluxes F = assemble_cell_fluxes(n, u, w, 2.0);
    ScalarField ok = cell_step(n, F, GrowthSpec::zero(), dt);
    bool stable = *std::min_element(ok.v.begin(), ok.v.end()) >= 0.0;
    bool caught = false;
    try {
      cell_step(n, F, GrowthSpec::zero(), 2.0 * dt);
    } catch (const CflViolationError&) {
      caught = true;
    }
    Outcome o;
    o.pass = a.min_n >= 0.0 && stable && caught;
    o.detail = fmt("run min n %.2e; doubled-dt error ", a.min_n, 0.0);
    o.detail += caught ? "raised" : "MISSING";
    return o;
  });

  RunB b;
  // runs B are consumed by criteria 4 and 10; execute them up front so a
  // failure is attributed to both.
  report(4, "oxygen cap over T = 50", [&] {
    b = run_b();
    Outcome o;
    double excess = b.worst_maxc - 1.0;  // c_O = 1
    o.pass = excess <= 1e-9;
    o.detail = fmt("worst max c - c_O = %.2e (limit 1e-9)", excess, 0.0);
    return o;
  });

  report(5, "divergence-free projection", [&] {
    if (!a.ready) throw std::runtime_error("criterion-1 run unavailable");
    double worst_direct = 0.0;
    for (int N : {32, 64, 128}) {
      Grid g(N, N, 1.0, 1.0);
      FaceVectorField ustar(g);
      std::uint64_t seed = 7;
      for (double& x : ustar.u) x = 0.1 * (2.0 * splitmix64_unit(seed) - 1.0);
      for (double& x : ustar.v) x = 0.1 * (2.0 * splitmix64_unit(seed) - 1.0);
      ustar.zero_boundary_normal();
      auto [u, p] = pressure_project(ustar, 1e-3, 1e-10);
      worst_direct = std::max(
          worst_direct, norm_lp(div_from_faces(u),
                                std::numeric_limits<double>::infinity()));
    }
    Outcome o;
    o.pass = a.max_div <= 1e-8 && worst_direct <= 1e-8;
    o.detail = fmt("run sup %.2e, direct 32..128 sup %.2e (limit 1e-8)",
                   a.max_div, worst_direct);
    return o;
  });

  report(6, "viscous kinetic decay rate", [&] {
    StudyReport rep = run_study(parse_study_spec(
        "[study]\nkind = decay_rate\nhorizon = 0.15\n"
        "[grid]\nnx = 64\nny = 64\nLx = 1\nLy = 1\n"
        "[model]\nm = 2\n"));
    Outcome o;
    o.pass = rep.pass();
    o.detail = fmt("fitted rate %.2f >= %.2f", rep.criteria[0].measured,
                   rep.criteria[0].threshold);
    return o;
  });

  report(7, "porous-medium closed-form oracle", [&] {
    StudyReport rep = run_study(parse_study_spec(
        "[study]\nkind = barenblatt\nhorizon = 1\n"
        "[grid]\nnx = 256\nny = 4\nLx = 12\nLy = 0.1875\n"
        "[model]\nm = 2\n"
        "[nonlinearity.chi]\nchi0 = 0\n"
        "[nonlinearity.k]\nkappa = 0\n"));
    Outcome o;
    o.pass = rep.pass();
    o.detail = fmt("L1 relative error %.2e <= %.2e",
                   rep.criteria[0].measured, rep.criteria[0].threshold);
    return o;
  });

  report(8, "weak residual refinement", [&] {
    std::vector<SimState> coarse = refinement_history(32, 2e-4, 100);
    std::vector<SimState> fine = refinement_history(64, 1e-4, 200);
    ModelParams params = plume_model(GrowthSpec::fisher(1.0));
    WeakResiduals rc = weak_residual(coarse, params);
    WeakResiduals rf = weak_residual(fine, params);
    double ratios[3] = {rc.cell / rf.cell, rc.oxygen / rf.oxygen,
                        rc.fluid / rf.fluid};
    Outcome o;
    o.pass = true;
    for (double r : ratios) o.pass = o.pass && r >= 1.5 && r <= 2.5;
    o.detail = fmt("ratios cell %.2f oxygen %.2f", ratios[0], ratios[1]) +
               fmt(" fluid %.2f (window [1.5, 2.5])", ratios[2], 0.0);
    return o;
  });

  report(9, "dissipative envelope at two amplitudes", [&] {
    StudyReport rep = run_study(parse_study_spec(
        "[study]\nkind = envelope\nhorizon = 50\namplitudes = 1, 10\n"
        "[grid]\nnx = 64\nny = 64\nLx = 6.5\nLy = 6.5\n"
        "[model]\nm = 2\nscenario = fisher_homogeneous\n"
        "[nonlinearity.chi]\nchi0 = 0.5\n"
        "[nonlinearity.f]\nkind = fisher\nmu = 1\n"
        "[nonlinearity.phi]\ng = 0.3\n"
        "[run]\nsafety = 0.6\ntol = 1e-8\ndiag_every = 16\n"));
    Outcome o;
    o.pass = rep.pass();
    double ratio = 0.0, tail = 0.0;
    for (const StudyCriterion& c : rep.criteria) {
      if (c.name == "Gamma_fit_ratio") ratio = c.measured;
      if (c.name == "tail_sup_rel_diff") tail = c.measured;
    }
    o.detail = fmt("Gamma ratio %.4f <= 2, tail rel diff %.2e <= 0.2",
                   ratio, tail);
    return o;
  });

  report(10, "attractor tail collapse", [&] {
    if (!b.ready) throw std::runtime_error("criterion-4 runs unavailable");
    double cross = tail_distance(b.histories[0], b.histories[2], 0.25);
    double self = tail_distance(b.histories[0], b.histories[1], 0.25);
    Outcome o;
    o.pass = cross <= 1e-3 && self == 0.0;
    o.detail = fmt("seed 0 vs 1 tail %.2e <= 1e-3; repeat-seed tail %.1e",
                   cross, self);
    o.detail += self == 0.0 ? " (bitwise)" : " (NOT bitwise)";
    return o;
  });

  report(11, "manufactured-solution convergence orders", [&] {
    StudyReport rep = run_study(parse_study_spec(
        "[study]\nkind = mms_convergence\n"
        "[grid]\nnx = 32\nny = 32\nLx = 1\nLy = 1\n"
        "[model]\nm = 2\n"));
    Outcome o;
    o.pass = rep.pass();
    for (const StudyCriterion& c : rep.criteria)
      o.detail += c.name + "=" + fmt("%.2f ", c.measured, 0.0);
    return o;
  });

  report(12, "regime gate in config validation", [&] {
    bool rejected = false;
    std::string msg;
    try {
      parse_config("[model]\nm = 1\n");
    } catch (const ConfigError& e) {
      rejected = true;
      msg = e.what();
    }
    bool names_rule = msg.find("asf2") != std::string::npos;
    ParsedConfig ok = parse_config("[model]\nm = 2\n");
    bool supercritical = ok.params.regime() == Regime::Supercritical;
    Outcome o;
    o.pass = rejected && names_rule && supercritical;
    o.detail = std::string("m=1 f=0 rejected ") +
               (names_rule ? "naming asf2" : "WITHOUT naming asf2") +
               "; m=2 accepted as supercritical";
    return o;
  });

  if (g_failures == 0) {
    std::printf("acceptance: all 12 criteria PASS\n");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
