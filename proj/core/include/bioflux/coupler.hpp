// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bioflux/cell.hpp"
#include "bioflux/fluid.hpp"
#include "bioflux/grid.hpp"
#include "bioflux/model.hpp"
#include "bioflux/oxygen.hpp"

namespace bioflux {

struct SimState {
  double t = 0.0;
  std::uint64_t step = 0;
  ScalarField n;
  ScalarField c;
  FaceVectorField u;
  PressureSolution p;  // last pressure solve

  static SimState initial(const Grid& g) {
    SimState s;
    s.n = ScalarField(g);
    s.c = ScalarField(g);
    s.u = FaceVectorField(g);
    s.p.p = ScalarField(g);
    return s;
  }
  const Grid& grid() const { return n.grid; }
};

enum class DtPolicy { Adaptive, Fixed };

struct RunConfig {
  double t_end = 1.0;
  DtPolicy dt_policy = DtPolicy::Adaptive;
  double dt = 0.0;          // fixed step when dt_policy == Fixed
  double dt_cap = 0.0;      // optional cap for the adaptive policy, 0 = none
  double safety = 0.4;
  double tol = 1e-10;       // linear solver tolerance
  std::uint64_t checkpoint_every = 0;  // steps, 0 = off
  std::uint64_t diag_every = 1;        // steps
  bool debug_checks = false;

  void check() const;
};

struct RunHooks {
  // invoked after every accepted step (and once for the initial state)
  std::function<void(const SimState&, double dt)> on_step;
  // cadence-filtered observers
  std::function<void(const SimState&, double dt)> on_diag;
  std::function<void(const SimState&)> on_checkpoint;
};

// Stable dt for the current state: worst of the cell and fluid bounds,
// the configured cap, and dt_limit.
double pick_dt(const SimState& state, const ModelParams& params,
               const RunConfig& cfg, double dt_limit);

// One Lie-split step: fluid (current n) -> oxygen (new u) -> cells (new u, c).
// Throws without touching the input on any sub-solver failure.
SimState step(const SimState& state, const ModelParams& params,
              const RunConfig& cfg, double dt_limit = 0.0);

// Advance to t >= t_end, invoking hooks at their cadences. Deterministic:
// identical inputs produce bitwise-identical results.
SimState run(SimState state, const ModelParams& params, const RunConfig& cfg,
             const RunHooks& hooks = {});

// Bit-exact binary image of a SimState (layout shared with snapshot files).
struct Snapshot {
  std::vector<std::uint8_t> bytes;
};

Snapshot checkpoint(const SimState& state);
SimState restore(const Snapshot& snap);

}  // namespace bioflux
