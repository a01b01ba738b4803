// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "bioflux/coupler.hpp"
#include "bioflux/grid.hpp"
#include "bioflux/model.hpp"

namespace bioflux {

// One row of monitored functionals.
struct DiagRecord {
  double t = 0.0, dt = 0.0;
  double mass = 0.0;          // ||n||_1
  double entropy = 0.0;       // integral n ln n
  double min_n = 0.0, max_n = 0.0;
  double min_c = 0.0, max_c = 0.0;
  double grad_c_l2 = 0.0;     // ||grad_h c||
  double kinetic = 0.0;       // 1/2 ||u||^2
  double grad_u_l2 = 0.0;     // ||grad_h u||
  double grad_nm2_l2 = 0.0;   // ||grad_h (n^(m/2))||
  double div_linf = 0.0;
  double f_integral = 0.0;    // integral f(n)
  double lyapunov = 0.0;      // ||grad c||^2 + int n ln n + K2 ||u||^2
  double c_l2 = 0.0;          // ||c||_{L2}, used by the envelope bracket
  double n_plm = 0.0;         // ||n||_{max(1,m/2)}^{max(1,m/2)}
};

DiagRecord record(const SimState& state, const ModelParams& params,
                  double dt = 0.0);

// -(2/e) sqrt(mass |Omega|); every valid entropy is above this.
double entropy_lower_bound(double mass, double domain_area);

// Max weak-form residual per equation over a uniformly spaced history,
// tested against cosine modes (scalar equations) and divergence-free
// stream-function modes (momentum).
struct WeakResiduals {
  double cell = 0.0;
  double oxygen = 0.0;
  double fluid = 0.0;
};

WeakResiduals weak_residual(const std::vector<SimState>& history,
                            const ModelParams& params, int scalar_modes = 6,
                            int vector_modes = 3);

// Dissipative-envelope fit: Gamma_fit is the smallest Gamma with
// LHS(t) <= Gamma [1 + e^{-gamma t} X0] over all samples.
struct EnvelopeFit {
  double gamma = 0.0;
  double Gamma_fit = 0.0;
  double X0 = 0.0;
  double tail_sup = 0.0;      // sup of LHS over the last half of the run
  double windowed_sup = 0.0;  // unit-window integral of dissipation terms
};

// X0 bracket of the initial data: ||n||_1 + || n ln n ||_{L1}
// + ||n||_plm^plm + ||c||_{H1}^2 + ||u||^2.
double envelope_initial_bracket(const SimState& state, const ModelParams& params);

EnvelopeFit fit_envelope(const std::vector<DiagRecord>& records, double gamma,
                         double X0);

struct CapCheck {
  bool pass = true;
  double t_first_violation = 0.0;
  double worst_excess = 0.0;
};

CapCheck oxygen_cap_check(const std::vector<DiagRecord>& records, double c_O,
                          double tol);

// sup over the trailing fraction of ||nA-nB|| + ||cA-cB|| + ||grad(cA-cB)||
// + ||uA-uB|| (L2 x H1 x L2 proxy for the attractor metric).
double tail_distance(const std::vector<SimState>& a,
                     const std::vector<SimState>& b, double tail_fraction);

}  // namespace bioflux
