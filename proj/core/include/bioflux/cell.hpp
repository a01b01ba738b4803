// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bioflux/grid.hpp"
#include "bioflux/model.hpp"

namespace bioflux {

// Combined face fluxes for the cell-density update: upwind transport by the
// total velocity (fluid + chemotactic drift) plus the degenerate-diffusion
// flux of n^m. Boundary faces carry exactly zero flux.
struct CellFluxes {
  FaceVectorField F;
};

// Chemotactic drift w = chi(c_face) grad(c) at faces, c_face the arithmetic
// mean of the adjacent cells; boundary faces zero.
FaceVectorField drift_velocity(const ScalarField& c, const SensitivitySpec& chi);

// Per interior face: (u+w) n_upwind - (n_R^m - n_L^m)/h.
CellFluxes assemble_cell_fluxes(const ScalarField& n, const FaceVectorField& u,
                                const FaceVectorField& w, double m);

// Explicit conservative update n' = n - dt div(F) + dt f(n). Never clamps:
// a negative result is a CflViolationError.
ScalarField cell_step(const ScalarField& n, const CellFluxes& fluxes,
                      const GrowthSpec& f, double dt,
                      const ScalarField* source = nullptr);

// Largest stable dt: safety * min(advective, diffusive, growth) bounds.
double cell_cfl(const ScalarField& n, const FaceVectorField& u,
                const FaceVectorField& w, double m, const GrowthSpec& f,
                double safety = 0.4);

// Closed-form 1D source-type solution of u_t = (u^m)_xx, centered at x0.
// Profile: t^(-a) max(0, C - k xi^2)^(1/(m-1)), xi = (x-x0) t^(-a),
// a = 1/(m+1), k = a(m-1)/(2m).
double barenblatt_profile(double m, double C, double t, double x, double x0);

}  // namespace bioflux
