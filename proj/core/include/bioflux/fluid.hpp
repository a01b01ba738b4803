// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bioflux/grid.hpp"
#include "bioflux/model.hpp"

namespace bioflux {

struct PressureSolution {
  ScalarField p;          // zero-mean
  double residual = 0.0;  // achieved relative residual of the Poisson solve
};

struct FluidStepResult {
  FaceVectorField u;
  PressureSolution pressure;
  // |dKE + dt ||grad u||^2 + dt (n grad(phi), u)| of the explicit stage.
  double energy_residual = 0.0;
};

// Explicit predictor: upwind self-advection, viscous 5-point stencil with
// no-slip ghosts, buoyancy forcing -n grad(phi) with face-interpolated n.
FaceVectorField predict_velocity(const FaceVectorField& u, const ScalarField& n,
                                 const PotentialSpec& phi, double dt);

// Chorin projection: -Lap p = -div(u*)/dt (zero mean), u = u* - dt grad p.
// Boundary faces stay exactly zero.
std::pair<FaceVectorField, PressureSolution> pressure_project(
    const FaceVectorField& ustar, double dt, double tol,
    const ScalarField* p_hint = nullptr);

FluidStepResult fluid_step(const FaceVectorField& u, const ScalarField& n,
                           const PotentialSpec& phi, double dt, double tol,
                           const ScalarField* p_hint = nullptr);

// safety * min(dx/max|u|, dy/max|v|, h^2/(2d)) with unit viscosity.
double fluid_cfl(const FaceVectorField& u, double safety = 0.4);

}  // namespace bioflux
