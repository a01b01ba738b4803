// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bioflux/grid.hpp"
#include "bioflux/model.hpp"

namespace bioflux {

// One oxygen update: explicit upwind advection, backward-Euler diffusion,
// implicit consumption factorized as k(c) = c kappa(c). Preserves
// 0 <= c <= max(c) up to solver tolerance.
ScalarField oxygen_step(const ScalarField& c, const ScalarField& n,
                        const FaceVectorField& u, const ConsumptionSpec& k,
                        double dt, double tol,
                        const ScalarField* source = nullptr);

}  // namespace bioflux
