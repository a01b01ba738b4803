// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <doctest.h>

#include "bioflux/fluid.hpp"
#include "bioflux/io.hpp"

using namespace bioflux;

namespace {

FaceVectorField noisy_velocity(const Grid& g, std::uint64_t seed, double scale) {
  FaceVectorField u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      u.ux(i, j) = scale * (2.0 * splitmix64_unit(seed) - 1.0);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      u.vy(i, j) = scale * (2.0 * splitmix64_unit(seed) - 1.0);
  return u;
}

double div_linf(const FaceVectorField& u) {
  return norm_lp(div_from_faces(u), std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_CASE("projection drives the divergence to the solver floor") {
  for (int N : {32, 64, 128}) {
    Grid g(N, N, 1.0, 1.0);
    // O(0.1) data: the CG stop is relative to ||div u*/dt||, so the floor
    // scales with the input roughness
    FaceVectorField ustar = noisy_velocity(g, 60 + N, 0.05);
    auto [u, p] = pressure_project(ustar, 1e-3, 1e-10);
    CHECK(div_linf(u) <= 1e-8);
    CHECK(integrate(p.p) == doctest::Approx(0.0).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("projection is idempotent up to the tolerance") {
  Grid g(32, 32, 1.0, 1.0);
  FaceVectorField ustar = noisy_velocity(g, 71, 1.0);
  auto [u, p1] = pressure_project(ustar, 1e-3, 1e-12);
  auto [u2, p2] = pressure_project(u, 1e-3, 1e-12);
  double diff = 0.0;
  for (std::size_t k = 0; k < u.u.size(); ++k)
    diff = std::max(diff, std::fabs(u.u[k] - u2.u[k]));
  for (std::size_t k = 0; k < u.v.size(); ++k)
    diff = std::max(diff, std::fabs(u.v[k] - u2.v[k]));
  CHECK(diff <= 1e-10);
}

TEST_CASE("nonzero wall-normal flux is an incompatible projection input") {
  Grid g(8, 8, 1.0, 1.0);
  FaceVectorField ustar(g);
  ustar.ux(0, 3) = 1.0;  // inflow through the left wall
  CHECK_THROWS_AS(pressure_project(ustar, 1e-3, 1e-10), CompatibilityError);
}

TEST_CASE("uniform buoyancy on uniform density is a pure gradient: no flow") {
  Grid g(32, 32, 1.0, 1.0);
  FaceVectorField u(g);
  ScalarField n(g, 1.0);
  FluidStepResult r = fluid_step(u, n, PotentialSpec::gravity(5.0), 1e-3, 1e-12);
  CHECK(kinetic_energy(r.u) <= 1e-16);
  CHECK(div_linf(r.u) <= 1e-10);
}

TEST_CASE("a lateral density contrast under gravity starts a flow") {
  Grid g(32, 32, 1.0, 1.0);
  FaceVectorField u(g);
  ScalarField n(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx / 2; ++i) n.at(i, j) = 1.0;
  FluidStepResult r = fluid_step(u, n, PotentialSpec::gravity(5.0), 1e-3, 1e-10);
  CHECK(kinetic_energy(r.u) > 0.0);
  CHECK(div_linf(r.u) <= 1e-8);
}

TEST_CASE("free decay dissipates kinetic energy monotonically") {
  Grid g(32, 32, 1.0, 1.0);
  FaceVectorField u = stream_mode_field(g, 1, 1, 0.05);
  ScalarField n(g);
  PotentialSpec phi = PotentialSpec::gravity(0.0);
  double prev = kinetic_energy(u);
  for (int s = 0; s < 20; ++s) {
    double dt = fluid_cfl(u);
    FluidStepResult r = fluid_step(u, n, phi, dt, 1e-12);
    u = std::move(r.u);
    double ke = kinetic_energy(u);
    CHECK(ke <= prev);
    prev = ke;
  }
}

TEST_CASE("the discrete energy ledger closes to leading order") {
  Grid g(32, 32, 1.0, 1.0);
  FaceVectorField u = stream_mode_field(g, 1, 1, 0.05);
  ScalarField n(g);
  double dt = 1e-5;
  FluidStepResult r = fluid_step(u, n, PotentialSpec::gravity(0.0), dt, 1e-12);
  // the defect is dominated by the upwind advection bias, well below the
  // dissipation itself
  CHECK(r.energy_residual <= 0.05 * dt * velocity_grad_sq(u));
}

TEST_CASE("cfl bound combines advective and viscous limits") {
  Grid g(10, 10, 1.0, 1.0);
  FaceVectorField u(g);
  double dt_quiet = fluid_cfl(u, 0.4);
  CHECK(dt_quiet == doctest::Approx(0.4 * g.dx * g.dx / 4.0));  // viscous only
  u.ux(5, 5) = 100.0;
  CHECK(fluid_cfl(u, 0.4) == doctest::Approx(0.4 * g.dx / 100.0));
}
