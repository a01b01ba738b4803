// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include "bioflux/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bioflux {

FaceVectorField predict_velocity(const FaceVectorField& u, const ScalarField& n,
                                 const PotentialSpec& phi, double dt) {
  const Grid& g = u.grid;
  const double dx = g.dx, dy = g.dy;
  FaceVectorField out = u;

  // u faces, interior i = 1..nx-1; tangential ghosts are -u (no-slip walls)
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      double uc = u.ux(i, j);
      double ul = u.ux(i - 1, j), ur = u.ux(i + 1, j);
      double ud = j > 0 ? u.ux(i, j - 1) : -uc;
      double uu = j + 1 < g.ny ? u.ux(i, j + 1) : -uc;
      double av = 0.25 * (u.vy(i - 1, j) + u.vy(i, j) +
                          u.vy(i - 1, j + 1) + u.vy(i, j + 1));
      double dudx = uc >= 0.0 ? (uc - ul) / dx : (ur - uc) / dx;
      double dudy = av >= 0.0 ? (uc - ud) / dy : (uu - uc) / dy;
      double lap = (ur - 2.0 * uc + ul) / (dx * dx) +
                   (uu - 2.0 * uc + ud) / (dy * dy);
      double nbar = 0.5 * (n.at(i - 1, j) + n.at(i, j));
      double force = -nbar * phi.grad_x_face(g, i, j);
      out.ux(i, j) = uc + dt * (-(uc * dudx + av * dudy) + lap + force);
    }
  }
  // v faces, interior j = 1..ny-1
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double vc = u.vy(i, j);
      double vd = u.vy(i, j - 1), vu = u.vy(i, j + 1);
      double vl = i > 0 ? u.vy(i - 1, j) : -vc;
      double vr = i + 1 < g.nx ? u.vy(i + 1, j) : -vc;
      double au = 0.25 * (u.ux(i, j - 1) + u.ux(i + 1, j - 1) +
                          u.ux(i, j) + u.ux(i + 1, j));
      double dvdx = au >= 0.0 ? (vc - vl) / dx : (vr - vc) / dx;
      double dvdy = vc >= 0.0 ? (vc - vd) / dy : (vu - vc) / dy;
      double lap = (vr - 2.0 * vc + vl) / (dx * dx) +
                   (vu - 2.0 * vc + vd) / (dy * dy);
      double nbar = 0.5 * (n.at(i, j - 1) + n.at(i, j));
      double force = -nbar * phi.grad_y_face(g, i, j);
      out.vy(i, j) = vc + dt * (-(au * dvdx + vc * dvdy) + lap + force);
    }
  }
  out.zero_boundary_normal();
  return out;
}

std::pair<FaceVectorField, PressureSolution> pressure_project(
    const FaceVectorField& ustar, double dt, double tol,
    const ScalarField* p_hint) {
  const Grid& g = ustar.grid;
  ScalarField div = div_from_faces(ustar);
  double linf = norm_lp(div, std::numeric_limits<double>::infinity());
  double mean = integrate(div) / (g.Lx * g.Ly);
  if (std::fabs(mean) > 1e-10 * (1.0 + linf))
    throw CompatibilityError(
        "pressure_project: mean divergence is nonzero; boundary faces must "
        "carry zero normal velocity");

  ScalarField rhs(g);
  for (std::size_t k = 0; k < rhs.v.size(); ++k) rhs.v[k] = -div.v[k] / dt;
  SpdSolution sol = solve_spd(SpdOperator::PoissonNeumann, 0.0, rhs, tol,
                              10000, p_hint);

  FaceVectorField u = ustar;
  FaceVectorField gp = grad_to_faces(sol.x);
  for (std::size_t k = 0; k < u.u.size(); ++k) u.u[k] -= dt * gp.u[k];
  for (std::size_t k = 0; k < u.v.size(); ++k) u.v[k] -= dt * gp.v[k];
  // grad has zero boundary faces, so walls stay untouched; pin them anyway
  u.zero_boundary_normal();

  PressureSolution ps;
  ps.p = std::move(sol.x);
  ps.residual = sol.residual;
  return {std::move(u), std::move(ps)};
}

FluidStepResult fluid_step(const FaceVectorField& u, const ScalarField& n,
                           const PotentialSpec& phi, double dt, double tol,
                           const ScalarField* p_hint) {
  const Grid& g = u.grid;
  FaceVectorField ustar = predict_velocity(u, n, phi, dt);
  auto [unew, ps] = pressure_project(ustar, dt, tol, p_hint);

  // discrete mirror of the kinetic-energy identity, forcing quadrature
  // matching the momentum source
  double force_power = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      force_power += 0.5 * (n.at(i - 1, j) + n.at(i, j)) *
                     phi.grad_x_face(g, i, j) * u.ux(i, j);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      force_power += 0.5 * (n.at(i, j - 1) + n.at(i, j)) *
                     phi.grad_y_face(g, i, j) * u.vy(i, j);
  force_power *= g.cell_area();

  FluidStepResult res;
  res.energy_residual = std::fabs(kinetic_energy(unew) - kinetic_energy(u) +
                                  dt * velocity_grad_sq(u) + dt * force_power);
  res.u = std::move(unew);
  res.pressure = std::move(ps);
  return res;
}

double fluid_cfl(const FaceVectorField& u, double safety) {
  const Grid& g = u.grid;
  const double inf = std::numeric_limits<double>::infinity();
  double umax = u.max_abs_u(), vmax = u.max_abs_v();
  double dt_ax = umax > 0.0 ? g.dx / umax : inf;
  double dt_ay = vmax > 0.0 ? g.dy / vmax : inf;
  double h = std::min(g.dx, g.dy);
  double dt_visc = h * h / 4.0;
  return safety * std::min({dt_ax, dt_ay, dt_visc});
}

}  // namespace bioflux
