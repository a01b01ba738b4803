// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include "bioflux/oxygen.hpp"

#include <cmath>

namespace bioflux {

ScalarField oxygen_step(const ScalarField& c, const ScalarField& n,
                        const FaceVectorField& u, const ConsumptionSpec& k,
                        double dt, double tol, const ScalarField* source) {
  const Grid& g = c.grid;
  for (double x : c.v)
    if (x < 0.0) throw DomainError("oxygen_step: negative concentration");
  for (double x : n.v)
    if (x < 0.0) throw DomainError("oxygen_step: negative density");

  // (i) conservative upwind advection
  FaceVectorField adv(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      double a = u.ux(i, j);
      adv.ux(i, j) = a * (a >= 0.0 ? c.at(i - 1, j) : c.at(i, j));
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double a = u.vy(i, j);
      adv.vy(i, j) = a * (a >= 0.0 ? c.at(i, j - 1) : c.at(i, j));
    }
  ScalarField div = div_from_faces(adv);
  ScalarField ctilde(g);
  for (std::size_t kk = 0; kk < ctilde.v.size(); ++kk) {
    ctilde.v[kk] = c.v[kk] - dt * div.v[kk];
    if (source) ctilde.v[kk] += dt * source->v[kk];
  }

  // (ii) implicit diffusion: (I - dt Lap) chat = ctilde, solved as
  // (1/dt I - Lap) chat = ctilde / dt
  ScalarField rhs(g);
  for (std::size_t kk = 0; kk < rhs.v.size(); ++kk)
    rhs.v[kk] = ctilde.v[kk] / dt;
  SpdSolution sol = solve_helmholtz(1.0 / dt, rhs, tol, 10000);

  // (iii) implicit consumption c' = chat / (1 + dt kappa(chat) n)
  ScalarField out(g);
  for (std::size_t kk = 0; kk < out.v.size(); ++kk) {
    double chat = sol.x.v[kk];
    double kap = k.kappa_of(std::max(chat, 0.0));
    out.v[kk] = chat / (1.0 + dt * kap * n.v[kk]);
  }
  return out;
}

}  // namespace bioflux
