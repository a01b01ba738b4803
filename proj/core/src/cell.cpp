// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include "bioflux/cell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bioflux {

FaceVectorField drift_velocity(const ScalarField& c, const SensitivitySpec& chi) {
  const Grid& g = c.grid;
  FaceVectorField w(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      double cbar = 0.5 * (c.at(i - 1, j) + c.at(i, j));
      w.ux(i, j) = chi.eval(cbar) * (c.at(i, j) - c.at(i - 1, j)) / g.dx;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double cbar = 0.5 * (c.at(i, j - 1) + c.at(i, j));
      w.vy(i, j) = chi.eval(cbar) * (c.at(i, j) - c.at(i, j - 1)) / g.dy;
    }
  return w;
}

CellFluxes assemble_cell_fluxes(const ScalarField& n, const FaceVectorField& u,
                                const FaceVectorField& w, double m) {
  const Grid& g = n.grid;
  if (m < 1.0) throw InvalidParameterError("cell fluxes: m must be >= 1");
  CellFluxes cf{FaceVectorField(g)};
  auto pw = [m](double x) { return m == 1.0 ? x : (m == 2.0 ? x * x : std::pow(x, m)); };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      double a = u.ux(i, j) + w.ux(i, j);
      double nl = n.at(i - 1, j), nr = n.at(i, j);
      double nup = a >= 0.0 ? nl : nr;
      cf.F.ux(i, j) = a * nup - (pw(nr) - pw(nl)) / g.dx;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double a = u.vy(i, j) + w.vy(i, j);
      double nl = n.at(i, j - 1), nr = n.at(i, j);
      double nup = a >= 0.0 ? nl : nr;
      cf.F.vy(i, j) = a * nup - (pw(nr) - pw(nl)) / g.dy;
    }
  return cf;
}

ScalarField cell_step(const ScalarField& n, const CellFluxes& fluxes,
                      const GrowthSpec& f, double dt, const ScalarField* source) {
  const Grid& g = n.grid;
  ScalarField div = div_from_faces(fluxes.F);
  ScalarField out(g);
  for (std::size_t k = 0; k < out.v.size(); ++k) {
    double val = n.v[k] - dt * div.v[k] + dt * f.eval(n.v[k]);
    if (source) val += dt * source->v[k];
    if (val < 0.0)
      throw CflViolationError("cell_step: negative density, dt exceeds the "
                              "stable bound (no clamping is performed)");
    out.v[k] = val;
  }
  return out;
}

double cell_cfl(const ScalarField& n, const FaceVectorField& u,
                const FaceVectorField& w, double m, const GrowthSpec& f,
                double safety) {
  const Grid& g = n.grid;
  const double inf = std::numeric_limits<double>::infinity();
  const double h = std::min(g.dx, g.dy);

  double amax = 0.0;
  for (std::size_t k = 0; k < u.u.size(); ++k)
    amax = std::max(amax, std::fabs(u.u[k] + w.u[k]));
  for (std::size_t k = 0; k < u.v.size(); ++k)
    amax = std::max(amax, std::fabs(u.v[k] + w.v[k]));
  double dt_adv = amax > 0.0 ? h / amax : inf;

  double nmax = 0.0;
  for (double x : n.v) nmax = std::max(nmax, x);
  double diffusivity = m == 1.0 ? 1.0 : m * std::pow(nmax, m - 1.0);
  double dt_diff = diffusivity > 0.0 ? h * h / (4.0 * diffusivity) : inf;

  double decay = f.max_negative_slope(nmax);
  double dt_growth = decay > 0.0 ? 1.0 / decay : inf;

  return safety * std::min({dt_adv, dt_diff, dt_growth});
}

double barenblatt_profile(double m, double C, double t, double x, double x0) {
  if (m <= 1.0) throw InvalidParameterError("barenblatt: m must be > 1");
  double a = 1.0 / (m + 1.0);
  double k = a * (m - 1.0) / (2.0 * m);
  double xi = (x - x0) * std::pow(t, -a);
  double core = C - k * xi * xi;
  return core > 0.0 ? std::pow(t, -a) * std::pow(core, 1.0 / (m - 1.0)) : 0.0;
}

}  // namespace bioflux
