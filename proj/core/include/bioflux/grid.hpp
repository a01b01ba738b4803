// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "bioflux/errors.hpp"

namespace bioflux {

// Uniform cell-centered rectangle (0,Lx) x (0,Ly).
// Scalars live at cell centers, velocities at face midpoints (MAC layout).
struct Grid {
  int nx = 0, ny = 0;
  double Lx = 0.0, Ly = 0.0;
  double dx = 0.0, dy = 0.0;

  Grid() = default;
  Grid(int nx_, int ny_, double Lx_, double Ly_);

  // Rebuild from stored spacings (snapshot path); keeps dx/dy bit-exact.
  static Grid from_spacing(int nx, int ny, double dx, double dy);

  std::size_t cells() const { return std::size_t(nx) * std::size_t(ny); }
  double cell_area() const { return dx * dy; }
  double xc(int i) const { return (i + 0.5) * dx; }  // cell-center coords
  double yc(int j) const { return (j + 0.5) * dy; }
  double xf(int i) const { return i * dx; }          // x-face coords
  double yf(int j) const { return j * dy; }

  bool same_as(const Grid& o) const {
    return nx == o.nx && ny == o.ny && dx == o.dx && dy == o.dy;
  }
};

// nx*ny reals at cell centers, row-major with y as the outer index.
struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), v(g.cells(), fill) {}

  double& at(int i, int j) { return v[std::size_t(j) * grid.nx + i]; }
  double at(int i, int j) const { return v[std::size_t(j) * grid.nx + i]; }

  bool all_finite() const;
};

// MAC velocity: u at x-faces ((nx+1) x ny), v at y-faces (nx x (ny+1)).
struct FaceVectorField {
  Grid grid;
  std::vector<double> u;  // index j*(nx+1)+i, i in [0,nx]
  std::vector<double> v;  // index j*nx+i,     j in [0,ny]

  FaceVectorField() = default;
  explicit FaceVectorField(const Grid& g)
      : grid(g),
        u(std::size_t(g.nx + 1) * g.ny, 0.0),
        v(std::size_t(g.nx) * (g.ny + 1), 0.0) {}

  double& ux(int i, int j) { return u[std::size_t(j) * (grid.nx + 1) + i]; }
  double ux(int i, int j) const { return u[std::size_t(j) * (grid.nx + 1) + i]; }
  double& vy(int i, int j) { return v[std::size_t(j) * grid.nx + i]; }
  double vy(int i, int j) const { return v[std::size_t(j) * grid.nx + i]; }

  // Largest |u|, |v| over all faces.
  double max_abs_u() const;
  double max_abs_v() const;
  bool all_finite() const;
  // Zero out the boundary-normal faces (no-flux / no-slip walls).
  void zero_boundary_normal();
};

// Fixed-order pairwise reduction; bitwise reproducible for a given array.
double pairwise_sum(const double* a, std::size_t n);
double pairwise_dot(const double* a, const double* b, std::size_t n);

// dx*dy * sum of values (midpoint quadrature).
double integrate(const ScalarField& f);

// (integral |f|^p)^(1/p); p = infinity() gives max|f|. p < 1 is an error.
double norm_lp(const ScalarField& f, double p);

// integral of n ln n with 0 ln 0 := 0. Negative entries are a DomainError.
double entropy(const ScalarField& n);

// Centered difference to faces, homogeneous Neumann (zero boundary faces).
FaceVectorField grad_to_faces(const ScalarField& s);

// Per-cell flux divergence.
ScalarField div_from_faces(const FaceVectorField& F);

// div(grad(.)) with zero-flux walls; entrywise identical to composing the two.
ScalarField laplacian_neumann(const ScalarField& s);

// L2 norm of the face gradient field, sqrt(sum g^2 dx dy).
double grad_norm_l2(const ScalarField& s);

// Discrete H1 seminorm squared of a MAC velocity with no-slip walls,
// chosen so that (lap_noslip(u), u) * area == -grad_sq exactly.
double velocity_grad_sq(const FaceVectorField& w);

// 0.5 * integral |u|^2 with per-face area weights.
double kinetic_energy(const FaceVectorField& w);

// Face-field L2 inner product Sum (uA uB + vA vB) dx dy.
double face_inner(const FaceVectorField& a, const FaceVectorField& b);

enum class SpdOperator { HelmholtzNeumann, PoissonNeumann };

struct SpdSolution {
  ScalarField x;
  double residual = 0.0;  // achieved relative residual
  int iterations = 0;
};

// Conjugate-gradient solve of (alpha I - Lap) x = rhs (Helmholtz) or
// (-Lap) x = rhs with zero-mean pinning (Poisson), optionally preconditioned
// by a geometric multigrid V-cycle. Deterministic: fixed-order reductions,
// cold start unless x0 is given.
SpdSolution solve_spd(SpdOperator op, double alpha, const ScalarField& rhs,
                      double tol, int max_iter, const ScalarField* x0 = nullptr,
                      bool use_multigrid = true);

inline SpdSolution solve_helmholtz(double alpha, const ScalarField& rhs,
                                   double tol, int max_iter) {
  return solve_spd(SpdOperator::HelmholtzNeumann, alpha, rhs, tol, max_iter);
}
inline SpdSolution solve_poisson(const ScalarField& rhs, double tol,
                                 int max_iter) {
  return solve_spd(SpdOperator::PoissonNeumann, 0.0, rhs, tol, max_iter);
}

}  // namespace bioflux
