// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include "bioflux/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bioflux {

Grid::Grid(int nx_, int ny_, double Lx_, double Ly_)
    : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_) {
  if (nx < 4 || ny < 4) throw InvalidParameterError("grid: nx, ny must be >= 4");
  if (!(Lx > 0.0) || !(Ly > 0.0))
    throw InvalidParameterError("grid: Lx, Ly must be positive");
  dx = Lx / nx;
  dy = Ly / ny;
}

Grid Grid::from_spacing(int nx, int ny, double dx, double dy) {
  if (nx < 4 || ny < 4) throw InvalidParameterError("grid: nx, ny must be >= 4");
  if (!(dx > 0.0) || !(dy > 0.0))
    throw InvalidParameterError("grid: dx, dy must be positive");
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.dx = dx;
  g.dy = dy;
  g.Lx = dx * nx;
  g.Ly = dy * ny;
  return g;
}

bool ScalarField::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool FaceVectorField::all_finite() const {
  for (double x : u)
    if (!std::isfinite(x)) return false;
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double FaceVectorField::max_abs_u() const {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::fabs(x));
  return m;
}

double FaceVectorField::max_abs_v() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

void FaceVectorField::zero_boundary_normal() {
  for (int j = 0; j < grid.ny; ++j) {
    ux(0, j) = 0.0;
    ux(grid.nx, j) = 0.0;
  }
  for (int i = 0; i < grid.nx; ++i) {
    vy(i, 0) = 0.0;
    vy(i, grid.ny) = 0.0;
  }
}

double pairwise_sum(const double* a, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(a, h) + pairwise_sum(a + h, n - h);
}

double pairwise_dot(const double* a, const double* b, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_dot(a, b, h) + pairwise_dot(a + h, b + h, n - h);
}

double integrate(const ScalarField& f) {
  return f.grid.cell_area() * pairwise_sum(f.v.data(), f.v.size());
}

double norm_lp(const ScalarField& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::fabs(x));
    return m;
  }
  if (p < 1.0) throw InvalidParameterError("norm_lp: p must be >= 1");
  std::vector<double> w(f.v.size());
  if (p == 1.0) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::fabs(f.v[i]);
  } else if (p == 2.0) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = f.v[i] * f.v[i];
  } else {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(std::fabs(f.v[i]), p);
  }
  double s = f.grid.cell_area() * pairwise_sum(w.data(), w.size());
  return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

double entropy(const ScalarField& n) {
  std::vector<double> w(n.v.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double x = n.v[i];
    if (x < 0.0) throw DomainError("entropy: negative density entry");
    w[i] = x > 0.0 ? x * std::log(x) : 0.0;
  }
  return n.grid.cell_area() * pairwise_sum(w.data(), w.size());
}

FaceVectorField grad_to_faces(const ScalarField& s) {
  const Grid& g = s.grid;
  FaceVectorField F(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      F.ux(i, j) = (s.at(i, j) - s.at(i - 1, j)) / g.dx;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      F.vy(i, j) = (s.at(i, j) - s.at(i, j - 1)) / g.dy;
  return F;
}

ScalarField div_from_faces(const FaceVectorField& F) {
  const Grid& g = F.grid;
  ScalarField d(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      d.at(i, j) = (F.ux(i + 1, j) - F.ux(i, j)) / g.dx +
                   (F.vy(i, j + 1) - F.vy(i, j)) / g.dy;
  return d;
}

ScalarField laplacian_neumann(const ScalarField& s) {
  return div_from_faces(grad_to_faces(s));
}

double grad_norm_l2(const ScalarField& s) {
  FaceVectorField F = grad_to_faces(s);
  double sq = pairwise_dot(F.u.data(), F.u.data(), F.u.size()) +
              pairwise_dot(F.v.data(), F.v.data(), F.v.size());
  return std::sqrt(sq * s.grid.cell_area());
}

double velocity_grad_sq(const FaceVectorField& w) {
  const Grid& g = w.grid;
  const double ax = g.cell_area() / (g.dx * g.dx);
  const double ay = g.cell_area() / (g.dy * g.dy);
  double sq = 0.0;
  // u component: x-differences across cells, y-differences across corners,
  // no-slip ghost u_out = -u_in counted with weight 1/2 (summation by parts).
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double d = w.ux(i + 1, j) - w.ux(i, j);
      sq += ax * d * d;
    }
  for (int i = 0; i <= g.nx; ++i) {
    for (int j = 0; j + 1 < g.ny; ++j) {
      double d = w.ux(i, j + 1) - w.ux(i, j);
      sq += ay * d * d;
    }
    double b0 = 2.0 * w.ux(i, 0), b1 = 2.0 * w.ux(i, g.ny - 1);
    sq += 0.5 * ay * (b0 * b0 + b1 * b1);
  }
  // v component, mirrored.
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double d = w.vy(i, j + 1) - w.vy(i, j);
      sq += ay * d * d;
    }
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      double d = w.vy(i + 1, j) - w.vy(i, j);
      sq += ax * d * d;
    }
    double b0 = 2.0 * w.vy(0, j), b1 = 2.0 * w.vy(g.nx - 1, j);
    sq += 0.5 * ax * (b0 * b0 + b1 * b1);
  }
  return sq;
}

double kinetic_energy(const FaceVectorField& w) {
  double sq = pairwise_dot(w.u.data(), w.u.data(), w.u.size()) +
              pairwise_dot(w.v.data(), w.v.data(), w.v.size());
  return 0.5 * sq * w.grid.cell_area();
}

double face_inner(const FaceVectorField& a, const FaceVectorField& b) {
  return (pairwise_dot(a.u.data(), b.u.data(), a.u.size()) +
          pairwise_dot(a.v.data(), b.v.data(), a.v.size())) *
         a.grid.cell_area();
}

// ---------------------------------------------------------------------------
// SPD solver: multigrid-preconditioned conjugate gradients for
// (alpha I - Lap_h) with homogeneous Neumann walls.
// ---------------------------------------------------------------------------

namespace {

struct Level {
  int nx, ny;
  double dx, dy;
  std::vector<double> x, r, tmp;
};

inline std::size_t idx(const Level& L, int i, int j) {
  return std::size_t(j) * L.nx + i;
}

// y = (alpha I - Lap) x on one level, reflected ghosts.
void apply_op(double alpha, const Level& L, const std::vector<double>& x,
              std::vector<double>& y) {
  const double cx = 1.0 / (L.dx * L.dx), cy = 1.0 / (L.dy * L.dy);
  for (int j = 0; j < L.ny; ++j) {
    for (int i = 0; i < L.nx; ++i) {
      double c = x[idx(L, i, j)];
      double lap = 0.0;
      if (i > 0) lap += cx * (x[idx(L, i - 1, j)] - c);
      if (i + 1 < L.nx) lap += cx * (x[idx(L, i + 1, j)] - c);
      if (j > 0) lap += cy * (x[idx(L, i, j - 1)] - c);
      if (j + 1 < L.ny) lap += cy * (x[idx(L, i, j + 1)] - c);
      y[idx(L, i, j)] = alpha * c - lap;
    }
  }
}

void jacobi_sweeps(double alpha, Level& L, const std::vector<double>& b,
                   int sweeps) {
  const double cx = 1.0 / (L.dx * L.dx), cy = 1.0 / (L.dy * L.dy);
  const double omega = 0.8;
  for (int s = 0; s < sweeps; ++s) {
    apply_op(alpha, L, L.x, L.tmp);
    for (int j = 0; j < L.ny; ++j) {
      for (int i = 0; i < L.nx; ++i) {
        double diag = alpha;
        if (i > 0) diag += cx;
        if (i + 1 < L.nx) diag += cx;
        if (j > 0) diag += cy;
        if (j + 1 < L.ny) diag += cy;
        std::size_t k = idx(L, i, j);
        L.x[k] += omega * (b[k] - L.tmp[k]) / diag;
      }
    }
  }
}

void remove_mean(std::vector<double>& x) {
  double m = pairwise_sum(x.data(), x.size()) / double(x.size());
  for (double& e : x) e -= m;
}

class Multigrid {
 public:
  Multigrid(const Grid& g, double alpha, bool poisson)
      : alpha_(alpha), poisson_(poisson) {
    int nx = g.nx, ny = g.ny;
    double dx = g.dx, dy = g.dy;
    while (true) {
      Level L;
      L.nx = nx;
      L.ny = ny;
      L.dx = dx;
      L.dy = dy;
      std::size_t n = std::size_t(nx) * ny;
      L.x.assign(n, 0.0);
      L.r.assign(n, 0.0);
      L.tmp.assign(n, 0.0);
      levels_.push_back(std::move(L));
      if (nx % 2 != 0 || ny % 2 != 0 || nx < 8 || ny < 8) break;
      nx /= 2;
      ny /= 2;
      dx *= 2.0;
      dy *= 2.0;
    }
  }

  // z ~= A^{-1} r, one V-cycle from a zero initial guess.
  void precondition(const std::vector<double>& r, std::vector<double>& z) {
    levels_[0].r = r;
    vcycle(0);
    z = levels_[0].x;
    if (poisson_) remove_mean(z);
  }

 private:
  void vcycle(std::size_t l) {
    Level& L = levels_[l];
    std::fill(L.x.begin(), L.x.end(), 0.0);
    if (l + 1 == levels_.size()) {
      jacobi_sweeps(alpha_, L, L.r, 60);
      return;
    }
    jacobi_sweeps(alpha_, L, L.r, 2);
    apply_op(alpha_, L, L.x, L.tmp);
    Level& C = levels_[l + 1];
    // residual restriction: 4-cell average
    for (int j = 0; j < C.ny; ++j)
      for (int i = 0; i < C.nx; ++i) {
        double s = 0.0;
        for (int dj = 0; dj < 2; ++dj)
          for (int di = 0; di < 2; ++di) {
            std::size_t k = idx(L, 2 * i + di, 2 * j + dj);
            s += L.r[k] - L.tmp[k];
          }
        C.r[idx(C, i, j)] = 0.25 * s;
      }
    vcycle(l + 1);
    // piecewise-constant prolongation
    for (int j = 0; j < L.ny; ++j)
      for (int i = 0; i < L.nx; ++i)
        L.x[idx(L, i, j)] += C.x[idx(C, i / 2, j / 2)];
    jacobi_sweeps(alpha_, L, L.r, 2);
  }

  double alpha_;
  bool poisson_;
  std::vector<Level> levels_;
};

}  // namespace

SpdSolution solve_spd(SpdOperator op, double alpha, const ScalarField& rhs,
                      double tol, int max_iter, const ScalarField* x0,
                      bool use_multigrid) {
  const Grid& g = rhs.grid;
  const bool poisson = (op == SpdOperator::PoissonNeumann);
  if (!poisson && alpha < 0.0)
    throw InvalidParameterError("solve_spd: alpha must be >= 0");
  if (!(tol > 0.0)) throw InvalidParameterError("solve_spd: tol must be > 0");

  std::vector<double> b = rhs.v;
  if (poisson) {
    alpha = 0.0;
    double linf = 0.0;
    for (double x : b) linf = std::max(linf, std::fabs(x));
    double mean = pairwise_sum(b.data(), b.size()) / double(b.size());
    if (std::fabs(mean) > 1e-10 * (1.0 + linf))
      throw CompatibilityError("solve_spd: Neumann rhs is not mean-zero");
    for (double& x : b) x -= mean;
  }

  Level base{g.nx, g.ny, g.dx, g.dy, {}, {}, {}};
  const std::size_t n = g.cells();

  SpdSolution sol;
  sol.x = ScalarField(g);
  std::vector<double>& x = sol.x.v;
  if (x0) {
    x = x0->v;
    if (poisson) remove_mean(x);
  }

  double bnorm = std::sqrt(pairwise_dot(b.data(), b.data(), n));
  if (bnorm == 0.0) return sol;

  Multigrid mg(g, alpha, poisson);

  std::vector<double> r(n), z(n), p(n), Ap(n);
  apply_op(alpha, base, x, Ap);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - Ap[k];

  auto precond = [&](const std::vector<double>& rr, std::vector<double>& zz) {
    if (use_multigrid)
      mg.precondition(rr, zz);
    else
      zz = rr;
  };

  precond(r, z);
  p = z;
  double rz = pairwise_dot(r.data(), z.data(), n);
  double rnorm = std::sqrt(pairwise_dot(r.data(), r.data(), n));

  int it = 0;
  while (rnorm / bnorm > tol && it < max_iter) {
    apply_op(alpha, base, p, Ap);
    double pAp = pairwise_dot(p.data(), Ap.data(), n);
    if (pAp <= 0.0) break;  // numerical breakdown
    double a = rz / pAp;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += a * p[k];
      r[k] -= a * Ap[k];
    }
    precond(r, z);
    double rz_new = pairwise_dot(r.data(), z.data(), n);
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    rnorm = std::sqrt(pairwise_dot(r.data(), r.data(), n));
    ++it;
  }
  sol.iterations = it;
  sol.residual = rnorm / bnorm;
  if (sol.residual > tol)
    throw SolverError("solve_spd: no convergence in " +
                          std::to_string(max_iter) + " iterations",
                      sol.residual);
  if (poisson) remove_mean(x);
  return sol;
}

}  // namespace bioflux
