// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include "bioflux/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bioflux {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DiagRecord record(const SimState& state, const ModelParams& params, double dt) {
  const Grid& g = state.grid();
  DiagRecord r;
  r.t = state.t;
  r.dt = dt;
  r.mass = integrate(state.n);
  r.entropy = entropy(state.n);
  r.min_n = *std::min_element(state.n.v.begin(), state.n.v.end());
  r.max_n = *std::max_element(state.n.v.begin(), state.n.v.end());
  r.min_c = *std::min_element(state.c.v.begin(), state.c.v.end());
  r.max_c = *std::max_element(state.c.v.begin(), state.c.v.end());
  r.grad_c_l2 = grad_norm_l2(state.c);
  r.kinetic = kinetic_energy(state.u);
  r.grad_u_l2 = std::sqrt(velocity_grad_sq(state.u));
  ScalarField nm2(g);
  double half_m = 0.5 * params.m;
  for (std::size_t k = 0; k < nm2.v.size(); ++k)
    nm2.v[k] = std::pow(state.n.v[k], half_m);
  r.grad_nm2_l2 = grad_norm_l2(nm2);
  r.div_linf = norm_lp(div_from_faces(state.u), kInf);
  ScalarField fn(g);
  for (std::size_t k = 0; k < fn.v.size(); ++k)
    fn.v[k] = params.f.eval(state.n.v[k]);
  r.f_integral = integrate(fn);
  r.c_l2 = norm_lp(state.c, 2.0);
  double plm = std::max(1.0, 0.5 * params.m);
  r.n_plm = std::pow(norm_lp(state.n, plm), plm);
  r.lyapunov = r.grad_c_l2 * r.grad_c_l2 + r.entropy +
               params.K2 * 2.0 * r.kinetic;
  return r;
}

double entropy_lower_bound(double mass, double domain_area) {
  return -(2.0 / std::numbers::e) * std::sqrt(std::max(0.0, mass) * domain_area);
}

// -------------------------------------------------------- weak residuals ----

namespace {

struct ScalarMode {
  int k = 0, l = 0;
  double eval(const Grid& g, double x, double y) const {
    return std::cos(k * std::numbers::pi * x / g.Lx) *
           std::cos(l * std::numbers::pi * y / g.Ly);
  }
  double dx(const Grid& g, double x, double y) const {
    double a = k * std::numbers::pi / g.Lx;
    return -a * std::sin(a * x) * std::cos(l * std::numbers::pi * y / g.Ly);
  }
  double dy(const Grid& g, double x, double y) const {
    double b = l * std::numbers::pi / g.Ly;
    return -b * std::cos(k * std::numbers::pi * x / g.Lx) * std::sin(b * y);
  }
};

// streamfunction sin(k pi x / Lx) sin(l pi y / Ly) sampled at corners;
// the resulting face field is discretely divergence-free with zero
// boundary-normal faces.
FaceVectorField stream_mode(const Grid& g, int k, int l) {
  auto psi = [&](int i, int j) {
    return std::sin(k * std::numbers::pi * (i * g.dx) / g.Lx) *
           std::sin(l * std::numbers::pi * (j * g.dy) / g.Ly);
  };
  FaceVectorField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      f.ux(i, j) = (psi(i, j + 1) - psi(i, j)) / g.dy;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f.vy(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.dx;
  return f;
}

double scalar_inner(const ScalarField& a, const Grid& g, const ScalarMode& m) {
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s += a.at(i, j) * m.eval(g, g.xc(i), g.yc(j));
  return s * g.cell_area();
}

// (flux field, grad zeta) with analytic grad at face centers
double flux_inner(const Grid& g, const FaceVectorField& F, const ScalarMode& m) {
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      s += F.ux(i, j) * m.dx(g, g.xf(i), g.yc(j));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s += F.vy(i, j) * m.dy(g, g.xc(i), g.yf(j));
  return s * g.cell_area();
}

// bilinear version of velocity_grad_sq: (grad a, grad b) with no-slip ghosts
double velocity_grad_inner(const FaceVectorField& a, const FaceVectorField& b) {
  const Grid& g = a.grid;
  const double ax = g.cell_area() / (g.dx * g.dx);
  const double ay = g.cell_area() / (g.dy * g.dy);
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s += ax * (a.ux(i + 1, j) - a.ux(i, j)) * (b.ux(i + 1, j) - b.ux(i, j));
  for (int i = 0; i <= g.nx; ++i) {
    for (int j = 0; j + 1 < g.ny; ++j)
      s += ay * (a.ux(i, j + 1) - a.ux(i, j)) * (b.ux(i, j + 1) - b.ux(i, j));
    s += 0.5 * ay * (2.0 * a.ux(i, 0)) * (2.0 * b.ux(i, 0));
    s += 0.5 * ay * (2.0 * a.ux(i, g.ny - 1)) * (2.0 * b.ux(i, g.ny - 1));
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s += ay * (a.vy(i, j + 1) - a.vy(i, j)) * (b.vy(i, j + 1) - b.vy(i, j));
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i)
      s += ax * (a.vy(i + 1, j) - a.vy(i, j)) * (b.vy(i + 1, j) - b.vy(i, j));
    s += 0.5 * ax * (2.0 * a.vy(0, j)) * (2.0 * b.vy(0, j));
    s += 0.5 * ax * (2.0 * a.vy(g.nx - 1, j)) * (2.0 * b.vy(g.nx - 1, j));
  }
  return s;
}

// cell-centered component averages of a MAC field
void to_centers(const FaceVectorField& f, ScalarField& uc, ScalarField& vc) {
  const Grid& g = f.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      uc.at(i, j) = 0.5 * (f.ux(i, j) + f.ux(i + 1, j));
      vc.at(i, j) = 0.5 * (f.vy(i, j) + f.vy(i, j + 1));
    }
}

// centered differences of a cell field, one-sided at walls
void center_derivs(const ScalarField& s, ScalarField& sx, ScalarField& sy) {
  const Grid& g = s.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      int il = std::max(i - 1, 0), ir = std::min(i + 1, g.nx - 1);
      int jd = std::max(j - 1, 0), ju = std::min(j + 1, g.ny - 1);
      sx.at(i, j) = (s.at(ir, j) - s.at(il, j)) / ((ir - il) * g.dx);
      sy.at(i, j) = (s.at(i, ju) - s.at(i, jd)) / ((ju - jd) * g.dy);
    }
}

const std::vector<std::pair<int, int>> kScalarModes = {
    {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}, {2, 1}};
const std::vector<std::pair<int, int>> kVectorModes = {{1, 1}, {2, 1}, {1, 2}};

}  // namespace

WeakResiduals weak_residual(const std::vector<SimState>& history,
                            const ModelParams& params, int scalar_modes,
                            int vector_modes) {
  if (history.size() < 2)
    throw InvalidParameterError("weak_residual: need at least two states");
  const Grid& g = history.front().grid();
  const double dt = history[1].t - history[0].t;
  for (std::size_t k = 1; k < history.size(); ++k) {
    if (!history[k].grid().same_as(g))
      throw InvalidParameterError("weak_residual: mismatched grids");
    double dk = history[k].t - history[k - 1].t;
    if (std::fabs(dk - dt) > 1e-9 * std::max(1.0, std::fabs(dt)))
      throw InvalidParameterError("weak_residual: history must have uniform dt");
  }
  scalar_modes = std::min<int>(scalar_modes, kScalarModes.size());
  vector_modes = std::min<int>(vector_modes, kVectorModes.size());

  std::vector<FaceVectorField> psis;
  for (int v = 0; v < vector_modes; ++v)
    psis.push_back(stream_mode(g, kVectorModes[v].first, kVectorModes[v].second));

  WeakResiduals worst;
  for (std::size_t s = 0; s + 1 < history.size(); ++s) {
    const SimState& a = history[s];
    const SimState& b = history[s + 1];

    // level-s fields
    ScalarField nm(g);
    for (std::size_t k = 0; k < nm.v.size(); ++k)
      nm.v[k] = std::pow(a.n.v[k], params.m);
    FaceVectorField grad_nm = grad_to_faces(nm);
    FaceVectorField grad_c = grad_to_faces(a.c);

    // advective and chemotactic flux carriers at faces (centered means)
    FaceVectorField un(g), uc(g), chem(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) {
        double nbar = 0.5 * (a.n.at(i - 1, j) + a.n.at(i, j));
        double cbar = 0.5 * (a.c.at(i - 1, j) + a.c.at(i, j));
        un.ux(i, j) = a.u.ux(i, j) * nbar;
        uc.ux(i, j) = a.u.ux(i, j) * cbar;
        chem.ux(i, j) = params.chi.eval(cbar) * nbar * grad_c.ux(i, j);
      }
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double nbar = 0.5 * (a.n.at(i, j - 1) + a.n.at(i, j));
        double cbar = 0.5 * (a.c.at(i, j - 1) + a.c.at(i, j));
        un.vy(i, j) = a.u.vy(i, j) * nbar;
        uc.vy(i, j) = a.u.vy(i, j) * cbar;
        chem.vy(i, j) = params.chi.eval(cbar) * nbar * grad_c.vy(i, j);
      }

    ScalarField fn(g), kn(g);
    for (std::size_t k = 0; k < fn.v.size(); ++k) {
      fn.v[k] = params.f.eval(a.n.v[k]);
      kn.v[k] = params.k.eval(a.c.v[k]) * a.n.v[k];
    }

    for (int mI = 0; mI < scalar_modes; ++mI) {
      ScalarMode mode{kScalarModes[mI].first, kScalarModes[mI].second};
      double r1 = (scalar_inner(b.n, g, mode) - scalar_inner(a.n, g, mode)) / dt -
                  flux_inner(g, un, mode) + flux_inner(g, grad_nm, mode) -
                  flux_inner(g, chem, mode) - scalar_inner(fn, g, mode);
      double r2 = (scalar_inner(b.c, g, mode) - scalar_inner(a.c, g, mode)) / dt -
                  flux_inner(g, uc, mode) + flux_inner(g, grad_c, mode) +
                  scalar_inner(kn, g, mode);
      worst.cell = std::max(worst.cell, std::fabs(r1));
      worst.oxygen = std::max(worst.oxygen, std::fabs(r2));
    }

    ScalarField ucen(g), vcen(g);
    to_centers(a.u, ucen, vcen);
    for (const FaceVectorField& psi : psis) {
      ScalarField px(g), py(g), pxx(g), pxy(g), pyx(g), pyy(g);
      to_centers(psi, px, py);
      center_derivs(px, pxx, pxy);
      center_derivs(py, pyx, pyy);
      double convect = 0.0;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          double uu = ucen.at(i, j), vv = vcen.at(i, j);
          convect += uu * uu * pxx.at(i, j) + uu * vv * pyx.at(i, j) +
                     vv * uu * pxy.at(i, j) + vv * vv * pyy.at(i, j);
        }
      convect *= g.cell_area();
      double buoy = 0.0;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
          buoy += 0.5 * (a.n.at(i - 1, j) + a.n.at(i, j)) *
                  params.phi.grad_x_face(g, i, j) * psi.ux(i, j);
      for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
          buoy += 0.5 * (a.n.at(i, j - 1) + a.n.at(i, j)) *
                  params.phi.grad_y_face(g, i, j) * psi.vy(i, j);
      buoy *= g.cell_area();
      double r3 = (face_inner(b.u, psi) - face_inner(a.u, psi)) / dt - convect +
                  velocity_grad_inner(a.u, psi) + buoy;
      worst.fluid = std::max(worst.fluid, std::fabs(r3));
    }
  }
  return worst;
}

// -------------------------------------------------------------- envelope ----

double envelope_initial_bracket(const SimState& state, const ModelParams& params) {
  DiagRecord r = record(state, params);
  ScalarField nlnn(state.grid());
  for (std::size_t k = 0; k < nlnn.v.size(); ++k) {
    double x = state.n.v[k];
    nlnn.v[k] = x > 0.0 ? std::fabs(x * std::log(x)) : 0.0;
  }
  double nlnn_l1 = integrate(nlnn);
  double c_h1_sq = r.c_l2 * r.c_l2 + r.grad_c_l2 * r.grad_c_l2;
  return r.mass + nlnn_l1 + r.n_plm + c_h1_sq + 2.0 * r.kinetic;
}

namespace {
double envelope_lhs(const DiagRecord& r) {
  double c_h1_sq = r.c_l2 * r.c_l2 + r.grad_c_l2 * r.grad_c_l2;
  return r.mass + std::fabs(r.entropy) + r.n_plm + c_h1_sq + 2.0 * r.kinetic;
}
}  // namespace

EnvelopeFit fit_envelope(const std::vector<DiagRecord>& records, double gamma,
                         double X0) {
  if (records.size() < 2)
    throw InvalidParameterError("fit_envelope: need at least two records");
  if (!(gamma > 0.0))
    throw InvalidParameterError("fit_envelope: gamma must be positive");
  double T = records.back().t - records.front().t;
  if (T < 5.0 / gamma)
    throw InvalidParameterError("fit_envelope: insufficient horizon, need T >= 5/gamma");

  EnvelopeFit fit;
  fit.gamma = gamma;
  fit.X0 = X0;
  double t0 = records.front().t;
  double t_half = t0 + 0.5 * T;
  double window_start = t0, window_acc = 0.0;
  for (const DiagRecord& r : records) {
    double lhs = envelope_lhs(r);
    double denom = 1.0 + std::exp(-gamma * (r.t - t0)) * X0;
    fit.Gamma_fit = std::max(fit.Gamma_fit, lhs / denom);
    if (r.t >= t_half) fit.tail_sup = std::max(fit.tail_sup, lhs);
    // unit-window aggregate of the time-integrated dissipation terms
    if (r.t - window_start >= 1.0) {
      fit.windowed_sup = std::max(fit.windowed_sup, window_acc);
      window_start = r.t;
      window_acc = 0.0;
    }
    window_acc += r.dt * (r.grad_u_l2 * r.grad_u_l2 +
                          r.grad_nm2_l2 * r.grad_nm2_l2);
  }
  fit.windowed_sup = std::max(fit.windowed_sup, window_acc);
  return fit;
}

CapCheck oxygen_cap_check(const std::vector<DiagRecord>& records, double c_O,
                          double tol) {
  CapCheck out;
  for (const DiagRecord& r : records) {
    double excess = r.max_c - (c_O + 10.0 * tol);
    if (excess > 0.0) {
      if (out.pass) out.t_first_violation = r.t;
      out.pass = false;
      out.worst_excess = std::max(out.worst_excess, excess);
    }
  }
  return out;
}

double tail_distance(const std::vector<SimState>& a,
                     const std::vector<SimState>& b, double tail_fraction) {
  if (a.size() != b.size() || a.empty())
    throw InvalidParameterError("tail_distance: histories must align");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw InvalidParameterError("tail_distance: fraction must lie in (0,1]");
  const Grid& g = a.front().grid();
  if (!b.front().grid().same_as(g))
    throw InvalidParameterError("tail_distance: mismatched grids");
  std::size_t start = a.size() - std::max<std::size_t>(
      1, std::size_t(std::ceil(tail_fraction * a.size())));
  double sup = 0.0;
  for (std::size_t k = start; k < a.size(); ++k) {
    ScalarField dn(g), dc(g);
    for (std::size_t i = 0; i < dn.v.size(); ++i) {
      dn.v[i] = a[k].n.v[i] - b[k].n.v[i];
      dc.v[i] = a[k].c.v[i] - b[k].c.v[i];
    }
    FaceVectorField du(g);
    for (std::size_t i = 0; i < du.u.size(); ++i)
      du.u[i] = a[k].u.u[i] - b[k].u.u[i];
    for (std::size_t i = 0; i < du.v.size(); ++i)
      du.v[i] = a[k].u.v[i] - b[k].u.v[i];
    double d = norm_lp(dn, 2.0) + norm_lp(dc, 2.0) + grad_norm_l2(dc) +
               std::sqrt(2.0 * kinetic_energy(du));
    sup = std::max(sup, d);
  }
  return sup;
}

}  // namespace bioflux
