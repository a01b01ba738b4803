// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include "bioflux/coupler.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace bioflux {

void RunConfig::check() const {
  if (!(t_end >= 0.0)) throw InvalidParameterError("run: t_end must be >= 0");
  if (!(tol > 0.0 && tol <= 1e-4))
    throw InvalidParameterError("run: tol must lie in (0, 1e-4]");
  if (dt_policy == DtPolicy::Fixed && !(dt > 0.0))
    throw InvalidParameterError("run: fixed policy needs dt > 0");
  if (!(safety > 0.0 && safety <= 1.0))
    throw InvalidParameterError("run: safety must lie in (0, 1]");
}

namespace {

void assert_state(const SimState& s, double tol) {
  for (double x : s.n.v)
    if (!(x >= 0.0)) throw DomainError("state: n must be nonnegative");
  for (double x : s.c.v)
    if (x < -10.0 * tol) throw DomainError("state: c fell below -10 tol");
  if (!s.n.all_finite() || !s.c.all_finite() || !s.u.all_finite())
    throw DomainError("state: non-finite field entry");
}

}  // namespace

double pick_dt(const SimState& state, const ModelParams& params,
               const RunConfig& cfg, double dt_limit) {
  double dt;
  if (cfg.dt_policy == DtPolicy::Fixed) {
    dt = cfg.dt;
  } else {
    FaceVectorField w = drift_velocity(state.c, params.chi);
    double dt_cell = cell_cfl(state.n, state.u, w, params.m, params.f, cfg.safety);
    double dt_fluid = fluid_cfl(state.u, cfg.safety);
    dt = std::min(dt_cell, dt_fluid);
    if (cfg.dt_cap > 0.0) dt = std::min(dt, cfg.dt_cap);
  }
  if (dt_limit > 0.0) dt = std::min(dt, dt_limit);
  if (!(dt > 0.0) || std::isinf(dt))
    throw InvalidParameterError(
        "pick_dt: unbounded dt; set dt_cap (or a fixed dt) for quiescent states");
  return dt;
}

SimState step(const SimState& state, const ModelParams& params,
              const RunConfig& cfg, double dt_limit) {
  const double dt = pick_dt(state, params, cfg, dt_limit);

  FluidStepResult fl = fluid_step(state.u, state.n, params.phi, dt, cfg.tol);
  ScalarField c_new =
      oxygen_step(state.c, state.n, fl.u, params.k, dt, cfg.tol);
  FaceVectorField w = drift_velocity(c_new, params.chi);
  CellFluxes fluxes = assemble_cell_fluxes(state.n, fl.u, w, params.m);
  ScalarField n_new = cell_step(state.n, fluxes, params.f, dt);

  SimState out;
  out.t = state.t + dt;
  out.step = state.step + 1;
  out.n = std::move(n_new);
  out.c = std::move(c_new);
  out.u = std::move(fl.u);
  out.p = std::move(fl.pressure);
  if (cfg.debug_checks) assert_state(out, cfg.tol);
  return out;
}

SimState run(SimState state, const ModelParams& params, const RunConfig& cfg,
             const RunHooks& hooks) {
  cfg.check();
  if (hooks.on_step) hooks.on_step(state, 0.0);
  if (hooks.on_diag) hooks.on_diag(state, 0.0);
  const double t_end = cfg.t_end;
  const double eps = 1e-12 * std::max(1.0, t_end);
  while (state.t < t_end - eps) {
    double t_before = state.t;
    state = step(state, params, cfg, t_end - state.t);
    double dt = state.t - t_before;
    if (hooks.on_step) hooks.on_step(state, dt);
    if (hooks.on_diag && cfg.diag_every > 0 && state.step % cfg.diag_every == 0)
      hooks.on_diag(state, dt);
    if (hooks.on_checkpoint && cfg.checkpoint_every > 0 &&
        state.step % cfg.checkpoint_every == 0)
      hooks.on_checkpoint(state);
  }
  return state;
}

// ----------------------------------------------------------- snapshots ----
// magic "BCNV" | version u32 | nx u32 | ny u32 | dx f64 | dy f64 | t f64 |
// step u64 | n | c | u | v   (little-endian, arrays row-major y-outer)

namespace {

constexpr char kMagic[4] = {'B', 'C', 'N', 'V'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

template <typename T>
T get(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size())
    throw FormatError("snapshot: truncated data");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

void put_array(std::vector<std::uint8_t>& out, const std::vector<double>& a) {
  std::size_t old = out.size();
  out.resize(old + a.size() * sizeof(double));
  std::memcpy(out.data() + old, a.data(), a.size() * sizeof(double));
}

void get_array(const std::vector<std::uint8_t>& in, std::size_t& pos,
               std::vector<double>& a) {
  if (pos + a.size() * sizeof(double) > in.size())
    throw FormatError("snapshot: truncated array");
  std::memcpy(a.data(), in.data() + pos, a.size() * sizeof(double));
  pos += a.size() * sizeof(double);
}

}  // namespace

Snapshot checkpoint(const SimState& state) {
  const Grid& g = state.grid();
  Snapshot s;
  s.bytes.reserve(40 + sizeof(double) * (2 * g.cells() + state.u.u.size() +
                                         state.u.v.size()));
  s.bytes.insert(s.bytes.end(), kMagic, kMagic + 4);
  put<std::uint32_t>(s.bytes, kVersion);
  put<std::uint32_t>(s.bytes, std::uint32_t(g.nx));
  put<std::uint32_t>(s.bytes, std::uint32_t(g.ny));
  put<double>(s.bytes, g.dx);
  put<double>(s.bytes, g.dy);
  put<double>(s.bytes, state.t);
  put<std::uint64_t>(s.bytes, state.step);
  put_array(s.bytes, state.n.v);
  put_array(s.bytes, state.c.v);
  put_array(s.bytes, state.u.u);
  put_array(s.bytes, state.u.v);
  return s;
}

SimState restore(const Snapshot& snap) {
  const auto& b = snap.bytes;
  if (b.size() < 4 || std::memcmp(b.data(), kMagic, 4) != 0)
    throw FormatError("snapshot: bad magic");
  std::size_t pos = 4;
  auto version = get<std::uint32_t>(b, pos);
  if (version != kVersion)
    throw FormatError("snapshot: unsupported version " + std::to_string(version));
  auto nx = get<std::uint32_t>(b, pos);
  auto ny = get<std::uint32_t>(b, pos);
  double dx = get<double>(b, pos);
  double dy = get<double>(b, pos);
  double t = get<double>(b, pos);
  auto step_count = get<std::uint64_t>(b, pos);

  Grid g = Grid::from_spacing(int(nx), int(ny), dx, dy);
  SimState s = SimState::initial(g);
  s.t = t;
  s.step = step_count;
  get_array(b, pos, s.n.v);
  get_array(b, pos, s.c.v);
  get_array(b, pos, s.u.u);
  get_array(b, pos, s.u.v);
  if (pos != b.size())
    throw FormatError("snapshot: declared lengths do not match file size");
  return s;
}

}  // namespace bioflux
