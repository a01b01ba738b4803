// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include "bioflux/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace bioflux {

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::Envelope: return "envelope";
    case StudyKind::AttractorPair: return "attractor_pair";
    case StudyKind::MmsConvergence: return "mms_convergence";
    case StudyKind::Barenblatt: return "barenblatt";
    case StudyKind::DecayRate: return "decay_rate";
  }
  return "?";
}

void StudySpec::check() const {
  if (kind == StudyKind::Envelope && amplitudes.size() < 2)
    throw InvalidParameterError("envelope study needs >= 2 amplitudes");
  if (kind == StudyKind::AttractorPair && seeds.size() != 2)
    throw InvalidParameterError("attractor_pair study needs exactly 2 seeds");
  if (horizon < 0.0)
    throw InvalidParameterError("study horizon must be >= 0");
}

int worker_cap() {
  if (const char* env = std::getenv("BIOFLUX_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

// --------------------------------------------------------------- parsing ----

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> split_list(const std::string& value, const std::string& key,
                               int line) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    double x = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw ConfigError("key '" + key + "' expects comma-separated numbers",
                        line);
    out.push_back(x);
  }
  if (out.empty())
    throw ConfigError("key '" + key + "' expects a nonempty list", line);
  return out;
}

}  // namespace

StudySpec parse_study_spec(const std::string& text) {
  StudySpec spec;
  bool kind_set = false;

  std::istringstream in(text);
  std::string line, rest;
  bool in_study = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = line;
    std::size_t hash = stripped.find('#');
    if (hash != std::string::npos) stripped = stripped.substr(0, hash);
    stripped = trim(stripped);
    if (stripped == "[study]") {
      in_study = true;
      continue;
    }
    if (!stripped.empty() && stripped.front() == '[') in_study = false;
    if (!in_study) {
      rest += line;
      rest += '\n';
      continue;
    }
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value", line_no);
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key == "kind") {
      kind_set = true;
      if (value == "envelope") spec.kind = StudyKind::Envelope;
      else if (value == "attractor_pair") spec.kind = StudyKind::AttractorPair;
      else if (value == "mms_convergence") spec.kind = StudyKind::MmsConvergence;
      else if (value == "barenblatt") spec.kind = StudyKind::Barenblatt;
      else if (value == "decay_rate") spec.kind = StudyKind::DecayRate;
      else throw ConfigError("unknown study kind '" + value + "'", line_no);
    } else if (key == "horizon") {
      char* end = nullptr;
      spec.horizon = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0')
        throw ConfigError("horizon expects a number", line_no);
    } else if (key == "amplitudes") {
      spec.amplitudes = split_list(value, key, line_no);
    } else if (key == "seeds") {
      for (double s : split_list(value, key, line_no)) {
        if (s < 0.0 || s != std::floor(s))
          throw ConfigError("seeds must be nonnegative integers", line_no);
        spec.seeds.push_back(std::uint64_t(s));
      }
    } else {
      throw ConfigError("unknown key '" + key + "' in [study]", line_no);
    }
  }
  if (!kind_set) throw ConfigError("study spec missing kind");
  if (spec.amplitudes.empty()) spec.amplitudes = {1.0, 10.0};
  if (spec.seeds.empty()) spec.seeds = {0, 1};
  spec.base = parse_config(rest);
  spec.check();
  return spec;
}

// ---------------------------------------------------------------- report ----

bool StudyReport::pass() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const StudyCriterion& c) { return c.pass; });
}

namespace {

std::string num17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void add_criterion(StudyReport& rep, const std::string& name, double measured,
                   const std::string& relation, double threshold) {
  StudyCriterion c;
  c.name = name;
  c.measured = measured;
  c.threshold = threshold;
  c.relation = relation;
  c.pass = std::isfinite(measured) &&
           (relation == "<=" ? measured <= threshold : measured >= threshold);
  rep.criteria.push_back(c);
}

}  // namespace

std::string StudyReport::csv() const {
  std::string out = "record,name,measured,relation,threshold,pass\n";
  for (const auto& [name, value] : metrics)
    out += "metric," + name + "," + num17(value) + ",,,\n";
  for (const StudyCriterion& c : criteria)
    out += "criterion," + c.name + "," + num17(c.measured) + "," + c.relation +
           "," + num17(c.threshold) + "," + (c.pass ? "1" : "0") + "\n";
  return out;
}

std::string StudyReport::verdict_text() const {
  std::string out = "study: " + to_string(kind) + "\n";
  for (const StudyCriterion& c : criteria)
    out += std::string(c.pass ? "PASS" : "FAIL") + "  " + c.name + ": " +
           num17(c.measured) + " " + c.relation + " " + num17(c.threshold) +
           "\n";
  out += std::string("verdict: ") + (pass() ? "PASS" : "FAIL") + "\n";
  return out;
}

// ------------------------------------------------------------- execution ----

namespace {

struct RunOutput {
  SimState final_state;
  std::vector<DiagRecord> records;
};

RunOutput run_collecting(SimState state, const ModelParams& params,
                         RunConfig cfg) {
  RunOutput out;
  RunHooks hooks;
  hooks.on_diag = [&](const SimState& s, double dt) {
    out.records.push_back(record(s, params, dt));
  };
  out.final_state = run(std::move(state), params, cfg, hooks);
  return out;
}

// run the jobs with at most worker_cap() of them in flight
void run_jobs(std::vector<std::function<void()>>& jobs) {
  int cap = worker_cap();
  if (cap < 2 || jobs.size() < 2) {
    for (auto& j : jobs) j();
    return;
  }
  std::size_t next = 0;
  std::vector<std::future<void>> inflight;
  while (next < jobs.size() || !inflight.empty()) {
    while (next < jobs.size() && int(inflight.size()) < cap)
      inflight.push_back(std::async(std::launch::async, jobs[next++]));
    inflight.back().get();
    inflight.pop_back();
  }
}

double effective_horizon(const StudySpec& spec, double fallback) {
  if (spec.horizon > 0.0) return spec.horizon;
  if (spec.base.run.t_end > 0.0) return spec.base.run.t_end;
  return fallback;
}

// least-squares slope of ln(y) against t
double log_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double st = 0, sl = 0, stt = 0, stl = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(y[k] > 0.0)) continue;
    double l = std::log(y[k]);
    st += t[k];
    sl += l;
    stt += t[k] * t[k];
    stl += t[k] * l;
    ++n;
  }
  if (n < 2) throw InvalidParameterError("log_slope: not enough positive samples");
  double denom = double(n) * stt - st * st;
  if (denom == 0.0) throw InvalidParameterError("log_slope: degenerate samples");
  return (double(n) * stl - st * sl) / denom;
}

StudyReport envelope_study(const StudySpec& spec) {
  StudyReport rep;
  rep.kind = StudyKind::Envelope;
  const ParsedConfig& base = spec.base;
  RunConfig cfg = base.run;
  cfg.t_end = effective_horizon(spec, 50.0);
  double gamma = admissible_gamma(base.grid, base.params.gamma).gamma;

  std::vector<EnvelopeFit> fits(spec.amplitudes.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t k = 0; k < spec.amplitudes.size(); ++k) {
    jobs.push_back([&, k] {
      ScenarioSpec sc = base.scenario;
      sc.amplitude *= spec.amplitudes[k];
      SimState s0 = make_scenario(sc, base.grid, base.params);
      double X0 = envelope_initial_bracket(s0, base.params);
      RunOutput out = run_collecting(std::move(s0), base.params, cfg);
      fits[k] = fit_envelope(out.records, gamma, X0);
    });
  }
  run_jobs(jobs);

  double gmin = fits[0].Gamma_fit, gmax = fits[0].Gamma_fit;
  double tmin = fits[0].tail_sup, tmax = fits[0].tail_sup;
  for (std::size_t k = 0; k < fits.size(); ++k) {
    std::string tag = "run" + std::to_string(k);
    rep.metrics.emplace_back(tag + ".amplitude", spec.amplitudes[k]);
    rep.metrics.emplace_back(tag + ".Gamma_fit", fits[k].Gamma_fit);
    rep.metrics.emplace_back(tag + ".X0", fits[k].X0);
    rep.metrics.emplace_back(tag + ".tail_sup", fits[k].tail_sup);
    gmin = std::min(gmin, fits[k].Gamma_fit);
    gmax = std::max(gmax, fits[k].Gamma_fit);
    tmin = std::min(tmin, fits[k].tail_sup);
    tmax = std::max(tmax, fits[k].tail_sup);
  }
  rep.metrics.emplace_back("gamma", gamma);
  add_criterion(rep, "Gamma_fit_ratio", gmin > 0.0 ? gmax / gmin
                                                   : std::nan(""), "<=", 2.0);
  add_criterion(rep, "tail_sup_rel_diff",
                tmax > 0.0 ? (tmax - tmin) / tmax : 0.0, "<=", 0.2);
  return rep;
}

StudyReport attractor_study(const StudySpec& spec) {
  StudyReport rep;
  rep.kind = StudyKind::AttractorPair;
  const ParsedConfig& base = spec.base;
  RunConfig cfg = base.run;
  cfg.t_end = effective_horizon(spec, 50.0);

  // the tail metric needs time-aligned trajectories: force one fixed dt
  if (cfg.dt_policy != DtPolicy::Fixed) {
    double dt = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed : spec.seeds) {
      ScenarioSpec sc = base.scenario;
      sc.seed = seed;
      SimState s0 = make_scenario(sc, base.grid, base.params);
      dt = std::min(dt, pick_dt(s0, base.params, cfg, 0.0));
    }
    cfg.dt_policy = DtPolicy::Fixed;
    cfg.dt = 0.75 * dt;
  }
  std::uint64_t total_steps =
      std::uint64_t(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  std::uint64_t sample_every = std::max<std::uint64_t>(1, total_steps / 200);

  std::vector<std::vector<SimState>> histories(2);
  std::vector<std::function<void()>> jobs;
  for (int k = 0; k < 2; ++k) {
    jobs.push_back([&, k] {
      ScenarioSpec sc = base.scenario;
      sc.seed = spec.seeds[k];
      SimState s0 = make_scenario(sc, base.grid, base.params);
      RunHooks hooks;
      hooks.on_step = [&, k](const SimState& s, double) {
        if (s.step % sample_every == 0) histories[k].push_back(s);
      };
      run(std::move(s0), base.params, cfg, hooks);
    });
  }
  run_jobs(jobs);

  double dist = tail_distance(histories[0], histories[1], 0.5);
  rep.metrics.emplace_back("dt", cfg.dt);
  rep.metrics.emplace_back("samples", double(histories[0].size()));
  rep.metrics.emplace_back("tail_distance", dist);
  add_criterion(rep, "tail_distance", dist, "<=", 1e-3);
  return rep;
}

StudyReport decay_rate_study(const StudySpec& spec) {
  StudyReport rep;
  rep.kind = StudyKind::DecayRate;
  const ParsedConfig& base = spec.base;
  const Grid& g = base.grid;
  RunConfig cfg = base.run;
  cfg.t_end = effective_horizon(spec, 0.15);

  SimState s0 = SimState::initial(g);
  std::fill(s0.c.v.begin(), s0.c.v.end(), base.params.c_O);
  s0.u = stream_mode_field(g, 1, 1, 0.01 * std::min(g.Lx, g.Ly) /
                                         std::numbers::pi);
  RunOutput out = run_collecting(std::move(s0), base.params, cfg);

  std::vector<double> t, ke;
  for (const DiagRecord& r : out.records) {
    t.push_back(r.t);
    ke.push_back(r.kinetic);
  }
  double rate = -log_slope(t, ke);
  GammaChoice gc = admissible_gamma(g, 0.0);
  rep.metrics.emplace_back("fitted_rate", rate);
  rep.metrics.emplace_back("admissible_gamma", gc.gamma);
  add_criterion(rep, "kinetic_decay_rate", rate, ">=", 0.9 * 4.0 * gc.gamma);
  return rep;
}

StudyReport barenblatt_study(const StudySpec& spec) {
  StudyReport rep;
  rep.kind = StudyKind::Barenblatt;
  const ParsedConfig& base = spec.base;
  const Grid& g = base.grid;
  RunConfig cfg = base.run;
  cfg.t_end = effective_horizon(spec, 1.0);

  ScenarioSpec sc;
  sc.name = "barenblatt_1d";
  SimState s0 = make_scenario(sc, g, base.params);
  SimState sT = run(std::move(s0), base.params, cfg);

  double t_exact = 1.0 + cfg.t_end;  // the profile starts at unit time
  ScalarField diff(g), exact(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      exact.at(i, j) = barenblatt_profile(base.params.m, 1.0, t_exact, g.xc(i),
                                          0.5 * g.Lx);
      diff.at(i, j) = sT.n.at(i, j) - exact.at(i, j);
    }
  double rel = norm_lp(diff, 1.0) / norm_lp(exact, 1.0);
  rep.metrics.emplace_back("l1_rel_error", rel);
  add_criterion(rep, "barenblatt_l1_rel_error", rel, "<=", 0.05);
  return rep;
}

// ---- manufactured solutions --------------------------------------------

// oxygen: c*(x,y,t) = 2 + e^{-t} cos(pi x) cos(pi y) on the unit square;
// diffusion + source only (u = 0, n = 0)
double mms_oxygen_error(int N) {
  Grid g(N, N, 1.0, 1.0);
  const double pi = std::numbers::pi;
  auto exact = [&](double x, double y, double t) {
    return 2.0 + std::exp(-t) * std::cos(pi * x) * std::cos(pi * y);
  };
  ScalarField c(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) c.at(i, j) = exact(g.xc(i), g.yc(j), 0.0);

  const double T = 0.1;
  int steps = int(std::ceil(T / (0.25 * g.dx * g.dx)));
  double dt = T / steps;
  ScalarField n(g);
  FaceVectorField u(g);
  ConsumptionSpec k = ConsumptionSpec::linear(0.0);
  ScalarField src(g);
  double t = 0.0;
  for (int s = 0; s < steps; ++s) {
    double tn = t + dt;
    double amp = (2.0 * pi * pi - 1.0) * std::exp(-tn);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        src.at(i, j) = amp * std::cos(pi * g.xc(i)) * std::cos(pi * g.yc(j));
    c = oxygen_step(c, n, u, k, dt, 1e-12, &src);
    t = tn;
  }
  ScalarField diff(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      diff.at(i, j) = c.at(i, j) - exact(g.xc(i), g.yc(j), t);
  return norm_lp(diff, 2.0);
}

// cells: n*(x,y,t) = 2 + e^{-t} cos(pi x) cos(pi y), m = 2, transported by
// the analytic divergence-free stream field psi = A sin^2(pi x) sin^2(pi y)
double mms_cell_error(int N) {
  Grid g(N, N, 1.0, 1.0);
  const double pi = std::numbers::pi;
  const double m = 2.0;
  const double A = 1.2;
  auto exact = [&](double x, double y, double t) {
    return 2.0 + std::exp(-t) * std::cos(pi * x) * std::cos(pi * y);
  };

  // corner-sampled psi gives the discrete velocity; boundary-normal zero
  FaceVectorField u(g);
  {
    auto psi = [&](int i, int j) {
      double sx = std::sin(pi * i * g.dx), sy = std::sin(pi * j * g.dy);
      return A * sx * sx * sy * sy;
    };
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i)
        u.ux(i, j) = (psi(i, j + 1) - psi(i, j)) / g.dy;
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        u.vy(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.dx;
  }
  FaceVectorField w(g);
  GrowthSpec f = GrowthSpec::zero();

  ScalarField n(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) n.at(i, j) = exact(g.xc(i), g.yc(j), 0.0);

  const double T = 0.05;
  double dt0 = 0.9 * cell_cfl(n, u, w, m, f);
  int steps = int(std::ceil(T / dt0));
  double dt = T / steps;

  ScalarField src(g);
  double t = 0.0;
  for (int s = 0; s < steps; ++s) {
    double E = std::exp(-t);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double x = g.xc(i), y = g.yc(j);
        double cx = std::cos(pi * x), cy = std::cos(pi * y);
        double sx = std::sin(pi * x), sy = std::sin(pi * y);
        double C = cx * cy;
        double n_t = -E * C;
        double ua = A * pi * sx * sx * std::sin(2.0 * pi * y);
        double va = -A * pi * std::sin(2.0 * pi * x) * sy * sy;
        double adv = ua * (-pi * E * sx * cy) + va * (-pi * E * cx * sy);
        double lap = 4.0 * E * (-2.0 * pi * pi * C) +
                     E * E * (-2.0 * pi * pi) *
                         (std::cos(2.0 * pi * x) * cy * cy +
                          cx * cx * std::cos(2.0 * pi * y));
        src.at(i, j) = n_t + adv - lap;
      }
    CellFluxes fluxes = assemble_cell_fluxes(n, u, w, m);
    n = cell_step(n, fluxes, f, dt, &src);
    t += dt;
  }
  ScalarField diff(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      diff.at(i, j) = n.at(i, j) - exact(g.xc(i), g.yc(j), t);
  return norm_lp(diff, 1.0);
}

// fully coupled dt-halving: the Lie splitting defect is O(dt), so successive
// solution differences should shrink by about 2
double mms_splitting_ratio() {
  ParsedConfig cfg;
  cfg.grid = Grid(16, 16, 1.0, 1.0);
  cfg.params.m = 2.0;
  cfg.params.chi = SensitivitySpec::constant(0.5);
  cfg.params.k = ConsumptionSpec::linear(1.0);
  cfg.params.f = GrowthSpec::fisher(1.0);
  cfg.params.phi = PotentialSpec::gravity(0.3);
  cfg.scenario.name = "tuval_plume";

  RunConfig rc;
  rc.t_end = 0.16;
  rc.dt_policy = DtPolicy::Fixed;
  rc.tol = 1e-12;
  rc.diag_every = 0;

  SimState s0 = make_scenario(cfg.scenario, cfg.grid, cfg.params);
  std::vector<SimState> finals(3);
  std::vector<std::function<void()>> jobs;
  for (int k = 0; k < 3; ++k)
    jobs.push_back([&, k] {
      RunConfig r = rc;
      r.dt = 2e-4 / double(1 << k);
      finals[k] = run(s0, cfg.params, r);
    });
  run_jobs(jobs);

  auto dist = [&](const SimState& a, const SimState& b) {
    ScalarField dn(cfg.grid), dc(cfg.grid);
    for (std::size_t i = 0; i < dn.v.size(); ++i) {
      dn.v[i] = a.n.v[i] - b.n.v[i];
      dc.v[i] = a.c.v[i] - b.c.v[i];
    }
    return norm_lp(dn, 2.0) + norm_lp(dc, 2.0);
  };
  return dist(finals[0], finals[1]) / dist(finals[1], finals[2]);
}

StudyReport mms_study(const StudySpec&) {
  StudyReport rep;
  rep.kind = StudyKind::MmsConvergence;

  double oe[3], ce[2], split_ratio = 0.0;
  std::vector<std::function<void()>> jobs = {
      [&] { oe[0] = mms_oxygen_error(16); },
      [&] { oe[1] = mms_oxygen_error(32); },
      [&] { oe[2] = mms_oxygen_error(64); },
      [&] { ce[0] = mms_cell_error(32); },
      [&] { ce[1] = mms_cell_error(64); },
      [&] { split_ratio = mms_splitting_ratio(); },
  };
  run_jobs(jobs);

  double o1 = std::log2(oe[0] / oe[1]), o2 = std::log2(oe[1] / oe[2]);
  double oxygen_order = std::min(o1, o2);
  double cell_order = std::log2(ce[0] / ce[1]);

  rep.metrics.emplace_back("oxygen_l2_error_16", oe[0]);
  rep.metrics.emplace_back("oxygen_l2_error_32", oe[1]);
  rep.metrics.emplace_back("oxygen_l2_error_64", oe[2]);
  rep.metrics.emplace_back("cell_l1_error_32", ce[0]);
  rep.metrics.emplace_back("cell_l1_error_64", ce[1]);
  rep.metrics.emplace_back("splitting_ratio", split_ratio);
  add_criterion(rep, "oxygen_l2_order", oxygen_order, ">=", 1.8);
  add_criterion(rep, "cell_l1_order", cell_order, ">=", 0.8);
  add_criterion(rep, "splitting_ratio_lower", split_ratio, ">=", 1.5);
  add_criterion(rep, "splitting_ratio_upper", split_ratio, "<=", 2.5);
  return rep;
}

}  // namespace

StudyReport run_study(const StudySpec& spec) {
  spec.check();
  switch (spec.kind) {
    case StudyKind::Envelope: return envelope_study(spec);
    case StudyKind::AttractorPair: return attractor_study(spec);
    case StudyKind::MmsConvergence: return mms_study(spec);
    case StudyKind::Barenblatt: return barenblatt_study(spec);
    case StudyKind::DecayRate: return decay_rate_study(spec);
  }
  throw InvalidParameterError("run_study: unknown study kind");
}

}  // namespace bioflux
