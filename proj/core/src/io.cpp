// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include "bioflux/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace bioflux {

// --------------------------------------------------------------- parsing ----

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct RawConfig {
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_lines;
};

RawConfig tokenize(const std::string& text) {
  static const char* kKnown[] = {"grid",  "model",            "run",
                                 "output", "nonlinearity.chi", "nonlinearity.k",
                                 "nonlinearity.f", "nonlinearity.phi"};
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      bool known = std::any_of(std::begin(kKnown), std::end(kKnown),
                               [&](const char* k) { return section == k; });
      if (!known) throw ConfigError("unknown section [" + section + "]", line_no);
      raw.section_lines.emplace(section, line_no);
      raw.sections[section];
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value", line_no);
    if (section.empty())
      throw ConfigError("key outside any [section]", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (!raw.sections[section].emplace(key, Entry{value, line_no}).second)
      throw ConfigError("duplicate key '" + key + "'", line_no);
  }
  return raw;
}

double to_double(const Entry& e, const std::string& key) {
  char* end = nullptr;
  double x = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "' expects a number, got '" + e.value + "'",
                      e.line);
  return x;
}

long long to_int(const Entry& e, const std::string& key) {
  char* end = nullptr;
  long long x = std::strtoll(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "' expects an integer, got '" + e.value + "'",
                      e.line);
  return x;
}

bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ConfigError("key '" + key + "' expects true/false", e.line);
}

std::vector<double> to_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  std::istringstream in(e.value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    double x = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw ConfigError("key '" + key + "' expects comma-separated numbers",
                        e.line);
    out.push_back(x);
  }
  if (out.empty())
    throw ConfigError("key '" + key + "' expects a nonempty list", e.line);
  return out;
}

// typed access with use-tracking; leftovers are reported as unknown keys
class SectionReader {
 public:
  SectionReader(RawConfig& raw, const std::string& name)
      : name_(name), sec_(nullptr) {
    auto it = raw.sections.find(name);
    if (it != raw.sections.end()) sec_ = &it->second;
  }

  Entry* find(const std::string& key) {
    if (!sec_) return nullptr;
    auto it = sec_->find(key);
    if (it == sec_->end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  double num(const std::string& key, double def) {
    Entry* e = find(key);
    return e ? to_double(*e, key) : def;
  }
  long long integer(const std::string& key, long long def) {
    Entry* e = find(key);
    return e ? to_int(*e, key) : def;
  }
  bool boolean(const std::string& key, bool def) {
    Entry* e = find(key);
    return e ? to_bool(*e, key) : def;
  }
  std::string word(const std::string& key, const std::string& def) {
    Entry* e = find(key);
    return e ? e->value : def;
  }
  std::vector<double> list(const std::string& key) {
    Entry* e = find(key);
    return e ? to_list(*e, key) : std::vector<double>{};
  }
  int line_of(const std::string& key, int fallback) const {
    if (!sec_) return fallback;
    auto it = sec_->find(key);
    return it == sec_->end() ? fallback : it->second.line;
  }

  void finish() const {
    if (!sec_) return;
    for (const auto& [key, entry] : *sec_)
      if (!entry.used)
        throw ConfigError("unknown key '" + key + "' in [" + name_ + "]",
                          entry.line);
  }

 private:
  std::string name_;
  Section* sec_;
};

Table read_table(SectionReader& sec) {
  Table t;
  t.y = sec.list("y");
  t.val = sec.list("val");
  return t;
}

}  // namespace

ParsedConfig parse_config(const std::string& text) {
  RawConfig raw = tokenize(text);
  ParsedConfig cfg;

  SectionReader grid(raw, "grid");
  int nx = int(grid.integer("nx", 64));
  int ny = int(grid.integer("ny", 64));
  double Lx = grid.num("Lx", 1.0);
  double Ly = grid.num("Ly", 1.0);
  grid.finish();
  int grid_line = raw.section_lines.count("grid") ? raw.section_lines["grid"] : 0;
  try {
    cfg.grid = Grid(nx, ny, Lx, Ly);
  } catch (const InvalidParameterError& e) {
    throw ConfigError(e.what(), grid_line);
  }

  SectionReader model(raw, "model");
  int model_line =
      raw.section_lines.count("model") ? raw.section_lines["model"] : 0;
  cfg.params.d = int(model.integer("d", 2));
  cfg.params.m = model.num("m", 2.0);
  if (!(cfg.params.m >= 1.0))
    throw ConfigError("m must be >= 1", model.line_of("m", model_line));
  cfg.params.gamma = model.num("gamma", 0.0);
  cfg.params.c_O = model.num("c_O", 1.0);
  cfg.params.K2 = model.num("K2", 1.0);
  std::string purpose = model.word("purpose", "existence");
  if (purpose == "existence")
    cfg.purpose = Purpose::Existence;
  else if (purpose == "attractor")
    cfg.purpose = Purpose::Attractor;
  else
    throw ConfigError("purpose must be existence|attractor",
                      model.line_of("purpose", model_line));
  cfg.scenario.name = model.word("scenario", "rest_state");
  static const char* kScenarios[] = {"tuval_plume", "rest_state",
                                     "barenblatt_1d", "fisher_homogeneous"};
  if (std::none_of(std::begin(kScenarios), std::end(kScenarios),
                   [&](const char* s) { return cfg.scenario.name == s; }))
    throw ConfigError("unknown scenario '" + cfg.scenario.name + "'",
                      model.line_of("scenario", model_line));
  cfg.scenario.seed = std::uint64_t(model.integer("seed", 0));
  cfg.scenario.amplitude = model.num("amplitude", 1.0);
  model.finish();

  {
    SectionReader chi(raw, "nonlinearity.chi");
    std::string kind = chi.word("kind", "constant");
    if (kind == "constant")
      cfg.params.chi = SensitivitySpec::constant(chi.num("chi0", 1.0));
    else if (kind == "power")
      cfg.params.chi = SensitivitySpec::power(chi.num("chi0", 1.0), chi.num("q", 1.0));
    else if (kind == "sampled")
      cfg.params.chi = SensitivitySpec::sampled(read_table(chi));
    else
      throw ConfigError("chi kind must be constant|power|sampled",
                        chi.line_of("kind", model_line));
    chi.finish();
  }
  {
    SectionReader k(raw, "nonlinearity.k");
    std::string kind = k.word("kind", "linear");
    if (kind == "linear")
      cfg.params.k = ConsumptionSpec::linear(k.num("kappa", 1.0));
    else if (kind == "power")
      cfg.params.k = ConsumptionSpec::power(k.num("kappa", 1.0), k.num("q", 1.0));
    else if (kind == "sampled")
      cfg.params.k = ConsumptionSpec::sampled(read_table(k));
    else
      throw ConfigError("k kind must be linear|power|sampled",
                        k.line_of("kind", model_line));
    k.finish();
  }
  {
    SectionReader f(raw, "nonlinearity.f");
    std::string kind = f.word("kind", "zero");
    if (kind == "zero")
      cfg.params.f = GrowthSpec::zero();
    else if (kind == "fisher")
      cfg.params.f = GrowthSpec::fisher(f.num("mu", 1.0));
    else if (kind == "affine_capped")
      cfg.params.f = GrowthSpec::affine_capped(f.num("f0", 0.0),
                                               f.num("slope", 0.0),
                                               f.num("cap", 0.0));
    else if (kind == "sampled")
      cfg.params.f = GrowthSpec::sampled(read_table(f));
    else
      throw ConfigError("f kind must be zero|fisher|affine_capped|sampled",
                        f.line_of("kind", model_line));
    f.finish();
  }
  {
    SectionReader phi(raw, "nonlinearity.phi");
    std::string kind = phi.word("kind", "gravity");
    if (kind != "gravity")
      throw ConfigError("phi kind must be gravity",
                        phi.line_of("kind", model_line));
    cfg.params.phi = PotentialSpec::gravity(phi.num("g", 0.0));
    phi.finish();
  }

  SectionReader run(raw, "run");
  int run_line = raw.section_lines.count("run") ? raw.section_lines["run"] : 0;
  cfg.run.t_end = run.num("t_end", 1.0);
  std::string policy = run.word("dt_policy", "adaptive");
  if (policy == "adaptive")
    cfg.run.dt_policy = DtPolicy::Adaptive;
  else if (policy == "fixed")
    cfg.run.dt_policy = DtPolicy::Fixed;
  else
    throw ConfigError("dt_policy must be adaptive|fixed",
                      run.line_of("dt_policy", run_line));
  cfg.run.dt = run.num("dt", 0.0);
  cfg.run.dt_cap = run.num("dt_cap", 0.0);
  cfg.run.safety = run.num("safety", 0.4);
  cfg.run.tol = run.num("tol", 1e-10);
  cfg.run.checkpoint_every = std::uint64_t(run.integer("checkpoint_every", 0));
  cfg.run.diag_every = std::uint64_t(run.integer("diag_every", 1));
  cfg.run.debug_checks = run.boolean("debug_checks", false);
  run.finish();
  try {
    cfg.run.check();
  } catch (const InvalidParameterError& e) {
    throw ConfigError(e.what(), run_line);
  }

  SectionReader out(raw, "output");
  cfg.output.csv_name = out.word("csv", "diagnostics.csv");
  cfg.output.pgm_field = out.word("pgm_field", "n");
  if (cfg.output.pgm_field != "n" && cfg.output.pgm_field != "c")
    throw ConfigError("pgm_field must be n|c", out.line_of("pgm_field", 0));
  cfg.output.pgm_every = std::uint64_t(out.integer("pgm_every", 0));
  out.finish();

  try {
    cfg.params.check_basic();
    validate_hypotheses(cfg.params, cfg.purpose).require_ok();
  } catch (const InvalidParameterError& e) {
    throw ConfigError(e.what(), model_line);
  }
  return cfg;
}

ParsedConfig parse_config_file(const std::string& path) {
  return parse_config(read_text_file(path));
}

// ------------------------------------------------------------- scenarios ----

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double splitmix64_unit(std::uint64_t& state) {
  return double(splitmix64(state) >> 11) * 0x1.0p-53;
}

FaceVectorField stream_mode_field(const Grid& g, int k, int l, double A) {
  auto psi = [&](int i, int j) {
    return A * std::sin(k * std::numbers::pi * (i * g.dx) / g.Lx) *
           std::sin(l * std::numbers::pi * (j * g.dy) / g.Ly);
  };
  FaceVectorField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      f.ux(i, j) = (psi(i, j + 1) - psi(i, j)) / g.dy;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f.vy(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.dx;
  // sin(k pi) is only zero up to rounding; enforce the wall contract exactly
  f.zero_boundary_normal();
  return f;
}

namespace {

// smooth seeded bump field: low cosine modes with coefficients in [-1, 1],
// normalized so |field| <= 1
ScalarField seeded_modes(const Grid& g, std::uint64_t seed) {
  constexpr int kModes = 3;
  double a[kModes][kModes];
  std::uint64_t s = seed;
  for (int k = 0; k < kModes; ++k)
    for (int l = 0; l < kModes; ++l)
      a[k][l] = 2.0 * splitmix64_unit(s) - 1.0;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double x = g.xc(i), y = g.yc(j);
      double acc = 0.0;
      for (int k = 0; k < kModes; ++k)
        for (int l = 0; l < kModes; ++l)
          acc += a[k][l] * std::cos((k + 1) * std::numbers::pi * x / g.Lx) *
                 std::cos((l + 1) * std::numbers::pi * y / g.Ly);
      out.at(i, j) = acc / (kModes * kModes);
    }
  return out;
}

}  // namespace

SimState make_scenario(const ScenarioSpec& spec, const Grid& grid,
                       const ModelParams& params) {
  SimState s = SimState::initial(grid);
  if (spec.name == "rest_state") {
    std::fill(s.c.v.begin(), s.c.v.end(), params.c_O);
  } else if (spec.name == "tuval_plume") {
    ScalarField bump = seeded_modes(grid, spec.seed);
    for (std::size_t k = 0; k < s.n.v.size(); ++k)
      s.n.v[k] = spec.amplitude * (1.0 + 0.05 * bump.v[k]);
    std::fill(s.c.v.begin(), s.c.v.end(), params.c_O);
  } else if (spec.name == "fisher_homogeneous") {
    ScalarField bump = seeded_modes(grid, spec.seed);
    for (std::size_t k = 0; k < s.n.v.size(); ++k)
      s.n.v[k] = 1.0 + 0.05 * bump.v[k];
    std::fill(s.c.v.begin(), s.c.v.end(), params.c_O);
    double A = spec.amplitude * 0.1 * std::min(grid.Lx, grid.Ly) /
               std::numbers::pi;
    s.u = stream_mode_field(grid, 1, 1, A);
  } else if (spec.name == "barenblatt_1d") {
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        s.n.at(i, j) = spec.amplitude *
                       barenblatt_profile(params.m, 1.0, 1.0, grid.xc(i),
                                          0.5 * grid.Lx);
  } else {
    throw InvalidParameterError("unknown scenario '" + spec.name + "'");
  }
  return s;
}

// ------------------------------------------------------------------- CSV ----

namespace {

const char* kCsvHeader =
    "t,dt,mass,entropy,min_n,max_n,min_c,max_c,grad_c_l2,kinetic,grad_u_l2,"
    "grad_nm2_l2,div_linf,f_integral,lyapunov,c_l2,n_plm";

constexpr int kCsvColumns = 17;

void collect(const DiagRecord& r, double* out) {
  const double fields[kCsvColumns] = {
      r.t,       r.dt,        r.mass,      r.entropy,  r.min_n,
      r.max_n,   r.min_c,     r.max_c,     r.grad_c_l2, r.kinetic,
      r.grad_u_l2, r.grad_nm2_l2, r.div_linf, r.f_integral, r.lyapunov,
      r.c_l2,    r.n_plm};
  std::copy(fields, fields + kCsvColumns, out);
}

void scatter(const double* in, DiagRecord& r) {
  r.t = in[0];       r.dt = in[1];        r.mass = in[2];
  r.entropy = in[3]; r.min_n = in[4];     r.max_n = in[5];
  r.min_c = in[6];   r.max_c = in[7];     r.grad_c_l2 = in[8];
  r.kinetic = in[9]; r.grad_u_l2 = in[10]; r.grad_nm2_l2 = in[11];
  r.div_linf = in[12]; r.f_integral = in[13]; r.lyapunov = in[14];
  r.c_l2 = in[15];   r.n_plm = in[16];
}

}  // namespace

std::string diagnostics_csv(const std::vector<DiagRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  char buf[32];
  double fields[kCsvColumns];
  for (const DiagRecord& r : records) {
    collect(r, fields);
    for (int k = 0; k < kCsvColumns; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", fields[k]);
      out += buf;
      out += k + 1 < kCsvColumns ? ',' : '\n';
    }
  }
  return out;
}

void write_diagnostics_csv(const std::vector<DiagRecord>& records,
                           const std::string& path) {
  write_text_file(path, diagnostics_csv(records));
}

std::vector<DiagRecord> read_diagnostics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw FormatError("csv: unexpected header");
  std::vector<DiagRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double fields[kCsvColumns];
    const char* p = line.c_str();
    for (int k = 0; k < kCsvColumns; ++k) {
      char* end = nullptr;
      fields[k] = std::strtod(p, &end);
      if (end == p) throw FormatError("csv: malformed number");
      p = end;
      if (k + 1 < kCsvColumns) {
        if (*p != ',') throw FormatError("csv: expected comma");
        ++p;
      }
    }
    if (*p != '\0') throw FormatError("csv: trailing content on row");
    DiagRecord r;
    scatter(fields, r);
    out.push_back(r);
  }
  return out;
}

// ------------------------------------------------------------------- PGM ----

std::vector<std::uint8_t> render_pgm(const ScalarField& field,
                                     const PgmRange& range) {
  for (double x : field.v)
    if (std::isnan(x)) throw DomainError("pgm: field contains NaN");
  const Grid& g = field.grid;
  double lo = range.lo, hi = range.hi;
  if (!range.fixed) {
    lo = *std::min_element(field.v.begin(), field.v.end());
    hi = *std::max_element(field.v.begin(), field.v.end());
  }
  char header[64];
  int hlen = std::snprintf(header, sizeof header, "P5\n%d %d\n65535\n", g.nx,
                           g.ny);
  std::vector<std::uint8_t> out(header, header + hlen);
  out.reserve(hlen + 2 * g.cells());
  // image rows top-down: j = ny-1 first
  for (int j = g.ny - 1; j >= 0; --j)
    for (int i = 0; i < g.nx; ++i) {
      double v;
      if (hi > lo)
        v = std::clamp((field.at(i, j) - lo) / (hi - lo), 0.0, 1.0) * 65535.0;
      else
        v = 32768.0;
      auto pix = std::uint16_t(std::lround(v));
      out.push_back(std::uint8_t(pix >> 8));
      out.push_back(std::uint8_t(pix & 0xff));
    }
  return out;
}

void write_pgm(const ScalarField& field, const std::string& path,
               const PgmRange& range) {
  std::vector<std::uint8_t> bytes = render_pgm(field, range);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

// ------------------------------------------------------------- snapshots ----

void write_snapshot(const SimState& state, const std::string& path) {
  Snapshot s = checkpoint(state);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(s.bytes.data()),
          std::streamsize(s.bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

SimState read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  Snapshot s;
  s.bytes.assign(std::istreambuf_iterator<char>(f),
                 std::istreambuf_iterator<char>());
  return restore(s);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(text.data(), std::streamsize(text.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace bioflux
