// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bioflux/io.hpp"
#include "bioflux/study.hpp"

namespace fs = std::filesystem;
using namespace bioflux;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir,
            double until, long long checkpoint_every,
            const std::string& resume_path) {
  ParsedConfig cfg = parse_config_file(config_path);
  if (until > 0.0) cfg.run.t_end = until;
  if (checkpoint_every >= 0)
    cfg.run.checkpoint_every = std::uint64_t(checkpoint_every);

  SimState state;
  if (!resume_path.empty()) {
    state = read_snapshot(resume_path);
    if (!state.grid().same_as(cfg.grid))
      throw CompatibilityError("resume snapshot grid does not match the config");
  } else {
    state = make_scenario(cfg.scenario, cfg.grid, cfg.params);
  }

  fs::create_directories(out_dir);
  std::vector<DiagRecord> records;
  RunHooks hooks;
  hooks.on_diag = [&](const SimState& s, double dt) {
    records.push_back(record(s, cfg.params, dt));
  };
  hooks.on_checkpoint = [&](const SimState& s) {
    write_snapshot(s, out_dir + "/checkpoint_" + std::to_string(s.step) +
                          ".bcnv");
  };
  if (cfg.output.pgm_every > 0) {
    hooks.on_step = [&](const SimState& s, double) {
      if (s.step % cfg.output.pgm_every != 0) return;
      const ScalarField& f = cfg.output.pgm_field == "c" ? s.c : s.n;
      write_pgm(f, out_dir + "/" + cfg.output.pgm_field + "_" +
                       std::to_string(s.step) + ".pgm");
    };
  }

  state = run(std::move(state), cfg.params, cfg.run, hooks);
  write_diagnostics_csv(records, out_dir + "/" + cfg.output.csv_name);
  write_snapshot(state, out_dir + "/final.bcnv");
  std::printf("run finished: t = %.17g, steps = %llu, %zu diagnostic rows\n",
              state.t, (unsigned long long)state.step, records.size());
  return 0;
}

int cmd_validate(const std::string& config_path) {
  ParsedConfig cfg = parse_config_file(config_path);
  ValidationReport report = validate_hypotheses(cfg.params, cfg.purpose);
  std::printf("%s", report.summary().c_str());
  std::printf("config OK\n");
  return 0;
}

int cmd_diff(const std::string& a_path, const std::string& b_path) {
  SimState a = read_snapshot(a_path);
  SimState b = read_snapshot(b_path);
  if (!a.grid().same_as(b.grid())) {
    std::printf("grids differ: %dx%d vs %dx%d\n", a.grid().nx, a.grid().ny,
                b.grid().nx, b.grid().ny);
    return 1;
  }
  auto max_diff = [](const std::vector<double>& x, const std::vector<double>& y) {
    double m = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
      m = std::max(m, std::fabs(x[k] - y[k]));
    return m;
  };
  double dn = max_diff(a.n.v, b.n.v);
  double dc = max_diff(a.c.v, b.c.v);
  double du = std::max(max_diff(a.u.u, b.u.u), max_diff(a.u.v, b.u.v));
  double dt = std::fabs(a.t - b.t);
  std::printf("max|dn| = %.17g\nmax|dc| = %.17g\nmax|du| = %.17g\n|dt| = %.17g\n",
              dn, dc, du, dt);
  bool identical = dn == 0.0 && dc == 0.0 && du == 0.0 && dt == 0.0 &&
                   a.step == b.step;
  std::printf(identical ? "snapshots identical\n" : "snapshots differ\n");
  return identical ? 0 : 1;
}

int cmd_study(const std::string& spec_path, const std::string& out_dir) {
  StudySpec spec = parse_study_spec(read_text_file(spec_path));
  StudyReport report = run_study(spec);
  fs::create_directories(out_dir);
  write_text_file(out_dir + "/report.csv", report.csv());
  write_text_file(out_dir + "/verdict.txt", report.verdict_text());
  std::printf("%s", report.verdict_text().c_str());
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bioflux: coupled oxytaxis-fluid simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, resume_path, spec_path, snap_a, snap_b;
  double until = 0.0;
  long long checkpoint_every = -1;

  CLI::App* run_cmd = app.add_subcommand("run", "advance a configured scenario");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory")->required();
  run_cmd->add_option("--until", until, "override the end time");
  run_cmd->add_option("--checkpoint-every", checkpoint_every,
                      "snapshot cadence in steps");
  run_cmd->add_option("--resume", resume_path, "snapshot to resume from");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check a config against the hypotheses");
  validate_cmd->add_option("--config", config_path, "config file")->required();

  CLI::App* diff_cmd =
      app.add_subcommand("diff-snapshots", "compare two snapshot files");
  diff_cmd->add_option("a", snap_a, "first snapshot")->required();
  diff_cmd->add_option("b", snap_b, "second snapshot")->required();

  CLI::App* study_cmd = app.add_subcommand("study", "run a canned study");
  study_cmd->add_option("--spec", spec_path, "study spec file")->required();
  study_cmd->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed())
      return cmd_run(config_path, out_dir, until, checkpoint_every, resume_path);
    if (validate_cmd->parsed()) return cmd_validate(config_path);
    if (diff_cmd->parsed()) return cmd_diff(snap_a, snap_b);
    if (study_cmd->parsed()) return cmd_study(spec_path, out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
