// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bioflux/coupler.hpp"
#include "bioflux/diagnostics.hpp"
#include "bioflux/grid.hpp"
#include "bioflux/model.hpp"

namespace bioflux {

struct OutputConfig {
  std::string csv_name = "diagnostics.csv";
  std::string pgm_field = "n";        // n | c
  std::uint64_t pgm_every = 0;        // steps, 0 = off
};

struct ScenarioSpec {
  std::string name = "rest_state";    // tuval_plume | rest_state |
                                      // barenblatt_1d | fisher_homogeneous
  std::uint64_t seed = 0;
  double amplitude = 1.0;
};

struct ParsedConfig {
  Grid grid;
  ModelParams params;
  RunConfig run;
  OutputConfig output;
  ScenarioSpec scenario;
  Purpose purpose = Purpose::Existence;
};

// Line-oriented `[section]` / `key = value` text. Sections: [grid], [model],
// [nonlinearity.chi|k|f|phi], [run], [output]. Unknown sections or keys,
// type mismatches, and hypothesis failures are ConfigErrors carrying a line.
ParsedConfig parse_config(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

// Deterministic initial state for a named preset; any randomness comes from
// splitmix64 seeded by `spec.seed`.
SimState make_scenario(const ScenarioSpec& spec, const Grid& grid,
                       const ModelParams& params);

// Discretely divergence-free MAC field from corner samples of the stream
// function A sin(k pi x/Lx) sin(l pi y/Ly); zero boundary-normal faces.
FaceVectorField stream_mode_field(const Grid& g, int k, int l, double A = 1.0);

// splitmix64: the documented mixing generator behind scenario noise.
std::uint64_t splitmix64(std::uint64_t& state);
// Next draw mapped to [0, 1).
double splitmix64_unit(std::uint64_t& state);

// Header + one row per record, floats at 17 significant digits.
std::string diagnostics_csv(const std::vector<DiagRecord>& records);
void write_diagnostics_csv(const std::vector<DiagRecord>& records,
                           const std::string& path);
// Round-trip parser (regression fixtures); FormatError on malformed text.
std::vector<DiagRecord> read_diagnostics_csv(const std::string& text);

struct PgmRange {
  bool fixed = false;
  double lo = 0.0, hi = 1.0;
};

// Binary 16-bit PGM (P5), linear map of the range to [0, 65535]; a degenerate
// range renders uniform mid-gray. NaN entries are a DomainError.
std::vector<std::uint8_t> render_pgm(const ScalarField& field,
                                     const PgmRange& range = {});
void write_pgm(const ScalarField& field, const std::string& path,
               const PgmRange& range = {});

// Snapshot file IO (format documented in coupler.cpp).
void write_snapshot(const SimState& state, const std::string& path);
SimState read_snapshot(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace bioflux
