// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "bioflux/io.hpp"

namespace bioflux {

enum class StudyKind {
  Envelope,        // two amplitudes, Gamma_fit ratio and tail comparison
  AttractorPair,   // two seeds, tail_distance of aligned trajectories
  MmsConvergence,  // manufactured-solution orders + dt-halving splitting
  Barenblatt,      // porous-medium closed-form oracle
  DecayRate,       // viscous kinetic-energy decay vs the Poincare bound
};

std::string to_string(StudyKind kind);

struct StudySpec {
  StudyKind kind = StudyKind::Envelope;
  ParsedConfig base;
  std::vector<double> amplitudes;   // envelope; default {1, 10}
  std::vector<std::uint64_t> seeds; // attractor_pair; default {0, 1}
  double horizon = 0.0;             // overrides base.run.t_end when > 0

  void check() const;
};

// [study] section (kind, horizon, amplitudes, seeds) on top of a full
// run config; the remaining sections are parsed as the base config.
StudySpec parse_study_spec(const std::string& text);

struct StudyCriterion {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=" or ">="
  bool pass = false;
};

struct StudyReport {
  StudyKind kind = StudyKind::Envelope;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<StudyCriterion> criteria;

  bool pass() const;
  std::string csv() const;           // metrics + criteria, machine readable
  std::string verdict_text() const;  // plain-text summary
};

StudyReport run_study(const StudySpec& spec);

// Data-parallel worker cap: BIOFLUX_THREADS, else hardware concurrency.
int worker_cap();

}  // namespace bioflux
