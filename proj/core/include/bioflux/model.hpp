// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bioflux/grid.hpp"

namespace bioflux {

// Piecewise-linear sampled function on [0, y_max].
struct Table {
  std::vector<double> y;    // strictly increasing, y.front() == 0
  std::vector<double> val;

  double y_max() const { return y.empty() ? 0.0 : y.back(); }
  double eval(double x) const;
  void validate() const;
};

// Chemotactic sensitivity chi(c) >= 0, chi' >= 0.
struct SensitivitySpec {
  enum class Kind { Constant, Power, Sampled } kind = Kind::Constant;
  double chi0 = 1.0;
  double q = 1.0;
  Table table;

  double eval(double c) const;
  static SensitivitySpec constant(double chi0);
  static SensitivitySpec power(double chi0, double q);
  static SensitivitySpec sampled(Table t);
};

// Oxygen consumption rate k(c) >= 0 with k(0) = 0.
struct ConsumptionSpec {
  enum class Kind { Linear, Power, Sampled } kind = Kind::Linear;
  double kappa = 1.0;
  double q = 1.0;
  Table table;

  double eval(double c) const;
  // k(c)/c extended by k'(0) at c = 0; backs the implicit consumption stage.
  double kappa_of(double c) const;
  static ConsumptionSpec linear(double kappa);
  static ConsumptionSpec power(double kappa, double q);
  static ConsumptionSpec sampled(Table t);
};

// Cell growth f(n).
struct GrowthSpec {
  enum class Kind { Zero, Fisher, AffineCapped, Sampled } kind = Kind::Zero;
  double mu = 1.0;                       // Fisher mu n (1 - n)
  double f0 = 0.0, slope = 0.0, cap = 0.0;  // min(f0 + slope y, cap)
  Table table;

  double eval(double n) const;
  // sup of max(0, -f') over [0, nmax]; growth part of the CFL bound.
  double max_negative_slope(double nmax) const;
  static GrowthSpec zero();
  static GrowthSpec fisher(double mu);
  static GrowthSpec affine_capped(double f0, double slope, double cap);
  static GrowthSpec sampled(Table t);
};

// Force potential; supplies phi at centers and grad(phi) at faces.
struct PotentialSpec {
  enum class Kind { Gravity, Sampled } kind = Kind::Gravity;
  double g = 0.0;      // phi = g * y
  ScalarField field;   // Sampled kind only

  double grad_x_face(const Grid& grid, int i, int j) const;  // x-face (i,j)
  double grad_y_face(const Grid& grid, int i, int j) const;  // y-face (i,j)
  double grad_sup(const Grid& grid) const;
  bool is_constant() const;
  static PotentialSpec gravity(double g);
  static PotentialSpec sampled(ScalarField phi);
};

enum class Regime { Supercritical, Subcritical };
enum class Purpose { Existence, Attractor };

// Supercritical iff m > (d+1)/3 strictly; the boundary is subcritical.
Regime classify_regime(double m, int d);

struct ModelParams {
  int d = 2;
  double m = 2.0;
  SensitivitySpec chi;
  ConsumptionSpec k;
  GrowthSpec f;
  PotentialSpec phi;
  double gamma = 0.0;  // decay rate; 0 = unset
  double c_O = 1.0;    // oxygen cap
  double K2 = 1.0;     // Lyapunov kinetic weight

  // Structural invariants (ranges only; analytic hypotheses are separate).
  void check_basic() const;
  Regime regime() const { return classify_regime(m, d); }
};

struct HypothesisCheck {
  std::string name;   // "chi_monotone", "asf1", "asf2", "asfs", ...
  bool pass = false;
  double C = std::numeric_limits<double>::quiet_NaN();    // witness constant
  double C_f = std::numeric_limits<double>::quiet_NaN();  // witness for asf2
  std::string detail;
};

struct ValidationReport {
  Regime regime = Regime::Supercritical;
  std::vector<HypothesisCheck> checks;

  bool ok() const;
  const HypothesisCheck* find(const std::string& name) const;
  std::string summary() const;
  // Throws InvalidParameterError naming the first failed inequality.
  void require_ok() const;
};

ValidationReport validate_hypotheses(const ModelParams& params, Purpose purpose);

struct GammaChoice {
  double gamma = 0.0;
  double poincare_bound = 0.0;  // lambda_1 / 4 for the rectangle
};

// gamma = min(requested, lambda_1/4) with lambda_1 = pi^2 (1/Lx^2 + 1/Ly^2);
// requested <= 0 means unset.
GammaChoice admissible_gamma(const Grid& grid, double requested);

}  // namespace bioflux
