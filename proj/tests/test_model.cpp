// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <doctest.h>

#include "bioflux/model.hpp"

using namespace bioflux;

TEST_CASE("table evaluation and validation") {
  Table t;
  t.y = {0.0, 1.0, 2.0};
  t.val = {0.0, 2.0, 3.0};
  t.validate();
  CHECK(t.eval(0.5) == doctest::Approx(1.0));
  CHECK(t.eval(1.5) == doctest::Approx(2.5));
  CHECK(t.eval(2.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(t.eval(2.5), DomainError);
  CHECK_THROWS_AS(t.eval(-0.1), DomainError);

  Table bad = t;
  bad.y = {0.5, 1.0, 2.0};  // must start at 0
  CHECK_THROWS_AS(bad.validate(), InvalidParameterError);
  bad.y = {0.0, 1.0, 1.0};  // must increase
  CHECK_THROWS_AS(bad.validate(), InvalidParameterError);
}

TEST_CASE("regime dichotomy is strict at the threshold") {
  CHECK(classify_regime(2.0, 2) == Regime::Supercritical);
  CHECK(classify_regime(1.0, 2) == Regime::Subcritical);   // threshold itself
  CHECK(classify_regime(1.01, 2) == Regime::Supercritical);
  CHECK(classify_regime(4.0 / 3.0, 3) == Regime::Subcritical);
  CHECK(classify_regime(1.34, 3) == Regime::Supercritical);
  CHECK_THROWS_AS(classify_regime(0.5, 2), InvalidParameterError);
  CHECK_THROWS_AS(classify_regime(2.0, 4), InvalidParameterError);
}

TEST_CASE("growth specs") {
  GrowthSpec fisher = GrowthSpec::fisher(2.0);
  CHECK(fisher.eval(1.0) == 0.0);
  CHECK(fisher.eval(0.5) == doctest::Approx(0.5));
  CHECK(fisher.max_negative_slope(1.0) == doctest::Approx(2.0));  // mu(2n-1)
  CHECK(fisher.max_negative_slope(0.25) == 0.0);
  CHECK_THROWS_AS(GrowthSpec::fisher(0.0), InvalidParameterError);
  CHECK_THROWS_AS(GrowthSpec::affine_capped(1.0, 0.5, 0.5),
                  InvalidParameterError);
  GrowthSpec ac = GrowthSpec::affine_capped(0.1, 2.0, 1.0);
  CHECK(ac.eval(10.0) == doctest::Approx(1.0));
}

TEST_CASE("consumption kappa factorization") {
  CHECK(ConsumptionSpec::linear(3.0).kappa_of(0.0) == doctest::Approx(3.0));
  ConsumptionSpec p = ConsumptionSpec::power(2.0, 2.0);
  CHECK(p.eval(0.5) == doctest::Approx(0.5));        // 2 c^2
  CHECK(p.kappa_of(0.5) == doctest::Approx(1.0));    // k(c)/c
  Table t;
  t.y = {0.0, 1.0, 2.0};
  t.val = {0.0, 0.5, 0.5};
  ConsumptionSpec s = ConsumptionSpec::sampled(t);
  CHECK(s.kappa_of(0.0) == doctest::Approx(0.5));    // one-sided k'(0)
  CHECK(s.kappa_of(2.0) == doctest::Approx(0.25));
  t.val = {0.1, 0.5, 0.5};
  CHECK_THROWS_AS(ConsumptionSpec::sampled(t), InvalidParameterError);
}

TEST_CASE("hypothesis validation per regime") {
  ModelParams params;
  params.m = 2.0;
  params.f = GrowthSpec::zero();

  ValidationReport rep = validate_hypotheses(params, Purpose::Existence);
  CHECK(rep.regime == Regime::Supercritical);
  CHECK(rep.ok());
  REQUIRE(rep.find("asf1") != nullptr);
  CHECK(rep.find("asf1")->C == doctest::Approx(0.0));

  params.m = 1.0;  // subcritical: zero growth cannot satisfy the quadratic bound
  rep = validate_hypotheses(params, Purpose::Existence);
  CHECK_FALSE(rep.ok());
  REQUIRE(rep.find("asf2") != nullptr);
  CHECK_FALSE(rep.find("asf2")->pass);
  CHECK_THROWS_WITH_AS(rep.require_ok(),
                       doctest::Contains("asf2"), InvalidParameterError);

  params.f = GrowthSpec::fisher(1.5);  // the canonical admissible growth
  rep = validate_hypotheses(params, Purpose::Existence);
  CHECK(rep.ok());
  CHECK(rep.find("asf2")->C_f == doctest::Approx(1.5));
}

TEST_CASE("attractor purpose adds the regime gate and the bounded-growth check") {
  ModelParams params;
  params.m = 1.0;
  params.f = GrowthSpec::fisher(1.0);
  params.gamma = 0.5;
  ValidationReport rep = validate_hypotheses(params, Purpose::Attractor);
  REQUIRE(rep.find("supercritical_regime") != nullptr);
  CHECK_FALSE(rep.find("supercritical_regime")->pass);

  params.m = 2.0;
  rep = validate_hypotheses(params, Purpose::Attractor);
  CHECK(rep.ok());
  REQUIRE(rep.find("asfs") != nullptr);
  // sup of (mu + 2 gamma) y - mu y^2 = (mu + 2 gamma)^2 / (4 mu)
  CHECK(rep.find("asfs")->C == doctest::Approx(1.0));

  params.gamma = 0.0;  // unset decay rate cannot support the bound
  rep = validate_hypotheses(params, Purpose::Attractor);
  CHECK_FALSE(rep.find("asfs")->pass);
}

TEST_CASE("admissible gamma caps at the Poincare bound") {
  Grid g(8, 8, 2.0, 2.0);
  double lambda1 = std::numbers::pi * std::numbers::pi * 0.5;
  GammaChoice gc = admissible_gamma(g, 0.0);
  CHECK(gc.poincare_bound == doctest::Approx(lambda1 / 4.0));
  CHECK(gc.gamma == doctest::Approx(lambda1 / 4.0));
  CHECK(admissible_gamma(g, 0.1).gamma == doctest::Approx(0.1));
  CHECK(admissible_gamma(g, 100.0).gamma == doctest::Approx(lambda1 / 4.0));
}

TEST_CASE("basic parameter ranges") {
  ModelParams params;
  params.K2 = 0.0;
  CHECK_THROWS_AS(params.check_basic(), InvalidParameterError);
  params.K2 = 1.0;
  params.gamma = -1.0;
  CHECK_THROWS_AS(params.check_basic(), InvalidParameterError);
}
