// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include "bioflux/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bioflux {

namespace {
constexpr double kSlack = 1e-12;  // tolerated violation on sampled checks
}

// ---------------------------------------------------------------- Table ----

void Table::validate() const {
  if (y.size() < 2 || y.size() != val.size())
    throw InvalidParameterError("table: need >= 2 samples of equal length");
  if (y.front() != 0.0)
    throw InvalidParameterError("table: samples must start at y = 0");
  for (std::size_t i = 1; i < y.size(); ++i)
    if (!(y[i] > y[i - 1]))
      throw InvalidParameterError("table: sample points must increase");
  for (double x : val)
    if (!std::isfinite(x)) throw InvalidParameterError("table: non-finite value");
}

double Table::eval(double x) const {
  if (x < 0.0 || x > y_max() * (1.0 + 1e-12))
    throw DomainError("table: argument outside sampled range [0, " +
                      std::to_string(y_max()) + "]");
  x = std::min(x, y_max());
  auto it = std::upper_bound(y.begin(), y.end(), x);
  std::size_t hi = std::min(std::size_t(it - y.begin()), y.size() - 1);
  std::size_t lo = hi - 1;
  double t = (x - y[lo]) / (y[hi] - y[lo]);
  return val[lo] + t * (val[hi] - val[lo]);
}

// ------------------------------------------------------- SensitivitySpec ----

double SensitivitySpec::eval(double c) const {
  switch (kind) {
    case Kind::Constant: return chi0;
    case Kind::Power: return chi0 * std::pow(c, q);
    case Kind::Sampled: return table.eval(c);
  }
  return 0.0;
}

SensitivitySpec SensitivitySpec::constant(double chi0) {
  if (chi0 < 0.0) throw InvalidParameterError("chi: chi0 must be >= 0");
  SensitivitySpec s;
  s.kind = Kind::Constant;
  s.chi0 = chi0;
  return s;
}

SensitivitySpec SensitivitySpec::power(double chi0, double q) {
  if (chi0 < 0.0 || q < 0.0)
    throw InvalidParameterError("chi: power spec needs chi0 >= 0, q >= 0");
  SensitivitySpec s;
  s.kind = Kind::Power;
  s.chi0 = chi0;
  s.q = q;
  return s;
}

SensitivitySpec SensitivitySpec::sampled(Table t) {
  t.validate();
  SensitivitySpec s;
  s.kind = Kind::Sampled;
  s.table = std::move(t);
  return s;
}

// ------------------------------------------------------- ConsumptionSpec ----

double ConsumptionSpec::eval(double c) const {
  switch (kind) {
    case Kind::Linear: return kappa * c;
    case Kind::Power: return kappa * std::pow(c, q);
    case Kind::Sampled: return table.eval(c);
  }
  return 0.0;
}

double ConsumptionSpec::kappa_of(double c) const {
  switch (kind) {
    case Kind::Linear: return kappa;
    case Kind::Power:
      return q == 1.0 ? kappa : kappa * std::pow(c, q - 1.0);
    case Kind::Sampled: {
      if (c > 0.0) return table.eval(c) / c;
      // one-sided difference at 0; k(0) = 0 by construction
      return table.val[1] / table.y[1];
    }
  }
  return 0.0;
}

ConsumptionSpec ConsumptionSpec::linear(double kappa) {
  if (kappa < 0.0) throw InvalidParameterError("k: kappa must be >= 0");
  ConsumptionSpec s;
  s.kind = Kind::Linear;
  s.kappa = kappa;
  return s;
}

ConsumptionSpec ConsumptionSpec::power(double kappa, double q) {
  if (kappa < 0.0 || q < 1.0)
    throw InvalidParameterError("k: power spec needs kappa >= 0, q >= 1");
  ConsumptionSpec s;
  s.kind = Kind::Power;
  s.kappa = kappa;
  s.q = q;
  return s;
}

ConsumptionSpec ConsumptionSpec::sampled(Table t) {
  t.validate();
  if (t.val.front() != 0.0)
    throw InvalidParameterError("k: sampled consumption must have k(0) = 0");
  ConsumptionSpec s;
  s.kind = Kind::Sampled;
  s.table = std::move(t);
  return s;
}

// ------------------------------------------------------------ GrowthSpec ----

double GrowthSpec::eval(double n) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Fisher: return mu * n * (1.0 - n);
    case Kind::AffineCapped: return std::min(f0 + slope * n, cap);
    case Kind::Sampled: return table.eval(n);
  }
  return 0.0;
}

double GrowthSpec::max_negative_slope(double nmax) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Fisher: return std::max(0.0, mu * (2.0 * nmax - 1.0));
    case Kind::AffineCapped: return std::max(0.0, -slope);
    case Kind::Sampled: {
      double worst = 0.0;
      for (std::size_t i = 1; i < table.y.size(); ++i) {
        if (table.y[i - 1] > nmax) break;
        double s = (table.val[i] - table.val[i - 1]) / (table.y[i] - table.y[i - 1]);
        worst = std::max(worst, -s);
      }
      return worst;
    }
  }
  return 0.0;
}

GrowthSpec GrowthSpec::zero() { return GrowthSpec{}; }

GrowthSpec GrowthSpec::fisher(double mu) {
  if (mu <= 0.0) throw InvalidParameterError("f: fisher needs mu > 0");
  GrowthSpec s;
  s.kind = Kind::Fisher;
  s.mu = mu;
  return s;
}

GrowthSpec GrowthSpec::affine_capped(double f0, double slope, double cap) {
  if (cap < f0)
    throw InvalidParameterError("f: affine-capped needs cap >= f0");
  GrowthSpec s;
  s.kind = Kind::AffineCapped;
  s.f0 = f0;
  s.slope = slope;
  s.cap = cap;
  return s;
}

GrowthSpec GrowthSpec::sampled(Table t) {
  t.validate();
  GrowthSpec s;
  s.kind = Kind::Sampled;
  s.table = std::move(t);
  return s;
}

// --------------------------------------------------------- PotentialSpec ----

double PotentialSpec::grad_x_face(const Grid& grid, int i, int j) const {
  if (kind == Kind::Gravity) return 0.0;
  if (i <= 0 || i >= grid.nx) return 0.0;
  return (field.at(i, j) - field.at(i - 1, j)) / grid.dx;
}

double PotentialSpec::grad_y_face(const Grid& grid, int i, int j) const {
  if (kind == Kind::Gravity) return (j <= 0 || j >= grid.ny) ? 0.0 : g;
  if (j <= 0 || j >= grid.ny) return 0.0;
  return (field.at(i, j) - field.at(i, j - 1)) / grid.dy;
}

double PotentialSpec::grad_sup(const Grid& grid) const {
  if (kind == Kind::Gravity) return std::fabs(g);
  double m = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i)
      m = std::max(m, std::fabs(grad_x_face(grid, i, j)));
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      m = std::max(m, std::fabs(grad_y_face(grid, i, j)));
  return m;
}

bool PotentialSpec::is_constant() const {
  if (kind == Kind::Gravity) return g == 0.0;
  for (double x : field.v)
    if (x != field.v.front()) return false;
  return true;
}

PotentialSpec PotentialSpec::gravity(double g) {
  PotentialSpec s;
  s.kind = Kind::Gravity;
  s.g = g;
  return s;
}

PotentialSpec PotentialSpec::sampled(ScalarField phi) {
  if (!phi.all_finite())
    throw InvalidParameterError("phi: sampled potential must be finite");
  PotentialSpec s;
  s.kind = Kind::Sampled;
  s.field = std::move(phi);
  return s;
}

// ----------------------------------------------------------- ModelParams ----

Regime classify_regime(double m, int d) {
  if (m < 1.0) throw InvalidParameterError("classify_regime: m must be >= 1");
  if (d != 2 && d != 3)
    throw InvalidParameterError("classify_regime: d must be 2 or 3");
  return m > (d + 1) / 3.0 ? Regime::Supercritical : Regime::Subcritical;
}

void ModelParams::check_basic() const {
  classify_regime(m, d);  // validates m, d
  if (!(K2 > 0.0)) throw InvalidParameterError("model: K2 must be > 0");
  if (!(c_O > 0.0)) throw InvalidParameterError("model: c_O must be > 0");
  if (gamma < 0.0) throw InvalidParameterError("model: gamma must be >= 0");
}

// ------------------------------------------------------------ validation ----

namespace {

// chi' >= 0 on the sampled range.
HypothesisCheck check_chi(const SensitivitySpec& chi) {
  HypothesisCheck c{"chi_monotone"};
  switch (chi.kind) {
    case SensitivitySpec::Kind::Constant:
      c.pass = chi.chi0 >= 0.0;
      break;
    case SensitivitySpec::Kind::Power:
      c.pass = chi.chi0 >= 0.0 && chi.q >= 0.0;
      break;
    case SensitivitySpec::Kind::Sampled: {
      c.pass = true;
      for (std::size_t i = 1; i < chi.table.val.size(); ++i)
        if (chi.table.val[i] < chi.table.val[i - 1] - kSlack) c.pass = false;
      break;
    }
  }
  if (!c.pass) c.detail = "chi must be nondecreasing";
  return c;
}

HypothesisCheck check_k(const ConsumptionSpec& k) {
  HypothesisCheck c{"k_nonneg"};
  switch (k.kind) {
    case ConsumptionSpec::Kind::Linear:
    case ConsumptionSpec::Kind::Power:
      c.pass = k.kappa >= 0.0;
      break;
    case ConsumptionSpec::Kind::Sampled: {
      c.pass = std::fabs(k.table.val.front()) <= kSlack;
      for (double v : k.table.val)
        if (v < -kSlack) c.pass = false;
      break;
    }
  }
  if (!c.pass) c.detail = "k must satisfy k >= 0, k(0) = 0";
  return c;
}

HypothesisCheck check_f0(const GrowthSpec& f) {
  HypothesisCheck c{"f0_nonneg"};
  c.pass = f.eval(0.0) >= -kSlack;
  if (!c.pass) c.detail = "f(0) must be >= 0";
  return c;
}

// (asf1): f(y) <= f(0) + C y for some C >= 0.
HypothesisCheck check_asf1(const GrowthSpec& f) {
  HypothesisCheck c{"asf1"};
  switch (f.kind) {
    case GrowthSpec::Kind::Zero:
      c.pass = true;
      c.C = 0.0;
      break;
    case GrowthSpec::Kind::Fisher:
      c.pass = true;
      c.C = f.mu;  // mu y (1-y) <= mu y
      break;
    case GrowthSpec::Kind::AffineCapped:
      c.pass = true;
      c.C = std::max(0.0, f.slope);
      break;
    case GrowthSpec::Kind::Sampled: {
      double C = 0.0;
      double f0 = f.table.val.front();
      for (std::size_t i = 1; i < f.table.y.size(); ++i)
        C = std::max(C, (f.table.val[i] - f0) / f.table.y[i]);
      c.pass = true;
      c.C = C;
      break;
    }
  }
  return c;
}

// (asf2): f(y) + C_f y^2 <= f(0) + C y for some C_f > 0.
HypothesisCheck check_asf2(const GrowthSpec& f) {
  HypothesisCheck c{"asf2"};
  switch (f.kind) {
    case GrowthSpec::Kind::Zero:
      c.pass = false;
      c.detail = "f == 0 cannot dominate C_f y^2 for large y";
      break;
    case GrowthSpec::Kind::Fisher:
      c.pass = true;
      c.C_f = f.mu;  // mu y (1-y) + mu y^2 = mu y, exactly
      c.C = f.mu;
      break;
    case GrowthSpec::Kind::AffineCapped:
      c.pass = false;
      c.detail = "affine-capped growth decays at most linearly";
      break;
    case GrowthSpec::Kind::Sampled: {
      // feasibility search on the sampled range: fix C, take the worst C_f
      double f0 = f.table.val.front();
      double Cmin = 0.0;
      for (std::size_t i = 1; i < f.table.y.size(); ++i)
        Cmin = std::max(Cmin, (f.table.val[i] - f0) / f.table.y[i]);
      double best_Cf = 0.0, best_C = Cmin;
      for (double scale : {1.0, 1.1, 1.5, 2.0, 4.0}) {
        double C = Cmin * scale + (Cmin == 0.0 ? scale - 1.0 : 0.0);
        double Cf = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < f.table.y.size(); ++i) {
          double yv = f.table.y[i];
          Cf = std::min(Cf, (f0 + C * yv - f.table.val[i]) / (yv * yv));
        }
        if (Cf > best_Cf) {
          best_Cf = Cf;
          best_C = C;
        }
      }
      c.pass = best_Cf > kSlack;
      c.C_f = best_Cf;
      c.C = best_C;
      if (!c.pass) c.detail = "no positive C_f found on the sampled range";
      break;
    }
  }
  return c;
}

// (asfs): f(y) + 2 gamma y <= C for some C.
HypothesisCheck check_asfs(const GrowthSpec& f, double gamma) {
  HypothesisCheck c{"asfs"};
  if (!(gamma > 0.0)) {
    c.pass = false;
    c.detail = "gamma is not set";
    return c;
  }
  switch (f.kind) {
    case GrowthSpec::Kind::Zero:
      c.pass = false;
      c.detail = "2 gamma y is unbounded with f == 0";
      break;
    case GrowthSpec::Kind::Fisher: {
      c.pass = true;
      double s = f.mu + 2.0 * gamma;
      c.C = s * s / (4.0 * f.mu);  // max of (mu + 2g) y - mu y^2
      break;
    }
    case GrowthSpec::Kind::AffineCapped: {
      if (f.slope + 2.0 * gamma <= 0.0) {
        c.pass = true;
        // max of min(f0 + s y, cap) + 2 gamma y sits at 0 or at the kink
        double C = std::max(f.f0, f.eval(0.0));
        if (f.slope < 0.0 && f.cap > f.f0) {
          double kink = (f.cap - f.f0) / f.slope;  // negative slope: no kink > 0
          if (kink > 0.0) C = std::max(C, f.eval(kink) + 2.0 * gamma * kink);
        }
        c.C = C;
      } else {
        c.pass = false;
        c.detail = "slope + 2 gamma > 0 grows without bound";
      }
      break;
    }
    case GrowthSpec::Kind::Sampled: {
      std::size_t nseg = f.table.y.size();
      double tail_slope = (f.table.val[nseg - 1] - f.table.val[nseg - 2]) /
                          (f.table.y[nseg - 1] - f.table.y[nseg - 2]);
      if (tail_slope + 2.0 * gamma > kSlack) {
        c.pass = false;
        c.detail = "sampled growth trends unbounded beyond the table";
        break;
      }
      double C = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nseg; ++i)
        C = std::max(C, f.table.val[i] + 2.0 * gamma * f.table.y[i]);
      c.pass = true;
      c.C = C;
      break;
    }
  }
  return c;
}

}  // namespace

bool ValidationReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const HypothesisCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (regime == Regime::Supercritical ? "supercritical" : "subcritical")
     << " regime\n";
  for (const auto& c : checks) {
    os << "  (" << c.name << ") " << (c.pass ? "pass" : "FAIL");
    if (std::isfinite(c.C)) os << "  C=" << c.C;
    if (std::isfinite(c.C_f)) os << "  C_f=" << c.C_f;
    if (!c.detail.empty()) os << "  [" << c.detail << "]";
    os << "\n";
  }
  return os.str();
}

void ValidationReport::require_ok() const {
  for (const auto& c : checks)
    if (!c.pass)
      throw InvalidParameterError("hypothesis (" + c.name + ") failed: " +
                                  (c.detail.empty() ? "see report" : c.detail));
}

ValidationReport validate_hypotheses(const ModelParams& params, Purpose purpose) {
  params.check_basic();
  ValidationReport rep;
  rep.regime = params.regime();
  rep.checks.push_back(check_chi(params.chi));
  rep.checks.push_back(check_k(params.k));
  rep.checks.push_back(check_f0(params.f));
  if (rep.regime == Regime::Supercritical)
    rep.checks.push_back(check_asf1(params.f));
  else
    rep.checks.push_back(check_asf2(params.f));
  if (purpose == Purpose::Attractor) {
    HypothesisCheck b{"supercritical_regime"};
    b.pass = rep.regime == Regime::Supercritical;
    if (!b.pass) b.detail = "attractor theory needs m > (d+1)/3";
    rep.checks.push_back(b);
    rep.checks.push_back(check_asfs(params.f, params.gamma));
  }
  return rep;
}

GammaChoice admissible_gamma(const Grid& grid, double requested) {
  GammaChoice out;
  const double pi = std::numbers::pi;
  double lambda1 = pi * pi * (1.0 / (grid.Lx * grid.Lx) + 1.0 / (grid.Ly * grid.Ly));
  out.poincare_bound = lambda1 / 4.0;
  out.gamma = requested > 0.0 ? std::min(requested, out.poincare_bound)
                              : out.poincare_bound;
  return out;
}

}  // namespace bioflux
