// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <numeric>

#include <doctest.h>

#include "bioflux/grid.hpp"

using namespace bioflux;

namespace {

// small deterministic value stream for fixtures
double next_unit(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return double((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
}

ScalarField random_field(const Grid& g, std::uint64_t seed, double lo,
                         double hi) {
  ScalarField f(g);
  for (double& x : f.v) x = lo + (hi - lo) * next_unit(seed);
  return f;
}

double neumann_eigenvalue(const Grid& g, int k) {
  return 2.0 / (g.dx * g.dx) *
         (std::cos(k * std::numbers::pi * g.dx / g.Lx) - 1.0);
}

ScalarField cosine_mode(const Grid& g, int k) {
  ScalarField s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s.at(i, j) = std::cos(k * std::numbers::pi * g.xc(i) / g.Lx);
  return s;
}

}  // namespace

TEST_CASE("grid geometry") {
  Grid g(8, 4, 2.0, 1.0);
  CHECK(g.dx == doctest::Approx(0.25));
  CHECK(g.dy == doctest::Approx(0.25));
  CHECK(g.cells() == 32);
  CHECK(g.xc(0) == doctest::Approx(0.125));
  CHECK(g.xf(8) == doctest::Approx(2.0));
  CHECK_THROWS_AS(Grid(0, 4, 1.0, 1.0), InvalidParameterError);
  CHECK_THROWS_AS(Grid(4, 4, -1.0, 1.0), InvalidParameterError);
}

TEST_CASE("from_spacing preserves spacings bit for bit") {
  Grid g(7, 5, 1.1, 0.9);
  Grid h = Grid::from_spacing(g.nx, g.ny, g.dx, g.dy);
  CHECK(h.same_as(g));
  CHECK(h.dx == g.dx);
  CHECK(h.dy == g.dy);
}

TEST_CASE("pairwise reductions are exact and reproducible") {
  std::vector<double> a(1000);
  std::iota(a.begin(), a.end(), 1.0);
  CHECK(pairwise_sum(a.data(), a.size()) == 500500.0);

  std::uint64_t s = 7;
  std::vector<double> b(777);
  for (double& x : b) x = 2.0 * next_unit(s) - 1.0;
  double first = pairwise_sum(b.data(), b.size());
  CHECK(pairwise_sum(b.data(), b.size()) == first);  // bitwise repeatable

  long double ref = 0.0;
  for (double x : b) ref += x;
  CHECK(first == doctest::Approx(double(ref)).epsilon(1e-12));
  CHECK(pairwise_dot(b.data(), b.data(), b.size()) >= 0.0);
}

TEST_CASE("integrate and Lp norms") {
  Grid g(16, 16, 2.0, 2.0);
  ScalarField f(g, 3.0);
  CHECK(integrate(f) == doctest::Approx(12.0));  // 3 * |Omega|
  CHECK(norm_lp(f, 1.0) == doctest::Approx(12.0));
  CHECK(norm_lp(f, 2.0) == doctest::Approx(6.0));  // sqrt(9*4)
  CHECK(norm_lp(f, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(3.0));
  CHECK_THROWS_AS(norm_lp(f, 0.5), InvalidParameterError);
}

TEST_CASE("entropy") {
  Grid g(4, 4, 1.0, 1.0);
  ScalarField f(g, 2.0);
  CHECK(entropy(f) == doctest::Approx(2.0 * std::log(2.0)));
  ScalarField z(g, 0.0);
  CHECK(entropy(z) == 0.0);  // 0 ln 0 := 0
  z.at(1, 1) = -1e-3;
  CHECK_THROWS_AS(entropy(z), DomainError);
}

TEST_CASE("laplacian is exactly the composition of grad and div") {
  Grid g(12, 10, 1.5, 1.0);
  ScalarField s = random_field(g, 3, -1.0, 2.0);
  ScalarField direct = laplacian_neumann(s);
  ScalarField composed = div_from_faces(grad_to_faces(s));
  for (std::size_t k = 0; k < s.v.size(); ++k)
    CHECK(direct.v[k] == composed.v[k]);
}

TEST_CASE("zero-flux walls conserve the integral of the laplacian") {
  Grid g(16, 16, 1.0, 2.0);
  ScalarField s = random_field(g, 11, 0.0, 5.0);
  CHECK(integrate(laplacian_neumann(s)) == doctest::Approx(0.0).epsilon(1e-10).scale(1.0));
}

TEST_CASE("cell-centered cosines are discrete Neumann eigenfunctions") {
  Grid g(32, 8, 2.0, 1.0);
  for (int k : {1, 2, 5}) {
    ScalarField s = cosine_mode(g, k);
    double lam = neumann_eigenvalue(g, k);
    ScalarField ls = laplacian_neumann(s);
    for (std::size_t idx = 0; idx < s.v.size(); ++idx)
      CHECK(ls.v[idx] == doctest::Approx(lam * s.v[idx]).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("helmholtz solve inverts the eigenfunction relation") {
  Grid g(32, 32, 1.0, 1.0);
  double alpha = 10.0;
  int k = 3;
  double lam = neumann_eigenvalue(g, k);
  ScalarField s = cosine_mode(g, k);
  ScalarField rhs(g);
  for (std::size_t i = 0; i < rhs.v.size(); ++i)
    rhs.v[i] = (alpha - lam) * s.v[i];
  SpdSolution sol = solve_helmholtz(alpha, rhs, 1e-12, 500);
  CHECK(sol.residual <= 1e-12);
  for (std::size_t i = 0; i < s.v.size(); ++i)
    CHECK(sol.x.v[i] == doctest::Approx(s.v[i]).epsilon(1e-8).scale(1.0));
}

TEST_CASE("poisson solve: eigenfunction, zero mean, compatibility") {
  Grid g(32, 32, 1.0, 1.0);
  int k = 2;
  double lam = neumann_eigenvalue(g, k);
  ScalarField s = cosine_mode(g, k);
  ScalarField rhs(g);
  for (std::size_t i = 0; i < rhs.v.size(); ++i) rhs.v[i] = -lam * s.v[i];
  SpdSolution sol = solve_poisson(rhs, 1e-12, 1000);
  CHECK(integrate(sol.x) == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
  for (std::size_t i = 0; i < s.v.size(); ++i)
    CHECK(sol.x.v[i] == doctest::Approx(s.v[i]).epsilon(1e-7).scale(1.0));

  ScalarField bad(g, 1.0);  // nonzero mean is incompatible with pure Neumann
  CHECK_THROWS_AS(solve_poisson(bad, 1e-10, 1000), CompatibilityError);
}

TEST_CASE("solver is deterministic") {
  Grid g(64, 64, 1.0, 1.0);
  ScalarField rhs = random_field(g, 17, -1.0, 1.0);
  double mean = integrate(rhs) / (g.Lx * g.Ly);
  for (double& x : rhs.v) x -= mean;
  SpdSolution a = solve_poisson(rhs, 1e-11, 1000);
  SpdSolution b = solve_poisson(rhs, 1e-11, 1000);
  CHECK(a.iterations == b.iterations);
  for (std::size_t i = 0; i < a.x.v.size(); ++i) CHECK(a.x.v[i] == b.x.v[i]);
}

TEST_CASE("velocity seminorm with no-slip ghosts, hand-checked") {
  Grid g(4, 4, 1.0, 1.0);  // dx = dy, so the area/spacing weights are 1
  FaceVectorField u(g);
  u.ux(1, 0) = 1.0;  // single interior x-face
  // x-differences: two cells see +-1 -> 2; one interior y-difference: 1;
  // bottom ghost (u=-1, weight 1/2): 0.5*(2)^2 = 2
  CHECK(velocity_grad_sq(u) == doctest::Approx(5.0));
}

TEST_CASE("kinetic energy and face inner product") {
  Grid g(4, 4, 1.0, 1.0);
  FaceVectorField u(g);
  for (double& x : u.u) x = 2.0;
  // 20 x-faces, each 4, cell area 1/16
  CHECK(kinetic_energy(u) == doctest::Approx(0.5 * 20 * 4 * 0.0625));
  CHECK(face_inner(u, u) == doctest::Approx(20 * 4 * 0.0625));
  u.zero_boundary_normal();
  CHECK(u.ux(0, 0) == 0.0);
  CHECK(u.ux(4, 1) == 0.0);
  CHECK(u.ux(1, 0) == 2.0);
}
