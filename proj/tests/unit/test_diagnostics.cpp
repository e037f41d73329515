#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oscflow/diagnostics.hpp"
#include "oscflow/error.hpp"
#include "oscflow/solver.hpp"
#include "small_problem.hpp"

using namespace oscflow;

TEST_CASE("ledger rows carry signed slack") {
  const LedgerRow ok = make_row("a", "tag", 1.0, 2.0, true);
  CHECK(ok.pass);
  CHECK(ok.slack == doctest::Approx(1.0));
  const LedgerRow bad = make_row("b", "tag", 2.0, 1.0, false);
  CHECK_FALSE(bad.pass);
  CHECK(make_row("c", "tag", 1.0 + 1e-12, 1.0, true, 1e-9).pass);
}

TEST_CASE("delta keeps G between E and 3E") {
  PhysicalParams p;
  p.mass = 2.0;
  p.stiffness = 0.5;
  const double d = admissible_delta(1.3, 0.8, p);
  CHECK(d > 0.0);
  CHECK(d <= 1.0);
  CHECK_NOTHROW(verify_delta(p, 0.8, d, 5));
  CHECK_THROWS_AS(verify_delta(p, 0.8, 50.0, 5), Error);
}

TEST_CASE("strong root solves the quadratic") {
  const double r = strong_root(2.0, 3.0, 5.0);
  CHECK(2.0 * r * r + 3.0 * r - 5.0 == doctest::Approx(0.0));
  CHECK(strong_root(0.0, 4.0, 2.0) == doctest::Approx(0.5));
}

TEST_CASE("bumps vanish at their support edges") {
  const ChannelGeometry g = ChannelGeometry::build(6.0, Rect{});
  const auto bumps = default_bumps(g);
  REQUIRE(bumps.size() == 5);
  for (const Bump& b : bumps) {
    CHECK(b.value(b.c1, b.c2) == doctest::Approx(1.0));
    CHECK(b.value(b.c1 + b.radius, b.c2) == 0.0);
    CHECK(b.grad(b.c1, b.c2).norm() < 1e-14);
    const double e = 1e-6, x = b.c1 + 0.3 * b.radius, y = b.c2 - 0.2 * b.radius;
    CHECK(b.grad(x, y)(0) == doctest::Approx((b.value(x + e, y) - b.value(x - e, y)) / (2 * e)).epsilon(1e-6));
  }
  std::vector<double> x1, x2;
  bump_breaks(bumps, x1, x2);
  CHECK(x1.size() >= 2);
}

TEST_CASE("diagnostics of a small solve") {
  const SolveOutcome out = galerkin_solve(small_spec(0.1));
  const DiagnosticsBundle& d = out.diagnostics;
  const auto E = energy_E(out.result.solution, out.problem.spec.params);
  CHECK((E - d.E).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.energy.pass());
  CHECK(d.energy.telescoping < 1e-9);
  for (Eigen::Index j = 0; j < d.E.size(); ++j) {
    CHECK(d.G(j) >= d.E(j) * (1 - 1e-12));
    CHECK(d.G(j) <= 3.0 * d.E(j) * (1 + 1e-12));
  }
  CHECK(d.partial.c3 > 0.0);
  CHECK(d.strong.min_coefficient > 0.0);
  CHECK(d.smallness.weak_pass);
  CHECK(d.weak1 < 1e-5);
  CHECK(d.chi_norms.size() == 9);
  CHECK(d.force_bounds.size() == 6);
  CHECK_FALSE(d.stokes.has_value());
}

TEST_CASE("field checks on a small solve") {
  ProblemSpec s = small_spec(0.1);
  s.mesh_h = 1.0 / 16.0;
  s.field_checks = true;
  const SolveOutcome out = galerkin_solve(s);
  const DiagnosticsBundle& d = out.diagnostics;
  REQUIRE(d.stokes.has_value());
  CHECK(std::isfinite(d.stokes->sup));
  CHECK(d.weak2 < 1e-6);
  CHECK(d.energy_two_ways < 1e-8);
  REQUIRE(d.far_field.size() == 5);
  CHECK(d.far_field.back().beyond_support);
  CHECK(d.far_field.back().norm == 0.0);
  CHECK(out.gates_pass);
}
