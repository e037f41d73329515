#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "oscflow/error.hpp"
#include "oscflow/solver.hpp"
#include "small_problem.hpp"

using namespace oscflow;

TEST_CASE("fixed point configuration is validated") {
  FixedPointConfig c;
  CHECK_NOTHROW(c.validate());
  c.omega = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.alpha = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.integrator.steps = 2;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("small problem converges to a periodic fixed point") {
  const ProblemSpec s = small_spec(0.1);
  const Problem p = build_problem(s);
  CHECK(p.flow->flowrate().sobolev_norm(1) * p.cq.value == doctest::Approx(0.1));
  const FixedPointResult r = fixed_point(p.sys, s.fixed_point);
  CHECK(r.report.converged);
  CHECK(r.report.iterations <= 50);
  CHECK(r.report.history.back() <= s.fixed_point.tol);
  CHECK(r.report.defect < 1e-8);
  CHECK(r.report.failure.empty());
  const OdeResidual res = galerkin_residual(p.sys, r.solution, 1.0);
  CHECK(res.a_max < 1e-6);
  CHECK(res.z_max < 1e-6);
  const GalerkinLinearization lin(p.sys, 1.0, s.fixed_point.integrator);
  const PeriodicTrajectory again = apply_Phi(lin, r.solution);
  CHECK(trajectory_distance(p.sys, again, r.solution) < 1e-8 * (1.0 + trajectory_norm(p.sys, r.solution)));
}

TEST_CASE("zero data gives the zero solution") {
  ProblemSpec s = small_spec();
  s.flowrate = PeriodicSignal::zero(5.0);
  const SolveOutcome out = galerkin_solve(s);
  CHECK(out.result.report.converged);
  CHECK(out.result.solution.sup_norm() == 0.0);
  CHECK(out.diagnostics.energy.max_energy == 0.0);
}

TEST_CASE("homotopy energies grow with alpha") {
  const Problem p = build_problem(small_spec());
  const HomotopySweep h = homotopy_sweep(p.sys, {0.25, 0.5, 1.0}, p.spec.fixed_point);
  REQUIRE(h.rows.size() == 3);
  CHECK(h.all_converged);
  CHECK(h.rows[0].sup_energy < h.rows[1].sup_energy);
  CHECK(h.rows[1].sup_energy < h.rows[2].sup_energy);
  CHECK(h.max_sup_energy == h.rows[2].sup_energy);
  CHECK_THROWS_AS(homotopy_sweep(p.sys, {0.0}, p.spec.fixed_point), Error);
}

TEST_CASE("pipeline errors name their stage") {
  ProblemSpec s = small_spec();
  s.body = Rect{-0.5, 0.5, -0.5, 1.2};
  try {
    build_problem(s);
    FAIL("expected a geometry error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Geometry);
    CHECK(std::string(e.what()).rfind("geometry:", 0) == 0);
  }
}

TEST_CASE("large data ends in non-convergence unless warn-only") {
  ProblemSpec s = small_spec(10.0);
  s.fixed_point.max_iter = 15;
  try {
    galerkin_solve(s);
    FAIL("expected non-convergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
}

TEST_CASE("gate rows and resonance probe") {
  const SolveOutcome out = galerkin_solve(small_spec(0.1));
  CHECK(out.gates_pass);
  GateTolerances strict;
  strict.ode = 1e-30;
  bool any_failed = false;
  for (const auto& r : solve_checks(out, strict)) any_failed |= r.gate && !r.pass;
  CHECK(any_failed);

  ProblemSpec s = small_spec(0.1);
  s.steps = s.fixed_point.integrator.steps = 256;
  const auto rows = resonance_sweep(s, {1.0, 1.3});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].period == doctest::Approx(2.0 * M_PI));
  CHECK(rows[0].decoupled_singular);
  CHECK_FALSE(rows[1].decoupled_singular);
  CHECK(rows[0].coupled_converged);
  CHECK_THROWS_AS(resonance_sweep(s, {}), Error);
}
