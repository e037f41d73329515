#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oscflow/error.hpp"
#include "oscflow/periodic_ode.hpp"

using namespace oscflow;

TEST_CASE("substep choice follows the stiffness") {
  CHECK(choose_substeps(0.0, 1.0, 64) == 1);
  const int s = choose_substeps(1000.0, 1.0, 64);
  CHECK(1000.0 * (1.0 / 64) / s <= kStableStep);
}

TEST_CASE("integrate reproduces exponential decay") {
  IntegratorOptions o;
  o.steps = 32;
  const Integration r = integrate([](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(-2.0 * x); },
                                  Eigen::VectorXd::Ones(1), 1.0, o);
  CHECK(r.states.rows() == 65);
  CHECK(r.states(64, 0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-7));
  CHECK(r.halving_error < 1e-6);
}

TEST_CASE("periodic solution of a damped oscillator") {
  // z'' + 0.5 z' + 4 z = cos(t)
  const double T = 2.0 * M_PI;
  IntegratorOptions o;
  o.steps = 512;
  const auto sys = LinearPeriodicSystem::tabulate(
      2, T,
      [](double t, Eigen::MatrixXd& J, Eigen::VectorXd& r) {
        J << 0.0, 1.0, -4.0, -0.5;
        r << 0.0, std::cos(t);
      },
      o);
  const LinearSolution s = solve_linear_periodic(sys);
  // z = Re(exp(it) / (4 - 1 + 0.5 i))
  const cplx amp = 1.0 / cplx(3.0, 0.5);
  const int rows = static_cast<int>(s.states.rows());
  for (int i = 0; i < rows; i += 37) {
    const double t = T * i / (rows - 1);
    CHECK(s.states(i, 0) == doctest::Approx((amp * std::exp(cplx(0.0, t))).real()).epsilon(1e-9));
  }
  CHECK(s.defect < 1e-12);
  CHECK(s.mono.sigma_min > 0.1);
}

TEST_CASE("undamped oscillator at its natural period is resonant") {
  const IntegratorOptions o;
  const auto osc = decoupled_oscillator(1.0, 1.0, PeriodicSignal::sine(2.0 * M_PI, 1.0), o);
  CHECK(monodromy(osc).singular());
  try {
    solve_linear_periodic(osc);
    FAIL("expected a resonance error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResonantOrNonUnique);
  }
  const auto off = decoupled_oscillator(1.0, 1.0, PeriodicSignal::sine(1.3 * 2.0 * M_PI, 1.0), o);
  CHECK_FALSE(monodromy(off).singular());
  CHECK_NOTHROW(solve_linear_periodic(off));
}

TEST_CASE("zero trajectory has the requested grid") {
  Eigen::VectorXd beta(3);
  beta << 1.0, 0.5, 0.0;
  const PeriodicTrajectory z = PeriodicTrajectory::zero(2.0, beta, 16);
  CHECK(z.samples() == 16);
  CHECK(z.fine_samples() == 32);
  CHECK(z.modes() == 3);
  CHECK(z.sup_norm() == 0.0);
  CHECK(z.time(4) == doctest::Approx(0.5));
}
