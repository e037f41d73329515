#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "oscflow/error.hpp"
#include "oscflow/womersley.hpp"

using namespace oscflow;

namespace {

// Closed-form harmonic of the channel flow with unit flux amplitude:
// chi_k = (1 - cosh(lx)/cosh(l)) / (2 - 2 tanh(l)/l), l = sqrt(i w k / nu).
cplx exact_harmonic(double x, double wk, double nu) {
  const cplx l = std::sqrt(cplx(0.0, wk / nu));
  return (1.0 - std::cosh(l * x) / std::cosh(l)) / (2.0 - 2.0 * std::tanh(l) / l);
}

}  // namespace

TEST_CASE("steady flux gives the parabolic profile") {
  PhysicalParams p;
  p.mu = 0.3;
  const PoiseuilleFlow f = PoiseuilleFlow::solve(PeriodicSignal::constant(2.0, 2.0), p, 32);
  for (double x : {-0.9, -0.2, 0.0, 0.7}) CHECK(f.value(x, 0.1) == doctest::Approx(1.5 * (1.0 - x * x)));
  CHECK(f.value(0.3, 0.0, 1) == doctest::Approx(-3.0 * 0.3));
  CHECK(f.pressure_factor(0.5) == doctest::Approx(3.0 * p.nu()));
  CHECK(f.value(0.4, 0.5, -1) == doctest::Approx(1.5 * (1.4 - (0.064 + 1.0) / 3.0)));
}

TEST_CASE("oscillatory harmonic matches the closed form") {
  PhysicalParams p;
  const double T = 0.5, w = 2.0 * M_PI / T;
  const PeriodicSignal phi = PeriodicSignal::sine(T, 1.0, 2);  // c_2 = -i/2
  const PoiseuilleFlow f = PoiseuilleFlow::solve(phi, p, 96);
  for (double x : {-0.95, -0.5, 0.0, 0.3, 0.99}) {
    const cplx exact = cplx(0.0, -0.5) * exact_harmonic(x, 2.0 * w, p.nu());
    CHECK(std::abs(f.harmonics_at(x)(2) - exact) < 1e-10);
  }
  for (double t : {0.0, 0.13, 0.4}) {
    CHECK(f.flux(t) == doctest::Approx(phi(t)).epsilon(1e-12));
    CHECK(std::abs(f.value(1.0, t)) < 1e-12);
    CHECK(std::abs(f.value(-1.0, t)) < 1e-12);
  }
  // x2 momentum: chi_t = nu chi'' + psi
  const double t = 0.21, x = 0.37;
  CHECK(f.value(x, t, 0, 1) == doctest::Approx(p.nu() * f.value(x, t, 2) + f.pressure_factor(t)).epsilon(1e-9));
}

TEST_CASE("under-resolved Stokes layer is rejected") {
  PhysicalParams p;
  p.mu = 1e-4;
  CHECK_THROWS_AS(PoiseuilleFlow::solve(PeriodicSignal::sine(0.1, 1.0), p, 16), Error);
  CHECK_THROWS_AS(PoiseuilleFlow::solve(PeriodicSignal::sine(1.0, 1.0), PhysicalParams{}, 4), Error);
}

TEST_CASE("norm report is linear in the flow rate") {
  PhysicalParams p;
  const PeriodicSignal phi = PeriodicSignal::sine(2.0, 1.0, 1, 0.5);
  const auto a = chi_norm_report(PoiseuilleFlow::solve(phi, p, 32), 32);
  const auto b = chi_norm_report(PoiseuilleFlow::solve(phi.scaled(-2.0), p, 32), 32);
  REQUIRE(a.size() == 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value > 0.0);
    CHECK(b[i].value == doctest::Approx(2.0 * a[i].value));
    CHECK(b[i].ratio == doctest::Approx(a[i].ratio));
  }
  const auto z = chi_norm_report(PoiseuilleFlow::solve(PeriodicSignal::zero(2.0), p, 32), 32);
  for (const auto& r : z) CHECK(r.ratio == 0.0);
}
