#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oscflow/error.hpp"
#include "oscflow/signals.hpp"

using namespace oscflow;

TEST_CASE("analyze recovers harmonics of sampled data") {
  const int m = 32;
  std::vector<double> x(m);
  for (int j = 0; j < m; ++j) {
    const double t = 2.0 * M_PI * j / m;
    x[j] = 0.5 + std::cos(t) - 2.0 * std::sin(3.0 * t);
  }
  const auto c = fourier::analyze(x, 5);
  CHECK(c[0].real() == doctest::Approx(0.5));
  CHECK(c[1].real() == doctest::Approx(0.5));
  CHECK(std::abs(c[3] - cplx(0.0, 1.0)) < 1e-14);
  CHECK(std::abs(c[2]) < 1e-14);
  CHECK_THROWS_AS(fourier::analyze(x, 16), Error);
}

TEST_CASE("sine signal values, derivative and norms") {
  const double T = 3.0, w = 2.0 * M_PI / T;
  const PeriodicSignal s = PeriodicSignal::sine(T, 2.0, 2, 0.5);
  CHECK(s(0.4) == doctest::Approx(2.0 * std::sin(2 * w * 0.4) + 0.5));
  CHECK(s.derivative(1)(0.4) == doctest::Approx(4.0 * w * std::cos(2 * w * 0.4)));
  CHECK(s.max_harmonic() == 2);
  // |s|^2 = T (a^2/2 + offset^2), |s'|^2 = T a^2 (2w)^2 / 2
  const double l2 = T * (2.0 + 0.25), h1 = T * 2.0 * 4.0 * w * w;
  CHECK(s.l2_norm() == doctest::Approx(std::sqrt(l2)));
  CHECK(s.sobolev_norm(1) == doctest::Approx(std::sqrt(l2 + h1)));
  CHECK(s.sup_norm() == doctest::Approx(2.5).epsilon(1e-3));
}

TEST_CASE("harmonic input is checked for conjugate symmetry") {
  const std::vector<Harmonic> ok{{0, cplx(1.0)}, {1, cplx(0.0, -0.5)}, {-1, cplx(0.0, 0.5)}};
  const PeriodicSignal s = PeriodicSignal::make(1.0, ok);
  CHECK(s(0.25) == doctest::Approx(1.0 + 1.0));
  const std::vector<Harmonic> bad{{1, cplx(1.0, 0.0)}, {-1, cplx(2.0, 0.0)}};
  CHECK_THROWS_AS(PeriodicSignal::make(1.0, bad), Error);
  const std::vector<Harmonic> complex_mean{{0, cplx(1.0, 1.0)}};
  CHECK_THROWS_AS(PeriodicSignal::make(1.0, complex_mean), Error);
  CHECK_THROWS_AS(PeriodicSignal::constant(-1.0, 1.0), Error);
}

TEST_CASE("default signal is zero with a usable grid") {
  const PeriodicSignal s;
  CHECK(s.is_zero());
  CHECK(s.grid_size() == PeriodicSignal::kDefaultGrid);
  CHECK(s.with_period(4.0).period() == 4.0);
}

TEST_CASE("antiderivative, scaling, period change and sums") {
  const PeriodicSignal s = PeriodicSignal::sine(2.0, 1.0);
  const PeriodicSignal p = s.antiderivative();
  CHECK(p.derivative(1)(0.3) == doctest::Approx(s(0.3)));
  CHECK_THROWS_AS(PeriodicSignal::constant(1.0, 1.0).antiderivative(), Error);
  CHECK(s.scaled(3.0)(0.7) == doctest::Approx(3.0 * s(0.7)));
  CHECK(s.with_period(4.0)(1.4) == doctest::Approx(s(0.7)));
  CHECK(s.plus(PeriodicSignal::constant(2.0, 1.0))(0.7) == doctest::Approx(s(0.7) + 1.0));
  CHECK_THROWS_AS(s.plus(PeriodicSignal::constant(1.0, 1.0)), Error);
}

TEST_CASE("from_samples and json round trip") {
  const PeriodicSignal s = PeriodicSignal::sine(1.5, 0.3, 3, -0.1);
  const PeriodicSignal r = PeriodicSignal::from_samples(1.5, s.grid_samples(), 8);
  const PeriodicSignal j = PeriodicSignal::from_json(s.to_json());
  for (double t : {0.0, 0.21, 1.1}) {
    CHECK(r(t) == doctest::Approx(s(t)).epsilon(1e-12));
    CHECK(j(t) == doctest::Approx(s(t)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(PeriodicSignal::from_json("{\"T\": 1}"), Error);
}

TEST_CASE("trigonometric interpolant differentiates smooth data") {
  const int m = 16;
  Eigen::MatrixXd x(m, 1);
  for (int j = 0; j < m; ++j) x(j, 0) = std::sin(2.0 * M_PI * j / m);
  const fourier::TrigInterpolant ip(x, 1.0);
  CHECK(ip(0.1)(0) == doctest::Approx(std::sin(0.2 * M_PI)));
  CHECK(ip(0.1, 1)(0) == doctest::Approx(2.0 * M_PI * std::cos(0.2 * M_PI)));
}
