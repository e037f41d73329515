#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oscflow/chebyshev.hpp"
#include "oscflow/error.hpp"
#include "oscflow/geometry.hpp"

using namespace oscflow;

TEST_CASE("channel geometry constants and validation") {
  const ChannelGeometry g = ChannelGeometry::build(6.0, Rect{});
  CHECK(g.x0() == doctest::Approx(std::sqrt(2.0) + 1.0));
  CHECK(g.margin() == doctest::Approx(0.5));
  CHECK(g.fluid_area() == doctest::Approx(23.0));
  CHECK(g.perimeter() == doctest::Approx(4.0));
  CHECK(g.in_fluid(0.0, 0.8));
  CHECK_FALSE(g.in_fluid(0.0, 0.0));
  CHECK_THROWS_AS(ChannelGeometry::build(6.0, Rect{-0.5, 0.5, -0.5, 1.0}), Error);
  CHECK_THROWS_AS(ChannelGeometry::build(3.0, Rect{}), Error);
  CHECK_THROWS_AS(ChannelGeometry::build(6.0, Rect{0.5, -0.5, -0.5, 0.5}), Error);
  PhysicalParams p;
  p.mu = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  CHECK(PhysicalParams{}.natural_period() == doctest::Approx(2.0 * M_PI));
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n - 1") {
  std::vector<double> x, w;
  quad::gauss_legendre(5, x, w);
  double s0 = 0.0, s8 = 0.0, s9 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s8 += w[i] * std::pow(x[i], 8);
    s9 += w[i] * std::pow(x[i], 9);
  }
  CHECK(s0 == doctest::Approx(2.0));
  CHECK(s8 == doctest::Approx(2.0 / 9.0));
  CHECK(std::abs(s9) < 1e-15);
}

TEST_CASE("Chebyshev differentiation and Clenshaw-Curtis weights") {
  const Eigen::VectorXd x = cheb::nodes(16);
  CHECK(x(0) == 1.0);
  CHECK(x(16) == -1.0);
  const Eigen::VectorXd f = x.array().cube();
  const Eigen::VectorXd df = cheb::diff_matrix(16) * f;
  CHECK((df.array() - 3.0 * x.array().square()).abs().maxCoeff() < 1e-12);
  CHECK(cheb::clenshaw_curtis_weights(16).dot(x.array().square().matrix()) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("smoothstep and interval cutoff") {
  CHECK(smoothstep(-1.0).v == 0.0);
  CHECK(smoothstep(2.0).v == 1.0);
  CHECK(smoothstep(0.5).v == doctest::Approx(0.5));
  CHECK(smoothstep(0.0).d1 == 0.0);
  CHECK(smoothstep(1.0).d2 == doctest::Approx(0.0));
  CHECK(interval_cutoff(0.2, -0.5, 0.5, 0.1, 0.4).v == 1.0);
  CHECK(interval_cutoff(0.55, -0.5, 0.5, 0.1, 0.4).v == 1.0);
  CHECK(interval_cutoff(1.0, -0.5, 0.5, 0.1, 0.4).v == 0.0);
  const Jet j = interval_cutoff(0.75, -0.5, 0.5, 0.1, 0.4);
  CHECK(j.v > 0.0);
  CHECK(j.v < 1.0);
  CHECK(j.d1 < 0.0);
}

TEST_CASE("quadrature mesh covers the fluid domain") {
  const ChannelGeometry g = ChannelGeometry::build(5.0, Rect{});
  MeshOptions o;
  o.h = 0.125;
  const QuadratureMesh m = QuadratureMesh::build(g, o);
  CHECK(m.total_weight() == doctest::Approx(g.fluid_area()));
  double perimeter = 0.0, n_int = 0.0, x1n1 = 0.0;
  for (const auto& b : m.boundary()) {
    perimeter += b.w;
    n_int += b.w * b.n1;
    x1n1 += b.w * b.x1 * b.n1;
  }
  CHECK(perimeter == doctest::Approx(g.perimeter()));
  CHECK(std::abs(n_int) < 1e-14);
  CHECK(x1n1 == doctest::Approx(g.body().area()));
  for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(g.in_fluid(m.x1(i), m.x2(i)));
  o.h = 0.0;
  CHECK_THROWS_AS(QuadratureMesh::build(g, o), Error);
}
