#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oscflow/carrier.hpp"

using namespace oscflow;

namespace {

struct Fixture {
  ChannelGeometry geom = ChannelGeometry::build(6.0, Rect{});
  PoiseuilleFlow flow = PoiseuilleFlow::solve(PeriodicSignal::sine(3.0, 0.4, 1, 0.6), PhysicalParams{}, 48);
  FluxCarrier carrier = FluxCarrier::build(flow, geom);
};

}  // namespace

TEST_CASE("carrier is divergence free and matches the channel flow far away") {
  Fixture fx;
  using F = FluxCarrier;
  for (double x1 : {-2.0, -0.7, 0.0, 0.55, 1.3})
    for (double x2 : {-0.95, -0.6, 0.6, 0.8})
      for (double t : {0.0, 1.1}) {
        const auto v = fx.carrier.sample(x1, x2, t);
        CHECK(std::abs(v[F::kV1x1] + v[F::kV2x2]) < 1e-12);
      }
  for (double x1 : {-5.0, fx.geom.x0(), 3.0}) {
    const auto v = fx.carrier.sample(x1, 0.3, 0.7);
    CHECK(v[F::kV1] == doctest::Approx(fx.flow.value(0.3, 0.7)));
    CHECK(v[F::kV2] == 0.0);
  }
}

TEST_CASE("carrier vanishes on the body and the walls") {
  Fixture fx;
  using F = FluxCarrier;
  const Rect& b = fx.geom.body();
  for (double s : {-0.5, -0.1, 0.3, 0.5}) {
    for (const auto& [x1, x2] : {std::pair{b.x0, s}, {b.x1, s}, {s, b.y0}, {s, b.y1}}) {
      const auto v = fx.carrier.sample(x1, x2, 0.4);
      CHECK(std::abs(v[F::kV1]) < 1e-12);
      CHECK(std::abs(v[F::kV2]) < 1e-12);
    }
    CHECK(std::abs(fx.carrier.sample(3 * s, 1.0, 0.4)[F::kV1]) < 1e-12);
  }
  CHECK(fx.carrier.r_in() > 0.0);
  CHECK(fx.carrier.r_out() > fx.carrier.r_in());
  CHECK_FALSE(fx.carrier.in_cutoff_box(fx.geom.x0() + 0.1, 0.0));
}

TEST_CASE("sampler agrees with pointwise evaluation") {
  Fixture fx;
  const int m = 16;
  CarrierSampler sampler(fx.carrier, m, 1);
  const double x1 = 0.8, x2 = -0.7;
  sampler.load_row(fx.carrier.row(x2));
  const Jet b1 = fx.carrier.b1(x1);
  for (int j = 0; j < m; j += 5) {
    const double t = fx.flow.period() * j / m;
    const auto a = sampler.fields(j, b1);
    const auto b = fx.carrier.sample(x1, x2, t);
    for (int f = FluxCarrier::kV1; f < FluxCarrier::kFieldCount; ++f) CHECK(a[f] == doctest::Approx(b[f]).epsilon(1e-10));
  }
  CHECK_THROWS(sampler.fields(0, b1, 2));
}

TEST_CASE("body force and forcing data") {
  Fixture fx;
  MeshOptions mo;
  mo.h = 0.125;
  const QuadratureMesh mesh = QuadratureMesh::build(fx.geom, mo);
  BodyForce bf;
  bf.signal = PeriodicSignal::sine(3.0, 1.0);
  bf.c1 = 2.0;
  bf.c2 = 0.0;
  bf.radius = 0.5;
  CHECK(bf.active());
  CHECK(bf.bump(2.0, 0.0) == doctest::Approx(1.0));
  CHECK(bf.bump(2.6, 0.0) == 0.0);
  const ForcingData fd = ForcingData::build(fx.carrier, mesh, bf, PeriodicSignal::constant(3.0, 0.25));
  CHECK(fd.g()(0.3) == doctest::Approx(fd.g_carrier()(0.3) + 0.25));
  const Eigen::Vector2d total = fd.f(2.0, 0.0, 0.75);
  const Eigen::Vector2d carrier_part = fd.f_carrier(2.0, 0.0, 0.75);
  CHECK(total(0) - carrier_part(0) == doctest::Approx(bf.signal(0.75)));
  // beyond the cutoff the carrier is an exact channel flow, so it needs no force
  CHECK(fd.f_carrier(4.0, 0.3, 0.75).norm() < 1e-12);
  const ForceNorms n = force_norms(fd, mesh, 16);
  CHECK(n.exterior_l2l2 < 1e-12);
  CHECK(n.ft_l2l2 > 0.0);
  const auto rows = force_bound_report(fd, n);
  CHECK(rows.size() == 6);
  for (const auto& r : rows) CHECK(r.pass);
}
