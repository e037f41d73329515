#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oscflow/basis.hpp"

using namespace oscflow;

namespace {

struct Fixture {
  ChannelGeometry geom = ChannelGeometry::build(6.0, Rect{});
  PoiseuilleFlow flow = PoiseuilleFlow::solve(PeriodicSignal::sine(5.0, 0.05, 1, 0.05), PhysicalParams{}, 32);
  FluxCarrier carrier = FluxCarrier::build(flow, geom);
  QuadratureMesh mesh;
  GalerkinBasis basis;
  Fixture() {
    BasisOptions bo;
    bo.size = 5;
    basis = GalerkinBasis::prepare(geom, bo);
    MeshOptions mo;
    mo.h = 1.0 / 8.0;
    mo.extent = basis.support_x1() + 0.5;
    mo.breaks_x1 = basis.breaks_x1();
    mo.breaks_x2 = basis.breaks_x2();
    for (double b : carrier.breaks_x1()) mo.breaks_x1.push_back(b);
    for (double b : carrier.breaks_x2()) mo.breaks_x2.push_back(b);
    mesh = QuadratureMesh::build(geom, mo);
    basis.orthonormalize(mesh);
  }
};

}  // namespace

TEST_CASE("basis is orthonormal and solenoidal") {
  Fixture fx;
  const int n = fx.basis.size();
  REQUIRE(n == 5);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < fx.mesh.size(); ++i) {
    const auto f = fx.basis.fields(fx.mesh.x1(i), fx.mesh.x2(i));
    gram += fx.mesh.points()[i].w * f.leftCols(2) * f.leftCols(2).transpose();
    REQUIRE((f.col(2) + f.col(5)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("modes move rigidly with the body and vanish on the walls") {
  Fixture fx;
  const Rect& b = fx.geom.body();
  for (const auto& [x1, x2] : {std::pair{b.x1, 0.0}, {b.x0, 0.2}, {0.1, b.y1}, {-0.3, b.y0}}) {
    const auto f = fx.basis.fields(x1, x2);
    CHECK((f.col(0) - fx.basis.beta()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(f.col(1).cwiseAbs().maxCoeff() < 1e-12);
  }
  for (double x1 : {-1.5, 0.0, 2.0}) CHECK(fx.basis.fields(x1, 1.0).leftCols(2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fx.basis.fields(fx.basis.support_x1() + 0.1, 0.5).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assembled system has the expected structure") {
  Fixture fx;
  const ForcingData forces = ForcingData::build(fx.carrier, fx.mesh);
  AssemblyOptions ao;
  ao.samples = 32;
  const GalerkinSystem sys = assemble_system(fx.basis, forces, fx.mesh, ao);
  const int n = sys.size();
  CHECK((sys.A - sys.A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sys.A * sys.A_inv - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
  // skew symmetry holds to quadrature accuracy, loose on this coarse mesh
  CHECK(std::abs(sys.c_apply(a, a).dot(a)) < 1e-3 * std::pow(a.norm(), 3));
  CHECK((sys.c_contract_first(a).transpose() * a - sys.c_apply(a, a)).norm() < 1e-10);
  // the flow rate enters f linearly and quadratically, W linearly
  const GalerkinSystem half = sys.scaled_flow(0.5);
  CHECK((half.dW(0.3) - 0.5 * sys.dW(0.3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((sys.scaled_flow(0.0).f(0.3)).cwiseAbs().maxCoeff() == 0.0);
  const CqEstimate cq = estimate_cq(sys, forces.carrier().flow().flowrate().sobolev_norm(1), 3, 50);
  CHECK(cq.value > 0.0);
  CHECK(cq.value >= cq.sampled);
}
