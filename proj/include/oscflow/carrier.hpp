#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "oscflow/geometry.hpp"
#include "oscflow/signals.hpp"
#include "oscflow/womersley.hpp"

namespace oscflow {

struct CarrierOptions {
  // Cutoff radii around the body in the max norm; zero picks defaults that
  // keep the support clear of the walls.
  double r_in = 0.0;
  double r_out = 0.0;
};

// Divergence-free extension V = curl Psi of the channel flow chi e1 into the
// domain with the body, built from the stream function
//   Psi = S(x2, t) + B1(x1) (c(t) - S(x2, t)) B2(x2),
// with S = int_{-1}^{x2} chi and c(t) = S at the body's vertical center.
// V vanishes on the body and walls and equals chi e1 outside the cutoff box.
class FluxCarrier {
 public:
  enum Field { kStream, kV1, kV2, kV1x1, kV1x2, kV2x1, kV2x2, kLapV1, kLapV2, kFieldCount };
  using FieldHarmonics = Eigen::Matrix<cplx, kFieldCount, Eigen::Dynamic>;
  using FieldValues = std::array<double, kFieldCount>;

  // One-sided harmonics (k = 0..K) of the x2-dependent factors at one height.
  struct Row {
    Eigen::VectorXcd s;                  // S = int_{-1}^{x2} chi
    Eigen::VectorXcd chi, dchi, ddchi;   // chi, chi', chi''
    Eigen::VectorXcd h, dh, ddh, dddh;   // H = (c - S) B2 and its x2 derivatives
  };

  static FluxCarrier build(const PoiseuilleFlow& flow, const ChannelGeometry& geom,
                           const CarrierOptions& opts = {});

  const PoiseuilleFlow& flow() const { return flow_; }
  const ChannelGeometry& geometry() const { return geom_; }
  double r_in() const { return r_in_; }
  double r_out() const { return r_out_; }
  Jet b1(double x1) const;
  Jet b2(double x2) const;
  bool in_cutoff_box(double x1, double x2) const;
  std::vector<double> breaks_x1() const;
  std::vector<double> breaks_x2() const;

  Row row(double x2) const;
  // Same data for many heights.
  std::vector<Row> rows(const std::vector<double>& x2) const;
  static FieldHarmonics fields(const Row& row, const Jet& b1);
  FieldHarmonics fields_at(double x1, double x2) const { return fields(row(x2), b1(x1)); }
  // Real field values at time t, differentiated dt times in time.
  FieldValues sample(double x1, double x2, double t, int dt = 0) const;

 private:
  PoiseuilleFlow flow_;
  ChannelGeometry geom_;
  double r_in_ = 0.0, r_out_ = 0.0;
  Eigen::VectorXcd c_;  // harmonics of c(t)
};

// Carrier values on a uniform time grid, factored into per-height time series
// so a whole row of points is cheap. One instance per worker thread.
class CarrierSampler {
 public:
  static constexpr int kRowFuncs = 7;  // chi, chi', chi'', H, H', H'', H'''

  CarrierSampler(const FluxCarrier& carrier, int samples, int max_dt = 2);

  int samples() const { return samples_; }
  void load_row(const FluxCarrier::Row& row);
  // Field values at time index m for a point of the loaded row.
  FluxCarrier::FieldValues fields(int m, const Jet& b1, int dt = 0) const;
  // Carrier part of f at time index m, dt = 0 or 1.
  Eigen::Vector2d force(int m, const Jet& b1, int dt = 0) const;

 private:
  const FluxCarrier* carrier_;
  int samples_;
  int max_dt_;
  Eigen::MatrixXcd phases_;            // (K+1) x samples, exp(i w k t_m)
  Eigen::MatrixXd pressure_;           // samples x 3, d^j psi / dt^j
  Eigen::MatrixXd series_[3];          // samples x kRowFuncs for dt = 0..2
};

// Smooth external body force tilde f = s(t) b(x) (dir1, dir2), b a tensor
// quintic bump of half width `radius` centered at (c1, c2).
struct BodyForce {
  PeriodicSignal signal;
  double c1 = 0.0, c2 = 0.0, radius = 0.0;
  double dir1 = 1.0, dir2 = 0.0;

  bool active() const { return radius > 0.0 && !signal.is_zero(); }
  double bump(double x1, double x2) const;
  std::vector<double> breaks_x1() const;
  std::vector<double> breaks_x2() const;
};

// Force data f and g after the flux carrier has been subtracted.
class ForcingData {
 public:
  // g is integrated on the boundary rule of `mesh`.
  static ForcingData build(const FluxCarrier& carrier, const QuadratureMesh& mesh,
                           const BodyForce& f_tilde = {}, const PeriodicSignal& g_tilde = {});

  const FluxCarrier& carrier() const { return carrier_; }
  const PeriodicSignal& g() const { return g_; }
  const PeriodicSignal& g_carrier() const { return g_carrier_; }
  const PeriodicSignal& g_tilde() const { return g_tilde_; }
  const BodyForce& f_tilde() const { return f_tilde_; }

  // Harmonics of nu Lap V - dV/dt + psi e1, the part of f linear in V.
  static Eigen::Matrix<cplx, 2, Eigen::Dynamic> linear_harmonics(
      const FluxCarrier::FieldHarmonics& fields, const PoiseuilleFlow& flow);
  // Carrier part of f (no tilde f) and the full f, dt-th time derivative.
  Eigen::Vector2d f_carrier(double x1, double x2, double t, int dt = 0) const;
  Eigen::Vector2d f(double x1, double x2, double t, int dt = 0) const;

 private:
  FluxCarrier carrier_;
  BodyForce f_tilde_;
  PeriodicSignal g_tilde_, g_carrier_, g_;
};

struct ForceNorms {
  double f_l2l2 = 0.0, f_linf = 0.0, dfdt_linf = 0.0;     // carrier part of f
  double ft_l2l2 = 0.0, ft_linf = 0.0, dftdt_linf = 0.0;  // tilde f
  double total_l2l2 = 0.0, total_linf = 0.0, total_dt_linf = 0.0;
  double exterior_l2l2 = 0.0;  // carrier part of f on |x1| >= X0
  // per sample time: ||f + tilde f||^2, ||d/dt (f + tilde f)||^2, ||grad V||^2 over the mesh
  Eigen::VectorXd total_sq, total_dt_sq, grad_v_sq;
};

// Space-time norms of f by mesh quadrature over `time_samples` uniform times.
ForceNorms force_norms(const ForcingData& forces, const QuadratureMesh& mesh, int time_samples);

struct BoundRow {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;  // fitted carrier constant
  double slack = 0.0;     // rhs - lhs
  bool pass = true;
};

// Both sides of the six force bounds with carrier constants fitted from this
// data: ||f|| <= c ||phi|| + ||tilde f|| and likewise for g and time derivatives.
std::vector<BoundRow> force_bound_report(const ForcingData& forces, const QuadratureMesh& mesh,
                                         int time_samples = 0);
std::vector<BoundRow> force_bound_report(const ForcingData& forces, const ForceNorms& norms);

}  // namespace oscflow
