#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oscflow/geometry.hpp"
#include "oscflow/signals.hpp"

namespace oscflow {

// Time-periodic unidirectional channel flow chi(x2, t) e1 carrying the flux
// phi(t) through (-1, 1), with pressure gradient factor psi(t). Each harmonic
// is a Chebyshev collocation solve of (i w k - nu d^2/dx2) chi_k = psi_k.
class PoiseuilleFlow {
 public:
  static constexpr int kDefaultOrder = 128;

  static PoiseuilleFlow solve(const PeriodicSignal& flowrate, const PhysicalParams& params,
                              int cheb_order = kDefaultOrder);

  const PeriodicSignal& flowrate() const { return flowrate_; }
  const PeriodicSignal& pressure_signal() const { return pressure_; }
  double pressure_factor(double t) const { return pressure_(t); }
  double period() const { return flowrate_.period(); }
  int max_harmonic() const { return flowrate_.max_harmonic(); }
  const PhysicalParams& params() const { return params_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  bool is_zero() const { return flowrate_.is_zero(); }

  // Per-harmonic profile values at x2 (k = 0..K). order 0..2 selects the x2
  // derivative of chi; order -1 selects S = int_{-1}^{x2} chi.
  Eigen::VectorXcd harmonics_at(double x2, int order = 0) const;
  // Nodal values of chi_k (rows = nodes, cols = k).
  const Eigen::MatrixXcd& nodal() const { return nodal_; }

  // d^dt/dt^dt of chi^{(order)}(x2, t).
  double value(double x2, double t, int order = 0, int dt = 0) const;
  // int_{-1}^{1} chi(x2, t) dx2 by Clenshaw-Curtis quadrature.
  double flux(double t) const;

 private:
  PeriodicSignal flowrate_;
  PeriodicSignal pressure_;
  PhysicalParams params_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd cc_weights_;
  Eigen::MatrixXcd nodal_;
  // Chebyshev coefficients of S, chi, chi', chi'' (cols = k)
  Eigen::MatrixXcd coeff_s_, coeff_[3];
};

// Evaluates one-sided harmonic values h_k as a real time signal at t,
// differentiated dt times.
double synthesize(const Eigen::VectorXcd& harmonics, double period, double t, int dt = 0);

struct NormRow {
  std::string name;
  double value = 0.0;
  double phi_norm = 0.0;
  double ratio = 0.0;  // value / phi_norm, zero when phi vanishes
};

// The nine space-time norms of chi grouped by the data norm
// ||phi||_{W^{1,2}}, ||phi||_{W^{2,2}}, ||phi||_{W^{3,2}} they are bounded by.
std::vector<NormRow> chi_norm_report(const PoiseuilleFlow& flow, int time_samples = 0);

}  // namespace oscflow
