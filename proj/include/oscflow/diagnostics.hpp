#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oscflow/basis.hpp"
#include "oscflow/carrier.hpp"
#include "oscflow/periodic_ode.hpp"

namespace oscflow {

// One inequality or identity of the ledger with signed slack (rhs - lhs).
struct LedgerRow {
  std::string id;
  std::string ref;  // neutral tag of the estimate the row mirrors
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = true;
  bool gate = false;  // hard gate or reported only
};

LedgerRow make_row(std::string id, std::string ref, double lhs, double rhs, bool gate, double rel_tol = 0.0);

// ---- natural and particular energies -------------------------------------

// E = (rho |a|^2 + m z'^2 + k z^2) / 2 on the coarse grid.
Eigen::VectorXd energy_E(const PeriodicTrajectory& traj, const PhysicalParams& params);
// Same from a field quadrature of |v|^2 on `mesh`, every `stride` samples.
Eigen::VectorXd energy_E_field(const PeriodicTrajectory& traj, const GalerkinBasis& basis,
                               const QuadratureMesh& mesh, const PhysicalParams& params, int stride);

// min{1, 1/|psi_1|, 1/beta_1, k/(rho |psi_1| + m beta_1)}
double admissible_delta(double psi1_norm, double beta1, const PhysicalParams& params);
// G = rho|v|^2 + m z'^2 + k z^2 + delta rho z (v, psi_1) + delta m beta_1 z z'
double energy_G(double v_sq, double v_psi1, double zdot, double z, double beta1,
                const PhysicalParams& params, double delta);
Eigen::VectorXd energy_G(const PeriodicTrajectory& traj, const PhysicalParams& params, double delta);
// Throws Inconsistent unless E <= G <= 3E on `probes` random states.
void verify_delta(const PhysicalParams& params, double beta1, double delta, unsigned long long seed,
                  int probes = 1000);

// ---- energy identity -----------------------------------------------------

struct EnergyIdentity {
  double max_residual = 0.0;  // at the half-grid points
  double max_energy = 0.0;
  double cubic_max = 0.0;     // rho |c(a, a) . a|
  double telescoping = 0.0;   // max(|int_0^T dE/dt|, |E(T) - E(0)|) / (1 + max E)
  Eigen::VectorXd residual;
  bool pass(double tol = 1e-6) const { return max_residual <= tol * (1.0 + max_energy); }
};

// dE/dt + rho a.b a + rho a.dW a - alpha rho f.a - alpha g z' at the half-grid,
// with dE/dt from the trigonometric interpolant of E on the coarse grid.
EnergyIdentity check_energy_identity(const PeriodicTrajectory& traj, const GalerkinSystem& sys, double alpha);

// ---- dissipation bounds --------------------------------------------------

struct PartialBound {
  double lhs = 0.0;        // int |grad v|^2 + int z'^2
  double rhs_data = 0.0;   // int ||f||^2 + int g^2 (alpha included)
  double c3 = 0.0;
  bool zero_data = false;
  bool drift = false;      // c3 above twice the stored calibration
};

// `f_sq` holds ||f(t)||^2 on the coarse grid of the trajectory.
PartialBound check_partial_bound(const PeriodicTrajectory& traj, const GalerkinSystem& sys,
                                 const Eigen::VectorXd& f_sq, double alpha, double calibrated_c3 = 0.0);

struct ParticularEnergy {
  double delta = 0.0;
  double c5 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0;
  double int_sqrt_g = 0.0, sup_sqrt_g = 0.0, sup_e = 0.0;
  double t0 = 0.0;  // T sqrt(G(t0)) = int sqrt(G)
  double equivalence_min = 0.0;  // min (G - E) / (1 + E)
  double equivalence_max = 0.0;  // max (G - 3E) / (1 + E)
  std::vector<LedgerRow> rows;
};

// `grad_v_sq` holds ||grad V(t)||^2 on the coarse grid.
ParticularEnergy check_particular_energy(const PeriodicTrajectory& traj, const GalerkinSystem& sys,
                                         const Eigen::VectorXd& f_sq, const Eigen::VectorXd& grad_v_sq,
                                         double alpha, double delta);

// ---- smallness -----------------------------------------------------------

struct StrongConstants {
  double c3 = 0.0, cf = 0.0, cg = 0.0;
  double c8 = 0.0, c9 = 0.0, c10 = 0.0;
  double strong2_lhs = 0.0;  // left side of the second strong condition
  bool available = false;
};

struct SmallnessInput {
  double phi_w12 = 0.0, phi_w22 = 0.0;
  double ft_l2l2 = 0.0, gt_l2 = 0.0;
  double period = 1.0;
  PhysicalParams params;
  double cq = 0.0;
  bool cq_available = false;
  StrongConstants strong;
};

struct SmallnessReport {
  std::vector<LedgerRow> rows;  // ratio lhs / rhs is the margin; < 1 passes
  bool weak_pass = true;
  bool strong_pass = true;
  double weak_ratio = 0.0;
};

// Positive root (c9 - sqrt(c9^2 + 4 c10 c8)) / (-2 c8), c10 / c9 when c8 = 0.
double strong_root(double c8, double c9, double c10);
SmallnessReport smallness_report(const SmallnessInput& in);

// ---- time regularity ------------------------------------------------------

struct StrongRegularityReport {
  Eigen::VectorXd vprime_sq, zddot, grad_vprime_sq, grad_v;  // coarse grid
  Eigen::VectorXd coefficient;  // c10 - c9 |grad v| - c8 |grad v|^2
  double c8 = 0.0, c9 = 0.0, c10 = 0.0, c12 = 0.0, c13 = 0.0, C14 = 0.0;
  double nu_b = 0.0, kappa = 0.0, poincare = 0.0;
  double min_coefficient = 0.0;
  double delta_prime = 0.0;
  double t_star = 0.0, t_bar = 0.0;
  bool t_bar_found = false;
  double sup_prime = 0.0;  // sup |v'|^2 + (m/rho) z''^2
  double strong2_lhs = 0.0;
  std::vector<LedgerRow> rows;
};

struct DataNorms {
  double phi_w12 = 0.0, phi_w22 = 0.0;
  double f_linf = 0.0, g_linf = 0.0, dg_linf = 0.0, df_linf = 0.0;
  Eigen::VectorXd dg_sq, df_sq;  // |g'(t)|^2 and ||f'(t)||^2 on the coarse grid
};

StrongRegularityReport strong_regularity_monitor(const PeriodicTrajectory& traj, const GalerkinSystem& sys,
                                                 double cq, const DataNorms& data);

// ---- right-hand side of the stationary problem ----------------------------

struct StokesRhs {
  Eigen::VectorXd norms;  // ||h(t)|| on the sampled times
  std::vector<double> times;
  double sup = 0.0;
  double theta_flux = 0.0;  // int_Gamma n1 theta dS
};

// h = f - v_t - V.grad v - v.grad V + z' d1 (v + V) + grad w with
// w = (m z'' - k z - g) theta / (rho int_Gamma n1 theta), theta = x1 B1(x1) B2(x2).
StokesRhs stokes_rhs_norm(const PeriodicTrajectory& traj, const GalerkinBasis& basis,
                          const ForcingData& forces, const QuadratureMesh& mesh, double alpha, int stride);

// ---- far field -------------------------------------------------------------

struct FarFieldRow {
  double x = 0.0;
  double norm = 0.0;  // ||v||_{L2(0,T; L3(|x1| > X))}
  bool beyond_support = false;
};

std::vector<FarFieldRow> far_field_decay(const PeriodicTrajectory& traj, const GalerkinBasis& basis,
                                         const QuadratureMesh& mesh, const std::vector<double>& xs,
                                         int stride);

// ---- weak formulation -------------------------------------------------------

struct WeakResiduals {
  double weak1 = 0.0;  // max over test modes and time functions
  double weak2 = 0.0;  // max over bumps and sampled times
  int weak1_tests = 0;
  int weak2_bumps = 0;
};

// Space-time identity against (psi_kappa, eta), kappa < modes, eta in
// {1, cos(2 pi k t/T), sin(2 pi k t/T)}, k <= harmonics, in coefficient form.
// Each residual is divided by 1 + the integral of its absolute integrand.
double weak1_residual(const PeriodicTrajectory& traj, const GalerkinSystem& sys, double alpha, int modes,
                      int harmonics, int* tests = nullptr);

// theta = ((1 - s^2)(1 - t^2))^3 with s, t the offsets scaled by `radius`, on a square.
struct Bump {
  double c1 = 0.0, c2 = 0.0, radius = 0.0;
  double value(double x1, double x2) const;
  Eigen::Vector2d grad(double x1, double x2) const;
};
// Five bumps: three centered on the body surface, two in the fluid.
std::vector<Bump> default_bumps(const ChannelGeometry& geom);
// Support edges, to be added as mesh breaklines.
void bump_breaks(const std::vector<Bump>& bumps, std::vector<double>& x1, std::vector<double>& x2);
// (v - z' e1, grad theta) by field quadrature, scaled like weak1_residual.
double weak2_residual(const PeriodicTrajectory& traj, const GalerkinBasis& basis, const QuadratureMesh& mesh,
                      const std::vector<Bump>& bumps, int stride);

}  // namespace oscflow
