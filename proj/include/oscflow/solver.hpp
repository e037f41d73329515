#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oscflow/basis.hpp"
#include "oscflow/carrier.hpp"
#include "oscflow/diagnostics.hpp"
#include "oscflow/periodic_ode.hpp"
#include "oscflow/womersley.hpp"

namespace oscflow {

struct FixedPointConfig {
  double omega = 0.7;     // damping of x <- (1 - omega) x + omega Phi(x)
  double tol = 1e-10;     // on |Phi(x) - x| relative to 1 + |x|
  int max_iter = 50;
  double alpha = 1.0;     // homotopy parameter scaling f and g
  IntegratorOptions integrator;

  void validate() const;
};

struct FixedPointReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;  // |Phi(x_k) - x_k| / (1 + |x_k|)
  double ode_residual = 0.0;    // nonlinear system at the half-grid
  double kinematic_residual = 0.0;  // z' - beta . a at the half-grid
  double defect = 0.0;          // periodicity defect of the returned iterate
  double min_sigma = 0.0;       // smallest sigma_min(I - M) met by the inner solves
  int substeps = 1;
  std::string failure;          // why an inner solve stopped the iteration, if it did
};

struct FixedPointResult {
  PeriodicTrajectory solution;
  FixedPointReport report;
};

// Discrete L2(0,T; H1) x W12(0,T) distance: a-part weighted by I + N, z-part by z and z'.
double trajectory_distance(const GalerkinSystem& sys, const PeriodicTrajectory& x, const PeriodicTrajectory& y);
double trajectory_norm(const GalerkinSystem& sys, const PeriodicTrajectory& x);

// Unique periodic solution of the system linearized about `tilde`.
PeriodicTrajectory apply_Phi(const GalerkinLinearization& lin, const PeriodicTrajectory& tilde,
                             Monodromy* mono = nullptr);

// Damped Picard iteration from x = 0. Never throws for lack of convergence;
// the report says whether the tolerance was met. Errors of the first inner solve
// propagate; later inner failures end the iteration unconverged.
FixedPointResult fixed_point(const GalerkinSystem& sys, const FixedPointConfig& cfg);

struct OdeResidual {
  double a_max = 0.0;  // max |residual| / (1 + sum of the term magnitudes), per component
  double z_max = 0.0;
  double a_abs = 0.0;  // unscaled
};
// Residual of A a' + c(a, a) + (k/rho) beta z + (b + d)^T a - alpha (f + g beta / rho)
// at the half-grid, a' from the trigonometric interpolant of the coarse samples.
OdeResidual galerkin_residual(const GalerkinSystem& sys, const PeriodicTrajectory& x, double alpha);

struct HomotopyRow {
  double alpha = 0.0;
  bool converged = false;
  int iterations = 0;
  double sup_energy = 0.0;
  std::string error;
};

struct HomotopySweep {
  std::vector<HomotopyRow> rows;
  double max_sup_energy = 0.0;
  bool all_converged = true;
};

// Fixed points of alpha Phi for each alpha, solved independently (in parallel).
HomotopySweep homotopy_sweep(const GalerkinSystem& sys, const std::vector<double>& alphas,
                             const FixedPointConfig& cfg);

// ---- end-to-end pipeline ----------------------------------------------------

struct ProblemSpec {
  double half_length = 6.0;
  Rect body;
  PhysicalParams params;
  PeriodicSignal flowrate = PeriodicSignal::zero(2.0 * M_PI);
  // When positive, phi is rescaled so |phi|_{W12} rho c_q / mu equals this value.
  double target_smallness = 0.0;
  BodyForce f_tilde;
  PeriodicSignal g_tilde;
  int modes = 8;
  int steps = 256;
  double mesh_h = 1.0 / 32.0;
  int gauss = 4;
  int cheb_order = PoiseuilleFlow::kDefaultOrder;
  double r_in = 0.0, r_out = 0.0;
  FixedPointConfig fixed_point;
  std::vector<double> alphas;  // homotopy grid; empty skips the sweep
  unsigned long long seed = 1;
  bool warn_only = false;
  int diagnostic_stride = 8;   // time stride of the field-quadrature checks
  bool field_checks = true;    // h, far field, weak2 and field energy
};

struct Problem {
  ProblemSpec spec;
  ChannelGeometry geom;
  QuadratureMesh mesh;
  std::optional<PoiseuilleFlow> flow;
  std::optional<ForcingData> forces;
  GalerkinBasis basis;
  GalerkinSystem sys;
  CqEstimate cq;
  double flow_scale = 1.0;  // applied to spec.flowrate
};

// Geometry, Womersley flow, carrier, mesh, basis and assembly. Errors carry the
// stage name in their message.
Problem build_problem(const ProblemSpec& spec);

struct DiagnosticsBundle {
  EnergyIdentity energy;
  PartialBound partial;
  ParticularEnergy particular;
  StrongRegularityReport strong;
  SmallnessReport smallness;
  ForceNorms force_norms;
  std::vector<BoundRow> force_bounds;
  std::vector<NormRow> chi_norms;
  std::optional<StokesRhs> stokes;
  std::vector<FarFieldRow> far_field;
  double weak1 = 0.0, weak2 = 0.0;
  double energy_two_ways = 0.0;  // max |E_coeff - E_field| / (1 + max E)
  double delta = 0.0;
  Eigen::VectorXd E, G;
};

DiagnosticsBundle run_diagnostics(const Problem& prob, const PeriodicTrajectory& traj, double alpha);

struct SolveOutcome {
  Problem problem;
  FixedPointResult result;
  DiagnosticsBundle diagnostics;
  std::optional<HomotopySweep> homotopy;
  std::vector<std::string> warnings;
  std::vector<LedgerRow> checks;  // every check of the run; gates_pass is the AND of the gate rows
  bool gates_pass = false;
};

// Tolerances of the gate rows.
struct GateTolerances {
  double ode = 1e-6;           // scaled Galerkin residual
  double defect = 1e-8;        // periodicity defect
  double energy = 1e-6;        // energy identity, relative to 1 + max E
  double telescoping = 1e-9;
  double weak1 = 1e-5;
  double weak2 = 1e-6;
  double energy_two_ways = 1e-8;
};

std::vector<LedgerRow> solve_checks(const SolveOutcome& out, const GateTolerances& tol = {});

// The whole run. Throws NoConvergence when Picard fails, except that a smallness
// violation in warn-only mode turns it into a warning on the outcome.
SolveOutcome galerkin_solve(const ProblemSpec& spec);

struct ResonanceRow {
  double period = 0.0;
  double ratio = 0.0;  // period / natural period
  bool coupled_converged = false;
  double coupled_sup_energy = 0.0;
  double coupled_sigma_min = 0.0;
  std::string coupled_error;
  bool decoupled_singular = false;
  double decoupled_sigma_min = 0.0;
  double decoupled_norm = 0.0;
};

// Coupled solve and the pure oscillator m z'' + k z = g(t) at the period of spec.flowrate.
ResonanceRow resonance_probe(const ProblemSpec& spec);
// Same at period ratio * natural period for each ratio.
std::vector<ResonanceRow> resonance_sweep(const ProblemSpec& spec, const std::vector<double>& ratios);

}  // namespace oscflow
