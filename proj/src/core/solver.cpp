#include "oscflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oscflow/error.hpp"
#include "oscflow/fourier.hpp"
#include "oscflow/parallel.hpp"

namespace oscflow {
namespace {

template <class F>
auto staged(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.what());
  }
}

PeriodicTrajectory blend(const PeriodicTrajectory& x, const PeriodicTrajectory& y, double omega) {
  return PeriodicTrajectory(x.period(), x.beta(), (1.0 - omega) * x.fine_states() + omega * y.fine_states(),
                            (1.0 - omega) * x.fine_derivs() + omega * y.fine_derivs(),
                            std::max(x.periodicity_defect(), y.periodicity_defect()));
}

std::string history_text(const std::vector<double>& h) {
  std::ostringstream out;
  out.precision(3);
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? " " : "") << h[i];
  return out.str();
}

}  // namespace

void FixedPointConfig::validate() const {
  if (!(omega > 0.0 && omega <= 1.0)) fail(ErrorCode::InvalidArgument, "fixed point: omega must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::InvalidArgument, "fixed point: alpha must lie in (0, 1]");
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "fixed point: tolerance must be positive");
  if (max_iter < 1) fail(ErrorCode::InvalidArgument, "fixed point: max_iter must be >= 1");
  if (integrator.steps < 4) fail(ErrorCode::InvalidArgument, "fixed point: need at least 4 steps");
}

double trajectory_distance(const GalerkinSystem& sys, const PeriodicTrajectory& x, const PeriodicTrajectory& y) {
  const int n = sys.size(), fine = x.fine_samples();
  const double dt = x.period() / fine;
  double s = 0.0;
  for (int i = 0; i < fine; ++i) {
    const Eigen::VectorXd da = (x.fine_states().row(i) - y.fine_states().row(i)).head(n).transpose();
    const double dz = x.fine_z(i) - y.fine_z(i);
    const double dzd = sys.beta.dot(da);
    s += dt * (da.squaredNorm() + da.dot(sys.N * da) + dz * dz + dzd * dzd);
  }
  return std::sqrt(s);
}

double trajectory_norm(const GalerkinSystem& sys, const PeriodicTrajectory& x) {
  return trajectory_distance(sys, x, PeriodicTrajectory::zero(x.period(), x.beta(), x.samples()));
}

PeriodicTrajectory apply_Phi(const GalerkinLinearization& lin, const PeriodicTrajectory& tilde, Monodromy* mono) {
  return lin.solve(&tilde, mono);
}

FixedPointResult fixed_point(const GalerkinSystem& sys, const FixedPointConfig& cfg) {
  cfg.validate();
  const GalerkinLinearization lin(sys, cfg.alpha, cfg.integrator);
  FixedPointResult res;
  FixedPointReport& rep = res.report;
  rep.substeps = lin.substeps();
  rep.min_sigma = std::numeric_limits<double>::infinity();
  PeriodicTrajectory x = PeriodicTrajectory::zero(sys.period, sys.beta, cfg.integrator.steps);
  PeriodicTrajectory y;
  for (int k = 0; k < cfg.max_iter; ++k) {
    Monodromy mono;
    try {
      y = apply_Phi(lin, x, &mono);
    } catch (const Error& e) {
      if (k == 0 || (e.code() != ErrorCode::Integrator && e.code() != ErrorCode::ResonantOrNonUnique)) throw;
      rep.failure = e.what();
      y = x;
      break;
    }
    rep.min_sigma = std::min(rep.min_sigma, mono.sigma_min);
    const double d = trajectory_distance(sys, y, x) / (1.0 + trajectory_norm(sys, x));
    rep.history.push_back(d);
    rep.iterations = k + 1;
    if (d <= cfg.tol) {
      rep.converged = true;
      break;
    }
    x = blend(x, y, cfg.omega);
  }
  res.solution = y;
  rep.defect = y.periodicity_defect();
  const OdeResidual r = galerkin_residual(sys, y, cfg.alpha);
  rep.ode_residual = r.a_max;
  rep.kinematic_residual = r.z_max;
  return res;
}

OdeResidual galerkin_residual(const GalerkinSystem& sys, const PeriodicTrajectory& x, double alpha) {
  const int n = sys.size(), m = x.samples();
  const PhysicalParams& p = sys.params;
  Eigen::MatrixXd coarse(m, n + 1);
  for (int j = 0; j < m; ++j) coarse.row(j) = x.fine_states().row(2 * j);
  const fourier::TrigInterpolant interp(coarse, x.period());
  OdeResidual out;
  for (int j = 0; j < m; ++j) {
    const int i = 2 * j + 1;
    const double t = x.fine_time(i);
    const Eigen::VectorXd a = x.fine_a(i);
    const Eigen::VectorXd d = interp(t, 1);
    const Eigen::VectorXd t1 = sys.A * d.head(n), t2 = sys.c_apply(a, a),
                          t3 = (p.stiffness / p.rho) * x.fine_z(i) * sys.beta,
                          t4 = (sys.b + sys.d(t)).transpose() * a, t5 = sys.forcing(t, alpha);
    const Eigen::VectorXd r = t1 + t2 + t3 + t4 - t5;
    const Eigen::ArrayXd mag =
        1.0 + t1.array().abs() + t2.array().abs() + t3.array().abs() + t4.array().abs() + t5.array().abs();
    out.a_abs = std::max(out.a_abs, r.cwiseAbs().maxCoeff());
    out.a_max = std::max(out.a_max, (r.array().abs() / mag).maxCoeff());
    out.z_max = std::max(out.z_max, std::abs(d(n) - sys.beta.dot(a)) / (1.0 + std::abs(d(n))));
  }
  return out;
}

HomotopySweep homotopy_sweep(const GalerkinSystem& sys, const std::vector<double>& alphas,
                             const FixedPointConfig& cfg) {
  for (double a : alphas)
    if (!(a > 0.0 && a <= 1.0)) fail(ErrorCode::InvalidArgument, "homotopy: alpha values must lie in (0, 1]");
  HomotopySweep out;
  out.rows.resize(alphas.size());
  parallel_for(static_cast<int>(alphas.size()), [&](int i) {
    HomotopyRow& row = out.rows[i];
    row.alpha = alphas[i];
    FixedPointConfig c = cfg;
    c.alpha = alphas[i];
    try {
      const FixedPointResult r = fixed_point(sys, c);
      row.converged = r.report.converged;
      row.iterations = r.report.iterations;
      row.sup_energy = energy_E(r.solution, sys.params).maxCoeff();
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  for (const auto& row : out.rows) {
    out.all_converged = out.all_converged && row.converged;
    out.max_sup_energy = std::max(out.max_sup_energy, row.sup_energy);
  }
  return out;
}

Problem build_problem(const ProblemSpec& spec) {
  Problem prob;
  prob.spec = spec;
  staged("geometry", [&] {
    spec.params.validate();
    if (spec.modes < 1 || spec.steps < 8 || !(spec.mesh_h > 0.0))
      fail(ErrorCode::InvalidArgument, "modes, steps and mesh_h must be positive");
    prob.geom = ChannelGeometry::build(spec.half_length, spec.body);
  });
  const CarrierOptions copts{spec.r_in, spec.r_out};
  const BasisOptions bopts{spec.modes, spec.r_in, spec.r_out};
  auto build_flow = [&](const PeriodicSignal& phi) {
    staged("womersley", [&] { prob.flow = PoiseuilleFlow::solve(phi, spec.params, spec.cheb_order); });
    return staged("carrier", [&] { return FluxCarrier::build(*prob.flow, prob.geom, copts); });
  };
  auto build_forces = [&](const FluxCarrier& carrier) {
    staged("forcing", [&] { prob.forces = ForcingData::build(carrier, prob.mesh, spec.f_tilde, spec.g_tilde); });
  };
  const FluxCarrier carrier = build_flow(spec.flowrate);
  staged("mesh", [&] {
    prob.basis = GalerkinBasis::prepare(prob.geom, bopts);
    MeshOptions mo;
    mo.h = spec.mesh_h;
    mo.gauss = spec.gauss;
    mo.extent = prob.geom.x0() + 1.0;
    auto append = [](std::vector<double>& to, const std::vector<double>& from) {
      to.insert(to.end(), from.begin(), from.end());
    };
    append(mo.breaks_x1, carrier.breaks_x1());
    append(mo.breaks_x1, prob.basis.breaks_x1());
    append(mo.breaks_x1, spec.f_tilde.breaks_x1());
    append(mo.breaks_x2, carrier.breaks_x2());
    append(mo.breaks_x2, prob.basis.breaks_x2());
    append(mo.breaks_x2, spec.f_tilde.breaks_x2());
    bump_breaks(default_bumps(prob.geom), mo.breaks_x1, mo.breaks_x2);
    prob.mesh = QuadratureMesh::build(prob.geom, mo);
  });
  staged("basis", [&] { prob.basis.orthonormalize(prob.mesh); });
  build_forces(carrier);
  AssemblyOptions aopts;
  aopts.samples = spec.steps;
  staged("assembly", [&] { prob.sys = assemble_system(prob.basis, *prob.forces, prob.mesh, aopts); });
  const double phi_w12 = spec.flowrate.sobolev_norm(1);
  staged("smallness", [&] { prob.cq = estimate_cq(prob.sys, phi_w12, spec.seed); });
  if (spec.target_smallness > 0.0 && !prob.cq.phi_zero && prob.cq.value > 0.0) {
    const double eps = spec.target_smallness * spec.params.mu / (spec.params.rho * prob.cq.value * phi_w12);
    prob.flow_scale = eps;
    build_forces(build_flow(spec.flowrate.scaled(eps)));
    prob.sys = prob.sys.scaled_flow(eps);
    staged("smallness", [&] { prob.cq = estimate_cq(prob.sys, eps * phi_w12, spec.seed); });
  }
  return prob;
}

DiagnosticsBundle run_diagnostics(const Problem& prob, const PeriodicTrajectory& traj, double alpha) {
  const GalerkinSystem& sys = prob.sys;
  const PhysicalParams& p = sys.params;
  const ForcingData& forces = *prob.forces;
  const PoiseuilleFlow& flow = *prob.flow;
  const int m = traj.samples();
  DiagnosticsBundle d;
  d.E = energy_E(traj, p);
  d.delta = admissible_delta(1.0, sys.beta(0), p);
  verify_delta(p, sys.beta(0), d.delta, prob.spec.seed);
  d.G = energy_G(traj, p, d.delta);
  d.energy = check_energy_identity(traj, sys, alpha);
  d.force_norms = force_norms(forces, prob.mesh, m);
  d.force_bounds = force_bound_report(forces, d.force_norms);
  d.chi_norms = chi_norm_report(flow, m);
  d.partial = check_partial_bound(traj, sys, d.force_norms.total_sq, alpha);
  d.particular = check_particular_energy(traj, sys, d.force_norms.total_sq, d.force_norms.grad_v_sq, alpha, d.delta);

  const PeriodicSignal& phi = flow.flowrate();
  DataNorms data;
  data.phi_w12 = phi.sobolev_norm(1);
  data.phi_w22 = phi.sobolev_norm(2);
  data.f_linf = alpha * d.force_norms.total_linf;
  data.df_linf = alpha * d.force_norms.total_dt_linf;
  const PeriodicSignal dg = forces.g().derivative(1);
  data.g_linf = alpha * forces.g().sup_norm();
  data.dg_linf = alpha * dg.sup_norm();
  data.dg_sq.resize(m);
  for (int j = 0; j < m; ++j) data.dg_sq(j) = alpha * alpha * std::pow(dg(traj.time(j)), 2);
  data.df_sq = alpha * alpha * d.force_norms.total_dt_sq;
  d.strong = strong_regularity_monitor(traj, sys, prob.cq.value, data);

  SmallnessInput in;
  in.phi_w12 = data.phi_w12;
  in.phi_w22 = data.phi_w22;
  in.ft_l2l2 = alpha * d.force_norms.ft_l2l2;
  in.gt_l2 = alpha * forces.g_tilde().l2_norm();
  in.period = sys.period;
  in.params = p;
  in.cq = prob.cq.value;
  in.cq_available = !prob.cq.phi_zero;
  in.strong.available = true;
  in.strong.c3 = d.partial.c3;
  for (const auto& row : d.force_bounds) {
    if (row.id == "f_L2L2") in.strong.cf = row.constant;
    if (row.id == "g_L2") in.strong.cg = row.constant;
  }
  in.strong.c8 = d.strong.c8;
  in.strong.c9 = d.strong.c9;
  in.strong.c10 = d.strong.c10;
  in.strong.strong2_lhs = d.strong.strong2_lhs;
  d.smallness = smallness_report(in);

  d.weak1 = weak1_residual(traj, sys, alpha, 8, 4);
  if (prob.spec.field_checks) {
    const int stride = std::max(1, prob.spec.diagnostic_stride);
    d.stokes = stokes_rhs_norm(traj, prob.basis, forces, prob.mesh, alpha, stride);
    const double x0 = prob.geom.x0();
    d.far_field = far_field_decay(traj, prob.basis, prob.mesh, {0.0, 0.5 * x0, x0, x0 + 1.0, x0 + 1.5}, stride);
    d.weak2 = weak2_residual(traj, prob.basis, prob.mesh, default_bumps(prob.geom), stride);
    MeshOptions mo;
    mo.h = prob.spec.mesh_h;
    mo.gauss = prob.spec.gauss + 2;
    mo.extent = x0 + 1.0;
    mo.breaks_x1 = prob.basis.breaks_x1();
    mo.breaks_x2 = prob.basis.breaks_x2();
    const QuadratureMesh alt = QuadratureMesh::build(prob.geom, mo);
    const Eigen::VectorXd ef = energy_E_field(traj, prob.basis, alt, p, stride);
    double worst = 0.0;
    for (int q = 0; q < ef.size(); ++q) worst = std::max(worst, std::abs(ef(q) - d.E(q * stride)));
    d.energy_two_ways = worst / (1.0 + d.E.maxCoeff());
  }
  return d;
}

SolveOutcome galerkin_solve(const ProblemSpec& spec) {
  SolveOutcome out;
  out.problem = build_problem(spec);
  const Problem& prob = out.problem;
  const double ratio = prob.cq.phi_zero ? 0.0
                                         : prob.flow->flowrate().sobolev_norm(1) * spec.params.rho * prob.cq.value /
                                               spec.params.mu;
  const bool small = ratio < 1.0;
  if (!small)
    out.warnings.push_back("flow rate violates the smallness condition (ratio " + std::to_string(ratio) + ")");
  try {
    out.result = staged("fixed point", [&] { return fixed_point(prob.sys, spec.fixed_point); });
  } catch (const Error& e) {
    // outside the smallness regime an inner failure is a failure of the iteration
    if (small || (e.code() != ErrorCode::Integrator && e.code() != ErrorCode::ResonantOrNonUnique)) throw;
    fail(ErrorCode::NoConvergence, std::string(e.what()) + "; " + out.warnings.front());
  }
  const FixedPointReport& rep = out.result.report;
  if (!rep.converged) {
    std::string msg = "fixed point: no convergence after " + std::to_string(rep.iterations) +
                      " iterations; history " + history_text(rep.history);
    if (!rep.failure.empty()) msg += "; stopped by " + rep.failure;
    if (!(spec.warn_only && !small)) fail(ErrorCode::NoConvergence, msg);
    out.warnings.push_back(msg);
  }
  try {
    out.diagnostics = staged("diagnostics", [&] { return run_diagnostics(prob, out.result.solution, spec.fixed_point.alpha); });
  } catch (const Error& e) {
    if (rep.converged) throw;
    out.warnings.push_back(e.what());
  }
  if (!spec.alphas.empty())
    out.homotopy = staged("homotopy", [&] { return homotopy_sweep(prob.sys, spec.alphas, spec.fixed_point); });

  out.checks = solve_checks(out);
  out.gates_pass = std::all_of(out.checks.begin(), out.checks.end(),
                               [](const LedgerRow& r) { return !r.gate || r.pass; });
  return out;
}

std::vector<LedgerRow> solve_checks(const SolveOutcome& out, const GateTolerances& tol) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const ProblemSpec& spec = out.problem.spec;
  const FixedPointReport& rep = out.result.report;
  const DiagnosticsBundle& d = out.diagnostics;
  std::vector<LedgerRow> rows;
  auto add = [&](LedgerRow r) { rows.push_back(std::move(r)); };

  LedgerRow conv = make_row("picard_converged", "fixed_point.convergence",
                            rep.history.empty() ? inf : rep.history.back(), spec.fixed_point.tol, true);
  conv.pass = conv.pass && rep.converged;
  add(conv);
  add(make_row("ode_residual", "galerkin.residual", rep.ode_residual, tol.ode, true));
  add(make_row("kinematic_residual", "galerkin.kinematic", rep.kinematic_residual, tol.ode, true));
  add(make_row("periodicity_defect", "periodicity", rep.defect, tol.defect, true));
  add(make_row("energy_identity", "energy.identity", d.energy.max_residual, tol.energy * (1.0 + d.energy.max_energy),
               true));
  add(make_row("energy_telescoping", "energy.telescoping", d.energy.telescoping, tol.telescoping, true));
  add(make_row("partial_bound_c3", "energy.partial_bound", d.partial.c3, inf, false));
  for (const LedgerRow& r : d.particular.rows) add(r);
  add(make_row("weak_momentum", "weak.momentum", d.weak1, tol.weak1, true));
  if (spec.field_checks) {
    add(make_row("weak_kinematic", "weak.kinematic", d.weak2, tol.weak2, true));
    add(make_row("energy_two_ways", "energy.field_quadrature", d.energy_two_ways, tol.energy_two_ways, true));
    if (d.stokes) add(make_row("stokes_rhs_finite", "regularity.stokes_rhs", d.stokes->sup, inf, true));
  }
  for (LedgerRow r : d.smallness.rows) {
    if (r.id == "smallness_weak") r.gate = !spec.warn_only;
    add(r);
  }
  for (const LedgerRow& r : d.strong.rows) add(r);
  for (const BoundRow& b : d.force_bounds) {
    LedgerRow r = make_row("force_" + b.id, "forces.bound", b.lhs, b.rhs, false, 1e-9);
    add(r);
  }
  if (out.homotopy) {
    const HomotopySweep& h = *out.homotopy;
    LedgerRow r = make_row("homotopy_bounded", "homotopy.bound", h.max_sup_energy, inf, true);
    r.pass = r.pass && h.all_converged;
    add(r);
  }
  return rows;
}

ResonanceRow resonance_probe(const ProblemSpec& spec) {
  ResonanceRow row;
  row.period = spec.flowrate.period();
  row.ratio = row.period / spec.params.natural_period();
  Problem prob = build_problem(spec);
  try {
    const FixedPointResult r = fixed_point(prob.sys, spec.fixed_point);
    row.coupled_converged = r.report.converged;
    row.coupled_sigma_min = r.report.min_sigma;
    row.coupled_sup_energy = energy_E(r.solution, spec.params).maxCoeff();
  } catch (const Error& e) {
    row.coupled_error = e.what();
  }
  IntegratorOptions io = spec.fixed_point.integrator;
  io.steps = spec.steps;
  const LinearPeriodicSystem osc =
      decoupled_oscillator(spec.params.mass, spec.params.stiffness, prob.forces->g(), io);
  const Monodromy mono = monodromy(osc);
  row.decoupled_sigma_min = mono.sigma_min;
  row.decoupled_norm = mono.norm;
  row.decoupled_singular = mono.singular();
  return row;
}

std::vector<ResonanceRow> resonance_sweep(const ProblemSpec& spec, const std::vector<double>& ratios) {
  if (ratios.empty()) fail(ErrorCode::InvalidArgument, "resonance: empty period grid");
  std::vector<ResonanceRow> rows;
  const double tn = spec.params.natural_period();
  for (double r : ratios) {
    if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "resonance: period ratios must be positive");
    ProblemSpec s = spec;
    const double T = r * tn;
    s.flowrate = spec.flowrate.with_period(T);
    s.f_tilde.signal = spec.f_tilde.signal.with_period(T);
    s.g_tilde = spec.g_tilde.with_period(T);
    rows.push_back(resonance_probe(s));
  }
  return rows;
}

}  // namespace oscflow
