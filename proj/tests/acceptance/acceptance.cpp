// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oscflow/chebyshev.hpp"
#include "oscflow/error.hpp"
#include "oscflow/solver.hpp"

using namespace oscflow;

namespace {

// ---- pinned tolerances -------------------------------------------------------
constexpr double kSteadyTol = 1e-10;
constexpr double kWomersleyTol = 1e-6;
constexpr double kDivTolTimesH = 1e-8;     // finite-difference divergence <= 1e-8 / h
constexpr double kWallTol = 1e-10;
constexpr double kExteriorTol = 1e-10;
constexpr double kFluxTol = 1e-8;
constexpr double kSymTol = 1e-12;
constexpr double kSkewTol = 1e-7;
constexpr double kCubicTol = 1e-7;
constexpr double kScalarOdeTol = 1e-8;
constexpr double kHomogeneousTol = 1e-9;
constexpr double kResonantSigma = 1e-8;
constexpr int kMaxPicard = 50;
constexpr double kOdeTol = 1e-6;
constexpr double kDefectTol = 1e-8;
constexpr double kFixedPointTol = 1e-8;
constexpr double kWeakTol = 1e-5;
constexpr double kEnergyTol = 1e-6;
constexpr double kTelescopingTol = 1e-9;
constexpr double kC3Stability = 0.20;
constexpr double kPrimeStability = 0.10;
constexpr double kLinearityTol = 1e-8;
constexpr double kQuarterTol = 0.10;

constexpr double kDeskH = 1.0 / 64.0;
constexpr double kCoarseH = 1.0 / 32.0;
constexpr int kDeskModes = 12;

struct Line {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

ProblemSpec reference_spec(double h, int modes) {
  ProblemSpec s;
  s.flowrate = PeriodicSignal::sine(5.0, 0.05, 1, 0.05);
  s.target_smallness = 0.1;
  s.mesh_h = h;
  s.modes = modes;
  return s;
}

// Implicit Euler for chi_t = nu chi'' + psi(t), chi(+-1) = 0, int chi = phi(t),
// run to a periodic state; returns chi at `samples` times of the last period.
std::vector<Eigen::VectorXd> implicit_euler_periodic(const PeriodicSignal& phi, double nu, int order, int steps,
                                                     int samples) {
  const Eigen::VectorXd w = cheb::clenshaw_curtis_weights(order);
  const Eigen::MatrixXd D = cheb::diff_matrix(order);
  const Eigen::MatrixXd D2 = D * D;
  const int ni = order - 1;  // interior nodes 1..order-1
  const double T = phi.period(), dt = T / steps;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ni + 1, ni + 1);
  M.topLeftCorner(ni, ni) = Eigen::MatrixXd::Identity(ni, ni) - dt * nu * D2.block(1, 1, ni, ni);
  M.topRightCorner(ni, 1).setConstant(-dt);
  M.bottomLeftCorner(1, ni) = w.segment(1, ni).transpose();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::VectorXd chi = Eigen::VectorXd::Zero(ni), rhs(ni + 1);
  std::vector<Eigen::VectorXd> out(samples, Eigen::VectorXd::Zero(order + 1));
  Eigen::VectorXd start = chi;
  for (int period = 0; period < 200; ++period) {
    for (int s = 0; s < steps; ++s) {
      if (s % (steps / samples) == 0) out[s / (steps / samples)].segment(1, ni) = chi;
      rhs.head(ni) = chi;
      rhs(ni) = phi(dt * (s + 1));
      chi = lu.solve(rhs).head(ni);
    }
    const double change = (chi - start).cwiseAbs().maxCoeff();
    start = chi;
    if (period >= 20 && change < 1e-10) break;
  }
  return out;
}

void criterion1(Line& ln) {
  PhysicalParams p;
  const PoiseuilleFlow flow = PoiseuilleFlow::solve(PeriodicSignal::constant(1.0, 1.0), p);
  double err = 0.0;
  for (Eigen::Index j = 0; j < flow.nodes().size(); ++j) {
    const double x = flow.nodes()(j);
    err = std::max(err, std::abs(flow.value(x, 0.3) - 0.75 * (1.0 - x * x)));
  }
  const double perr = std::abs(flow.pressure_factor(0.3) - 1.5);
  ln.check(err <= kSteadyTol, "max node error " + fmt(err));
  ln.check(perr <= kSteadyTol, "psi error " + fmt(perr));
}

void criterion2(Line& ln) {
  PhysicalParams p;
  const int order = 64, samples = 64, base = 2048;
  const PeriodicSignal phi = PeriodicSignal::sine(1.0, 1.0);
  const PoiseuilleFlow flow = PoiseuilleFlow::solve(phi, p, order);
  const auto u1 = implicit_euler_periodic(phi, p.nu(), order, base, samples);
  const auto u2 = implicit_euler_periodic(phi, p.nu(), order, 2 * base, samples);
  const auto u4 = implicit_euler_periodic(phi, p.nu(), order, 4 * base, samples);
  const Eigen::VectorXd w = cheb::clenshaw_curtis_weights(order);
  double err = 0.0, raw = 0.0;
  for (int m = 0; m < samples; ++m) {
    const double t = static_cast<double>(m) / samples;
    Eigen::VectorXd lib(order + 1);
    for (int j = 0; j <= order; ++j) lib(j) = flow.value(flow.nodes()(j), t);
    const Eigen::VectorXd extrap = (u1[m] - 6.0 * u2[m] + 8.0 * u4[m]) / 3.0;
    err += w.dot((lib - extrap).cwiseAbs2()) / samples;
    raw += w.dot((lib - u4[m]).cwiseAbs2()) / samples;
  }
  err = std::sqrt(err);
  ln.check(err <= kWomersleyTol, "L2 error vs extrapolated implicit Euler " + fmt(err) + " (finest raw " +
                                     fmt(std::sqrt(raw)) + ")");
}

void criterion3(Line& ln) {
  const ProblemSpec s = reference_spec(kDeskH, 8);
  const Problem prob = build_problem(s);
  const FluxCarrier& c = prob.forces->carrier();
  const double h = prob.mesh.h();
  const double T = prob.flow->period();
  const double x0 = prob.geom.x0();
  const Rect& b = prob.geom.body();
  using F = FluxCarrier;
  // fourth-order central differences of V in the cutoff region
  const double d = 1e-3;
  double div = 0.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-x0, x0), uy(-1.0 + 2 * d, 1.0 - 2 * d), ut(0.0, T);
  // the cutoffs are only C^2 across their breaklines, so stencils stay off them
  const std::vector<double> kx = c.breaks_x1(), ky = c.breaks_x2();
  auto near = [&](const std::vector<double>& ks, double v) {
    return std::any_of(ks.begin(), ks.end(), [&](double k) { return std::abs(v - k) < 3 * d; });
  };
  int probes = 0;
  while (probes < 400) {
    const double x = ux(rng), y = uy(rng), t = ut(rng);
    if (near(kx, x) || near(ky, y)) continue;
    if (!prob.geom.in_fluid(x, y) || !prob.geom.in_fluid(x - 2 * d, y) || !prob.geom.in_fluid(x + 2 * d, y) ||
        !prob.geom.in_fluid(x, y - 2 * d) || !prob.geom.in_fluid(x, y + 2 * d))
      continue;
    auto v1 = [&](double a) { return c.sample(a, y, t)[F::kV1]; };
    auto v2 = [&](double a) { return c.sample(x, a, t)[F::kV2]; };
    const double dv1 = (-v1(x + 2 * d) + 8 * v1(x + d) - 8 * v1(x - d) + v1(x - 2 * d)) / (12 * d);
    const double dv2 = (-v2(y + 2 * d) + 8 * v2(y + d) - 8 * v2(y - d) + v2(y - 2 * d)) / (12 * d);
    div = std::max(div, std::abs(dv1 + dv2));
    ++probes;
  }
  ln.check(div <= kDivTolTimesH / h, "FD div " + fmt(div) + " over " + std::to_string(probes) + " points");

  double gamma = 0.0, wall = 0.0, far = 0.0;
  for (const auto& bp : prob.mesh.boundary())
    for (double t : {0.0, 0.3 * T, 0.7 * T}) {
      const auto v = c.sample(bp.x1, bp.x2, t);
      gamma = std::max(gamma, std::hypot(v[F::kV1], v[F::kV2]));
    }
  for (int i = 0; i <= 100; ++i) {
    const double x = -s.half_length + 2.0 * s.half_length * i / 100;
    for (double t : {0.0, 0.45 * T}) {
      for (double y : {-1.0, 1.0}) {
        const auto v = c.sample(x, y, t);
        wall = std::max(wall, std::hypot(v[F::kV1], v[F::kV2]));
      }
      if (std::abs(x) >= x0)
        for (double y : {-0.9, -0.3, 0.2, 0.8}) {
          const auto v = c.sample(x, y, t);
          far = std::max(far, std::hypot(v[F::kV1] - prob.flow->value(y, t), v[F::kV2]));
        }
    }
  }
  ln.check(gamma <= kWallTol, "V on body " + fmt(gamma));
  ln.check(wall <= kWallTol, "V on walls " + fmt(wall));
  ln.check(far == 0.0, "V - chi e1 beyond X0 " + fmt(far));
  const ForceNorms fn = force_norms(*prob.forces, prob.mesh, 64);
  ln.check(fn.exterior_l2l2 <= kExteriorTol, "f outside Omega0 " + fmt(fn.exterior_l2l2));

  // flux through x1 = 0 by composite Gauss quadrature above and below the body
  std::vector<double> gx, gw;
  quad::gauss_legendre(8, gx, gw);
  std::vector<double> cuts = c.breaks_x2();
  cuts.insert(cuts.end(), {-1.0, 1.0, b.y0, b.y1});
  std::sort(cuts.begin(), cuts.end());
  double flux_err = 0.0;
  for (int q = 0; q < 16; ++q) {
    const double t = T * q / 16;
    double flux = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k], hi = cuts[k + 1];
      if (hi - lo < 1e-14 || (lo >= b.y0 && hi <= b.y1)) continue;
      for (int sub = 0; sub < 8; ++sub) {
        const double a0 = lo + (hi - lo) * sub / 8, a1 = lo + (hi - lo) * (sub + 1) / 8;
        for (std::size_t g = 0; g < gx.size(); ++g)
          flux += 0.5 * (a1 - a0) * gw[g] * c.sample(0.0, 0.5 * (a0 + a1) + 0.5 * (a1 - a0) * gx[g], t)[F::kV1];
      }
    }
    flux_err = std::max(flux_err, std::abs(flux - prob.flow->flowrate()(t)));
  }
  ln.check(flux_err <= kFluxTol, "flux through x1=0 error " + fmt(flux_err));
}

void criterion4(Line& ln, const Problem& prob) {
  const GalerkinSystem& sys = prob.sys;
  const int n = sys.size();
  const double mr = sys.params.mass / sys.params.rho;
  const Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(n, n) + mr * sys.beta * sys.beta.transpose();
  const double a_err = (sys.A - expect).cwiseAbs().maxCoeff();
  const double lam_a = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sys.A).eigenvalues().minCoeff();
  ln.check(a_err == 0.0 && lam_a >= 1.0 - 1e-14, "A - (I + m/rho bb^T) " + fmt(a_err) + ", min eig " + fmt(lam_a));
  const double bsym = (sys.b - sys.b.transpose()).cwiseAbs().maxCoeff();
  const double lam_b = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sys.b).eigenvalues().minCoeff();
  ln.check(bsym <= kSymTol * sys.b.cwiseAbs().maxCoeff() && lam_b > 0.0, "b asymmetry " + fmt(bsym) + ", min eig " + fmt(lam_b));
  double skew = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) skew = std::max(skew, std::abs(sys.c_at(i, j, k) + sys.c_at(i, k, j)));
  ln.check(skew <= kSkewTol, "max |c_ijk + c_ikj| " + fmt(skew));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  double cubic = 0.0;
  for (int r = 0; r < 100; ++r) {
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a(i) = nd(rng);
    cubic = std::max(cubic, std::abs(sys.c_apply(a, a).dot(a)) / std::pow(a.norm(), 3));
  }
  ln.check(cubic <= kCubicTol, "max |c(a,a,a)|/|a|^3 " + fmt(cubic));
}

void criterion5(Line& ln, const Problem& prob, const PeriodicTrajectory& bounded) {
  const double Omega = 3.0, T = 2.0 * M_PI / Omega;
  IntegratorOptions io;
  const LinearPeriodicSystem scalar = LinearPeriodicSystem::tabulate(
      1, T,
      [&](double t, Eigen::MatrixXd& J, Eigen::VectorXd& r) {
        J.setConstant(-1.0);
        r.setConstant(std::cos(Omega * t));
      },
      io);
  const LinearSolution ls = solve_linear_periodic(scalar);
  double err = 0.0;
  for (Eigen::Index i = 0; i < ls.states.rows(); ++i) {
    const double t = T * i / (ls.states.rows() - 1);
    err = std::max(err, std::abs(ls.states(i, 0) - (std::cos(Omega * t) + Omega * std::sin(Omega * t)) / (1 + Omega * Omega)));
  }
  ln.check(err <= kScalarOdeTol, "scalar closed form error " + fmt(err));

  const GalerkinSystem homog = prob.sys.scaled_flow(0.0);
  const GalerkinLinearization lin(homog, 1.0, prob.spec.fixed_point.integrator);
  const PeriodicTrajectory x = lin.solve(&bounded);
  ln.check(x.sup_norm() <= kHomogeneousTol, "homogeneous system |x|_inf " + fmt(x.sup_norm()));

  PhysicalParams p;
  const LinearPeriodicSystem osc = decoupled_oscillator(p.mass, p.stiffness,
                                                        PeriodicSignal::sine(p.natural_period(), 1.0), io);
  const Monodromy mono = monodromy(osc);
  bool raised = false;
  try {
    solve_linear_periodic(osc);
  } catch (const Error& e) {
    raised = e.code() == ErrorCode::ResonantOrNonUnique;
  }
  ln.check(raised && mono.sigma_min < kResonantSigma,
           std::string(raised ? "" : "no ") + "ResonantOrNonUnique, sigma_min(I-M) " + fmt(mono.sigma_min));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<void(Line&)>& body) {
    Line ln;
    try {
      body(ln);
    } catch (const std::exception& e) {
      ln.check(false, std::string("error: ") + e.what());
    }
    if (!ln.pass) ++failures;
    std::printf("%s  %2d %s: %s\n", ln.pass ? "PASS" : "FAIL", id, name, ln.detail.str().c_str());
    std::fflush(stdout);
  };

  report(1, "steady Poiseuille exactness", criterion1);
  report(2, "Womersley time-stepping oracle", criterion2);
  report(3, "flux carrier properties", criterion3);

  // desk-scale reference run and its coarse twin
  SolveOutcome fine, coarse;
  std::string setup_error;
  try {
    fine = galerkin_solve(reference_spec(kDeskH, kDeskModes));
    ProblemSpec cs = reference_spec(kCoarseH, kDeskModes);
    coarse = galerkin_solve(cs);
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  auto need_runs = [&] {
    if (!setup_error.empty()) throw std::runtime_error("reference run failed: " + setup_error);
  };

  report(4, "Galerkin tensor structure", [&](Line& ln) {
    need_runs();
    criterion4(ln, fine.problem);
  });
  report(5, "linear periodic solver", [&](Line& ln) {
    need_runs();
    criterion5(ln, fine.problem, fine.result.solution);
  });
  report(6, "nonlinear solve", [&](Line& ln) {
    need_runs();
    const Problem& p = fine.problem;
    const FixedPointReport& r = fine.result.report;
    const double ratio = p.flow->flowrate().sobolev_norm(1) * p.spec.params.rho * p.cq.value / p.spec.params.mu;
    ln.check(std::abs(ratio - 0.1) <= 1e-9, "|phi|_W12 rho c_q / mu " + fmt(ratio));
    ln.check(r.converged && r.iterations <= kMaxPicard, "Picard iterations " + std::to_string(r.iterations));
    ln.check(r.ode_residual <= kOdeTol, "ODE residual " + fmt(r.ode_residual));
    ln.check(r.defect <= kDefectTol, "periodicity defect " + fmt(r.defect));
    int tests = 0;
    const double w1 = weak1_residual(fine.result.solution, p.sys, 1.0, 8, 4, &tests);
    ln.check(w1 <= kWeakTol && tests == 72, "weak momentum " + fmt(w1) + " over " + std::to_string(tests) + " tests");
    const std::vector<Bump> bumps = default_bumps(p.geom);
    const double w2 = weak2_residual(fine.result.solution, p.basis, p.mesh, bumps, 4);
    ln.check(w2 <= kWeakTol && bumps.size() == 5, "weak kinematic " + fmt(w2) + " over 5 bumps");
    // re-applying Phi at the fixed point
    const GalerkinLinearization lin(p.sys, 1.0, p.spec.fixed_point.integrator);
    const PeriodicTrajectory again = apply_Phi(lin, fine.result.solution);
    const double move = trajectory_distance(p.sys, again, fine.result.solution) /
                        (1.0 + trajectory_norm(p.sys, fine.result.solution));
    ln.check(move <= kFixedPointTol, "|Phi(x) - x| " + fmt(move));
  });
  report(7, "energy ledger", [&](Line& ln) {
    need_runs();
    const DiagnosticsBundle& d = fine.diagnostics;
    ln.check(d.energy.max_residual <= kEnergyTol * (1.0 + d.energy.max_energy),
             "identity residual " + fmt(d.energy.max_residual) + " vs 1e-6(1+max E) " +
                 fmt(kEnergyTol * (1 + d.energy.max_energy)));
    double lo = 0.0, hi = 0.0;
    for (Eigen::Index j = 0; j < d.E.size(); ++j) {
      lo = std::max(lo, (d.E(j) - d.G(j)) / (1.0 + d.E(j)));
      hi = std::max(hi, (d.G(j) - 3.0 * d.E(j)) / (1.0 + d.E(j)));
    }
    ln.check(lo <= 1e-12 && hi <= 1e-12, "E <= G <= 3E (max E-G " + fmt(lo) + ", max G-3E " + fmt(hi) + ")");
    ln.check(d.energy.telescoping <= kTelescopingTol, "telescoping " + fmt(d.energy.telescoping));
    const double c3f = d.partial.c3, c3c = coarse.diagnostics.partial.c3;
    const double rel = std::abs(c3f - c3c) / c3f;
    ln.check(std::isfinite(c3f) && rel <= kC3Stability, "c3 " + fmt(c3f) + " vs coarse " + fmt(c3c));
  });
  report(8, "homotopy boundedness", [&](Line& ln) {
    need_runs();
    std::vector<double> alphas;
    for (int i = 1; i <= 10; ++i) alphas.push_back(0.1 * i);
    const HomotopySweep h = homotopy_sweep(coarse.problem.sys, alphas, coarse.problem.spec.fixed_point);
    int ok = 0;
    for (const auto& r : h.rows) ok += r.converged ? 1 : 0;
    ln.check(h.all_converged, std::to_string(ok) + "/10 converged");
    ln.check(std::isfinite(h.max_sup_energy), "max_alpha sup E " + fmt(h.max_sup_energy));
  });
  report(9, "resonance", [&](Line& ln) {
    ProblemSpec s = reference_spec(kCoarseH, 8);
    s.flowrate = PeriodicSignal::sine(s.params.natural_period(), 0.05, 1, 0.05);
    s.field_checks = false;
    const std::vector<ResonanceRow> rows = resonance_sweep(s, {1.0, 1.3});
    const ResonanceRow& at = rows[0];
    const ResonanceRow& off = rows[1];
    ln.check(at.coupled_converged && std::isfinite(at.coupled_sup_energy),
             "T_nat coupled converged, sup E " + fmt(at.coupled_sup_energy));
    ln.check(at.decoupled_singular, "T_nat decoupled sigma_min " + fmt(at.decoupled_sigma_min));
    ln.check(off.coupled_converged && !off.decoupled_singular,
             "1.3 T_nat coupled converged, decoupled sigma_min " + fmt(off.decoupled_sigma_min));
  });
  report(10, "strong-regularity monitor", [&](Line& ln) {
    need_runs();
    const StrongRegularityReport& s = fine.diagnostics.strong;
    ln.check(s.min_coefficient > 0.0, "min coefficient " + fmt(s.min_coefficient));
    const double sc = coarse.diagnostics.strong.sup_prime;
    const double rel = std::abs(s.sup_prime - sc) / s.sup_prime;
    ln.check(std::isfinite(s.sup_prime) && rel <= kPrimeStability,
             "sup |v'|^2 + (m/rho) z''^2 " + fmt(s.sup_prime) + " vs coarse " + fmt(sc));
    const double hs = fine.diagnostics.stokes ? fine.diagnostics.stokes->sup : NAN;
    ln.check(std::isfinite(hs), "sup |h| " + fmt(hs));
  });
  report(11, "scaling and homogeneity", [&](Line& ln) {
    PhysicalParams p;
    const PeriodicSignal phi = PeriodicSignal::sine(5.0, 0.05, 1, 0.05);
    const auto full = chi_norm_report(PoiseuilleFlow::solve(phi, p), 64);
    const auto half = chi_norm_report(PoiseuilleFlow::solve(phi.scaled(0.5), p), 64);
    double lin = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i)
      lin = std::max(lin, std::abs(half[i].value - 0.5 * full[i].value) / (1e-300 + full[i].value));
    ln.check(lin <= kLinearityTol, "chi norms halve, rel error " + fmt(lin));
    ProblemSpec s = reference_spec(kCoarseH, 8);
    s.target_smallness = 0.0;
    s.field_checks = false;
    const SolveOutcome a = galerkin_solve(s);
    s.flowrate = phi.scaled(0.5);
    const SolveOutcome b = galerkin_solve(s);
    const double ea = a.diagnostics.E.maxCoeff(), eb = b.diagnostics.E.maxCoeff();
    const double q = eb / ea;
    ln.check(std::abs(q - 0.25) <= kQuarterTol * 0.25, "sup E ratio " + fmt(q));
    bool wider = true;
    std::string which;
    for (std::size_t i = 0; i < a.diagnostics.smallness.rows.size(); ++i) {
      const LedgerRow& ra = a.diagnostics.smallness.rows[i];
      const LedgerRow& rb = b.diagnostics.smallness.rows[i];
      const bool w = rb.lhs / rb.rhs < ra.lhs / ra.rhs;
      wider = wider && w;
      which += (which.empty() ? "" : ",") + ra.id + (w ? "" : "!");
    }
    ln.check(wider, "margins widen (" + which + ")");
  });

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of 11 criteria failed, %.1f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
