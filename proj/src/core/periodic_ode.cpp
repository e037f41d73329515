#include "oscflow/periodic_ode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "oscflow/error.hpp"

namespace oscflow {
namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// RK4 over one period of a tabulated system. Each step spans `stride` lattice
// cells (so stages sit at l, l + stride/2, l + stride); the state after every
// `record` steps is kept. forced_col = -1 leaves out r(t).
std::vector<Eigen::MatrixXd> rk4_tabulated(const LinearPeriodicSystem& sys, Eigen::MatrixXd x,
                                           int stride, int record, int forced_col) {
  const int nsteps = sys.lattice() / stride;
  const double h = sys.period() / nsteps;
  auto f = [&](int l, const Eigen::MatrixXd& y) {
    Eigen::MatrixXd d = sys.J(l) * y;
    if (forced_col >= 0) d.col(forced_col) += sys.r(l);
    return d;
  };
  std::vector<Eigen::MatrixXd> out;
  out.reserve(nsteps / record + 1);
  out.push_back(x);
  const int half = stride / 2;
  for (int s = 0; s < nsteps; ++s) {
    const int l = s * stride;
    const Eigen::MatrixXd k1 = f(l, x);
    const Eigen::MatrixXd k2 = f(l + half, x + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = f(l + half, x + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = f(l + stride, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) fail(ErrorCode::Integrator, "integrator: state is not finite");
    if ((s + 1) % record == 0) out.push_back(x);
  }
  return out;
}

// Runs both passes and returns the fine states on the 2M + 1 grid. With
// final_only the passes are compared at t = T alone, which skips the initial
// layer of stiff modes started off their periodic orbit.
std::vector<Eigen::MatrixXd> halved_run(const LinearPeriodicSystem& sys, const Eigen::MatrixXd& x0,
                                        int forced_col, double tol, bool final_only, double& err) {
  const int s = sys.substeps();
  const auto coarse = rk4_tabulated(sys, x0, 4, s, forced_col);
  auto fine = rk4_tabulated(sys, x0, 2, s, forced_col);
  double diff = 0.0, scale = 0.0;
  for (std::size_t j = final_only ? coarse.size() - 1 : 0; j < coarse.size(); ++j) {
    diff = std::max(diff, max_abs(coarse[j] - fine[2 * j]));
    scale = std::max(scale, max_abs(fine[2 * j]));
  }
  err = diff / (1.0 + scale);
  if (err > tol)
    fail(ErrorCode::Integrator, "integrator: step-halving disagreement " + std::to_string(err) +
                                    " exceeds " + std::to_string(tol) + "; increase steps");
  return fine;
}

Eigen::VectorXd rk4_step(const Rhs& rhs, double t, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = rhs(t, x);
  const Eigen::VectorXd k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = rhs(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

int choose_substeps(double spectral_radius, double period, int steps) {
  const double h = period / steps;
  return std::max(1, static_cast<int>(std::ceil(spectral_radius * h / kStableStep)));
}

Integration integrate(const Rhs& rhs, const Eigen::VectorXd& x0, double t_end,
                      const IntegratorOptions& opts) {
  if (opts.steps < 1 || !(t_end > 0.0)) fail(ErrorCode::InvalidArgument, "integrate: bad grid");
  const int m = opts.steps, s = std::max(1, opts.substeps);
  auto run = [&](int per_step, int nrec) {
    const double h = t_end / (static_cast<double>(nrec) * per_step);
    std::vector<Eigen::VectorXd> out{x0};
    Eigen::VectorXd x = x0;
    for (int j = 0; j < nrec; ++j) {
      for (int q = 0; q < per_step; ++q) x = rk4_step(rhs, (static_cast<double>(j) * per_step + q) * h, x, h);
      if (!x.allFinite()) fail(ErrorCode::Integrator, "integrate: state is not finite");
      out.push_back(x);
    }
    return out;
  };
  const auto coarse = run(s, m);
  const auto fine = run(s, 2 * m);
  Integration res;
  res.states.resize(2 * m + 1, x0.size());
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i <= 2 * m; ++i) {
    res.states.row(i) = fine[i].transpose();
    scale = std::max(scale, fine[i].cwiseAbs().maxCoeff());
  }
  for (int j = 0; j <= m; ++j) diff = std::max(diff, (coarse[j] - fine[2 * j]).cwiseAbs().maxCoeff());
  res.halving_error = diff / (1.0 + scale);
  if (res.halving_error > opts.halving_tol)
    fail(ErrorCode::Integrator, "integrate: step-halving disagreement " + std::to_string(res.halving_error));
  return res;
}

LinearPeriodicSystem::LinearPeriodicSystem(double period, int steps, int substeps,
                                           std::vector<Eigen::MatrixXd> J, std::vector<Eigen::VectorXd> r)
    : period_(period), steps_(steps), substeps_(substeps), J_(std::move(J)), r_(std::move(r)) {
  if (steps_ < 1 || substeps_ < 1 || static_cast<int>(J_.size()) != 4 * steps_ * substeps_ ||
      J_.size() != r_.size())
    fail(ErrorCode::InvalidArgument, "linear system: lattice size must be 4 * steps * substeps");
  dim_ = static_cast<int>(J_[0].rows());
}

LinearPeriodicSystem LinearPeriodicSystem::tabulate(int dim, double period, const Eval& eval,
                                                    const IntegratorOptions& opts) {
  if (dim < 1 || !(period > 0.0) || opts.steps < 1)
    fail(ErrorCode::InvalidArgument, "linear system: bad dimension, period or steps");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
  int s = opts.substeps;
  if (s <= 0) {
    double rho = 0.0;
    for (int q = 0; q < 16; ++q) {
      J.setZero();
      eval(period * q / 16.0, J, r);
      rho = std::max(rho, Eigen::EigenSolver<Eigen::MatrixXd>(J, false).eigenvalues().cwiseAbs().maxCoeff());
    }
    s = choose_substeps(rho, period, opts.steps);
  }
  const int lattice = 4 * opts.steps * s;
  std::vector<Eigen::MatrixXd> Js(lattice);
  std::vector<Eigen::VectorXd> rs(lattice);
  for (int l = 0; l < lattice; ++l) {
    J.setZero();
    r.setZero();
    eval(period * l / lattice, J, r);
    Js[l] = J;
    rs[l] = r;
  }
  return LinearPeriodicSystem(period, opts.steps, s, std::move(Js), std::move(rs));
}

double LinearPeriodicSystem::spectral_radius() const {
  double rho = 0.0;
  for (int q = 0; q < 16; ++q) {
    const Eigen::MatrixXd& m = J(q * lattice() / 16);
    rho = std::max(rho, Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff());
  }
  return rho;
}

Monodromy monodromy(const LinearPeriodicSystem& sys, double halving_tol) {
  const int d = sys.dim();
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(d, d + 1);
  x0.leftCols(d).setIdentity();
  Monodromy out;
  const auto states = halved_run(sys, x0, d, halving_tol, true, out.halving_error);
  out.M = states.back().leftCols(d);
  out.r = states.back().col(d);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd_m(out.M);
  out.norm = svd_m.singularValues()(0);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd::Identity(d, d) - out.M);
  out.sigma_min = svd.singularValues()(d - 1);
  return out;
}

LinearSolution solve_linear_periodic(const LinearPeriodicSystem& sys, double singular_rel,
                                     double halving_tol) {
  const int d = sys.dim();
  LinearSolution sol;
  sol.mono = monodromy(sys, halving_tol);
  if (sol.mono.singular(singular_rel))
    fail(ErrorCode::ResonantOrNonUnique,
         "periodic solve: I - M is singular (sigma_min " + std::to_string(sol.mono.sigma_min) +
             ", |M| " + std::to_string(sol.mono.norm) + "); the periodic solution is not unique");
  const Eigen::MatrixXd x0 =
      (Eigen::MatrixXd::Identity(d, d) - sol.mono.M).fullPivLu().solve(sol.mono.r);
  const auto states = halved_run(sys, x0, 0, halving_tol, false, sol.halving_error);
  const int fine = static_cast<int>(states.size()) - 1;
  sol.states.resize(fine + 1, d);
  sol.derivs.resize(fine, d);
  for (int i = 0; i <= fine; ++i) sol.states.row(i) = states[i].col(0).transpose();
  const int per_fine = sys.lattice() / fine;
  for (int i = 0; i < fine; ++i)
    sol.derivs.row(i) = (sys.J(i * per_fine) * states[i].col(0) + sys.r(i * per_fine)).transpose();
  sol.defect = max_abs(sol.states.row(fine) - sol.states.row(0)) / (1.0 + max_abs(sol.states));
  return sol;
}

LinearPeriodicSystem decoupled_oscillator(double mass, double stiffness, const PeriodicSignal& forcing,
                                          const IntegratorOptions& opts) {
  if (!(mass > 0.0) || !(stiffness >= 0.0))
    fail(ErrorCode::InvalidArgument, "oscillator: need m > 0 and k >= 0");
  return LinearPeriodicSystem::tabulate(
      2, forcing.period(),
      [&](double t, Eigen::MatrixXd& J, Eigen::VectorXd& r) {
        J(0, 1) = 1.0;
        J(1, 0) = -stiffness / mass;
        r(1) = forcing(t) / mass;
      },
      opts);
}

PeriodicTrajectory::PeriodicTrajectory(double period, Eigen::VectorXd beta, Eigen::MatrixXd fine_states,
                                       Eigen::MatrixXd fine_derivs, double defect)
    : period_(period), beta_(std::move(beta)), states_(std::move(fine_states)),
      derivs_(std::move(fine_derivs)), defect_(defect) {
  if (states_.cols() != beta_.size() + 1 || derivs_.cols() != states_.cols() ||
      states_.rows() != derivs_.rows() + 1 || derivs_.rows() % 2 != 0)
    fail(ErrorCode::InvalidArgument, "trajectory: inconsistent state arrays");
}

PeriodicTrajectory PeriodicTrajectory::zero(double period, const Eigen::VectorXd& beta, int steps) {
  const int d = static_cast<int>(beta.size()) + 1;
  return PeriodicTrajectory(period, beta, Eigen::MatrixXd::Zero(2 * steps + 1, d),
                            Eigen::MatrixXd::Zero(2 * steps, d), 0.0);
}

double PeriodicTrajectory::sup_norm() const { return max_abs(states_); }

Eigen::Vector2d PeriodicTrajectory::velocity(const GalerkinBasis& basis, double x1, double x2, int j) const {
  const GalerkinBasis::Fields f = basis.fields(x1, x2);
  const Eigen::VectorXd coeff = a(j);
  return {coeff.dot(f.col(0)), coeff.dot(f.col(1))};
}

void PeriodicTrajectory::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << "t,z,zdot";
  for (int i = 0; i < modes(); ++i) out << ",a" << i + 1;
  out << '\n' << std::setprecision(17);
  for (int j = 0; j < samples(); ++j) {
    out << time(j) << ',' << z(j) << ',' << zdot(j);
    const Eigen::VectorXd c = a(j);
    for (int i = 0; i < modes(); ++i) out << ',' << c(i);
    out << '\n';
  }
}

GalerkinLinearization::GalerkinLinearization(const GalerkinSystem& sys, double alpha,
                                             const IntegratorOptions& opts)
    : sys_(&sys), alpha_(alpha), steps_(opts.steps) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::InvalidArgument, "linearization: alpha must lie in (0, 1]");
  const int n = sys.size();
  const double T = sys.period;
  const double kr = sys.params.stiffness / sys.params.rho;
  const Eigen::VectorXd ab = sys.A_inv * sys.beta;
  auto base = [&](double t) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = -sys.A_inv * (sys.b + sys.d(t)).transpose();
    J.topRightCorner(n, 1) = -kr * ab;
    J.bottomLeftCorner(1, n) = sys.beta.transpose();
    return J;
  };
  c_blocks_.resize(n);
  for (int i = 0; i < n; ++i) c_blocks_[i] = sys.A_inv * sys.c.middleRows(i * n, n).transpose();

  substeps_ = opts.substeps;
  if (substeps_ <= 0) {
    double rho = 0.0;
    for (int q = 0; q < 16; ++q)
      rho = std::max(rho, Eigen::EigenSolver<Eigen::MatrixXd>(base(T * q / 16.0), false)
                              .eigenvalues().cwiseAbs().maxCoeff());
    // margin for the frozen convective term
    substeps_ = choose_substeps(1.1 * rho, T, steps_);
  }
  const int lattice = 4 * steps_ * substeps_;
  J_base_.resize(lattice);
  r_.resize(lattice);
  phases_.resize(lattice, steps_);
  const double w = fourier::angular_frequency(T);
  for (int l = 0; l < lattice; ++l) {
    const double t = T * l / lattice;
    J_base_[l] = base(t);
    r_[l] = Eigen::VectorXd::Zero(n + 1);
    r_[l].head(n) = sys.A_inv * sys.forcing(t, 1.0);
    for (int k = 0; k < steps_; ++k)
      phases_(l, k) = (k == 0 ? 1.0 : 2.0) * std::exp(cplx(0.0, w * k * t));
  }
}

LinearPeriodicSystem GalerkinLinearization::freeze(const PeriodicTrajectory* tilde) const {
  const int n = sys_->size();
  const int lattice = static_cast<int>(J_base_.size());
  std::vector<Eigen::MatrixXd> J = J_base_;
  std::vector<Eigen::VectorXd> r(lattice);
  for (int l = 0; l < lattice; ++l) r[l] = alpha_ * r_[l];
  if (tilde != nullptr && tilde->modes() > 0) {
    if (tilde->modes() != n || tilde->samples() != steps_ || std::abs(tilde->period() - sys_->period) > 1e-12)
      fail(ErrorCode::InvalidArgument, "linearization: tilde trajectory does not match the system grid");
    const Eigen::MatrixXd samples = tilde->fine_coefficients();
    const int fine = static_cast<int>(samples.rows());
    Eigen::MatrixXd vals = (phases_ * fourier::analyze_columns(samples, steps_ - 1)).real();
    // Nyquist term of the even-length grid
    Eigen::RowVectorXd nyq = Eigen::RowVectorXd::Zero(n);
    for (int i = 0; i < fine; ++i) nyq += (i % 2 == 0 ? 1.0 : -1.0) * samples.row(i);
    nyq /= fine;
    for (int l = 0; l < lattice; ++l) {
      const double t = sys_->period * l / lattice;
      const Eigen::RowVectorXd at = vals.row(l) + std::cos(M_PI * fine * t / sys_->period) * nyq;
      auto block = J[l].topLeftCorner(n, n);
      for (int i = 0; i < n; ++i) block -= at(i) * c_blocks_[i];
    }
  }
  return LinearPeriodicSystem(sys_->period, steps_, substeps_, std::move(J), std::move(r));
}

PeriodicTrajectory GalerkinLinearization::solve(const PeriodicTrajectory* tilde, Monodromy* mono) const {
  LinearSolution sol = solve_linear_periodic(freeze(tilde));
  if (mono != nullptr) *mono = sol.mono;
  return PeriodicTrajectory(sys_->period, sys_->beta, std::move(sol.states), std::move(sol.derivs),
                            sol.defect);
}

}  // namespace oscflow
