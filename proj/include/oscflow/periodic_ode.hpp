#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oscflow/basis.hpp"
#include "oscflow/fourier.hpp"
#include "oscflow/signals.hpp"

namespace oscflow {

struct IntegratorOptions {
  int steps = 256;            // coarse steps per period
  int substeps = 0;           // RK4 steps per coarse step; 0 picks from the coefficient spectrum
  double halving_tol = 1e-6;  // allowed relative disagreement between step h and h/2
};

// Largest |lambda| h tolerated on the coarse pass when substeps are chosen.
inline constexpr double kStableStep = 1.0;
int choose_substeps(double spectral_radius, double period, int steps);

// Step-halved RK4 run of x' = rhs(t, x) over [0, t_end]. States are returned
// from the fine pass on t_j = j t_end / (2 M), j = 0..2M.
struct Integration {
  Eigen::MatrixXd states;  // (2M + 1) x dim
  double halving_error = 0.0;
};

using Rhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
Integration integrate(const Rhs& rhs, const Eigen::VectorXd& x0, double t_end,
                      const IntegratorOptions& opts = {});

// x' = J(t) x + r(t) with T-periodic coefficients, tabulated on the lattice
// t_l = l T / (4 M s) that both RK4 passes visit.
class LinearPeriodicSystem {
 public:
  using Eval = std::function<void(double t, Eigen::MatrixXd& J, Eigen::VectorXd& r)>;

  LinearPeriodicSystem() = default;
  LinearPeriodicSystem(double period, int steps, int substeps, std::vector<Eigen::MatrixXd> J,
                       std::vector<Eigen::VectorXd> r);
  // Substeps (when opts.substeps == 0) come from the spectral radius of J at 16 times.
  static LinearPeriodicSystem tabulate(int dim, double period, const Eval& eval,
                                       const IntegratorOptions& opts = {});

  int dim() const { return dim_; }
  double period() const { return period_; }
  int steps() const { return steps_; }
  int substeps() const { return substeps_; }
  int lattice() const { return static_cast<int>(J_.size()); }
  double lattice_time(int l) const { return period_ * l / lattice(); }
  const Eigen::MatrixXd& J(int l) const { return J_[l % lattice()]; }
  const Eigen::VectorXd& r(int l) const { return r_[l % lattice()]; }
  double spectral_radius() const;

 private:
  int dim_ = 0;
  double period_ = 1.0;
  int steps_ = 0, substeps_ = 1;
  std::vector<Eigen::MatrixXd> J_;
  std::vector<Eigen::VectorXd> r_;
};

struct Monodromy {
  Eigen::MatrixXd M;  // fundamental matrix at T
  Eigen::VectorXd r;  // state at T from zero initial data
  double sigma_min = 0.0;  // of I - M
  double norm = 0.0;       // spectral norm of M
  double halving_error = 0.0;
  bool singular(double rel = 1e-8) const { return sigma_min < rel * norm; }
};

Monodromy monodromy(const LinearPeriodicSystem& sys, double halving_tol = 1e-6);

struct LinearSolution {
  Eigen::MatrixXd states;  // (2M + 1) x dim on the fine grid, last row at t = T
  Eigen::MatrixXd derivs;  // 2M x dim, right-hand side at the fine grid
  Monodromy mono;
  double halving_error = 0.0;
  double defect = 0.0;  // |x(T) - x(0)|_inf / (1 + sup |x|)
};

// Unique T-periodic solution x(0) = (I - M)^{-1} r; throws ResonantOrNonUnique
// when sigma_min(I - M) < singular_rel |M|.
LinearSolution solve_linear_periodic(const LinearPeriodicSystem& sys, double singular_rel = 1e-8,
                                     double halving_tol = 1e-6);

// m z'' + k z = forcing(t) as the first-order system (z, z').
LinearPeriodicSystem decoupled_oscillator(double mass, double stiffness, const PeriodicSignal& forcing,
                                          const IntegratorOptions& opts = {});

// Galerkin coefficients a(t) and displacement z(t) of a T-periodic solution on
// a uniform grid of 2M points; coarse index j maps to fine index 2j.
class PeriodicTrajectory {
 public:
  PeriodicTrajectory() = default;
  PeriodicTrajectory(double period, Eigen::VectorXd beta, Eigen::MatrixXd fine_states,
                     Eigen::MatrixXd fine_derivs, double defect);
  static PeriodicTrajectory zero(double period, const Eigen::VectorXd& beta, int steps);

  int modes() const { return static_cast<int>(beta_.size()); }
  double period() const { return period_; }
  int samples() const { return fine_samples() / 2; }
  int fine_samples() const { return static_cast<int>(derivs_.rows()); }
  double time(int j) const { return period_ * j / samples(); }
  double fine_time(int i) const { return period_ * i / fine_samples(); }

  Eigen::VectorXd a(int j) const { return fine_a(2 * j); }
  Eigen::VectorXd adot(int j) const { return fine_adot(2 * j); }
  double z(int j) const { return fine_z(2 * j); }
  double zdot(int j) const { return fine_zdot(2 * j); }
  double zddot(int j) const { return fine_zddot(2 * j); }

  Eigen::VectorXd fine_a(int i) const { return states_.row(i).head(modes()).transpose(); }
  Eigen::VectorXd fine_adot(int i) const { return derivs_.row(i).head(modes()).transpose(); }
  double fine_z(int i) const { return states_(i, modes()); }
  double fine_zdot(int i) const { return beta_.dot(fine_a(i)); }
  double fine_zddot(int i) const { return beta_.dot(fine_adot(i)); }

  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::MatrixXd& fine_states() const { return states_; }  // includes t = T as last row
  const Eigen::MatrixXd& fine_derivs() const { return derivs_; }
  // Fine-grid a(t) samples, rows = time, without the t = T row.
  Eigen::MatrixXd fine_coefficients() const { return states_.topRows(fine_samples()).leftCols(modes()); }
  double periodicity_defect() const { return defect_; }
  double sup_norm() const;

  // v(x, t_j) = sum_i a_i(t_j) psi_i(x)
  Eigen::Vector2d velocity(const GalerkinBasis& basis, double x1, double x2, int j) const;

  // Rows t, z, z', a_1..a_n on the coarse grid.
  void write_csv(const std::string& path) const;

 private:
  double period_ = 1.0;
  Eigen::VectorXd beta_;
  Eigen::MatrixXd states_, derivs_;
  double defect_ = 0.0;
};

// The linearized Galerkin system for frozen tilde a(t), with the forcing scaled
// by alpha; the tilde-independent coefficients are tabulated once.
class GalerkinLinearization {
 public:
  GalerkinLinearization(const GalerkinSystem& sys, double alpha, const IntegratorOptions& opts = {});

  int substeps() const { return substeps_; }
  int steps() const { return steps_; }
  double alpha() const { return alpha_; }
  const GalerkinSystem& system() const { return *sys_; }
  // tilde == nullptr drops the convective term.
  LinearPeriodicSystem freeze(const PeriodicTrajectory* tilde) const;
  PeriodicTrajectory solve(const PeriodicTrajectory* tilde, Monodromy* mono = nullptr) const;

 private:
  const GalerkinSystem* sys_;
  double alpha_;
  int steps_, substeps_;
  std::vector<Eigen::MatrixXd> J_base_;
  std::vector<Eigen::VectorXd> r_;
  std::vector<Eigen::MatrixXd> c_blocks_;  // A^{-1} (c_i)^T, c_i = c(i, ., .)
  Eigen::MatrixXcd phases_;                // lattice x steps harmonics of the fine grid
};

}  // namespace oscflow
