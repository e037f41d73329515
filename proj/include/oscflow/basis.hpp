#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oscflow/carrier.hpp"
#include "oscflow/geometry.hpp"
#include "oscflow/signals.hpp"

namespace oscflow {

struct BasisOptions {
  int size = 8;
  // Cutoff radii of the body bump; zero picks min(0.9, 0.8 margin) and a quarter of it.
  double r_in = 0.0;
  double r_out = 0.0;
};

// Divergence-free fields psi_i = (d2 s_i, -d1 s_i) from compactly supported
// stream functions, orthonormalized in L2 on a quadrature mesh.
//   body-coupled modes: s = (x2 - yc) C_j(x1) B2(x2), equal to x2 - yc near
//     the body, so psi = e1 there;
//   interior modes: s = w1(x1) w2(x2) (1 - B1(x1) B2(x2)) P_a(x1/Xs) P_b(x2),
//     with w1 = (1 - (x1/Xs)^2)^3, w2 = (1 - x2^2)^2, vanishing near the body.
// Every stream function is a sum of separable terms X(x1) Y(x2).
class GalerkinBasis {
 public:
  static constexpr int kFieldCols = 6;  // u1, u2, du1/dx1, du1/dx2, du2/dx1, du2/dx2
  using Fields = Eigen::Matrix<double, Eigen::Dynamic, kFieldCols>;

  struct Term {
    int mode = 0;
    std::function<Jet(double)> x, y;
  };

  // Jets of every term on the tensor grid of a mesh.
  struct GridJets {
    std::vector<std::vector<Jet>> x, y;  // [term][col], [term][row]
  };

  static GalerkinBasis build(const ChannelGeometry& geom, const QuadratureMesh& mesh,
                             const BasisOptions& opts = {});
  // Modes and breaklines only; orthonormalize() must run before the fields are used.
  static GalerkinBasis prepare(const ChannelGeometry& geom, const BasisOptions& opts = {});
  void orthonormalize(const QuadratureMesh& mesh);

  int size() const { return n_; }
  int body_modes() const { return body_modes_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::VectorXd& beta_raw() const { return beta_raw_; }
  const Eigen::MatrixXd& transform() const { return transform_; }
  const Eigen::MatrixXd& gram_raw() const { return gram_raw_; }
  double support_x1() const { return support_x1_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::vector<double> breaks_x1() const { return breaks_x1_; }
  std::vector<double> breaks_x2() const { return breaks_x2_; }

  // Raw and orthonormal fields at a point (rows = modes).
  Fields raw_fields(double x1, double x2) const;
  Fields fields(double x1, double x2) const { return transform_ * raw_fields(x1, x2); }
  // Orthonormal stream functions at a point.
  Eigen::VectorXd stream(double x1, double x2) const;

  GridJets grid_jets(const std::vector<double>& xs, const std::vector<double>& ys) const;
  void raw_fields(const GridJets& jets, int col, int row, Eigen::Ref<Fields> out) const;

 private:
  int n_ = 0;
  int body_modes_ = 0;
  double support_x1_ = 0.0;
  std::vector<Term> terms_;
  std::vector<std::string> labels_;
  std::vector<double> breaks_x1_, breaks_x2_;
  Eigen::VectorXd beta_raw_, beta_;
  Eigen::MatrixXd gram_raw_, transform_;
};

// Coefficients of the Galerkin system
//   A a' + c(a, a) + (k/rho) beta z + (b + d(t))^T a = alpha (f(t) + g(t) beta / rho),
//   z' = beta . a,
// with c(a, a)_k = sum_ij c_ijk a_i a_j. Time-dependent data are stored as
// one-sided Fourier harmonics; the f parts are kept apart so the flow rate
// can be rescaled without reassembly.
struct GalerkinSystem {
  PhysicalParams params;
  double period = 1.0;
  int samples = 256;
  Eigen::VectorXd beta;
  Eigen::MatrixXd A, A_inv, b, N, gram;
  Eigen::MatrixXd c;                 // n^2 x n, row i * n + j, column k
  std::vector<Eigen::MatrixXcd> dV_h, dW_h;  // one-sided harmonics, entry (i, k)
  Eigen::MatrixXcd f_lin, f_quad, f_tilde;  // harmonics x n
  PeriodicSignal g_carrier, g_tilde;

  int size() const { return static_cast<int>(beta.size()); }
  double c_at(int i, int j, int k) const { return c(i * size() + j, k); }
  // sum_ij c_ijk x_i y_j
  Eigen::VectorXd c_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  // L(x)_{jk} = sum_i c_ijk x_i
  Eigen::MatrixXd c_contract_first(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dV(double t) const;
  Eigen::MatrixXd dW(double t) const;
  Eigen::MatrixXd d(double t) const { return dV(t) + dW(t); }
  double g(double t) const { return g_carrier(t) + g_tilde(t); }
  Eigen::VectorXd f(double t) const;
  // alpha (f_k + g beta_k / rho)
  Eigen::VectorXd forcing(double t, double alpha = 1.0) const;
  // System for the flow rate scaled by eps (tilde forces unchanged).
  GalerkinSystem scaled_flow(double eps) const;
};

struct AssemblyOptions {
  int samples = 256;  // time grid for the quadratic part of f
};

GalerkinSystem assemble_system(const GalerkinBasis& basis, const ForcingData& forces,
                               const QuadratureMesh& mesh, const AssemblyOptions& opts = {});

struct CqEstimate {
  double value = 0.0;          // max over the span (generalized eigenvalues) and samples
  double sampled = 0.0;        // max over random combinations only
  double sampled_half = 0.0;   // same with half the samples
  bool phi_zero = false;
};

// Empirical constant of |((psi - beta e1) . grad V, psi)| <= c ||phi||_{W12} ||grad psi||^2
// over the span of the basis and the time grid.
CqEstimate estimate_cq(const GalerkinSystem& sys, double phi_w12, unsigned long long seed,
                       int random_samples = 400);

}  // namespace oscflow
