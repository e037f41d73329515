#include "oscflow/womersley.hpp"

#include <algorithm>
#include <cmath>

#include "oscflow/chebyshev.hpp"
#include "oscflow/error.hpp"

namespace oscflow {

double synthesize(const Eigen::VectorXcd& harmonics, double period, double t, int dt) {
  const double w = fourier::angular_frequency(period);
  double s = harmonics.size() > 0 ? (dt == 0 ? harmonics(0).real() : 0.0) : 0.0;
  for (Eigen::Index k = 1; k < harmonics.size(); ++k) {
    const cplx iwk(0.0, w * static_cast<double>(k));
    s += 2.0 * (harmonics(k) * std::pow(iwk, dt) * std::exp(iwk * t)).real();
  }
  return s;
}

PoiseuilleFlow PoiseuilleFlow::solve(const PeriodicSignal& flowrate, const PhysicalParams& params,
                                     int cheb_order) {
  params.validate();
  if (cheb_order < 8) fail(ErrorCode::InvalidArgument, "poiseuille: Chebyshev order must be >= 8");
  const int n = cheb_order;
  const int kmax = flowrate.max_harmonic();
  const double period = flowrate.period();
  const double nu = params.nu();
  const double w = fourier::angular_frequency(period);

  PoiseuilleFlow flow;
  flow.flowrate_ = flowrate;
  flow.params_ = params;
  flow.nodes_ = cheb::nodes(n);
  flow.cc_weights_ = cheb::clenshaw_curtis_weights(n);

  // Stokes layer of the highest harmonic has to span a few nodes.
  const double layer = std::sqrt(params.mu * period / (params.rho * 2.0 * M_PI * std::max(kmax, 1)));
  int in_layer = 0;
  for (int j = 0; j <= n; ++j)
    if (1.0 - flow.nodes_(j) < layer && j <= n / 2) ++in_layer;
  if (in_layer < 4)
    fail(ErrorCode::Resolution, "poiseuille: Stokes layer " + std::to_string(layer) +
                                    " spans only " + std::to_string(in_layer) +
                                    " nodes; raise the Chebyshev order");

  const Eigen::MatrixXd d = cheb::diff_matrix(n);
  const Eigen::MatrixXd d2 = d * d;
  const int inner = n - 1;
  const Eigen::MatrixXd d2_inner = d2.block(1, 1, inner, inner);

  flow.nodal_ = Eigen::MatrixXcd::Zero(n + 1, kmax + 1);
  std::vector<cplx> psi(static_cast<std::size_t>(kmax + 1), cplx(0.0));
  for (int k = 0; k <= kmax; ++k) {
    const cplx phik = flowrate.harmonic(k);
    if (phik == cplx(0.0)) continue;
    // unit pressure response u: (i w k - nu D2) u = 1, u(+-1) = 0
    Eigen::MatrixXcd op = (-nu) * d2_inner.cast<cplx>();
    op.diagonal().array() += cplx(0.0, w * k);
    const Eigen::VectorXcd rhs = Eigen::VectorXcd::Ones(inner);
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n + 1);
    u.segment(1, inner) = op.partialPivLu().solve(rhs);
    const cplx flux_u = flow.cc_weights_.cast<cplx>().dot(u);
    if (std::abs(flux_u) == 0.0) fail(ErrorCode::Inconsistent, "poiseuille: singular harmonic solve");
    psi[k] = phik / flux_u;
    flow.nodal_.col(k) = psi[k] * u;
  }
  flow.pressure_ = PeriodicSignal::from_one_sided(period, psi, flowrate.grid_size());

  const Eigen::MatrixXcd c0 = cheb::coefficients(flow.nodal_);
  flow.coeff_[0] = c0;
  flow.coeff_[1] = cheb::derivative_coefficients(c0);
  // chi'' straight from the profile equation; differentiating the series twice
  // would amplify roundoff by about N^2
  flow.coeff_[2] = Eigen::MatrixXcd::Zero(c0.rows(), c0.cols());
  for (int k = 0; k <= kmax; ++k) {
    flow.coeff_[2].col(k) = cplx(0.0, w * k) * c0.col(k);
    flow.coeff_[2](0, k) -= psi[k];
    flow.coeff_[2].col(k) /= nu;
  }
  flow.coeff_s_ = cheb::integral_coefficients(c0);
  return flow;
}

Eigen::VectorXcd PoiseuilleFlow::harmonics_at(double x2, int order) const {
  if (order < -1 || order > 2)
    fail(ErrorCode::InvalidArgument, "poiseuille: profile order must be in -1..2");
  return cheb::clenshaw(order < 0 ? coeff_s_ : coeff_[order], x2);
}

double PoiseuilleFlow::value(double x2, double t, int order, int dt) const {
  return synthesize(harmonics_at(x2, order), period(), t, dt);
}

double PoiseuilleFlow::flux(double t) const {
  const Eigen::VectorXcd per_k = nodal_.transpose() * cc_weights_.cast<cplx>();
  return synthesize(per_k, period(), t);
}

std::vector<NormRow> chi_norm_report(const PoiseuilleFlow& flow, int time_samples) {
  const int kmax = flow.max_harmonic();
  const int m = time_samples > 0 ? time_samples : flow.flowrate().grid_size();
  const int n = static_cast<int>(flow.nodes().size()) - 1;
  const double period = flow.period();
  const double w = fourier::angular_frequency(period);
  const Eigen::MatrixXd d = cheb::diff_matrix(n);
  const Eigen::VectorXd cc = cheb::clenshaw_curtis_weights(n);

  // spatial derivatives of each harmonic at the nodes
  Eigen::MatrixXcd deriv[3];
  deriv[0] = flow.nodal();
  deriv[1] = d.cast<cplx>() * deriv[0];
  deriv[2] = d.cast<cplx>() * deriv[1];
  // sq[j](k) = int |chi_k^{(j)}|^2 dx2
  Eigen::MatrixXd sq(3, kmax + 1);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k <= kmax; ++k) sq(j, k) = cc.dot(deriv[j].col(k).cwiseAbs2());

  // sum_{r<=tr} ||d_t^r chi||^2_{L^2(0,T;W^{s,2})} via Parseval
  auto sobolev = [&](int tr, int s) {
    double total = 0.0;
    for (int k = 0; k <= kmax; ++k) {
      const double mult = k == 0 ? 1.0 : 2.0;
      double tw = 0.0, p = 1.0;
      for (int r = 0; r <= tr; ++r) {
        if (r == 0 || k > 0) tw += p;
        p *= (w * k) * (w * k);
      }
      double sw = 0.0;
      for (int j = 0; j <= s; ++j) sw += sq(j, k);
      total += mult * tw * sw;
    }
    return std::sqrt(period * total);
  };
  // sup_t (sum_{r<=tr} ||d_t^r chi(t)||^2_{W^{1,2}})^{1/2} on the time grid
  auto sup_w12 = [&](int tr) {
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = period * i / m;
      double total = 0.0;
      for (int r = 0; r <= tr; ++r)
        for (int j = 0; j <= 1; ++j) {
          Eigen::VectorXd vals(n + 1);
          for (int q = 0; q <= n; ++q)
            vals(q) = synthesize(deriv[j].row(q).transpose(), period, t, r);
          total += cc.dot(vals.cwiseAbs2());
        }
      best = std::max(best, std::sqrt(total));
    }
    return best;
  };

  const PeriodicSignal& phi = flow.flowrate();
  std::vector<NormRow> rows;
  auto add = [&](const std::string& name, double value, int data_order) {
    NormRow r;
    r.name = name;
    r.value = value;
    r.phi_norm = phi.sobolev_norm(data_order);
    r.ratio = r.phi_norm > 0.0 ? value / r.phi_norm : 0.0;
    rows.push_back(r);
  };
  add("L2(0,T;W22)", sobolev(0, 2), 1);
  add("C(0,T;W12)", sup_w12(0), 1);
  add("W12(0,T;L2)", sobolev(1, 0), 1);
  add("W12(0,T;W22)", sobolev(1, 2), 2);
  add("C1(0,T;W12)", sup_w12(1), 2);
  add("W22(0,T;L2)", sobolev(2, 0), 2);
  add("W22(0,T;W22)", sobolev(2, 2), 3);
  add("C2(0,T;W12)", sup_w12(2), 3);
  add("W32(0,T;L2)", sobolev(3, 0), 3);
  return rows;
}

}  // namespace oscflow
