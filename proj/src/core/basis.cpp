#include "oscflow/basis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "oscflow/error.hpp"
#include "oscflow/fourier.hpp"
#include "oscflow/parallel.hpp"

namespace oscflow {
namespace {

Jet constant_jet(double v) { return {v, 0.0, 0.0, 0.0}; }

// P_a(x / scale) and its x derivatives.
Jet legendre(int a, double x, double scale) {
  std::vector<double> prev{1.0}, cur{0.0, 1.0};
  std::vector<double> coeffs = a == 0 ? prev : cur;
  for (int k = 1; k < a; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) next[i + 1] += (2.0 * k + 1.0) * cur[i] / (k + 1.0);
    for (int i = 0; i < k; ++i) next[i] -= k * prev[i] / (k + 1.0);
    prev = cur;
    cur = next;
    coeffs = cur;
  }
  const double u = x / scale;
  double d[4] = {0.0, 0.0, 0.0, 0.0};
  for (int order = 0; order < 4; ++order) {
    double s = 0.0;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= order; --i) {
      double falling = 1.0;
      for (int j = 0; j < order; ++j) falling *= i - j;
      s = s * u + coeffs[i] * falling;
    }
    d[order] = s / std::pow(scale, order);
  }
  return {d[0], d[1], d[2], d[3]};
}

// (1 - (x/xs)^2)^3 inside |x| < xs, zero outside.
Jet cubic_window(double x, double xs) {
  if (std::abs(x) >= xs) return {};
  const double q = 1.0 - x * x / (xs * xs), q1 = -2.0 * x / (xs * xs), q2 = -2.0 / (xs * xs);
  return {q * q * q, 3.0 * q * q * q1, 6.0 * q * q1 * q1 + 3.0 * q * q * q2,
          6.0 * q1 * q1 * q1 + 18.0 * q * q1 * q2};
}

// (1 - x^2)^2
Jet wall_window(double x) {
  const double q = 1.0 - x * x, q1 = -2.0 * x, q2 = -2.0;
  return {q * q, 2.0 * q * q1, 2.0 * q1 * q1 + 2.0 * q * q2, 6.0 * q1 * q2};
}

// one-sided synthesis of matrix harmonics
Eigen::MatrixXd synthesize_matrix(const std::vector<Eigen::MatrixXcd>& h, double period, double t) {
  const double w = fourier::angular_frequency(period);
  Eigen::MatrixXd out = h[0].real();
  for (std::size_t k = 1; k < h.size(); ++k)
    out += 2.0 * (h[k] * std::exp(cplx(0.0, w * static_cast<double>(k) * t))).real();
  return out;
}

Eigen::VectorXd synthesize_rows(const Eigen::MatrixXcd& h, double period, double t) {
  if (h.rows() == 0) return Eigen::VectorXd::Zero(h.cols());
  return fourier::evaluate_rows(h, period, t);
}

}  // namespace

GalerkinBasis GalerkinBasis::build(const ChannelGeometry& geom, const QuadratureMesh& mesh,
                                   const BasisOptions& opts) {
  GalerkinBasis basis = prepare(geom, opts);
  basis.orthonormalize(mesh);
  return basis;
}

GalerkinBasis GalerkinBasis::prepare(const ChannelGeometry& geom, const BasisOptions& opts) {
  if (opts.size < 1) fail(ErrorCode::InvalidArgument, "basis: size must be >= 1");
  const Rect& body = geom.body();
  const double r_out = opts.r_out > 0.0 ? opts.r_out : std::min(0.9, 0.8 * geom.margin());
  const double r_in = opts.r_in > 0.0 ? opts.r_in : 0.25 * r_out;
  if (!(r_in < r_out)) fail(ErrorCode::Geometry, "basis: need r_in < r_out");
  if (body.y1 + r_out >= 1.0 || body.y0 - r_out <= -1.0)
    fail(ErrorCode::Geometry, "basis: body bump reaches the channel walls");
  const double xs = geom.x0() + 0.5;
  const double yc = body.center_y();

  GalerkinBasis basis;
  basis.n_ = opts.size;
  basis.body_modes_ = (opts.size + 3) / 4;
  basis.support_x1_ = xs;
  const int n = opts.size;

  auto b1 = [=](double x) { return interval_cutoff(x, body.x0, body.x1, r_in, r_out); };
  auto b2 = [=](double y) { return interval_cutoff(y, body.y0, body.y1, r_in, r_out); };
  basis.breaks_x1_ = {-xs, xs, body.x0 - r_out, body.x0 - r_in, body.x1 + r_in, body.x1 + r_out};
  basis.breaks_x2_ = {body.y0 - r_out, body.y0 - r_in, body.y1 + r_in, body.y1 + r_out};

  const double room = geom.x0() - std::max(std::abs(body.x0), std::abs(body.x1)) - 0.1;
  for (int j = 0; j < basis.body_modes_; ++j) {
    const double rj = std::min(r_out + 0.3 * j, room);
    if (!(rj > r_in))
      fail(ErrorCode::Geometry, "basis: no room for body-coupled mode " + std::to_string(j + 1));
    basis.terms_.push_back({j, [=](double x) { return interval_cutoff(x, body.x0, body.x1, r_in, rj); },
                            [=](double y) { return Jet{y - yc, 1.0, 0.0, 0.0} * b2(y); }});
    basis.breaks_x1_.push_back(body.x0 - rj);
    basis.breaks_x1_.push_back(body.x1 + rj);
    basis.labels_.push_back("body" + std::to_string(j + 1));
  }
  int mode = basis.body_modes_;
  for (int deg = 0; mode < n; ++deg) {
    for (int a = deg; a >= 0 && mode < n; --a, ++mode) {
      const int bdeg = deg - a;
      auto x_plain = [=](double x) { return cubic_window(x, xs) * legendre(a, x, xs); };
      auto y_plain = [=](double y) { return wall_window(y) * legendre(bdeg, y, 1.0); };
      basis.terms_.push_back({mode, x_plain, y_plain});
      basis.terms_.push_back({mode, [=](double x) { return constant_jet(-1.0) * x_plain(x) * b1(x); },
                              [=](double y) { return y_plain(y) * b2(y); }});
      basis.labels_.push_back("interior(" + std::to_string(a) + "," + std::to_string(bdeg) + ")");
    }
  }

  // beta_raw from the left face of the body
  const Fields at_body = basis.raw_fields(body.x0, yc);
  basis.beta_raw_ = at_body.col(0);
  return basis;
}

void GalerkinBasis::orthonormalize(const QuadratureMesh& mesh) {
  GalerkinBasis& basis = *this;
  const int n = n_;
  const GridJets jets = basis.grid_jets(mesh.xs(), mesh.ys());
  const int nrows = static_cast<int>(mesh.ys().size());
  std::vector<Eigen::MatrixXd> partial(nrows);
  parallel_for(nrows, [&](int r) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    Fields f(n, kFieldCols);
    for (std::size_t p = mesh.row_begin(r); p < mesh.row_begin(r + 1); ++p) {
      const auto& pt = mesh.points()[p];
      basis.raw_fields(jets, pt.col, r, f);
      g.noalias() += pt.w * (f.col(0) * f.col(0).transpose() + f.col(1) * f.col(1).transpose());
    }
    partial[r] = std::move(g);
  });
  basis.gram_raw_ = Eigen::MatrixXd::Zero(n, n);
  for (const auto& g : partial) basis.gram_raw_ += g;

  Eigen::LLT<Eigen::MatrixXd> llt(basis.gram_raw_);
  const Eigen::VectorXd diag = basis.gram_raw_.diagonal();
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::Inconsistent, "basis: Gram matrix is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  for (int i = 0; i < n; ++i)
    if (l(i, i) * l(i, i) < 1e-10 * diag(i))
      fail(ErrorCode::Inconsistent, "basis: mode " + basis.labels_[i] +
                                        " is linearly dependent on the previous ones at this mesh");
  basis.transform_ = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  basis.beta_ = basis.transform_ * basis.beta_raw_;
  if (!(basis.beta_(0) > 0.0)) fail(ErrorCode::Inconsistent, "basis: beta_1 must be positive");
}

GalerkinBasis::GridJets GalerkinBasis::grid_jets(const std::vector<double>& xs,
                                                 const std::vector<double>& ys) const {
  GridJets j;
  j.x.resize(terms_.size());
  j.y.resize(terms_.size());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    j.x[t].resize(xs.size());
    j.y[t].resize(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) j.x[t][i] = terms_[t].x(xs[i]);
    for (std::size_t i = 0; i < ys.size(); ++i) j.y[t][i] = terms_[t].y(ys[i]);
  }
  return j;
}

void GalerkinBasis::raw_fields(const GridJets& jets, int col, int row, Eigen::Ref<Fields> out) const {
  out.setZero();
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const Jet& x = jets.x[t][col];
    const Jet& y = jets.y[t][row];
    const int m = terms_[t].mode;
    // u1 = s_y, u2 = -s_x
    out(m, 0) += x.v * y.d1;
    out(m, 1) -= x.d1 * y.v;
    out(m, 2) += x.d1 * y.d1;
    out(m, 3) += x.v * y.d2;
    out(m, 4) -= x.d2 * y.v;
    out(m, 5) -= x.d1 * y.d1;
  }
}

GalerkinBasis::Fields GalerkinBasis::raw_fields(double x1, double x2) const {
  const GridJets jets = grid_jets({x1}, {x2});
  Fields f(n_, kFieldCols);
  raw_fields(jets, 0, 0, f);
  return f;
}

Eigen::VectorXd GalerkinBasis::stream(double x1, double x2) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n_);
  for (const auto& t : terms_) s(t.mode) += t.x(x1).v * t.y(x2).v;
  return transform_ * s;
}

Eigen::VectorXd GalerkinSystem::c_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  const int n = size();
  Eigen::VectorXd xy(n * n);
  for (int i = 0; i < n; ++i) xy.segment(i * n, n) = x(i) * y;
  return c.transpose() * xy;
}

Eigen::MatrixXd GalerkinSystem::c_contract_first(const Eigen::VectorXd& x) const {
  const int n = size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) out += x(i) * c.middleRows(i * n, n);
  return out;
}

Eigen::MatrixXd GalerkinSystem::dV(double t) const { return synthesize_matrix(dV_h, period, t); }

Eigen::MatrixXd GalerkinSystem::dW(double t) const { return synthesize_matrix(dW_h, period, t); }

Eigen::VectorXd GalerkinSystem::f(double t) const {
  return synthesize_rows(f_lin, period, t) + synthesize_rows(f_quad, period, t) +
         synthesize_rows(f_tilde, period, t);
}

Eigen::VectorXd GalerkinSystem::forcing(double t, double alpha) const {
  return alpha * (f(t) + (g(t) / params.rho) * beta);
}

GalerkinSystem GalerkinSystem::scaled_flow(double eps) const {
  GalerkinSystem s = *this;
  for (auto& m : s.dV_h) m *= eps;
  for (auto& m : s.dW_h) m *= eps;
  s.f_lin *= eps;
  s.f_quad *= eps * eps;
  s.g_carrier = g_carrier.scaled(eps);
  return s;
}

GalerkinSystem assemble_system(const GalerkinBasis& basis, const ForcingData& forces,
                               const QuadratureMesh& mesh, const AssemblyOptions& opts) {
  const FluxCarrier& carrier = forces.carrier();
  const PoiseuilleFlow& flow = carrier.flow();
  const PhysicalParams& prm = flow.params();
  const int n = basis.size();
  const int kmax = flow.max_harmonic();
  const int m = opts.samples;
  if (m < 4 * kmax + 2)
    fail(ErrorCode::Resolution, "assembly: time grid too small for the quadratic force harmonics");
  const double nu = prm.nu();
  const double w = fourier::angular_frequency(flow.period());
  const int nrows = static_cast<int>(mesh.ys().size());
  const Eigen::VectorXd beta_raw = basis.beta_raw();

  const GalerkinBasis::GridJets jets = basis.grid_jets(mesh.xs(), mesh.ys());
  const std::vector<FluxCarrier::Row> rows = carrier.rows(mesh.ys());
  std::vector<Jet> b1(mesh.xs().size());
  for (std::size_t i = 0; i < b1.size(); ++i) b1[i] = carrier.b1(mesh.xs()[i]);
  const BodyForce& ft = forces.f_tilde();
  const Eigen::Vector2d ft_dir(ft.dir1, ft.dir2);

  struct RowOut {
    Eigen::MatrixXd N, D, c;
    Eigen::MatrixXd P[7];
    Eigen::MatrixXd Q;   // 5 x n
    Eigen::VectorXd ft;  // n
    Eigen::MatrixXd fq;  // m x n, empty when the row misses the cutoff box
  };
  std::vector<RowOut> out(nrows);
  const int workers = std::max(1, std::min(thread_count(), nrows));
  std::vector<std::unique_ptr<CarrierSampler>> samplers(workers);
  for (auto& s : samplers) s = std::make_unique<CarrierSampler>(carrier, m, 0);

  parallel_for(workers, [&](int wk) {
    CarrierSampler& sampler = *samplers[wk];
    for (int r = wk; r < nrows; r += workers) {
      const std::size_t begin = mesh.row_begin(r), end = mesh.row_begin(r + 1);
      const int np = static_cast<int>(end - begin);
      RowOut o;
      o.N = o.D = Eigen::MatrixXd::Zero(n, n);
      o.c = Eigen::MatrixXd::Zero(n * n, n);
      for (auto& p : o.P) p = Eigen::MatrixXd::Zero(n, n);
      o.Q = Eigen::MatrixXd::Zero(5, n);
      o.ft = Eigen::VectorXd::Zero(n);
      if (np == 0) {
        out[r] = std::move(o);
        continue;
      }
      // per-point fields of the raw modes, scaled copies built below
      Eigen::MatrixXd u1(np, n), u2(np, n), g11(np, n), g12(np, n), g21(np, n), g22(np, n);
      Eigen::VectorXd wt(np), c0(np), c1(np), c2(np), c3(np), bump(np);
      GalerkinBasis::Fields f(n, GalerkinBasis::kFieldCols);
      const bool row_active = rows[r].h.cwiseAbs().maxCoeff() > 0.0 ||
                              rows[r].dh.cwiseAbs().maxCoeff() > 0.0;
      std::vector<int> inside;
      for (int p = 0; p < np; ++p) {
        const auto& pt = mesh.points()[begin + p];
        basis.raw_fields(jets, pt.col, r, f);
        u1.row(p) = f.col(0).transpose();
        u2.row(p) = f.col(1).transpose();
        g11.row(p) = f.col(2).transpose();
        g12.row(p) = f.col(3).transpose();
        g21.row(p) = f.col(4).transpose();
        g22.row(p) = f.col(5).transpose();
        wt(p) = pt.w;
        const Jet& b = b1[pt.col];
        c0(p) = b.v;
        c1(p) = b.d1;
        c2(p) = b.d2;
        c3(p) = b.d3;
        bump(p) = ft.active() ? ft.bump(mesh.xs()[pt.col], mesh.ys()[r]) : 0.0;
        if (row_active && (b.v != 0.0 || b.d1 != 0.0 || b.d2 != 0.0 || b.d3 != 0.0)) inside.push_back(p);
      }
      const Eigen::MatrixXd v1 = u1 - Eigen::VectorXd::Ones(np) * beta_raw.transpose();  // psi - beta e1
      const Eigen::MatrixXd& v2 = u2;
      auto wdiag = [&](const Eigen::VectorXd& s) { return (wt.array() * s.array()).matrix().asDiagonal(); };
      const auto W = wt.asDiagonal();

      o.N = g11.transpose() * W * g11 + g12.transpose() * W * g12 + g21.transpose() * W * g21 +
            g22.transpose() * W * g22;
      const Eigen::MatrixXd d12 = 0.5 * (g12 + g21);
      o.D = g11.transpose() * W * g11 + g22.transpose() * W * g22 + 2.0 * d12.transpose() * W * d12;

      // c_ijk = sum_p w [(v1_i g11_j + v2_i g12_j) u1_k + (v1_i g21_j + v2_i g22_j) u2_k]
      Eigen::MatrixXd x1(np, n * n), x2(np, n * n);
      for (int i = 0; i < n; ++i) {
        x1.middleCols(i * n, n) = (v1.col(i).asDiagonal() * g11 + v2.col(i).asDiagonal() * g12);
        x2.middleCols(i * n, n) = (v1.col(i).asDiagonal() * g21 + v2.col(i).asDiagonal() * g22);
      }
      o.c = x1.transpose() * W * u1 + x2.transpose() * W * u2;

      // d = dV + dW split by the height functions they multiply
      o.P[0] = g11.transpose() * W * u1 + g21.transpose() * W * u2;                    // chi
      o.P[1] = g11.transpose() * wdiag(c0) * u1 + g21.transpose() * wdiag(c0) * u2;    // H'
      o.P[2] = -(g12.transpose() * wdiag(c1) * u1 + g22.transpose() * wdiag(c1) * u2); // H
      o.P[3] = v2.transpose() * W * u1;                                                // chi'
      o.P[4] = v1.transpose() * wdiag(c1) * u1 - v2.transpose() * wdiag(c1) * u2;      // H'
      o.P[5] = -(v1.transpose() * wdiag(c2) * u2);                                     // H
      o.P[6] = v2.transpose() * wdiag(c0) * u1;                                        // H''

      // linear part of f against each mode
      o.Q.row(0) = wt.transpose() * u1;
      o.Q.row(1) = (wt.array() * c2.array()).matrix().transpose() * u1;
      o.Q.row(2) = (wt.array() * c0.array()).matrix().transpose() * u1;
      o.Q.row(3) = (wt.array() * c3.array()).matrix().transpose() * u2;
      o.Q.row(4) = (wt.array() * c1.array()).matrix().transpose() * u2;
      if (ft.active()) {
        const Eigen::VectorXd wb = (wt.array() * bump.array()).matrix();
        o.ft = ft_dir(0) * (u1.transpose() * wb) + ft_dir(1) * (u2.transpose() * wb);
      }

      // quadratic part -(V . grad V, psi) on the time grid
      if (!inside.empty()) {
        sampler.load_row(rows[r]);
        const int ni = static_cast<int>(inside.size());
        Eigen::MatrixXd q1(m, ni), q2(m, ni), s1(ni, n), s2(ni, n);
        for (int a = 0; a < ni; ++a) {
          const int p = inside[a];
          const Jet b{c0(p), c1(p), c2(p), c3(p)};
          for (int j = 0; j < m; ++j) {
            const auto v = sampler.fields(j, b, 0);
            using F = FluxCarrier;
            q1(j, a) = v[F::kV1] * v[F::kV1x1] + v[F::kV2] * v[F::kV1x2];
            q2(j, a) = v[F::kV1] * v[F::kV2x1] + v[F::kV2] * v[F::kV2x2];
          }
          s1.row(a) = wt(p) * u1.row(p);
          s2.row(a) = wt(p) * u2.row(p);
        }
        o.fq = -(q1 * s1 + q2 * s2);
      }
      out[r] = std::move(o);
    }
  });

  // ordered reduction over rows
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n), D = N, c = Eigen::MatrixXd::Zero(n * n, n);
  std::vector<Eigen::MatrixXcd> dV(kmax + 1, Eigen::MatrixXcd::Zero(n, n)), dW = dV;
  Eigen::MatrixXcd flin = Eigen::MatrixXcd::Zero(kmax + 1, n);
  Eigen::VectorXd ftp = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd fq = Eigen::MatrixXd::Zero(m, n);
  for (int r = 0; r < nrows; ++r) {
    const RowOut& o = out[r];
    const FluxCarrier::Row& row = rows[r];
    N += o.N;
    D += o.D;
    c += o.c;
    ftp += o.ft;
    if (o.fq.size() > 0) fq += o.fq;
    for (int k = 0; k <= kmax; ++k) {
      const cplx iwk(0.0, w * k);
      const cplx psi = flow.pressure_signal().harmonic(k);
      dV[k] += row.chi(k) * o.P[0] + row.dh(k) * o.P[1] + row.h(k) * o.P[2];
      dW[k] += row.dchi(k) * o.P[3] + row.dh(k) * o.P[4] + row.h(k) * o.P[5] + row.ddh(k) * o.P[6];
      flin.row(k) += ((nu * row.ddchi(k) - iwk * row.chi(k) + psi) * o.Q.row(0) +
                      nu * row.dh(k) * o.Q.row(1) + (nu * row.dddh(k) - iwk * row.dh(k)) * o.Q.row(2) -
                      nu * row.h(k) * o.Q.row(3) + (iwk * row.h(k) - nu * row.ddh(k)) * o.Q.row(4))
                         .cast<cplx>();
    }
  }

  // rotate everything into the orthonormal basis
  const Eigen::MatrixXd& C = basis.transform();
  GalerkinSystem sys;
  sys.params = prm;
  sys.period = flow.period();
  sys.samples = m;
  sys.beta = basis.beta();
  sys.gram = C * basis.gram_raw() * C.transpose();
  sys.A = Eigen::MatrixXd::Identity(n, n) + (prm.mass / prm.rho) * sys.beta * sys.beta.transpose();
  sys.A_inv = sys.A.inverse();
  sys.N = C * N * C.transpose();
  sys.b = (2.0 * prm.mu / prm.rho) * (C * D * C.transpose());
  sys.c = Eigen::MatrixXd::Zero(n * n, n);
  {
    // c'_{ijk} = C_ia C_jb C_kc c_abc
    Eigen::MatrixXd tmp = c * C.transpose();  // (ab) x k
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) acc += C(i, a) * C(j, b) * tmp.row(a * n + b);
        sys.c.row(i * n + j) = acc;
      }
  }
  const Eigen::MatrixXcd Cc = C.cast<cplx>();
  for (int k = 0; k <= kmax; ++k) {
    sys.dV_h.push_back(Cc * dV[k] * Cc.transpose());
    sys.dW_h.push_back(Cc * dW[k] * Cc.transpose());
  }
  sys.f_lin = flin * Cc.transpose();
  const int kq = std::min(2 * kmax, m / 2 - 1);
  sys.f_quad = fourier::analyze_columns(fq, kq) * Cc.transpose();
  if (ft.active()) {
    const Eigen::VectorXd proj = C * ftp;
    const int kt = ft.signal.max_harmonic();
    sys.f_tilde = Eigen::MatrixXcd::Zero(kt + 1, n);
    for (int k = 0; k <= kt; ++k) sys.f_tilde.row(k) = ft.signal.harmonic(k) * proj.transpose().cast<cplx>();
  } else {
    sys.f_tilde = Eigen::MatrixXcd::Zero(1, n);
  }
  sys.g_carrier = forces.g_carrier();
  sys.g_tilde = forces.g_tilde();
  return sys;
}

CqEstimate estimate_cq(const GalerkinSystem& sys, double phi_w12, unsigned long long seed,
                       int random_samples) {
  CqEstimate est;
  if (!(phi_w12 > 0.0)) {
    est.phi_zero = true;
    return est;
  }
  const int n = sys.size();
  const int m = sys.samples;
  std::vector<Eigen::MatrixXd> sym(m);
  double eig_max = 0.0;
  for (int j = 0; j < m; ++j) {
    const Eigen::MatrixXd dw = sys.dW(sys.period * j / m);
    sym[j] = 0.5 * (dw + dw.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sym[j], sys.N);
    eig_max = std::max(eig_max, ges.eigenvalues().cwiseAbs().maxCoeff());
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  double sampled = 0.0, half = 0.0;
  for (int s = 0; s < random_samples; ++s) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = uniform();
    const double denom = x.dot(sys.N * x);
    double best = 0.0;
    for (int j = 0; j < m; ++j) best = std::max(best, std::abs(x.dot(sym[j] * x)) / denom);
    sampled = std::max(sampled, best);
    if (s < random_samples / 2) half = sampled;
  }
  est.sampled = sampled / phi_w12;
  est.sampled_half = half / phi_w12;
  est.value = std::max(eig_max, sampled) / phi_w12;
  return est;
}

}  // namespace oscflow
