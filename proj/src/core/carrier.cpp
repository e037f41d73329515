#include "oscflow/carrier.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "oscflow/error.hpp"
#include "oscflow/parallel.hpp"

namespace oscflow {
namespace {

FluxCarrier::FieldValues combine(const double* r, const Jet& b) {
  // r: chi, chi', chi'', H, H', H'', H'''
  FluxCarrier::FieldValues f{};
  f[FluxCarrier::kStream] = 0.0;  // not reconstructed from row series
  f[FluxCarrier::kV1] = r[0] + b.v * r[4];
  f[FluxCarrier::kV2] = -b.d1 * r[3];
  f[FluxCarrier::kV1x1] = b.d1 * r[4];
  f[FluxCarrier::kV1x2] = r[1] + b.v * r[5];
  f[FluxCarrier::kV2x1] = -b.d2 * r[3];
  f[FluxCarrier::kV2x2] = -b.d1 * r[4];
  f[FluxCarrier::kLapV1] = b.d2 * r[4] + r[2] + b.v * r[6];
  f[FluxCarrier::kLapV2] = -b.d3 * r[3] - b.d1 * r[5];
  return f;
}

Eigen::Vector2d convective(const FluxCarrier::FieldValues& v, const FluxCarrier::FieldValues& g) {
  // (v . grad) of the field whose gradient entries are in g
  using F = FluxCarrier;
  return {v[F::kV1] * g[F::kV1x1] + v[F::kV2] * g[F::kV1x2],
          v[F::kV1] * g[F::kV2x1] + v[F::kV2] * g[F::kV2x2]};
}

}  // namespace

FluxCarrier FluxCarrier::build(const PoiseuilleFlow& flow, const ChannelGeometry& geom,
                               const CarrierOptions& opts) {
  FluxCarrier c;
  c.flow_ = flow;
  c.geom_ = geom;
  const Rect& b = geom.body();
  c.r_out_ = opts.r_out > 0.0 ? opts.r_out : std::min(0.9, 0.8 * geom.margin());
  c.r_in_ = opts.r_in > 0.0 ? opts.r_in : 0.25 * c.r_out_;
  if (!(c.r_in_ < c.r_out_)) fail(ErrorCode::Geometry, "carrier: need r_in < r_out");
  if (b.y1 + c.r_out_ >= 1.0 || b.y0 - c.r_out_ <= -1.0)
    fail(ErrorCode::Geometry, "carrier: cutoff support touches the channel walls");
  if (b.x1 + c.r_out_ >= geom.x0() || b.x0 - c.r_out_ <= -geom.x0())
    fail(ErrorCode::Geometry, "carrier: cutoff support leaves the near zone |x1| < X0");
  c.c_ = flow.harmonics_at(b.center_y(), -1);
  return c;
}

Jet FluxCarrier::b1(double x1) const {
  const Rect& b = geom_.body();
  return interval_cutoff(x1, b.x0, b.x1, r_in_, r_out_);
}

Jet FluxCarrier::b2(double x2) const {
  const Rect& b = geom_.body();
  return interval_cutoff(x2, b.y0, b.y1, r_in_, r_out_);
}

bool FluxCarrier::in_cutoff_box(double x1, double x2) const {
  const Rect& b = geom_.body();
  return x1 > b.x0 - r_out_ && x1 < b.x1 + r_out_ && x2 > b.y0 - r_out_ && x2 < b.y1 + r_out_;
}

std::vector<double> FluxCarrier::breaks_x1() const {
  const Rect& b = geom_.body();
  return {b.x0 - r_out_, b.x0 - r_in_, b.x1 + r_in_, b.x1 + r_out_};
}

std::vector<double> FluxCarrier::breaks_x2() const {
  const Rect& b = geom_.body();
  return {b.y0 - r_out_, b.y0 - r_in_, b.y1 + r_in_, b.y1 + r_out_};
}

FluxCarrier::Row FluxCarrier::row(double x2) const {
  Row r;
  r.s = flow_.harmonics_at(x2, -1);
  r.chi = flow_.harmonics_at(x2, 0);
  r.dchi = flow_.harmonics_at(x2, 1);
  r.ddchi = flow_.harmonics_at(x2, 2);
  const Jet w = b2(x2);
  const Eigen::Index n = r.chi.size();
  if (w.v == 0.0 && w.d1 == 0.0 && w.d2 == 0.0 && w.d3 == 0.0) {
    r.h = r.dh = r.ddh = r.dddh = Eigen::VectorXcd::Zero(n);
    return r;
  }
  // D = c - S, D' = -chi, D'' = -chi', D''' = -chi''
  const Eigen::VectorXcd d0 = c_ - r.s;
  const Eigen::VectorXcd d1 = -r.chi, d2 = -r.dchi, d3 = -r.ddchi;
  r.h = d0 * w.v;
  r.dh = d1 * w.v + d0 * w.d1;
  r.ddh = d2 * w.v + 2.0 * d1 * w.d1 + d0 * w.d2;
  r.dddh = d3 * w.v + 3.0 * d2 * w.d1 + 3.0 * d1 * w.d2 + d0 * w.d3;
  return r;
}

std::vector<FluxCarrier::Row> FluxCarrier::rows(const std::vector<double>& x2) const {
  std::vector<Row> out(x2.size());
  parallel_for(static_cast<int>(x2.size()), [&](int i) { out[i] = row(x2[i]); });
  return out;
}

FluxCarrier::FieldHarmonics FluxCarrier::fields(const Row& r, const Jet& b) {
  const Eigen::Index n = r.chi.size();
  FieldHarmonics f(kFieldCount, n);
  f.row(kStream) = (r.s + b.v * r.h).transpose();
  f.row(kV1) = (r.chi + b.v * r.dh).transpose();
  f.row(kV2) = (-b.d1 * r.h).transpose();
  f.row(kV1x1) = (b.d1 * r.dh).transpose();
  f.row(kV1x2) = (r.dchi + b.v * r.ddh).transpose();
  f.row(kV2x1) = (-b.d2 * r.h).transpose();
  f.row(kV2x2) = (-b.d1 * r.dh).transpose();
  f.row(kLapV1) = (b.d2 * r.dh + r.ddchi + b.v * r.dddh).transpose();
  f.row(kLapV2) = (-b.d3 * r.h - b.d1 * r.ddh).transpose();
  return f;
}

FluxCarrier::FieldValues FluxCarrier::sample(double x1, double x2, double t, int dt) const {
  const FieldHarmonics f = fields_at(x1, x2);
  FieldValues out{};
  for (int i = 0; i < kFieldCount; ++i)
    out[i] = synthesize(f.row(i).transpose(), flow_.period(), t, dt);
  return out;
}

CarrierSampler::CarrierSampler(const FluxCarrier& carrier, int samples, int max_dt)
    : carrier_(&carrier), samples_(samples), max_dt_(max_dt) {
  if (samples < 1) fail(ErrorCode::InvalidArgument, "carrier sampler: need samples >= 1");
  if (max_dt < 0 || max_dt > 2) fail(ErrorCode::InvalidArgument, "carrier sampler: max_dt in 0..2");
  const PoiseuilleFlow& flow = carrier.flow();
  const int kmax = flow.max_harmonic();
  const double period = flow.period();
  const double w = fourier::angular_frequency(period);
  phases_.resize(kmax + 1, samples);
  pressure_.resize(samples, 3);
  Eigen::VectorXcd psi(kmax + 1);
  for (int k = 0; k <= kmax; ++k) psi(k) = flow.pressure_signal().harmonic(k);
  for (int m = 0; m < samples; ++m) {
    const double t = period * m / samples;
    for (int k = 0; k <= kmax; ++k) phases_(k, m) = std::exp(cplx(0.0, w * k * t));
    for (int j = 0; j < 3; ++j) pressure_(m, j) = synthesize(psi, period, t, j);
  }
}

void CarrierSampler::load_row(const FluxCarrier::Row& row) {
  const double w = fourier::angular_frequency(carrier_->flow().period());
  const Eigen::Index nk = row.chi.size();
  Eigen::MatrixXcd funcs(nk, kRowFuncs);
  funcs << row.chi, row.dchi, row.ddchi, row.h, row.dh, row.ddh, row.dddh;
  // one-sided synthesis: c_0 + 2 Re sum_k c_k (i w k)^dt e^{i w k t}
  for (int dt = 0; dt <= max_dt_; ++dt) {
    Eigen::MatrixXcd scaled = funcs;
    for (Eigen::Index k = 0; k < nk; ++k) {
      const cplx factor = k == 0 ? cplx(dt == 0 ? 1.0 : 0.0)
                                 : 2.0 * std::pow(cplx(0.0, w * static_cast<double>(k)), dt);
      scaled.row(k) *= factor;
    }
    series_[dt] = (phases_.transpose() * scaled).real();
  }
}

FluxCarrier::FieldValues CarrierSampler::fields(int m, const Jet& b1, int dt) const {
  if (dt > max_dt_) fail(ErrorCode::InvalidArgument, "carrier sampler: time derivative beyond max_dt");
  double r[kRowFuncs];
  for (int j = 0; j < kRowFuncs; ++j) r[j] = series_[dt](m, j);
  return combine(r, b1);
}

Eigen::Vector2d CarrierSampler::force(int m, const Jet& b1, int dt) const {
  if (dt + 1 > max_dt_) fail(ErrorCode::InvalidArgument, "carrier sampler: force needs max_dt >= dt + 1");
  const double nu = carrier_->flow().params().nu();
  using F = FluxCarrier;
  const F::FieldValues v = fields(m, b1, 0);
  const F::FieldValues vt = fields(m, b1, dt + 1);
  const F::FieldValues vl = dt == 0 ? v : fields(m, b1, dt);
  Eigen::Vector2d f(nu * vl[F::kLapV1] - vt[F::kV1] + pressure_(m, dt),
                    nu * vl[F::kLapV2] - vt[F::kV2]);
  if (dt == 0) {
    f -= convective(v, v);
  } else {
    const F::FieldValues v1 = fields(m, b1, 1);
    f -= convective(v1, v) + convective(v, v1);
  }
  return f;
}

double BodyForce::bump(double x1, double x2) const {
  if (radius <= 0.0) return 0.0;
  const double a = 1.0 - smoothstep(std::abs(x1 - c1) / radius).v;
  const double b = 1.0 - smoothstep(std::abs(x2 - c2) / radius).v;
  return a * b;
}

std::vector<double> BodyForce::breaks_x1() const {
  if (radius <= 0.0) return {};
  return {c1 - radius, c1, c1 + radius};
}

std::vector<double> BodyForce::breaks_x2() const {
  if (radius <= 0.0) return {};
  return {c2 - radius, c2, c2 + radius};
}

Eigen::Matrix<cplx, 2, Eigen::Dynamic> ForcingData::linear_harmonics(
    const FluxCarrier::FieldHarmonics& f, const PoiseuilleFlow& flow) {
  const double nu = flow.params().nu();
  const double w = fourier::angular_frequency(flow.period());
  const Eigen::Index nk = f.cols();
  Eigen::Matrix<cplx, 2, Eigen::Dynamic> out(2, nk);
  for (Eigen::Index k = 0; k < nk; ++k) {
    const cplx iwk(0.0, w * static_cast<double>(k));
    out(0, k) = nu * f(FluxCarrier::kLapV1, k) - iwk * f(FluxCarrier::kV1, k) +
                flow.pressure_signal().harmonic(static_cast<int>(k));
    out(1, k) = nu * f(FluxCarrier::kLapV2, k) - iwk * f(FluxCarrier::kV2, k);
  }
  return out;
}

ForcingData ForcingData::build(const FluxCarrier& carrier, const QuadratureMesh& mesh,
                               const BodyForce& f_tilde, const PeriodicSignal& g_tilde) {
  const PoiseuilleFlow& flow = carrier.flow();
  const double period = flow.period();
  const int grid = flow.flowrate().grid_size();
  const ChannelGeometry& geom = carrier.geometry();
  ForcingData d;
  d.carrier_ = carrier;
  d.f_tilde_ = f_tilde;
  if (f_tilde.active()) {
    if (std::abs(f_tilde.signal.period() - period) > 1e-12 * period)
      fail(ErrorCode::InvalidArgument, "forces: tilde f period differs from the flow rate period");
    const Rect& b = geom.body();
    const double r = f_tilde.radius;
    const bool hits_body = f_tilde.c1 + r > b.x0 && f_tilde.c1 - r < b.x1 &&
                           f_tilde.c2 + r > b.y0 && f_tilde.c2 - r < b.y1;
    if (hits_body || std::abs(f_tilde.c2) + r > 1.0 || std::abs(f_tilde.c1) + r > geom.x0() + 1.0)
      fail(ErrorCode::Geometry,
           "forces: tilde f support must lie in the fluid within |x1| <= X0 + 1");
  }
  if (g_tilde.is_zero()) {
    d.g_tilde_ = PeriodicSignal::zero(period, grid);
  } else {
    if (std::abs(g_tilde.period() - period) > 1e-12 * period)
      fail(ErrorCode::InvalidArgument, "forces: tilde g period differs from the flow rate period");
    d.g_tilde_ = g_tilde;
  }

  // g = mu int_Gamma e1.(grad V + grad V^T).n dS - rho int_Gamma p n1 dS, p = -psi x1
  const PhysicalParams& prm = flow.params();
  const int kmax = flow.max_harmonic();
  Eigen::VectorXcd gk = Eigen::VectorXcd::Zero(kmax + 1);
  double x1n1 = 0.0;
  for (const auto& bp : mesh.boundary()) {
    const FluxCarrier::FieldHarmonics f = carrier.fields_at(bp.x1, bp.x2);
    gk += prm.mu * bp.w *
          (2.0 * f.row(FluxCarrier::kV1x1) * bp.n1 +
           (f.row(FluxCarrier::kV1x2) + f.row(FluxCarrier::kV2x1)) * bp.n2)
              .transpose();
    x1n1 += bp.w * bp.x1 * bp.n1;
  }
  std::vector<cplx> one_sided(kmax + 1);
  double worst = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const cplx psi = flow.pressure_signal().harmonic(k);
    one_sided[k] = gk(k) + prm.rho * psi * x1n1;
    // the viscous part vanishes because grad V = 0 near the body
    const cplx expected = prm.rho * psi * geom.body().area();
    worst = std::max(worst, std::abs(one_sided[k] - expected) / (1.0 + std::abs(expected)));
  }
  if (worst > 1e-8)
    fail(ErrorCode::Resolution, "forces: boundary integral for g disagrees with rho psi |B| by " +
                                    std::to_string(worst));
  d.g_carrier_ = PeriodicSignal::from_one_sided(period, one_sided, grid);
  d.g_ = d.g_carrier_.plus(d.g_tilde_);
  return d;
}

Eigen::Vector2d ForcingData::f_carrier(double x1, double x2, double t, int dt) const {
  const FluxCarrier::FieldHarmonics fh = carrier_.fields_at(x1, x2);
  const auto lin = linear_harmonics(fh, carrier_.flow());
  const double period = carrier_.flow().period();
  Eigen::Vector2d f(synthesize(lin.row(0).transpose(), period, t, dt),
                    synthesize(lin.row(1).transpose(), period, t, dt));
  FluxCarrier::FieldValues v{}, v1{};
  for (int i = 0; i < FluxCarrier::kFieldCount; ++i) {
    v[i] = synthesize(fh.row(i).transpose(), period, t, 0);
    v1[i] = synthesize(fh.row(i).transpose(), period, t, 1);
  }
  if (dt == 0) {
    f -= convective(v, v);
  } else {
    f -= convective(v1, v) + convective(v, v1);
  }
  return f;
}

Eigen::Vector2d ForcingData::f(double x1, double x2, double t, int dt) const {
  Eigen::Vector2d out = f_carrier(x1, x2, t, dt);
  if (f_tilde_.active()) {
    const double s = f_tilde_.signal.derivative(dt)(t) * f_tilde_.bump(x1, x2);
    out += s * Eigen::Vector2d(f_tilde_.dir1, f_tilde_.dir2);
  }
  return out;
}

ForceNorms force_norms(const ForcingData& forces, const QuadratureMesh& mesh, int time_samples) {
  const FluxCarrier& carrier = forces.carrier();
  const int m = time_samples;
  const double period = carrier.flow().period();
  const double x0 = carrier.geometry().x0();
  const int nrows = static_cast<int>(mesh.ys().size());
  const std::vector<FluxCarrier::Row> rows = carrier.rows(mesh.ys());
  const BodyForce& ft = forces.f_tilde();
  const Eigen::Vector2d dir(ft.dir1, ft.dir2);
  Eigen::VectorXd ft_t = Eigen::VectorXd::Zero(m), ft_dt = Eigen::VectorXd::Zero(m);
  if (ft.active()) {
    const PeriodicSignal dsig = ft.signal.derivative(1);
    for (int j = 0; j < m; ++j) {
      ft_t(j) = ft.signal(period * j / m);
      ft_dt(j) = dsig(period * j / m);
    }
  }

  // per row, per time: squared L2 contributions of carrier f, f', tilde f, f + tilde f
  struct RowAcc {
    Eigen::ArrayXd f, df, ft, dft, tot, dtot, gv;
    double exterior = 0.0;
  };
  std::vector<RowAcc> acc(nrows);
  const int workers = std::max(1, thread_count());
  std::vector<std::unique_ptr<CarrierSampler>> samplers(workers);
  parallel_for(workers, [&](int w) { samplers[w] = std::make_unique<CarrierSampler>(carrier, m, 2); });
  parallel_for(workers, [&](int w) {
    CarrierSampler& s = *samplers[w];
    for (int r = w; r < nrows; r += workers) {
      RowAcc a;
      a.f = a.df = a.ft = a.dft = a.tot = a.dtot = a.gv = Eigen::ArrayXd::Zero(m);
      s.load_row(rows[r]);
      const bool row_active = rows[r].h.cwiseAbs().maxCoeff() > 0.0 ||
                              rows[r].dh.cwiseAbs().maxCoeff() > 0.0;
      // Outside the cutoff box f depends on the height only.
      double plain_w = 0.0, plain_ext_w = 0.0;
      auto accumulate = [&](double w, const Jet& b, double bump, bool exterior) {
        for (int j = 0; j < m; ++j) {
          const Eigen::Vector2d f = s.force(j, b, 0);
          const Eigen::Vector2d df = s.force(j, b, 1);
          const Eigen::Vector2d g = ft_t(j) * bump * dir;
          const Eigen::Vector2d dg = ft_dt(j) * bump * dir;
          a.f(j) += w * f.squaredNorm();
          a.df(j) += w * df.squaredNorm();
          a.ft(j) += w * g.squaredNorm();
          a.dft(j) += w * dg.squaredNorm();
          a.tot(j) += w * (f + g).squaredNorm();
          a.dtot(j) += w * (df + dg).squaredNorm();
          const auto v = s.fields(j, b, 0);
          using F = FluxCarrier;
          a.gv(j) += w * (v[F::kV1x1] * v[F::kV1x1] + v[F::kV1x2] * v[F::kV1x2] +
                          v[F::kV2x1] * v[F::kV2x1] + v[F::kV2x2] * v[F::kV2x2]);
          if (exterior) a.exterior += w * f.squaredNorm() * period / m;
        }
      };
      for (std::size_t p = mesh.row_begin(r); p < mesh.row_begin(r + 1); ++p) {
        const auto& pt = mesh.points()[p];
        const double x1 = mesh.xs()[pt.col];
        const Jet b = carrier.b1(x1);
        const double bump = ft.active() ? ft.bump(x1, mesh.ys()[r]) : 0.0;
        const bool inside = row_active && (b.v != 0.0 || b.d1 != 0.0 || b.d2 != 0.0 || b.d3 != 0.0);
        if (inside || bump != 0.0) {
          accumulate(pt.w, b, bump, std::abs(x1) >= x0);
        } else {
          plain_w += pt.w;
          if (std::abs(x1) >= x0) plain_ext_w += pt.w;
        }
      }
      if (plain_w > 0.0) {
        const double ext_before = a.exterior;
        accumulate(plain_w, Jet{}, 0.0, true);
        // only the exterior share of the plain weight counts as exterior mass
        a.exterior = ext_before + (a.exterior - ext_before) * (plain_ext_w / plain_w);
      }
      acc[r] = std::move(a);
    }
  });
  Eigen::ArrayXd f = Eigen::ArrayXd::Zero(m), df = f, ftt = f, dft = f, tot = f, dtot = f, gv = f;
  double exterior = 0.0;
  for (const auto& a : acc) {
    f += a.f;
    df += a.df;
    ftt += a.ft;
    dft += a.dft;
    tot += a.tot;
    dtot += a.dtot;
    gv += a.gv;
    exterior += a.exterior;
  }
  const double dtw = period / m;
  ForceNorms n;
  n.total_sq = tot.matrix();
  n.total_dt_sq = dtot.matrix();
  n.grad_v_sq = gv.matrix();
  n.f_l2l2 = std::sqrt(f.sum() * dtw);
  n.f_linf = std::sqrt(f.maxCoeff());
  n.dfdt_linf = std::sqrt(df.maxCoeff());
  n.ft_l2l2 = std::sqrt(ftt.sum() * dtw);
  n.ft_linf = std::sqrt(ftt.maxCoeff());
  n.dftdt_linf = std::sqrt(dft.maxCoeff());
  n.total_l2l2 = std::sqrt(tot.sum() * dtw);
  n.total_linf = std::sqrt(tot.maxCoeff());
  n.total_dt_linf = std::sqrt(dtot.maxCoeff());
  n.exterior_l2l2 = std::sqrt(exterior);
  return n;
}

std::vector<BoundRow> force_bound_report(const ForcingData& forces, const QuadratureMesh& mesh,
                                         int time_samples) {
  const PeriodicSignal& phi = forces.carrier().flow().flowrate();
  const int m = time_samples > 0 ? time_samples : phi.grid_size();
  return force_bound_report(forces, force_norms(forces, mesh, m));
}

std::vector<BoundRow> force_bound_report(const ForcingData& forces, const ForceNorms& n) {
  const PeriodicSignal& phi = forces.carrier().flow().flowrate();
  const PeriodicSignal& gc = forces.g_carrier();
  const PeriodicSignal& gt = forces.g_tilde();
  const PeriodicSignal& g = forces.g();
  const double p1 = phi.sobolev_norm(1), p2 = phi.sobolev_norm(2), p3 = phi.sobolev_norm(3);

  std::vector<BoundRow> rows;
  auto add = [&](const char* id, double lhs, double carrier_part, double phi_norm, double extra) {
    BoundRow r;
    r.id = id;
    r.lhs = lhs;
    r.constant = phi_norm > 0.0 ? carrier_part / phi_norm : 0.0;
    r.rhs = r.constant * phi_norm + extra;
    r.slack = r.rhs - r.lhs;
    r.pass = r.slack >= -1e-12 * (1.0 + std::abs(r.rhs));
    rows.push_back(r);
  };
  add("f_L2L2", n.total_l2l2, n.f_l2l2, p1, n.ft_l2l2);
  add("g_L2", g.l2_norm(), gc.l2_norm(), p1, gt.l2_norm());
  add("f_LinfL2", n.total_linf, n.f_linf, p2, n.ft_linf);
  add("g_Linf", g.sup_norm(), gc.sup_norm(), p2, gt.sup_norm());
  add("dfdt_LinfL2", n.total_dt_linf, n.dfdt_linf, p3, n.dftdt_linf);
  add("dgdt_Linf", g.derivative(1).sup_norm(), gc.derivative(1).sup_norm(), p3,
      gt.derivative(1).sup_norm());
  return rows;
}

}  // namespace oscflow
