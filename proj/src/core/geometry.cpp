#include "oscflow/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "oscflow/error.hpp"

namespace oscflow {

void PhysicalParams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(rho)) fail(ErrorCode::InvalidArgument, "params: rho must be positive");
  if (!positive(mu)) fail(ErrorCode::InvalidArgument, "params: mu must be positive");
  if (!positive(mass)) fail(ErrorCode::InvalidArgument, "params: mass must be positive");
  if (!positive(stiffness)) fail(ErrorCode::InvalidArgument, "params: stiffness must be positive");
}

double PhysicalParams::natural_period() const { return 2.0 * M_PI * std::sqrt(mass / stiffness); }

ChannelGeometry ChannelGeometry::build(double half_length, const Rect& body) {
  if (!(body.x1 > body.x0) || !(body.y1 > body.y0))
    fail(ErrorCode::Geometry, "geometry: body rectangle is empty");
  ChannelGeometry g;
  g.half_length_ = half_length;
  g.body_ = body;
  g.x0_ = std::hypot(body.width(), body.height()) + 1.0;
  g.margin_ = std::min(1.0 - body.y1, body.y0 + 1.0);
  if (!(g.margin_ > 0.0)) fail(ErrorCode::Geometry, "geometry: body touches the channel walls");
  if (body.x0 <= -g.x0_ + 1.0 || body.x1 >= g.x0_ - 1.0)
    fail(ErrorCode::Geometry, "geometry: body does not fit inside the |x1| < X0 - 1 window");
  if (!(half_length >= g.x0_ + 2.0) || !std::isfinite(half_length))
    fail(ErrorCode::Geometry, "geometry: half length L = " + std::to_string(half_length) +
                                  " is below X0 + 2 = " + std::to_string(g.x0_ + 2.0));
  return g;
}

bool ChannelGeometry::in_fluid(double a, double b) const {
  return std::abs(a) <= half_length_ && std::abs(b) < 1.0 && !body_.contains(a, b) &&
         !(a >= body_.x0 && a <= body_.x1 && b >= body_.y0 && b <= body_.y1);
}

bool ChannelGeometry::in_near_zone(double a, double b) const {
  return std::abs(a) < x0_ && in_fluid(a, b);
}

namespace quad {

void gauss_legendre(int points, std::vector<double>& nodes, std::vector<double>& weights) {
  if (points < 1) fail(ErrorCode::InvalidArgument, "gauss_legendre: need at least one point");
  nodes.assign(points, 0.0);
  weights.assign(points, 0.0);
  for (int i = 0; i < points; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (points + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[points - 1 - i] = x;
    weights[points - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace quad

Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
          a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3};
}

Jet smoothstep(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0, 0.0};
  const double s2 = s * s;
  return {s2 * s * (10.0 - 15.0 * s + 6.0 * s2), 30.0 * s2 * (1.0 - s) * (1.0 - s),
          60.0 * s * (1.0 - s) * (1.0 - 2.0 * s), 60.0 * (1.0 - 6.0 * s + 6.0 * s2)};
}

Jet interval_cutoff(double x, double a, double b, double r_in, double r_out) {
  double d = 0.0, sign = 0.0;
  if (x < a) {
    d = a - x;
    sign = -1.0;
  } else if (x > b) {
    d = x - b;
    sign = 1.0;
  } else {
    return {1.0, 0.0, 0.0, 0.0};
  }
  const double width = r_out - r_in;
  const Jet s = smoothstep((d - r_in) / width);
  const double c = sign / width;
  return {1.0 - s.v, -s.d1 * c, -s.d2 * c * c, -s.d3 * c * c * c};
}

namespace {

std::vector<double> partition(double lo, double hi, std::vector<double> breaks, double h) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::erase_if(breaks, [&](double b) { return b < lo || b > hi; });
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> unique;
  for (double b : breaks)
    if (unique.empty() || b - unique.back() > 1e-12) unique.push_back(b);
  unique.back() = hi;
  std::vector<double> edges{unique.front()};
  for (std::size_t i = 1; i < unique.size(); ++i) {
    const double gap = unique[i] - unique[i - 1];
    const int cells = std::max(1, static_cast<int>(std::ceil(gap / h - 1e-9)));
    for (int c = 1; c <= cells; ++c) edges.push_back(unique[i - 1] + gap * c / cells);
    edges.back() = unique[i];
  }
  return edges;
}

std::vector<double> gauss_coordinates(const std::vector<double>& edges, const std::vector<double>& gx) {
  std::vector<double> out;
  out.reserve((edges.size() - 1) * gx.size());
  for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
    const double mid = 0.5 * (edges[c] + edges[c + 1]);
    const double half = 0.5 * (edges[c + 1] - edges[c]);
    for (double g : gx) out.push_back(mid + half * g);
  }
  return out;
}

}  // namespace

QuadratureMesh QuadratureMesh::build(const ChannelGeometry& geom, const MeshOptions& opts) {
  if (!(opts.h > 0.0)) fail(ErrorCode::InvalidArgument, "mesh: h must be positive");
  if (opts.gauss < 1 || opts.gauss > 12)
    fail(ErrorCode::InvalidArgument, "mesh: gauss points per direction must be in 1..12");
  const Rect& b = geom.body();
  if (b.width() / opts.h < 8.0 - 1e-9 || b.height() / opts.h < 8.0 - 1e-9)
    fail(ErrorCode::Resolution, "mesh: h = " + std::to_string(opts.h) +
                                    " leaves fewer than 8 cells across a body side");
  const double extent = opts.extent > 0.0 ? std::min(opts.extent, geom.half_length())
                                          : geom.half_length();
  if (extent <= b.x1 || -extent >= b.x0)
    fail(ErrorCode::Geometry, "mesh: quadrature extent does not cover the body");

  QuadratureMesh m;
  m.h_ = opts.h;
  m.extent_ = extent;
  auto bx = opts.breaks_x1;
  bx.insert(bx.end(), {b.x0, b.x1});
  auto by = opts.breaks_x2;
  by.insert(by.end(), {b.y0, b.y1});
  m.edges_x1_ = partition(-extent, extent, bx, opts.h);
  m.edges_x2_ = partition(-1.0, 1.0, by, opts.h);

  std::vector<double> gx, gw;
  quad::gauss_legendre(opts.gauss, gx, gw);
  m.xs_ = gauss_coordinates(m.edges_x1_, gx);
  m.ys_ = gauss_coordinates(m.edges_x2_, gx);
  const int q = opts.gauss;
  for (std::size_t cx = 0; cx + 1 < m.edges_x1_.size(); ++cx) {
    const double ax = m.edges_x1_[cx], bxe = m.edges_x1_[cx + 1];
    const double midx = 0.5 * (ax + bxe);
    for (std::size_t cy = 0; cy + 1 < m.edges_x2_.size(); ++cy) {
      const double ay = m.edges_x2_[cy], bye = m.edges_x2_[cy + 1];
      if (b.contains(midx, 0.5 * (ay + bye))) continue;
      const double jac = 0.25 * (bxe - ax) * (bye - ay);
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
          m.points_.push_back({static_cast<int>(cx) * q + i, static_cast<int>(cy) * q + j,
                               jac * gw[i] * gw[j]});
    }
  }

  std::sort(m.points_.begin(), m.points_.end(), [](const Point& a, const Point& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  m.row_offsets_.assign(m.ys_.size() + 1, 0);
  for (const auto& p : m.points_) ++m.row_offsets_[p.row + 1];
  for (std::size_t r = 0; r < m.ys_.size(); ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];

  // Boundary rule on the four body edges, reusing the cell partition.
  auto add_edge = [&](const std::vector<double>& edges, double lo, double hi, bool horizontal,
                      double fixed, double n1, double n2) {
    for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
      const double a = edges[c], e = edges[c + 1];
      if (a < lo - 1e-12 || e > hi + 1e-12) continue;
      const double mid = 0.5 * (a + e), half = 0.5 * (e - a);
      for (int i = 0; i < q; ++i) {
        const double s = mid + half * gx[i];
        BoundaryPoint p;
        p.x1 = horizontal ? s : fixed;
        p.x2 = horizontal ? fixed : s;
        p.n1 = n1;
        p.n2 = n2;
        p.w = half * gw[i];
        m.boundary_.push_back(p);
      }
    }
  };
  add_edge(m.edges_x2_, b.y0, b.y1, false, b.x0, -1.0, 0.0);
  add_edge(m.edges_x2_, b.y0, b.y1, false, b.x1, 1.0, 0.0);
  add_edge(m.edges_x1_, b.x0, b.x1, true, b.y0, 0.0, -1.0);
  add_edge(m.edges_x1_, b.x0, b.x1, true, b.y1, 0.0, 1.0);
  return m;
}

double QuadratureMesh::total_weight() const {
  double s = 0.0;
  for (const auto& p : points_) s += p.w;
  return s;
}

}  // namespace oscflow
