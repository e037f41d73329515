#pragma once

#include <vector>

namespace oscflow {

struct Rect {
  double x0 = -0.5, x1 = 0.5;  // extent in x1
  double y0 = -0.5, y1 = 0.5;  // extent in x2

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double center_y() const { return 0.5 * (y0 + y1); }
  bool contains(double a, double b) const { return a > x0 && a < x1 && b > y0 && b < y1; }
};

struct PhysicalParams {
  double rho = 1.0;        // fluid density
  double mu = 1.0;         // dynamic viscosity
  double mass = 1.0;       // oscillator mass
  double stiffness = 1.0;  // spring constant

  void validate() const;
  double nu() const { return mu / rho; }
  double natural_period() const;
};

// Channel (-L, L) x (-1, 1) with a rectangular body removed, in the frame
// attached to the body.
class ChannelGeometry {
 public:
  static ChannelGeometry build(double half_length, const Rect& body);

  double half_length() const { return half_length_; }
  const Rect& body() const { return body_; }
  double x0() const { return x0_; }          // diam(B) + 1
  double margin() const { return margin_; }  // distance from body to the walls
  double fluid_area() const { return 4.0 * half_length_ - body_.area(); }
  double perimeter() const { return 2.0 * (body_.width() + body_.height()); }
  bool in_fluid(double a, double b) const;
  bool in_near_zone(double a, double b) const;

 private:
  double half_length_ = 0.0;
  Rect body_;
  double x0_ = 0.0;
  double margin_ = 0.0;
};

namespace quad {
// Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int points, std::vector<double>& nodes, std::vector<double>& weights);
}  // namespace quad

// Value and first three derivatives of a scalar function of one variable.
struct Jet {
  double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};
Jet operator*(const Jet& a, const Jet& b);

// Quintic smoothstep 6s^5 - 15s^4 + 10s^3, clamped to [0, 1] outside.
Jet smoothstep(double s);

// C^2 cutoff of the distance to [a, b]: 1 within r_in, 0 beyond r_out.
Jet interval_cutoff(double x, double a, double b, double r_in, double r_out);

struct MeshOptions {
  double h = 1.0 / 32.0;
  int gauss = 4;
  // Quadrature covers |x1| <= extent; zero selects the whole channel.
  double extent = 0.0;
  // Extra breaklines so piecewise-defined integrands are smooth inside cells.
  std::vector<double> breaks_x1;
  std::vector<double> breaks_x2;
};

// Tensor-product Gauss quadrature on cells aligned with the body edges; cells
// inside the body are dropped, so no cell straddles the body boundary.
class QuadratureMesh {
 public:
  struct Point {
    int col = 0;  // index into xs()
    int row = 0;  // index into ys()
    double w = 0.0;
  };
  struct BoundaryPoint {
    double x1 = 0.0, x2 = 0.0;
    double n1 = 0.0, n2 = 0.0;  // unit normal pointing from the body into the fluid
    double w = 0.0;
  };

  static QuadratureMesh build(const ChannelGeometry& geom, const MeshOptions& opts);

  std::size_t size() const { return points_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<BoundaryPoint>& boundary() const { return boundary_; }
  const std::vector<double>& cell_edges_x1() const { return edges_x1_; }
  const std::vector<double>& cell_edges_x2() const { return edges_x2_; }
  // Points are ordered by row, then column; row r owns [row_begin(r), row_begin(r + 1)).
  std::size_t row_begin(std::size_t r) const { return row_offsets_[r]; }
  double x1(std::size_t i) const { return xs_[points_[i].col]; }
  double x2(std::size_t i) const { return ys_[points_[i].row]; }
  double h() const { return h_; }
  double extent() const { return extent_; }
  double total_weight() const;

 private:
  double h_ = 0.0;
  double extent_ = 0.0;
  std::vector<double> xs_, ys_;
  std::vector<double> edges_x1_, edges_x2_;
  std::vector<Point> points_;
  std::vector<std::size_t> row_offsets_;
  std::vector<BoundaryPoint> boundary_;
};

}  // namespace oscflow
