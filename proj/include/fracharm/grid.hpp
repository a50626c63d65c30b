#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracharm {

// Coordinates in R^1 or R^2. In 1D the second entry is ignored and kept at 0.
using Point = std::array<double, 2>;

// Raised when two GridFunctions (or a GridFunction and a grid-bound object) do
// not share the same box and spacing.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

// Axis-parallel bounding box in dimension 1 or 2.
class Box {
 public:
  explicit Box(Interval x);
  Box(Interval x, Interval y);

  int dim() const { return dim_; }
  const Interval& axis(int k) const { return axes_[static_cast<std::size_t>(k)]; }
  double side(int k) const { return axis(k).length(); }
  bool contains(const Point& x) const;
  Box scaled(double factor) const;

  bool operator==(const Box&) const = default;

 private:
  int dim_;
  std::array<Interval, 2> axes_;
};

// Axis-parallel cube with center and side length.
class Cube {
 public:
  Cube(Point center, double side, int dim);
  static Cube interval(double lo, double hi);

  const Point& center() const { return center_; }
  double side() const { return side_; }
  int dim() const { return dim_; }
  double lower(int k) const { return center_[static_cast<std::size_t>(k)] - 0.5 * side_; }
  double upper(int k) const { return center_[static_cast<std::size_t>(k)] + 0.5 * side_; }
  double volume() const;

  // Closed cube membership.
  bool contains(const Point& x) const;
  // Half-open membership [lower, upper) used where cubes must partition space.
  bool contains_half_open(const Point& x) const;

  Cube translated(const Point& shift) const;
  // Dilation of the whole configuration about the origin (center and side
  // both multiplied by factor). Used by dilation sweeps; factor may be < 1.
  Cube scaled_about_origin(double factor) const;

  bool operator==(const Cube&) const = default;

 private:
  Point center_;
  double side_;
  int dim_;
};

// tau Q: same center, side multiplied by tau. Requires tau > 1.
Cube dilate(const Cube& q, double tau);
// Q* = 2 sqrt(n) Q.
Cube star(const Cube& q);

double distance(const Point& a, const Point& b, int dim);

// Real-valued samples at the cell centers of a uniform grid over a box.
// Cell (i, j) has center (lo_x + (i + 1/2) h, lo_y + (j + 1/2) h) and flat
// index i + nx * j.
class GridFunction {
 public:
  GridFunction(Box box, double h);
  GridFunction(Box box, double h, std::vector<double> samples);

  template <class Fn>
  static GridFunction sample(const Box& box, double h, Fn&& fn) {
    GridFunction g(box, h);
    for (std::size_t idx = 0; idx < g.size(); ++idx) g.samples_[idx] = fn(g.center(idx));
    return g;
  }

  const Box& box() const { return box_; }
  double h() const { return h_; }
  int dim() const { return box_.dim(); }
  int extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const { return samples_.size(); }
  double cell_volume() const;

  Point center(std::size_t idx) const;
  Point center(int i, int j) const;
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(extent_[0]) * static_cast<std::size_t>(j);
  }
  // Index of the cell whose closure contains x, or -1 when x is outside the box.
  long cell_of(const Point& x) const;

  double operator[](std::size_t idx) const { return samples_[idx]; }
  double& operator[](std::size_t idx) { return samples_[idx]; }
  std::span<const double> values() const { return samples_; }
  std::span<double> values() { return samples_; }

  bool same_grid(const GridFunction& other) const;
  void require_same_grid(const GridFunction& other, const char* what) const;

  // Zero function on the same grid.
  GridFunction zeros_like() const { return GridFunction(box_, h_); }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator*=(double c);

 private:
  Box box_;
  double h_;
  std::array<int, 2> extent_{1, 1};
  std::vector<double> samples_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);
GridFunction abs(const GridFunction& f);
GridFunction pointwise_product(const GridFunction& a, const GridFunction& b);

// Indicator of a cube by the cell-center rule: 1 where the cell center lies in
// the closed cube.
GridFunction indicator(const Box& box, double h, const Cube& q);
// Indicator of a cube by exact cell overlap: each cell receives the fraction
// of its volume covered by the cube, so integrate() returns |Q ∩ box| exactly.
GridFunction indicator_fraction(const Box& box, double h, const Cube& q);

// Index ranges [first, last] of cells whose centers lie in a closed cube,
// clipped to the grid. Empty when first > last on some axis.
struct CellRange {
  std::array<int, 2> first{0, 0};
  std::array<int, 2> last{-1, -1};
  bool empty(int dim) const;
  std::size_t count(int dim) const;
};
CellRange cells_in(const GridFunction& g, const Cube& q);

// Midpoint quadrature: h^n * sum of samples.
double integrate(const GridFunction& f);

// (integral |f|^p w)^{1/p}, p > 0, w >= 0 on the same grid as f.
double weighted_lp_quasinorm(const GridFunction& f, double p, const GridFunction& w);
double lp_quasinorm(const GridFunction& f, double p);

double sup_abs(const GridFunction& f);

// Grid-aligned dyadic cubes of side 2^j, j in [j_min, j_max], tiling a window.
class DyadicFamily {
 public:
  DyadicFamily(Box window, int j_min, int j_max);

  const Box& window() const { return window_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }

  // The tiling at level j.
  const std::vector<Cube>& level(int j) const;
  std::size_t tiling_count() const;

  // Tiling plus the translates by one third and two thirds of the side along
  // every axis, kept when they lie inside the window.
  std::vector<Cube> level_with_shifts(int j) const;

 private:
  Box window_;
  int j_min_;
  int j_max_;
  std::vector<std::vector<Cube>> levels_;
};

// Builds the dyadic family; h is the grid spacing the family will be evaluated
// against (levels with 2^j < h are rejected).
DyadicFamily dyadic_cubes(const Box& window, int j_min, int j_max, double h);

}  // namespace fracharm
