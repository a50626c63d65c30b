#include "fracharm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fracharm {

namespace {

int cells_along(double side, double h) {
  const double ratio = side / h;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "box side " << side << " is not a positive multiple of h = " << h;
    throw std::invalid_argument(os.str());
  }
  return static_cast<int>(rounded);
}

bool is_multiple(double value, double unit) {
  const double r = value / unit;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

}  // namespace

Box::Box(Interval x) : dim_(1), axes_{x, Interval{0.0, 0.0}} {
  if (!(x.hi > x.lo)) throw std::invalid_argument("box interval must have hi > lo");
}

Box::Box(Interval x, Interval y) : dim_(2), axes_{x, y} {
  if (!(x.hi > x.lo) || !(y.hi > y.lo)) throw std::invalid_argument("box interval must have hi > lo");
}

bool Box::contains(const Point& x) const {
  for (int k = 0; k < dim_; ++k) {
    const auto& a = axis(k);
    if (x[static_cast<std::size_t>(k)] < a.lo || x[static_cast<std::size_t>(k)] > a.hi) return false;
  }
  return true;
}

Box Box::scaled(double factor) const {
  const Interval x{axes_[0].lo * factor, axes_[0].hi * factor};
  if (dim_ == 1) return Box(x);
  return Box(x, Interval{axes_[1].lo * factor, axes_[1].hi * factor});
}

Cube::Cube(Point center, double side, int dim) : center_(center), side_(side), dim_(dim) {
  if (!(side > 0.0) || !std::isfinite(side)) throw std::invalid_argument("cube side must be positive");
  if (dim != 1 && dim != 2) throw std::invalid_argument("cube dimension must be 1 or 2");
  if (dim == 1) center_[1] = 0.0;
}

Cube Cube::interval(double lo, double hi) { return Cube(Point{0.5 * (lo + hi), 0.0}, hi - lo, 1); }

double Cube::volume() const { return dim_ == 1 ? side_ : side_ * side_; }

bool Cube::contains(const Point& x) const {
  for (int k = 0; k < dim_; ++k) {
    const double v = x[static_cast<std::size_t>(k)];
    if (v < lower(k) || v > upper(k)) return false;
  }
  return true;
}

bool Cube::contains_half_open(const Point& x) const {
  for (int k = 0; k < dim_; ++k) {
    const double v = x[static_cast<std::size_t>(k)];
    if (v < lower(k) || v >= upper(k)) return false;
  }
  return true;
}

Cube Cube::translated(const Point& shift) const {
  return Cube(Point{center_[0] + shift[0], center_[1] + shift[1]}, side_, dim_);
}

Cube Cube::scaled_about_origin(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  return Cube(Point{center_[0] * factor, center_[1] * factor}, side_ * factor, dim_);
}

Cube dilate(const Cube& q, double tau) {
  if (!(tau > 1.0)) throw std::invalid_argument("dilation factor must exceed 1");
  return Cube(q.center(), q.side() * tau, q.dim());
}

Cube star(const Cube& q) { return dilate(q, 2.0 * std::sqrt(static_cast<double>(q.dim()))); }

double distance(const Point& a, const Point& b, int dim) {
  if (dim == 1) return std::abs(a[0] - b[0]);
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

GridFunction::GridFunction(Box box, double h) : box_(box), h_(h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  for (int k = 0; k < box_.dim(); ++k) extent_[static_cast<std::size_t>(k)] = cells_along(box_.side(k), h);
  samples_.assign(static_cast<std::size_t>(extent_[0]) * static_cast<std::size_t>(extent_[1]), 0.0);
}

GridFunction::GridFunction(Box box, double h, std::vector<double> samples) : GridFunction(box, h) {
  if (samples.size() != samples_.size()) throw std::invalid_argument("sample count does not match the grid");
  for (double v : samples) {
    if (!std::isfinite(v)) throw std::invalid_argument("grid samples must be finite");
  }
  samples_ = std::move(samples);
}

double GridFunction::cell_volume() const { return dim() == 1 ? h_ : h_ * h_; }

Point GridFunction::center(std::size_t idx) const {
  const auto nx = static_cast<std::size_t>(extent_[0]);
  return center(static_cast<int>(idx % nx), static_cast<int>(idx / nx));
}

Point GridFunction::center(int i, int j) const {
  Point p{box_.axis(0).lo + (i + 0.5) * h_, 0.0};
  if (dim() == 2) p[1] = box_.axis(1).lo + (j + 0.5) * h_;
  return p;
}

long GridFunction::cell_of(const Point& x) const {
  if (!box_.contains(x)) return -1;
  std::array<int, 2> ij{0, 0};
  for (int k = 0; k < dim(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const int i = static_cast<int>(std::floor((x[kk] - box_.axis(k).lo) / h_));
    ij[kk] = std::clamp(i, 0, extent_[kk] - 1);
  }
  return static_cast<long>(index(ij[0], ij[1]));
}

bool GridFunction::same_grid(const GridFunction& other) const { return box_ == other.box_ && h_ == other.h_; }

void GridFunction::require_same_grid(const GridFunction& other, const char* what) const {
  if (!same_grid(other)) throw GridMismatch(std::string(what) + ": grids differ in box or spacing");
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(other, "operator+=");
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : samples_) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) {
  a += b;
  return a;
}

GridFunction operator*(double c, GridFunction a) {
  a *= c;
  return a;
}

GridFunction abs(const GridFunction& f) {
  GridFunction out = f;
  for (double& v : out.values()) v = std::abs(v);
  return out;
}

GridFunction pointwise_product(const GridFunction& a, const GridFunction& b) {
  a.require_same_grid(b, "pointwise_product");
  GridFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

bool CellRange::empty(int dim) const {
  for (int k = 0; k < dim; ++k) {
    if (first[static_cast<std::size_t>(k)] > last[static_cast<std::size_t>(k)]) return true;
  }
  return false;
}

std::size_t CellRange::count(int dim) const {
  if (empty(dim)) return 0;
  std::size_t c = 1;
  for (int k = 0; k < dim; ++k) {
    c *= static_cast<std::size_t>(last[static_cast<std::size_t>(k)] - first[static_cast<std::size_t>(k)] + 1);
  }
  return c;
}

CellRange cells_in(const GridFunction& g, const Cube& q) {
  if (q.dim() != g.dim()) throw std::invalid_argument("cube and grid dimensions differ");
  CellRange r;
  constexpr double kEdgeTol = 1e-9;
  for (int k = 0; k < g.dim(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double lo = g.box().axis(k).lo;
    const double a = (q.lower(k) - lo) / g.h() - 0.5;
    const double b = (q.upper(k) - lo) / g.h() - 0.5;
    r.first[kk] = std::max(0, static_cast<int>(std::ceil(a - kEdgeTol)));
    r.last[kk] = std::min(g.extent(k) - 1, static_cast<int>(std::floor(b + kEdgeTol)));
  }
  if (g.dim() == 1) {
    r.first[1] = 0;
    r.last[1] = 0;
  }
  return r;
}

GridFunction indicator(const Box& box, double h, const Cube& q) {
  GridFunction g(box, h);
  const CellRange r = cells_in(g, q);
  if (r.empty(g.dim())) return g;
  for (int j = r.first[1]; j <= r.last[1]; ++j) {
    for (int i = r.first[0]; i <= r.last[0]; ++i) g[g.index(i, j)] = 1.0;
  }
  return g;
}

GridFunction indicator_fraction(const Box& box, double h, const Cube& q) {
  GridFunction g(box, h);
  auto overlap = [&](int k, int i) {
    const double c0 = box.axis(k).lo + i * h;
    const double lo = std::max(c0, q.lower(k));
    const double hi = std::min(c0 + h, q.upper(k));
    return hi > lo ? (hi - lo) / h : 0.0;
  };
  const int ny = g.dim() == 2 ? g.extent(1) : 1;
  for (int j = 0; j < ny; ++j) {
    const double fy = g.dim() == 2 ? overlap(1, j) : 1.0;
    if (fy == 0.0) continue;
    for (int i = 0; i < g.extent(0); ++i) {
      const double fx = overlap(0, i);
      if (fx > 0.0) g[g.index(i, j)] = fx * fy;
    }
  }
  return g;
}

double integrate(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.cell_volume();
}

double weighted_lp_quasinorm(const GridFunction& f, double p, const GridFunction& w) {
  if (!(p > 0.0)) throw std::invalid_argument("weighted_lp_quasinorm: p must be positive");
  f.require_same_grid(w, "weighted_lp_quasinorm");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    if (a == 0.0) continue;
    if (w[i] < 0.0) throw std::invalid_argument("weighted_lp_quasinorm: weight must be nonnegative");
    s += std::pow(a, p) * w[i];
  }
  return std::pow(s * f.cell_volume(), 1.0 / p);
}

double lp_quasinorm(const GridFunction& f, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_quasinorm: p must be positive");
  double s = 0.0;
  for (double v : f.values()) {
    if (v != 0.0) s += std::pow(std::abs(v), p);
  }
  return std::pow(s * f.cell_volume(), 1.0 / p);
}

double sup_abs(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

DyadicFamily::DyadicFamily(Box window, int j_min, int j_max) : window_(window), j_min_(j_min), j_max_(j_max) {
  if (j_min > j_max) throw std::invalid_argument("dyadic family: empty level range (j_min > j_max)");
  for (int j = j_min; j <= j_max; ++j) {
    const double side = std::ldexp(1.0, j);
    std::array<int, 2> count{1, 1};
    for (int k = 0; k < window.dim(); ++k) {
      const auto& a = window.axis(k);
      if (!is_multiple(a.lo, side) || !is_multiple(a.hi, side)) {
        std::ostringstream os;
        os << "dyadic family: window edges must be multiples of 2^" << j;
        throw std::invalid_argument(os.str());
      }
      count[static_cast<std::size_t>(k)] = static_cast<int>(std::round(a.length() / side));
    }
    std::vector<Cube> cubes;
    cubes.reserve(static_cast<std::size_t>(count[0]) * static_cast<std::size_t>(count[1]));
    for (int b = 0; b < count[1]; ++b) {
      for (int a = 0; a < count[0]; ++a) {
        Point c{window.axis(0).lo + (a + 0.5) * side, 0.0};
        if (window.dim() == 2) c[1] = window.axis(1).lo + (b + 0.5) * side;
        cubes.emplace_back(c, side, window.dim());
      }
    }
    levels_.push_back(std::move(cubes));
  }
}

const std::vector<Cube>& DyadicFamily::level(int j) const {
  if (j < j_min_ || j > j_max_) throw std::out_of_range("dyadic family: level out of range");
  return levels_[static_cast<std::size_t>(j - j_min_)];
}

std::size_t DyadicFamily::tiling_count() const {
  std::size_t c = 0;
  for (const auto& l : levels_) c += l.size();
  return c;
}

std::vector<Cube> DyadicFamily::level_with_shifts(int j) const {
  std::vector<Cube> out = level(j);
  const double side = std::ldexp(1.0, j);
  for (int t = 1; t <= 2; ++t) {
    const double s = side * t / 3.0;
    const Point shift{s, window_.dim() == 2 ? s : 0.0};
    for (const Cube& q : level(j)) {
      Cube moved = q.translated(shift);
      bool inside = true;
      for (int k = 0; k < window_.dim(); ++k) {
        if (moved.upper(k) > window_.axis(k).hi) inside = false;
      }
      if (inside) out.push_back(moved);
    }
  }
  return out;
}

DyadicFamily dyadic_cubes(const Box& window, int j_min, int j_max, double h) {
  if (j_min > j_max) throw std::invalid_argument("dyadic family: empty level range (j_min > j_max)");
  if (std::ldexp(1.0, j_min) < h * (1.0 - 1e-12)) {
    throw std::invalid_argument("dyadic family: level 2^j_min is finer than the grid spacing");
  }
  return DyadicFamily(window, j_min, j_max);
}

}  // namespace fracharm
