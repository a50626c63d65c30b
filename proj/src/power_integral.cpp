#include "fracharm/power_integral.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace fracharm {

namespace {

constexpr std::array<double, 8> kNodes{-0.9602898564975362, -0.7966664774136267, -0.525532409916329,
                                       -0.18343464249564978, 0.18343464249564978, 0.525532409916329,
                                       0.7966664774136267,  0.9602898564975362};
constexpr std::array<double, 8> kWeights{0.10122853629037669, 0.22238103445337434, 0.31370664587788705,
                                         0.36268378337836177, 0.36268378337836177, 0.31370664587788705,
                                         0.22238103445337434, 0.10122853629037669};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Signed antiderivative of |t|^e.
double antiderivative(double t, double e) {
  const double sign = t < 0.0 ? -1.0 : 1.0;
  if (e == -1.0) return sign * std::log(std::abs(t));
  return sign * std::pow(std::abs(t), e + 1.0) / (e + 1.0);
}

double gauss_rect(double u0, double u1, double v0, double v1, double e) {
  const double hu = 0.5 * (u1 - u0), cu = 0.5 * (u1 + u0);
  const double hv = 0.5 * (v1 - v0), cv = 0.5 * (v1 + v0);
  double s = 0.0;
  for (std::size_t a = 0; a < kNodes.size(); ++a) {
    const double u = cu + hu * kNodes[a];
    for (std::size_t b = 0; b < kNodes.size(); ++b) {
      const double v = cv + hv * kNodes[b];
      s += kWeights[a] * kWeights[b] * std::pow(u * u + v * v, 0.5 * e);
    }
  }
  return s * hu * hv;
}

// Rectangle at positive distance from the origin (it may touch an axis).
double adaptive_rect(double u0, double u1, double v0, double v1, double e, double coarse, int depth) {
  const double um = 0.5 * (u0 + u1), vm = 0.5 * (v0 + v1);
  const double q00 = gauss_rect(u0, um, v0, vm, e), q10 = gauss_rect(um, u1, v0, vm, e);
  const double q01 = gauss_rect(u0, um, vm, v1, e), q11 = gauss_rect(um, u1, vm, v1, e);
  const double fine = q00 + q10 + q01 + q11;
  if (depth >= 24 || std::abs(fine - coarse) <= 1e-13 * std::abs(fine)) return fine;
  return adaptive_rect(u0, um, v0, vm, e, q00, depth + 1) + adaptive_rect(um, u1, v0, vm, e, q10, depth + 1) +
         adaptive_rect(u0, um, vm, v1, e, q01, depth + 1) + adaptive_rect(um, u1, vm, v1, e, q11, depth + 1);
}

double regular_rect(double u0, double u1, double v0, double v1, double e) {
  if (u1 <= u0 || v1 <= v0) return 0.0;
  return adaptive_rect(u0, u1, v0, v1, e, gauss_rect(u0, u1, v0, v1, e), 0);
}

// Integral of r^e over [0,1]^2: I = J + 2^{-(2+e)} I, J over the L-shaped rest.
double unit_square_integral(double e) {
  const double j = regular_rect(0.5, 1.0, 0.0, 0.5, e) + regular_rect(0.0, 0.5, 0.5, 1.0, e) +
                   regular_rect(0.5, 1.0, 0.5, 1.0, e);
  return j / (1.0 - std::pow(2.0, -(2.0 + e)));
}

// Rectangle inside the closed first quadrant.
double quadrant_rect(double u0, double u1, double v0, double v1, double e) {
  if (u1 <= u0 || v1 <= v0) return 0.0;
  if (u0 > 0.0 || v0 > 0.0) return regular_rect(u0, u1, v0, v1, e);
  if (e <= -2.0) return kInf;
  const double m = std::min(u1, v1);
  double s = std::pow(m, 2.0 + e) * unit_square_integral(e);
  if (u1 > m) s += regular_rect(m, u1, 0.0, v1, e);
  if (v1 > m) s += regular_rect(0.0, u1, m, v1, e);
  return s;
}

}  // namespace

double power_integral_1d(double a, double b, double x0, double e) {
  if (!(b > a)) return 0.0;
  const double u = a - x0, v = b - x0;
  if (e <= -1.0 && u <= 0.0 && v >= 0.0) return kInf;
  if (e == 0.0) return b - a;
  return antiderivative(v, e) - antiderivative(u, e);
}

double power_integral_2d(Interval x_range, Interval y_range, const Point& x0, double e) {
  const double ax = x_range.lo - x0[0], bx = x_range.hi - x0[0];
  const double ay = y_range.lo - x0[1], by = y_range.hi - x0[1];
  if (e == 0.0) return (bx - ax) * (by - ay);
  // Reflect every quadrant piece into the first quadrant.
  std::array<std::array<double, 2>, 2> xs{{{std::max(ax, 0.0), bx}, {std::max(-bx, 0.0), -ax}}};
  std::array<std::array<double, 2>, 2> ys{{{std::max(ay, 0.0), by}, {std::max(-by, 0.0), -ay}}};
  double s = 0.0;
  for (const auto& px : xs) {
    for (const auto& py : ys) {
      const double piece = quadrant_rect(px[0], px[1], py[0], py[1], e);
      if (std::isinf(piece)) return kInf;
      s += piece;
    }
  }
  return s;
}

double power_cube_average(const Cube& q, const Point& x0, double e) {
  if (q.dim() == 1) return power_integral_1d(q.lower(0), q.upper(0), x0[0], e) / q.side();
  return power_integral_2d(Interval{q.lower(0), q.upper(0)}, Interval{q.lower(1), q.upper(1)}, x0, e) / q.volume();
}

}  // namespace fracharm
