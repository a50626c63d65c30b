#pragma once

#include "fracharm/grid.hpp"

namespace fracharm {

// Integral of |x - x0|^e over [a, b]; +infinity when e <= -1 and x0 is in [a, b].
double power_integral_1d(double a, double b, double x0, double e);

// Integral of |x - x0|^e (Euclidean norm) over the rectangle x_range × y_range.
// Pieces touching x0 use the self-similar closed form of the unit-square
// integral; the rest is adaptive tensor Gauss-Legendre.
double power_integral_2d(Interval x_range, Interval y_range, const Point& x0, double e);

// Average of |x - x0|^e over a cube (1D or 2D).
double power_cube_average(const Cube& q, const Point& x0, double e);

}  // namespace fracharm
