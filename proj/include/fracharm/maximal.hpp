#pragma once

#include <vector>

#include "fracharm/grid.hpp"

namespace fracharm {

// Discretized "sup over cubes Q containing x": cube sides l_min * ratio^i up
// to l_max, each rounded to a whole number of cells. Uncentered cubes may
// stick out of the box, where f is taken to be zero.
struct MaximalConfig {
  double l_min = 0.0;
  double l_max = 0.0;
  double ratio = 1.189207115002721;  // 2^{1/4}
  bool centered = false;

  // l_min = h, l_max = longest box side.
  static MaximalConfig for_grid(const GridFunction& f);
};

// Side lengths, in cells, that the ladder visits on a grid of spacing h.
std::vector<int> ladder_cells(const MaximalConfig& cfg, double h);

GridFunction hl_maximal(const GridFunction& f, const MaximalConfig& cfg);
GridFunction frac_maximal(const GridFunction& f, double gamma, const MaximalConfig& cfg);
GridFunction iterated_maximal(const GridFunction& f, int j, const MaximalConfig& cfg);

// phi(x) = c (1 - |x|^2)^4 on the unit ball, at scales unit * 2^j for j in
// [j_min, j_max]. Each dilate is renormalized to unit mass on the grid, so a
// scale below the spacing acts as the identity.
struct Mollifier {
  int dim = 1;
  int j_min = -4;
  int j_max = 0;
  double unit = 1.0;

  double profile(double r) const;
  std::vector<double> scales() const;
  double largest_scale() const;
};

// max over scales t of |phi_t * f|. Throws when f is nonzero closer than the
// largest scale to the box edge.
GridFunction grand_maximal(const GridFunction& f, const Mollifier& phi);

// phi_t * f by direct summation; f must respect the same margin.
GridFunction mollify(const GridFunction& f, const Mollifier& phi, double t);

struct Eq008Result {
  double max_ratio = 0.0;
  Point argmax{0.0, 0.0};
  // Grid used: box = 8Q, spacing side / cells_per_side.
  double h = 0.0;
};

// max over x in Q* of l(Q)^gamma / M_{gamma delta}(chi_Q)(x)^{1/delta}.
Eq008Result eq008_check(const Cube& q, double gamma, double delta, int cells_per_side = 64, double ratio = 1.189207115002721);

}  // namespace fracharm
