#include "fracharm/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace fracharm {

namespace {

// b[i] = max(a[i], ..., a[i + k - 1]).
std::vector<double> sliding_max(const std::vector<double>& a, int k) {
  const int n = static_cast<int>(a.size()) - k + 1;
  std::vector<double> b(static_cast<std::size_t>(std::max(n, 0)));
  std::deque<int> dq;
  for (int t = 0; t < static_cast<int>(a.size()); ++t) {
    while (!dq.empty() && a[static_cast<std::size_t>(dq.back())] <= a[static_cast<std::size_t>(t)]) dq.pop_back();
    dq.push_back(t);
    if (dq.front() <= t - k) dq.pop_front();
    if (t >= k - 1) b[static_cast<std::size_t>(t - k + 1)] = a[static_cast<std::size_t>(dq.front())];
  }
  return b;
}

// 2D prefix sums of |f| with a zero border; 1D grids use ny = 1.
struct Prefix {
  int nx, ny;
  std::vector<double> s;

  explicit Prefix(const GridFunction& f)
      : nx(f.extent(0)), ny(f.dim() == 2 ? f.extent(1) : 1),
        s(static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1), 0.0) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        at(i + 1, j + 1) = std::abs(f[f.index(i, j)]) + at(i, j + 1) + at(i + 1, j) - at(i, j);
      }
    }
  }
  double& at(int i, int j) { return s[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx + 1) * j]; }
  double at(int i, int j) const { return s[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx + 1) * j]; }

  // Sum over cells [i0, i1) x [j0, j1), clipped to the grid.
  double rect(int i0, int i1, int j0, int j1) const {
    i0 = std::clamp(i0, 0, nx);
    i1 = std::clamp(i1, 0, nx);
    j0 = std::clamp(j0, 0, ny);
    j1 = std::clamp(j1, 0, ny);
    if (i1 <= i0 || j1 <= j0) return 0.0;
    return at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0);
  }
};

// Max over k-cell cubes containing each cell of the average of |f|.
std::vector<double> uncentered_level(const Prefix& p, int dim, int k) {
  const double vol = dim == 1 ? k : static_cast<double>(k) * k;
  if (dim == 1) {
    std::vector<double> a(static_cast<std::size_t>(p.nx + k - 1));
    for (int t = 0; t < static_cast<int>(a.size()); ++t) {
      const int s = t - (k - 1);
      a[static_cast<std::size_t>(t)] = p.rect(s, s + k, 0, 1) / vol;
    }
    return sliding_max(a, k);
  }
  const int wx = p.nx + k - 1, wy = p.ny + k - 1;
  // Row-wise max over x for each window row t, then column-wise over y.
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(wy));
  std::vector<double> a(static_cast<std::size_t>(wx));
  for (int t = 0; t < wy; ++t) {
    const int sy = t - (k - 1);
    for (int u = 0; u < wx; ++u) {
      const int sx = u - (k - 1);
      a[static_cast<std::size_t>(u)] = p.rect(sx, sx + k, sy, sy + k) / vol;
    }
    rows[static_cast<std::size_t>(t)] = sliding_max(a, k);
  }
  std::vector<double> out(static_cast<std::size_t>(p.nx) * static_cast<std::size_t>(p.ny));
  std::vector<double> col(static_cast<std::size_t>(wy));
  for (int i = 0; i < p.nx; ++i) {
    for (int t = 0; t < wy; ++t) col[static_cast<std::size_t>(t)] = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
    const auto m = sliding_max(col, k);
    for (int j = 0; j < p.ny; ++j) out[static_cast<std::size_t>(i) + static_cast<std::size_t>(p.nx) * j] = m[static_cast<std::size_t>(j)];
  }
  return out;
}

std::vector<double> centered_level(const Prefix& p, int dim, int k) {
  const int r = (k - 1) / 2;
  const double vol = dim == 1 ? k : static_cast<double>(k) * k;
  std::vector<double> out(static_cast<std::size_t>(p.nx) * static_cast<std::size_t>(p.ny));
  for (int j = 0; j < p.ny; ++j) {
    for (int i = 0; i < p.nx; ++i) {
      const double s = dim == 1 ? p.rect(i - r, i + r + 1, 0, 1) : p.rect(i - r, i + r + 1, j - r, j + r + 1);
      out[static_cast<std::size_t>(i) + static_cast<std::size_t>(p.nx) * j] = s / vol;
    }
  }
  return out;
}

}  // namespace

MaximalConfig MaximalConfig::for_grid(const GridFunction& f) {
  MaximalConfig cfg;
  cfg.l_min = f.h();
  cfg.l_max = f.box().side(0);
  if (f.dim() == 2) cfg.l_max = std::max(cfg.l_max, f.box().side(1));
  return cfg;
}

std::vector<int> ladder_cells(const MaximalConfig& cfg, double h) {
  if (!(cfg.ratio > 1.0)) throw std::invalid_argument("maximal: ladder ratio must exceed 1");
  if (cfg.l_min < h * (1.0 - 1e-12)) throw std::invalid_argument("maximal: l_min is below the grid spacing");
  if (cfg.l_max < cfg.l_min) throw std::invalid_argument("maximal: l_max is below l_min");
  std::vector<int> ks;
  auto push = [&](double l) {
    int k = std::max(1, static_cast<int>(std::lround(l / h)));
    if (cfg.centered && k % 2 == 0) ++k;
    ks.push_back(k);
  };
  for (double l = cfg.l_min; l <= cfg.l_max * (1.0 + 1e-12); l *= cfg.ratio) push(l);
  push(cfg.l_max);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

GridFunction frac_maximal(const GridFunction& f, double gamma, const MaximalConfig& cfg) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("frac_maximal: gamma must be nonnegative");
  const Prefix p(f);
  GridFunction out = f.zeros_like();
  for (int k : ladder_cells(cfg, f.h())) {
    const auto level = cfg.centered ? centered_level(p, f.dim(), k) : uncentered_level(p, f.dim(), k);
    const double factor = gamma == 0.0 ? 1.0 : std::pow(k * f.h(), gamma);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], factor * level[i]);
  }
  return out;
}

GridFunction hl_maximal(const GridFunction& f, const MaximalConfig& cfg) { return frac_maximal(f, 0.0, cfg); }

GridFunction iterated_maximal(const GridFunction& f, int j, const MaximalConfig& cfg) {
  if (j < 0) throw std::invalid_argument("iterated_maximal: j must be nonnegative");
  GridFunction g = f;
  for (int i = 0; i < j; ++i) g = hl_maximal(g, cfg);
  return g;
}

double Mollifier::profile(double r) const {
  if (r >= 1.0) return 0.0;
  const double c = dim == 1 ? 315.0 / 256.0 : 5.0 / std::numbers::pi;
  const double u = 1.0 - r * r;
  return c * u * u * u * u;
}

std::vector<double> Mollifier::scales() const {
  if (j_min > j_max) throw std::invalid_argument("mollifier: empty scale range");
  if (!(unit > 0.0)) throw std::invalid_argument("mollifier: unit must be positive");
  std::vector<double> t;
  for (int j = j_min; j <= j_max; ++j) t.push_back(std::ldexp(unit, j));
  return t;
}

double Mollifier::largest_scale() const { return std::ldexp(unit, j_max); }

namespace {

int support_cells(double t, double h) {
  // Offsets o with |o| h < t.
  const double r = t / h;
  int c = static_cast<int>(std::floor(r));
  if (c >= r) --c;
  return std::max(c, 0);
}

void require_margin(const GridFunction& f, int r) {
  const int nx = f.extent(0), ny = f.dim() == 2 ? f.extent(1) : 1;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (f[f.index(i, j)] == 0.0) continue;
      bool ok = i >= r && i < nx - r;
      if (f.dim() == 2) ok = ok && j >= r && j < ny - r;
      if (!ok) throw std::invalid_argument("grand_maximal: f is nonzero within the largest mollifier scale of the box edge");
    }
  }
}

}  // namespace

GridFunction mollify(const GridFunction& f, const Mollifier& phi, double t) {
  if (phi.dim != f.dim()) throw std::invalid_argument("mollifier and grid dimensions differ");
  const double h = f.h();
  const int r = support_cells(t, h);
  require_margin(f, r);
  if (r == 0) return f;
  const int side = 2 * r + 1;
  const int rows = f.dim() == 2 ? side : 1;
  std::vector<double> w(static_cast<std::size_t>(side) * static_cast<std::size_t>(rows));
  double mass = 0.0;
  for (int b = 0; b < rows; ++b) {
    for (int a = 0; a < side; ++a) {
      const double dx = (a - r) * h, dy = f.dim() == 2 ? (b - r) * h : 0.0;
      const double v = phi.profile(std::sqrt(dx * dx + dy * dy) / t);
      w[static_cast<std::size_t>(a) + static_cast<std::size_t>(side) * b] = v;
      mass += v;
    }
  }
  for (double& v : w) v /= mass;
  GridFunction out = f.zeros_like();
  const int nx = f.extent(0), ny = f.dim() == 2 ? f.extent(1) : 1;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double v = f[f.index(i, j)];
      if (v == 0.0) continue;
      for (int b = 0; b < rows; ++b) {
        const int jj = f.dim() == 2 ? j + b - r : 0;
        const double* wr = &w[static_cast<std::size_t>(side) * b];
        double* o = &out[out.index(i - r, jj)];
        for (int a = 0; a < side; ++a) o[a] += v * wr[a];
      }
    }
  }
  return out;
}

GridFunction grand_maximal(const GridFunction& f, const Mollifier& phi) {
  require_margin(f, support_cells(phi.largest_scale(), f.h()));
  GridFunction out = f.zeros_like();
  for (double t : phi.scales()) {
    const GridFunction g = mollify(f, phi, t);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], std::abs(g[i]));
  }
  return out;
}

Eq008Result eq008_check(const Cube& q, double gamma, double delta, int cells_per_side, double ratio) {
  if (!(gamma > 0.0)) throw std::invalid_argument("eq008_check: gamma must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("eq008_check: delta must lie in (0, 1]");
  if (!(gamma * delta < q.dim())) throw std::invalid_argument("eq008_check: need gamma * delta < n");
  if (cells_per_side < 1) throw std::invalid_argument("eq008_check: cells_per_side must be positive");
  const Cube big = dilate(q, 8.0);
  const Box box = q.dim() == 1 ? Box(Interval{big.lower(0), big.upper(0)})
                               : Box(Interval{big.lower(0), big.upper(0)}, Interval{big.lower(1), big.upper(1)});
  const double h = q.side() / cells_per_side;
  const GridFunction chi = indicator(box, h, q);
  MaximalConfig cfg;
  cfg.l_min = h;
  cfg.l_max = big.side();
  cfg.ratio = ratio;
  const GridFunction m = frac_maximal(chi, gamma * delta, cfg);
  Eq008Result res;
  res.h = h;
  const double lhs = std::pow(q.side(), gamma);
  const CellRange r = cells_in(chi, star(q));
  for (int j = r.first[1]; j <= r.last[1]; ++j) {
    for (int i = r.first[0]; i <= r.last[0]; ++i) {
      const std::size_t idx = chi.index(i, j);
      const double v = lhs / std::pow(m[idx], 1.0 / delta);
      if (v > res.max_ratio) {
        res.max_ratio = v;
        res.argmax = chi.center(idx);
      }
    }
  }
  return res;
}

}  // namespace fracharm
