#include "fracharm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracharm/grid_io.hpp"
#include "fracharm/power_integral.hpp"

namespace fracharm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Prefix sums of samples^s so sampled cube averages cost O(1).
class PrefixTable {
 public:
  PrefixTable(const GridFunction& g, double s) : grid_(&g), nx_(g.extent(0)), ny_(g.dim() == 2 ? g.extent(1) : 1) {
    sums_.assign(static_cast<std::size_t>(nx_ + 1) * static_cast<std::size_t>(ny_ + 1), 0.0);
    for (int j = 0; j < ny_; ++j) {
      for (int i = 0; i < nx_; ++i) {
        const double v = std::pow(g[g.index(i, j)], s);
        at(i + 1, j + 1) = v + at(i, j + 1) + at(i + 1, j) - at(i, j);
      }
    }
  }

  // Mean over cells with centers in q; NaN when q holds no cell.
  double mean(const Cube& q) const {
    const CellRange r = cells_in(*grid_, q);
    if (r.empty(grid_->dim())) return std::numeric_limits<double>::quiet_NaN();
    const int i0 = r.first[0], i1 = r.last[0] + 1;
    const int j0 = r.first[1], j1 = r.last[1] + 1;
    const double s = at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0);
    return s / static_cast<double>(r.count(grid_->dim()));
  }

 private:
  double& at(int i, int j) { return sums_[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_ + 1) * j]; }
  double at(int i, int j) const {
    return sums_[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_ + 1) * j];
  }

  const GridFunction* grid_;
  int nx_;
  int ny_;
  std::vector<double> sums_;
};

// Cube averages of w^s for either representation.
class Averager {
 public:
  Averager(const Weight& w, double s) : w_(&w), s_(s) {
    if (!w.is_power()) table_.emplace(w.samples(), s);
  }
  double operator()(const Cube& q) const { return table_ ? table_->mean(q) : w_->cube_average(q, s_); }

 private:
  const Weight* w_;
  double s_;
  std::optional<PrefixTable> table_;
};

void require_positive_samples(const Weight& w) {
  if (w.is_power()) return;
  for (double v : w.samples().values()) {
    if (!(v > 0.0)) throw std::invalid_argument("weight constant: non-positive weight samples");
  }
}

template <class Expr>
WeightConstantReport sup_over_family(const char* kind, const Weight& w, const DyadicFamily& family, Expr&& expr) {
  if (w.dim() != family.window().dim()) throw std::invalid_argument("weight and family dimensions differ");
  require_positive_samples(w);
  WeightConstantReport rep;
  rep.kind = kind;
  rep.window = family.window();
  rep.j_min = family.j_min();
  rep.j_max = family.j_max();
  rep.weight_descriptor = w.descriptor();
  rep.value = 0.0;
  for (int j = family.j_min(); j <= family.j_max(); ++j) {
    double best = 0.0;
    for (const Cube& q : family.level_with_shifts(j)) {
      const double v = expr(q);
      if (std::isnan(v)) continue;
      best = std::max(best, v);
    }
    rep.per_level.push_back({j, best});
    rep.value = std::max(rep.value, best);
  }
  const auto& lv = rep.per_level;
  if (lv.size() == 1) {
    rep.stable = std::isfinite(lv[0].value);
  } else {
    const double a = lv[0].value, b = lv[1].value;
    rep.stable = std::isfinite(a) && std::isfinite(b) && std::abs(a - b) <= 0.1 * std::max(a, b);
  }
  return rep;
}

double dual(double p) { return p / (p - 1.0); }

}  // namespace

Weight Weight::power(double exponent, const Point& origin, int dim, double scale) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("weight dimension must be 1 or 2");
  if (!(exponent > -dim)) {
    std::ostringstream os;
    os << "power weight |x|^" << exponent << " is not locally integrable in dimension " << dim;
    throw std::invalid_argument(os.str());
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("power weight scale must be positive");
  Weight w;
  w.dim_ = dim;
  w.exponent_ = exponent;
  w.origin_ = origin;
  if (dim == 1) w.origin_[1] = 0.0;
  w.scale_ = scale;
  return w;
}

Weight Weight::constant(double value, int dim) { return power(0.0, Point{0.0, 0.0}, dim, value); }

Weight Weight::sampled(GridFunction samples) {
  for (double v : samples.values()) {
    if (v < 0.0) throw std::invalid_argument("sampled weight must be nonnegative");
  }
  Weight w;
  w.dim_ = samples.dim();
  w.samples_.emplace(std::move(samples));
  return w;
}

const GridFunction& Weight::samples() const {
  if (!samples_) throw std::logic_error("power weight has no samples");
  return *samples_;
}

double Weight::cube_average(const Cube& q, double s) const {
  if (q.dim() != dim_) throw std::invalid_argument("cube and weight dimensions differ");
  if (samples_) return PrefixTable(*samples_, s).mean(q);
  const double e = exponent_ * s;
  const double c = std::pow(scale_, s);
  if (e == 0.0) return c;
  return c * power_cube_average(q, origin_, e);
}

Weight Weight::pow(double s) const {
  if (samples_) {
    GridFunction g = *samples_;
    for (double& v : g.values()) v = std::pow(v, s);
    return sampled(std::move(g));
  }
  return power(exponent_ * s, origin_, dim_, std::pow(scale_, s));
}

Weight Weight::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("weight scale factor must be positive");
  if (samples_) {
    GridFunction g = *samples_;
    g *= c;
    return sampled(std::move(g));
  }
  return power(exponent_, origin_, dim_, scale_ * c);
}

GridFunction Weight::to_grid(const Box& box, double h) const {
  if (samples_) {
    if (!(samples_->box() == box) || samples_->h() != h) {
      throw GridMismatch("sampled weight lives on a different grid");
    }
    return *samples_;
  }
  GridFunction g(box, h);
  if (g.dim() != dim_) throw std::invalid_argument("grid and weight dimensions differ");
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    g[idx] = cube_average(Cube(g.center(idx), h, dim_), 1.0);
  }
  return g;
}

nlohmann::json Weight::descriptor() const {
  if (samples_) return {{"kind", "sampled"}, {"grid", grid_descriptor(*samples_)}};
  nlohmann::json origin = nlohmann::json::array({origin_[0]});
  if (dim_ == 2) origin.push_back(origin_[1]);
  return {{"kind", "power"}, {"exponent", exponent_}, {"origin", origin}, {"scale", scale_}, {"dim", dim_}};
}

Weight weight_product(const std::vector<Weight>& factors, const std::vector<double>& exponents, const Box& box,
                      double h) {
  if (factors.empty() || factors.size() != exponents.size()) {
    throw std::invalid_argument("weight_product: factor and exponent lists must be nonempty and equal length");
  }
  bool same_power = true;
  for (const Weight& w : factors) {
    if (!w.is_power() || w.dim() != factors[0].dim() || w.origin() != factors[0].origin()) same_power = false;
  }
  if (same_power) {
    double a = 0.0, c = 1.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      a += factors[i].exponent() * exponents[i];
      c *= std::pow(factors[i].scale(), exponents[i]);
    }
    return Weight::power(a, factors[0].origin(), factors[0].dim(), c);
  }
  GridFunction g(box, h);
  for (double& v : g.values()) v = 1.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Weight& w = factors[i];
    if (w.is_power()) {
      for (std::size_t idx = 0; idx < g.size(); ++idx) {
        g[idx] *= w.cube_average(Cube(g.center(idx), h, g.dim()), exponents[i]);
      }
    } else {
      const GridFunction s = w.to_grid(box, h);
      for (std::size_t idx = 0; idx < g.size(); ++idx) g[idx] *= std::pow(s[idx], exponents[i]);
    }
  }
  return Weight::sampled(std::move(g));
}

nlohmann::json WeightConstantReport::to_json() const {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : per_level) {
    levels.push_back({{"level", l.level}, {"value", std::isfinite(l.value) ? nlohmann::json(l.value) : "inf"}});
  }
  nlohmann::json j;
  j["kind"] = kind;
  j["constant"] = std::isfinite(value) ? nlohmann::json(value) : nlohmann::json("inf");
  j["per_level"] = levels;
  j["stable"] = stable;
  j["parameters"] = parameters;
  j["consistent"] = consistent;
  j["family"] = {{"levels", {j_min, j_max}}, {"window", box_to_json(window)}};
  j["weight_descriptor"] = weight_descriptor;
  return j;
}

WeightConstantReport ap_constant(const Weight& w, double p, const DyadicFamily& family) {
  if (!(p > 1.0)) throw std::invalid_argument("ap_constant: p must exceed 1");
  const double s = 1.0 - dual(p);
  const Averager aw(w, 1.0), ad(w, s);
  auto rep = sup_over_family("A_p", w, family, [&](const Cube& q) {
    const double b = ad(q);
    if (std::isinf(b)) return kInf;
    return aw(q) * std::pow(b, p - 1.0);
  });
  rep.parameters = {{"p", p}};
  return rep;
}

WeightConstantReport rh_constant(const Weight& w, double s, const DyadicFamily& family) {
  if (!(s > 1.0)) throw std::invalid_argument("rh_constant: s must exceed 1");
  const Averager aw(w, 1.0), as(w, s);
  auto rep = sup_over_family("RH_s", w, family, [&](const Cube& q) { return std::pow(as(q), 1.0 / s) / aw(q); });
  rep.parameters = {{"s", s}};
  return rep;
}

WeightConstantReport apq_constant(const Weight& w, double p, double q, const DyadicFamily& family) {
  if (!(p > 1.0) || !(q > 0.0)) throw std::invalid_argument("apq_constant: need p > 1 and q > 0");
  const double pd = dual(p);
  const Averager aq(w, q), ad(w, -pd);
  auto rep = sup_over_family("A_pq", w, family, [&](const Cube& c) {
    const double b = ad(c);
    if (std::isinf(b)) return kInf;
    return std::pow(aq(c), 1.0 / q) * std::pow(b, 1.0 / pd);
  });
  rep.parameters = {{"p", p}, {"q", q}};
  rep.consistent = p > 1.0 && q > p && std::isfinite(q);
  return rep;
}

WeightConstantReport a1_constant(const Weight& w, const DyadicFamily& family) {
  if (w.is_power()) {
    const double a = w.exponent();
    auto rep = sup_over_family("A_1", w, family, [&](const Cube& q) {
      // Minimum of |x - x0|^a over q sits at the nearest point (a > 0) or the farthest corner (a < 0).
      double near2 = 0.0, far2 = 0.0;
      for (int k = 0; k < q.dim(); ++k) {
        const double x0 = w.origin()[static_cast<std::size_t>(k)];
        const double d = std::max({q.lower(k) - x0, x0 - q.upper(k), 0.0});
        const double f = std::max(std::abs(q.lower(k) - x0), std::abs(q.upper(k) - x0));
        near2 += d * d;
        far2 += f * f;
      }
      const double r = a >= 0.0 ? std::sqrt(near2) : std::sqrt(far2);
      const double m = a == 0.0 ? 1.0 : std::pow(r, a);
      if (m == 0.0) return kInf;
      return w.cube_average(q, 1.0) / (w.scale() * m);
    });
    rep.parameters = nlohmann::json::object();
    return rep;
  }
  const GridFunction& g = w.samples();
  const Averager aw(w, 1.0);
  auto rep = sup_over_family("A_1", w, family, [&](const Cube& q) {
    const CellRange r = cells_in(g, q);
    if (r.empty(g.dim())) return std::numeric_limits<double>::quiet_NaN();
    double lo = kInf;
    for (int j = r.first[1]; j <= r.last[1]; ++j) {
      for (int i = r.first[0]; i <= r.last[0]; ++i) lo = std::min(lo, g[g.index(i, j)]);
    }
    return aw(q) / lo;
  });
  rep.parameters = nlohmann::json::object();
  return rep;
}

double rw_estimate(const Weight& w, const DyadicFamily& family, const std::vector<double>& p_grid, double cap) {
  if (!std::is_sorted(p_grid.begin(), p_grid.end())) throw std::invalid_argument("rw_estimate: p_grid must increase");
  for (double p : p_grid) {
    const auto rep = ap_constant(w, p, family);
    if (rep.stable && rep.value < cap) return p;
  }
  return kInf;
}

}  // namespace fracharm
