#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracharm/grid.hpp"

namespace fracharm {

// A weight: either the analytic power weight c |x - x0|^a, or positive
// samples on a grid. Power weights evaluate cube averages in closed form, so
// they refine correctly near the singularity.
class Weight {
 public:
  static Weight power(double exponent, const Point& origin, int dim, double scale = 1.0);
  static Weight constant(double value, int dim);
  static Weight sampled(GridFunction samples);

  bool is_power() const { return !samples_.has_value(); }
  int dim() const { return dim_; }
  double exponent() const { return exponent_; }
  const Point& origin() const { return origin_; }
  double scale() const { return scale_; }
  const GridFunction& samples() const;

  // Average of w^s over q. Power weights return +inf when w^s is not
  // integrable on q.
  double cube_average(const Cube& q, double s = 1.0) const;

  Weight pow(double s) const;
  Weight scaled(double c) const;

  // Cell averages of w on (box, h). Exact for power weights; sampled weights
  // must already live on this grid.
  GridFunction to_grid(const Box& box, double h) const;

  nlohmann::json descriptor() const;

 private:
  Weight() = default;

  int dim_ = 1;
  double exponent_ = 0.0;
  Point origin_{0.0, 0.0};
  double scale_ = 1.0;
  std::optional<GridFunction> samples_;
};

// Cell averages of prod_i w_i^{e_i} on (box, h). When every factor is a power
// weight about the same origin the product is itself a power weight and the
// averages are exact.
Weight weight_product(const std::vector<Weight>& factors, const std::vector<double>& exponents, const Box& box,
                      double h);

struct LevelValue {
  int level = 0;
  double value = 0.0;
};

struct WeightConstantReport {
  std::string kind;
  double value = 0.0;
  std::vector<LevelValue> per_level;
  // Finest two levels agree within 10% and are finite.
  bool stable = false;
  // Parameters the constant was computed with (p, q or s as applicable).
  nlohmann::json parameters;
  // Set for A_{p,q} when (p, q) cannot come from 1/q = 1/p - gamma/n with 0 < gamma/n < 1/p.
  bool consistent = true;
  Box window{Interval{0.0, 1.0}};
  int j_min = 0;
  int j_max = 0;
  nlohmann::json weight_descriptor;

  nlohmann::json to_json() const;
};

// sup over the family (with one-third shifts) of avg(w) avg(w^{1-p'})^{p-1}.
WeightConstantReport ap_constant(const Weight& w, double p, const DyadicFamily& family);
// sup of avg(w^s)^{1/s} / avg(w).
WeightConstantReport rh_constant(const Weight& w, double s, const DyadicFamily& family);
// sup of avg(w^q)^{1/q} avg(w^{-p'})^{1/p'}.
WeightConstantReport apq_constant(const Weight& w, double p, double q, const DyadicFamily& family);
// sup of avg(w) / min(w) over each cube: closed form for power weights, grid
// minimum for sampled weights.
WeightConstantReport a1_constant(const Weight& w, const DyadicFamily& family);

inline constexpr double kDefaultRwCap = 1e6;

// Smallest p in p_grid whose A_p constant is stable and below cap; +inf if none.
double rw_estimate(const Weight& w, const DyadicFamily& family, const std::vector<double>& p_grid,
                   double cap = kDefaultRwCap);

}  // namespace fracharm
