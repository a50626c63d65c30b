#pragma once

#include <vector>

#include <json.hpp>

#include "fracharm/grid.hpp"
#include "fracharm/maximal.hpp"
#include "fracharm/var_exponent.hpp"
#include "fracharm/weights.hpp"

namespace fracharm {

inline constexpr int kDefaultRubioOrder = 8;

// R_K h = sum_{j=0}^{K} M^j h / (2A)^j.
GridFunction rubio_iterate(const GridFunction& h, double A, int K, const MaximalConfig& cfg);

struct RubioReport {
  double A = 0.0;
  int K = 0;
  // (1) min of R_K h - h; must be >= 0.
  double domination_margin = 0.0;
  // (2) ||R_K h|| / ||h|| in L^{sigma(.)}.
  double norm_ratio = 0.0;
  // (3) A_1 estimate of R_K h against 2A + max(tail / R_K h), tail = M^{K+1} h / (2A)^K.
  double a1_value = 0.0;
  double a1_bound = 0.0;
  double tail_slack = 0.0;
  // (4) RH_{q/p} constant of (R_K h)^{p/q}.
  WeightConstantReport rh;
  bool property1 = false;
  bool property2 = false;
  bool property3 = false;
  bool property4 = false;

  bool passed() const { return property1 && property2 && property3 && property4; }
  nlohmann::json to_json() const;
};

RubioReport rubio_properties_check(const GridFunction& h, const ExponentFunction& sigma, double A, int K,
                                   const MaximalConfig& cfg, const DyadicFamily& family, double p, double q);

// 1.5 * max over probes of ||M f|| / ||f|| in L^{sigma(.)}.
double maximal_opnorm_estimate(const ExponentFunction& sigma, const std::vector<GridFunction>& probes,
                               const MaximalConfig& cfg);

// h = c F^{q_bar(x) - 1} with ||h||_{L^{q_bar'(.)}} = 1.
GridFunction dual_witness(const GridFunction& F, const ExponentFunction& q_bar);

// int |f g| / (||f||_{L^{p(.)}} ||g||_{L^{p'(.)}}).
double holder_constant(const GridFunction& f, const GridFunction& g, const ExponentFunction& p);

}  // namespace fracharm
