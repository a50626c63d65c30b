#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fracharm/harness/config.hpp"
#include "fracharm/harness/report.hpp"

namespace fracharm {

RatioReport run_lemma22(const ExperimentConfig& cfg);
RatioReport run_lemma23(const ExperimentConfig& cfg);
RatioReport run_annuli(const ExperimentConfig& cfg);
RatioReport run_fefferman_stein(const ExperimentConfig& cfg);
RatioReport run_eq011(const ExperimentConfig& cfg);
RatioReport run_eq008(const ExperimentConfig& cfg);
RatioReport run_pointwise(const ExperimentConfig& cfg);
RatioReport run_theorem_main(const ExperimentConfig& cfg);
RatioReport run_endpoint_remark(const ExperimentConfig& cfg);
RatioReport run_var_theorem(const ExperimentConfig& cfg);
RatioReport run_extrapolation_demo(const ExperimentConfig& cfg);

struct ExperimentInfo {
  std::string id;
  std::string summary;
  std::function<RatioReport(const ExperimentConfig&)> run;
};

const std::vector<ExperimentInfo>& experiment_registry();
// nullptr for unknown ids.
const ExperimentInfo* find_experiment(std::string_view id);

// int (sum_j c_j chi_{Q_j})^r w over R^n, exact for power weights.
double piecewise_constant_integral(const std::vector<Cube>& cubes, const std::vector<double>& coeffs, double r,
                                   const Weight& w);

// Dyadic cubes inside box: the largest level whose edges align with the box,
// down six levels or to the grid spacing.
DyadicFamily weight_family(const Box& box, double h);

// Smallest r with w in A_r: 1 when the A_1 constant is finite and stable,
// otherwise rw_estimate over 1.05, 1.1, .., 8.
double weight_r(const Weight& w, const DyadicFamily& family);

}  // namespace fracharm
