#pragma once

#include <vector>

#include "fracharm/harness/config.hpp"
#include "fracharm/harness/report.hpp"

namespace fracharm {

struct CubeDraw {
  std::vector<Cube> cubes;
  std::vector<double> lambdas;
};

// Cubes and coefficients for (trial, slot) from the corpus law, unit scale.
CubeDraw draw_cubes(const ExperimentConfig& c, int trial, int slot);
// Dyadic family over the config box, up to seven levels ending at its side.
DyadicFamily weight_family(const ExperimentConfig& c);
RatioReport make_report(const ExperimentConfig& c);
void collect_rows(RatioReport& r, const std::vector<TrialRow>& rows);
// gamma_i proportional to n / [p_i]_+.
std::vector<double> split_gamma(const ExperimentConfig& c);

}  // namespace fracharm
