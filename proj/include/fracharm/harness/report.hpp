#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracharm {

struct TrialRow {
  int trial = 0;
  int scale_k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

// Per-trial sides of an inequality over a dilation sweep. pass requires every
// rhs > 0, a finite max ratio, |slope| <= slope_tol and every named gate.
struct RatioReport {
  std::string experiment;
  double slope_tol = 0.1;
  std::vector<TrialRow> rows;
  std::map<std::string, bool> gates;
  nlohmann::json diagnostics = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();

  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  double slope = 0.0;
  bool all_rhs_positive = false;
  bool pass = false;

  void add(int trial, int scale_k, double lhs, double rhs);
  // Computes the statistics and the pass flag.
  void finalize();
  nlohmann::json to_json() const;
  void write_csv(std::ostream& os) const;
};

// Least-squares slope of log(ratio) against k log 2; 0 with fewer than two
// distinct k. Rows with non-finite or non-positive ratio give NaN.
double trend_slope(const std::vector<TrialRow>& rows);

// Writes <dir>/<id>.report.json and <dir>/<id>.trials.csv.
void write_outputs(const RatioReport& r, const std::filesystem::path& dir);

}  // namespace fracharm
