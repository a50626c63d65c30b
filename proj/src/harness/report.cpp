#include "fracharm/harness/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "fracharm/grid_io.hpp"

namespace fracharm {

namespace {

nlohmann::json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

void RatioReport::add(int trial, int scale_k, double lhs, double rhs) {
  rows.push_back({trial, scale_k, lhs, rhs, rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity()});
}

double trend_slope(const std::vector<TrialRow>& rows) {
  std::set<int> ks;
  for (const auto& r : rows) ks.insert(r.scale_k);
  if (ks.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    if (!(r.ratio > 0.0) || !std::isfinite(r.ratio)) return std::numeric_limits<double>::quiet_NaN();
    const double x = r.scale_k * std::log(2.0), y = std::log(r.ratio);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void RatioReport::finalize() {
  max_ratio = 0.0;
  double sum = 0.0;
  all_rhs_positive = !rows.empty();
  for (const auto& r : rows) {
    if (!(r.rhs > 0.0)) all_rhs_positive = false;
    if (std::isnan(r.ratio)) max_ratio = std::numeric_limits<double>::quiet_NaN();
    if (!std::isnan(max_ratio)) max_ratio = std::max(max_ratio, r.ratio);
    sum += r.ratio;
  }
  mean_ratio = rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
  slope = trend_slope(rows);
  pass = all_rhs_positive && std::isfinite(max_ratio) && std::abs(slope) <= slope_tol;
  for (const auto& [name, ok] : gates) pass = pass && ok;
}

nlohmann::json RatioReport::to_json() const {
  nlohmann::json g = nlohmann::json::object();
  for (const auto& [name, ok] : gates) g[name] = ok;
  return {{"experiment", experiment},
          {"pass", pass},
          {"max_ratio", finite_or_string(max_ratio)},
          {"mean_ratio", finite_or_string(mean_ratio)},
          {"trend_slope", finite_or_string(slope)},
          {"slope_tol", slope_tol},
          {"all_rhs_positive", all_rhs_positive},
          {"trial_rows", rows.size()},
          {"gates", g},
          {"diagnostics", diagnostics},
          {"config", config}};
}

void RatioReport::write_csv(std::ostream& os) const {
  os << "trial,scale_k,lhs,rhs,ratio\n";
  for (const auto& r : rows) {
    os << r.trial << ',' << r.scale_k << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
       << format_double(r.ratio) << '\n';
  }
}

void write_outputs(const RatioReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream js(dir / (r.experiment + ".report.json"));
    if (!js) throw std::runtime_error("cannot write " + (dir / (r.experiment + ".report.json")).string());
    js << r.to_json().dump(2) << '\n';
  }
  std::ofstream csv(dir / (r.experiment + ".trials.csv"));
  if (!csv) throw std::runtime_error("cannot write " + (dir / (r.experiment + ".trials.csv")).string());
  r.write_csv(csv);
}

}  // namespace fracharm
