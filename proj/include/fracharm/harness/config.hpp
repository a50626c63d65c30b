#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fracharm/atoms.hpp"
#include "fracharm/grid.hpp"
#include "fracharm/var_exponent.hpp"
#include "fracharm/weights.hpp"

namespace fracharm {

// Malformed configuration: message names the source, line and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A hypothesis of the inequality under test fails for the configured data.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusConfig {
  std::uint64_t seed = 1;
  int trials = 100;
  // Cubes (or atoms) per slot and trial, drawn uniformly.
  int cubes_min = 1;
  int cubes_max = 3;
  // Moment order; -1 picks the smallest admissible value from the weights.
  int N = -1;
  AtomLaw law;
};

struct ExperimentConfig {
  std::string experiment;
  int m = 2;
  int n = 1;
  double gamma = 0.5;
  // One entry per slot: a number or an exponent descriptor.
  std::vector<nlohmann::json> p{1.0, 1.0};
  // Optional per-slot target exponents with sum 1/q_i = 1/q.
  std::vector<double> q_i;
  // One weight descriptor per slot ({"kind": "constant"} or "power").
  std::vector<nlohmann::json> weights;
  Box box{Interval{-2.0, 2.0}};
  double h = 1.0 / 256.0;
  int k_min = -3;
  int k_max = 3;
  double slope_tol = 0.1;
  CorpusConfig corpus;
  // Experiment-specific knobs.
  nlohmann::json params = nlohmann::json::object();

  int slots() const { return static_cast<int>(p.size()); }
  double param(const std::string& key, double fallback) const;
  int param_int(const std::string& key, int fallback) const;
  double p_const(int i) const;
  ExponentFunction p_var(int i) const;
  Weight weight(int i) const;
  std::vector<int> sweep() const;
  nlohmann::json to_json() const;
};

ExperimentConfig default_config(const std::string& experiment);
// Overlays a JSON document on default_config(experiment). origin names the
// source in diagnostics.
ExperimentConfig parse_config(std::string_view text, const std::string& experiment, const std::string& origin);
ExperimentConfig load_config(const std::filesystem::path& path, const std::string& experiment);

// {"kind": "constant", "value": c} or {"kind": "power", "exponent": a, "origin": [..], "scale": c}.
Weight weight_from_json(const nlohmann::json& j, int dim);

// Independent stream per (base seed, trial, slot).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t slot);

}  // namespace fracharm
