#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fracharm/harness/experiments.hpp"

using namespace fracharm;

namespace {

std::string csv_of(const RatioReport& r) {
  std::ostringstream os;
  r.write_csv(os);
  return os.str();
}

ExperimentConfig single_cube(const std::string& id, int trials) {
  ExperimentConfig c = default_config(id);
  c.corpus.trials = trials;
  c.corpus.cubes_min = c.corpus.cubes_max = 1;
  c.corpus.law.lambda_min = c.corpus.law.lambda_max = 1.0;
  return c;
}

template <class E>
std::string rejection(const std::string& text, const std::string& id) {
  try {
    parse_config(text, id, "cfg.json");
  } catch (const E& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("registry") {
  std::set<std::string> ids;
  for (const auto& e : experiment_registry()) ids.insert(e.id);
  for (const char* id : {"lemma22", "lemma23", "annuli", "fefferman-stein", "eq011", "eq008", "pointwise",
                         "theorem-main", "theorem-asymmetric", "endpoint", "var-theorem", "extrapolation"}) {
    CHECK(ids.count(id) == 1);
    CHECK(find_experiment(id) != nullptr);
  }
  CHECK(find_experiment("lemma99") == nullptr);
}

TEST_CASE("trend slope and pass flag") {
  std::vector<TrialRow> rows;
  for (int k = -3; k <= 3; ++k) rows.push_back({0, k, 0.0, 0.0, std::pow(2.0, 0.3 * k)});
  CHECK(trend_slope(rows) == doctest::Approx(0.3).epsilon(1e-12));
  std::vector<TrialRow> flat{{0, 0, 1, 1, 1.0}, {1, 0, 1, 2, 0.5}};
  CHECK(trend_slope(flat) == 0.0);

  RatioReport r;
  r.slope_tol = 0.1;
  for (int k = -3; k <= 3; ++k) r.add(0, k, 2.0, 1.0);
  r.finalize();
  CHECK(r.pass);
  CHECK(r.max_ratio == 2.0);
  CHECK(r.mean_ratio == 2.0);
  CHECK(r.slope == doctest::Approx(0.0).epsilon(1e-15));
  r.add(1, 0, 1.0, 0.0);
  r.finalize();
  CHECK_FALSE(r.all_rhs_positive);
  CHECK_FALSE(r.pass);

  RatioReport s;
  for (int k = -3; k <= 3; ++k) s.add(0, k, std::pow(2.0, 0.5 * k), 1.0);
  s.finalize();
  CHECK_FALSE(s.pass);
  RatioReport g;
  g.add(0, 0, 1.0, 1.0);
  g.gates["x"] = false;
  g.finalize();
  CHECK_FALSE(g.pass);
}

TEST_CASE("report outputs") {
  RatioReport r;
  r.experiment = "demo";
  r.add(0, -1, 0.1, 0.3);
  r.add(0, 1, 1.0, 2.0);
  r.finalize();
  const auto dir = std::filesystem::temp_directory_path() / "fracharm_report_test";
  std::filesystem::remove_all(dir);
  write_outputs(r, dir);
  std::ifstream csv(dir / "demo.trials.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "trial,scale_k,lhs,rhs,ratio");
  std::ifstream js(dir / "demo.report.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["trial_rows"] == 2);
  CHECK(j["pass"] == r.pass);
  std::filesystem::remove_all(dir);
}

TEST_CASE("seed derivation") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 50; ++t) {
    for (std::uint64_t s = 0; s < 4; ++s) seen.insert(derive_seed(7, t, s));
  }
  CHECK(seen.size() == 200);
  CHECK(derive_seed(7, 3, 1) == derive_seed(7, 3, 1));
  CHECK(derive_seed(7, 3, 1) != derive_seed(8, 3, 1));
}

TEST_CASE("config parsing") {
  const auto c = parse_config(R"({"experiment": "theorem-main", "gamma": 0.75, "grid": {"h": 0.0078125},
    "corpus": {"seed": 4, "trials": 7}, "sweep": {"k_min": -1, "k_max": 2}})",
                              "theorem-main", "cfg.json");
  CHECK(c.gamma == 0.75);
  CHECK(c.h == 0.0078125);
  CHECK(c.corpus.seed == 4);
  CHECK(c.corpus.trials == 7);
  CHECK(c.sweep() == std::vector<int>{-1, 0, 1, 2});
  const auto round = parse_config(c.to_json().dump(), "theorem-main", "round");
  CHECK(round.to_json() == c.to_json());

  const std::string bad_field = rejection<ConfigError>("{\n  \"gamma\": 0.5,\n  \"corpus\": {\"trails\": 3}\n}", "lemma22");
  CHECK(bad_field.find("cfg.json:3") != std::string::npos);
  CHECK(bad_field.find("corpus.trails") != std::string::npos);
  const std::string bad_type = rejection<ConfigError>("{\n\"m\": 2,\n\"gamma\": \"half\"\n}", "theorem-main");
  CHECK(bad_type.find(":3") != std::string::npos);
  CHECK(bad_type.find("gamma") != std::string::npos);
  const std::string syntax = rejection<ConfigError>("{\n  \"gamma\": 0.5,\n  oops\n}", "lemma22");
  CHECK(syntax.find("cfg.json:3") != std::string::npos);
  CHECK_FALSE(rejection<ConfigError>(R"({"experiment": "lemma23"})", "lemma22").empty());
  CHECK_FALSE(rejection<ConfigError>(R"({"sweep": {"k_min": 2, "k_max": 1}})", "lemma22").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json", "lemma22"), ConfigError);
}

TEST_CASE("lemma22 single cube ratio is sqrt 2") {
  const auto r = run_lemma22(single_cube("lemma22", 10));
  CHECK(r.pass);
  CHECK(r.rows.size() == 70);
  for (const auto& row : r.rows) CHECK(std::abs(row.ratio - std::sqrt(2.0)) <= 0.02 * std::sqrt(2.0));
}

TEST_CASE("lemma23 single cube closed form") {
  // 2 int_1^inf x^{-5} dx = 1/2 against ||chi_Q||_1 = 1.
  const auto r = run_lemma23(single_cube("lemma23", 10));
  CHECK(r.pass);
  for (const auto& row : r.rows) CHECK(std::abs(row.ratio - std::sqrt(0.5)) <= 0.02 * std::sqrt(0.5));
}

TEST_CASE("hypothesis rejections") {
  auto l23 = default_config("lemma23");
  l23.params["epsilon"] = 0.9;
  CHECK_THROWS_AS(run_lemma23(l23), HypothesisError);

  auto endpoint = default_config("endpoint");
  endpoint.gamma = 1.5;
  CHECK_THROWS_AS(run_endpoint_remark(endpoint), HypothesisError);

  auto big_gamma = default_config("theorem-main");
  big_gamma.gamma = 2.0;
  CHECK_THROWS_AS(run_theorem_main(big_gamma), HypothesisError);

  auto asym = default_config("theorem-asymmetric");
  asym.q_i = {1.2, 1.2};
  CHECK_THROWS_AS(run_theorem_main(asym), HypothesisError);

  // |x|^{1.5} lies in A_r only for r > 2.5, which forces N >= 4.
  auto low_n = default_config("theorem-main");
  low_n.weights = {{{"kind", "power"}, {"exponent", 1.5}}, {{"kind", "constant"}}};
  low_n.corpus.N = 1;
  CHECK_THROWS_AS(run_theorem_main(low_n), HypothesisError);

  auto var = default_config("var-theorem");
  var.gamma = 1.9;
  CHECK_THROWS_AS(run_var_theorem(var), HypothesisError);

  auto xt = default_config("extrapolation");
  xt.params["p_const"] = {2.0, 2.0};
  CHECK_THROWS_AS(run_extrapolation_demo(xt), HypothesisError);
}

TEST_CASE("single-atom theorem ratios are dilation invariant") {
  auto c = single_cube("theorem-main", 4);
  const auto r = run_theorem_main(c);
  CHECK(r.pass);
  CHECK(r.diagnostics["dilation_spread"].get<double>() <= 1.05);
  CHECK(std::abs(r.slope) <= 0.02);
  CHECK(r.gates.at("proof_diagnostics_finite"));
}

TEST_CASE("endpoint homogeneity") {
  auto c = default_config("endpoint");
  c.corpus.trials = 2;
  const auto r = run_endpoint_remark(c);
  CHECK(r.gates.at("bounded_slot_homogeneity"));
  CHECK(r.pass);
}

TEST_CASE("constant exponents reduce the variable run to the unweighted one") {
  auto th = default_config("theorem-main");
  th.corpus.trials = 4;
  auto var = default_config("var-theorem");
  var.p = {1.0, 1.0};
  var.corpus = th.corpus;
  const auto a = run_theorem_main(th);
  const auto b = run_var_theorem(var);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(std::abs(b.rows[i].lhs / a.rows[i].lhs - 1.0) <= 1e-6);
    CHECK(std::abs(b.rows[i].rhs / a.rows[i].rhs - 1.0) <= 1e-6);
  }
  CHECK(b.gates.at("truncation_monotone"));
}

TEST_CASE("extrapolation chain with constant exponents") {
  auto c = default_config("extrapolation");
  c.p = {4.0, 4.0};
  c.params["p_const"] = {2.0, 2.0};
  c.gamma = 0.25;
  c.corpus.trials = 2;
  const auto r = run_extrapolation_demo(c);
  CHECK(r.pass);
  for (const char* key : {"dual_pairing_constant", "holder_constant", "multi_holder_constant"}) {
    CHECK(r.diagnostics[key].get<double>() <= 4.0);
  }
  CHECK(r.diagnostics["dual_witness_modular_defect"].get<double>() <= 1e-5);
}

TEST_CASE("runs are deterministic") {
  auto c = default_config("theorem-main");
  c.corpus.trials = 3;
  CHECK(csv_of(run_theorem_main(c)) == csv_of(run_theorem_main(c)));
  auto l = default_config("lemma22");
  l.corpus.trials = 10;
  CHECK(csv_of(run_lemma22(l)) == csv_of(run_lemma22(l)));
  auto other = l;
  other.corpus.seed += 1;
  CHECK(csv_of(run_lemma22(l)) != csv_of(run_lemma22(other)));
}
