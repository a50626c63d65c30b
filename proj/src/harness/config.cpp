#include "fracharm/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fracharm/grid_io.hpp"

namespace fracharm {

namespace {

using nlohmann::json;

json constant_weight() { return {{"kind", "constant"}, {"value", 1.0}}; }
json power_weight(double a) { return {{"kind", "power"}, {"exponent", a}}; }
json log_decay(double p_inf, double amp) { return {{"kind", "log-decay"}, {"params", {{"p_inf", p_inf}, {"amplitude", amp}}}}; }

// 1-based line of the first occurrence of the dotted path, 0 when not found.
int line_of(std::string_view text, const std::string& path) {
  std::size_t pos = 0;
  std::stringstream ss(path);
  std::string seg;
  while (std::getline(ss, seg, '.')) {
    const auto br = seg.find('[');
    if (br != std::string::npos) seg = seg.substr(0, br);
    pos = text.find("\"" + seg + "\"", pos);
    if (pos == std::string_view::npos) return 0;
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

class Reader {
 public:
  Reader(std::string_view text, std::string origin) : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    std::ostringstream os;
    os << origin_;
    if (const int line = line_of(text_, path); line > 0) os << ":" << line;
    os << ": field '" << path << "': " << what;
    throw ConfigError(os.str());
  }

  void allowed(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!ok.contains(k)) fail(path.empty() ? k : path + "." + k, "unknown field");
    }
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  double positive(const json& v, const std::string& path) const {
    const double d = number(v, path);
    if (!(d > 0.0)) fail(path, "expected a positive number");
    return d;
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  Box box(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty() || v.size() > 2) fail(path, "expected [[lo, hi]] or [[lo, hi], [lo, hi]]");
    std::array<Interval, 2> axes;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string p = path + "[" + std::to_string(k) + "]";
      if (!v[k].is_array() || v[k].size() != 2) fail(p, "expected [lo, hi]");
      axes[k] = Interval{number(v[k][0], p), number(v[k][1], p)};
      if (!(axes[k].hi > axes[k].lo)) fail(p, "expected lo < hi");
    }
    return v.size() == 1 ? Box(axes[0]) : Box(axes[0], axes[1]);
  }

 private:
  std::string_view text_;
  std::string origin_;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t slot) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(base ^ mix(trial * 64 + slot));
}

Weight weight_from_json(const json& j, int dim) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return Weight::constant(j.value("value", 1.0), dim);
  if (kind == "power") {
    Point origin{0.0, 0.0};
    if (j.contains("origin")) {
      const auto& o = j.at("origin");
      for (std::size_t k = 0; k < o.size() && k < 2; ++k) origin[k] = o[k].get<double>();
    }
    return Weight::power(j.at("exponent").get<double>(), origin, dim, j.value("scale", 1.0));
  }
  throw std::invalid_argument("unknown weight kind '" + kind + "'");
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number()) throw ConfigError("field 'params." + key + "': expected a number");
  return v.get<double>();
}

int ExperimentConfig::param_int(const std::string& key, int fallback) const {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number_integer()) throw ConfigError("field 'params." + key + "': expected an integer");
  return v.get<int>();
}

double ExperimentConfig::p_const(int i) const {
  const auto& v = p.at(static_cast<std::size_t>(i));
  if (!v.is_number()) throw ConfigError("field 'p[" + std::to_string(i) + "]': expected a constant exponent");
  return v.get<double>();
}

ExponentFunction ExperimentConfig::p_var(int i) const { return exponent_from_json(p.at(static_cast<std::size_t>(i))); }

Weight ExperimentConfig::weight(int i) const {
  if (weights.empty()) return Weight::constant(1.0, n);
  return weight_from_json(weights.at(static_cast<std::size_t>(i)), n);
}

std::vector<int> ExperimentConfig::sweep() const {
  std::vector<int> ks;
  for (int k = k_min; k <= k_max; ++k) ks.push_back(k);
  return ks;
}

json ExperimentConfig::to_json() const {
  const auto& law = corpus.law;
  return {{"experiment", experiment},
          {"m", m},
          {"n", n},
          {"gamma", gamma},
          {"p", p},
          {"q_i", q_i},
          {"weights", weights},
          {"grid", {{"box", box_to_json(box)}, {"h", h}}},
          {"sweep", {{"k_min", k_min}, {"k_max", k_max}}},
          {"tolerances", {{"slope", slope_tol}}},
          {"corpus",
           {{"seed", corpus.seed},
            {"trials", corpus.trials},
            {"cubes_min", corpus.cubes_min},
            {"cubes_max", corpus.cubes_max},
            {"N", corpus.N},
            {"window", box_to_json(law.window)},
            {"j_min", law.j_min},
            {"j_max", law.j_max},
            {"lambda_min", law.lambda_min},
            {"lambda_max", law.lambda_max}}},
          {"params", params}};
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "lemma22" || experiment == "lemma23") {
    c.m = 1;
    c.p = {1.0};
    c.weights = {constant_weight()};
    c.corpus.seed = 3;
    c.corpus.cubes_max = 5;
    if (experiment == "lemma23") c.params = {{"epsilon", 3.0}};
  } else if (experiment == "annuli") {
    c.m = 1;
    c.p = {1.0};
    c.corpus.trials = 20;
    c.params = {{"s", 2.0}, {"levels", 4}, {"samples", 512}};
  } else if (experiment == "fefferman-stein" || experiment == "eq011") {
    c.m = 1;
    c.p = {experiment == "eq011" ? 4.0 / 3.0 : 2.0};
    c.weights = {constant_weight()};
    c.box = Box(Interval{-8.0, 8.0});
    c.h = 1.0 / 64.0;
    c.corpus.trials = 50;
    c.corpus.cubes_max = 8;
    c.params = {{"r", 2.0}};
  } else if (experiment == "eq008") {
    c.m = 1;
    c.p = {1.0};
    c.corpus.trials = 20;
    c.params = {{"delta", 1.0}};
  } else if (experiment == "pointwise") {
    c.corpus.trials = 20;
    c.corpus.seed = 9;
  } else if (experiment == "theorem-main" || experiment == "theorem-asymmetric") {
    c.weights = {constant_weight(), constant_weight()};
    c.corpus.seed = 11;
    if (experiment == "theorem-asymmetric") {
      c.q_i = {1.2, 1.5};
      c.weights = {power_weight(-0.8), power_weight(0.25)};
    }
  } else if (experiment == "endpoint") {
    c.p = {1.0};
    c.weights = {constant_weight()};
    c.corpus.trials = 20;
    c.corpus.seed = 13;
    c.params = {{"l", 1}, {"g_window", 1.0}};
  } else if (experiment == "var-theorem") {
    c.p = {log_decay(1.2, 0.3), log_decay(1.2, 0.3)};
    c.corpus.seed = 5;
  } else if (experiment == "extrapolation") {
    c.p = {log_decay(1.2, 0.3), log_decay(1.2, 0.3)};
    c.box = Box(Interval{-4.0, 4.0});
    c.h = 1.0 / 64.0;
    c.k_min = c.k_max = 0;
    c.corpus.trials = 5;
    c.corpus.seed = 17;
    c.params = {{"p_const", {1.0, 1.0}}, {"K", 8}};
  }
  return c;
}

ExperimentConfig parse_config(std::string_view text, const std::string& experiment, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n');
    const auto last_nl = text.rfind('\n', byte == 0 ? 0 : byte - 1);
    const auto col = last_nl == std::string_view::npos ? byte + 1 : byte - last_nl;
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": malformed JSON (" << e.what() << ")";
    throw ConfigError(os.str());
  }
  const Reader rd(text, origin);
  rd.allowed(doc, "", {"experiment", "m", "n", "gamma", "p", "q_i", "weights", "grid", "sweep", "tolerances", "corpus",
                       "params"});
  if (doc.contains("experiment")) {
    if (!doc["experiment"].is_string()) rd.fail("experiment", "expected a string");
    if (doc["experiment"].get<std::string>() != experiment) {
      rd.fail("experiment", "config is for '" + doc["experiment"].get<std::string>() + "', not '" + experiment + "'");
    }
  }
  ExperimentConfig c = default_config(experiment);
  if (doc.contains("m")) c.m = rd.integer(doc["m"], "m");
  if (doc.contains("n")) c.n = rd.integer(doc["n"], "n");
  if (c.m < 1) rd.fail("m", "expected m >= 1");
  if (c.n != 1 && c.n != 2) rd.fail("n", "expected 1 or 2");
  if (doc.contains("gamma")) c.gamma = rd.positive(doc["gamma"], "gamma");
  if (doc.contains("p")) {
    const auto& v = doc["p"];
    if (!v.is_array() || v.empty()) rd.fail("p", "expected a nonempty array");
    c.p.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string path = "p[" + std::to_string(i) + "]";
      if (v[i].is_number()) {
        rd.positive(v[i], path);
      } else {
        try {
          exponent_from_json(v[i]);
        } catch (const std::exception& e) {
          rd.fail(path, std::string("bad exponent descriptor: ") + e.what());
        }
      }
      c.p.push_back(v[i]);
    }
  }
  if (doc.contains("q_i")) {
    const auto& v = doc["q_i"];
    if (!v.is_array()) rd.fail("q_i", "expected an array");
    c.q_i.clear();
    for (std::size_t i = 0; i < v.size(); ++i) c.q_i.push_back(rd.positive(v[i], "q_i[" + std::to_string(i) + "]"));
  }
  if (doc.contains("weights")) {
    const auto& v = doc["weights"];
    if (!v.is_array()) rd.fail("weights", "expected an array");
    c.weights.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string path = "weights[" + std::to_string(i) + "]";
      if (!v[i].is_object()) rd.fail(path, "expected an object");
      rd.allowed(v[i], path, {"kind", "value", "exponent", "origin", "scale"});
      try {
        weight_from_json(v[i], c.n);
      } catch (const std::exception& e) {
        rd.fail(path, std::string("bad weight descriptor: ") + e.what());
      }
      c.weights.push_back(v[i]);
    }
  }
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    rd.allowed(g, "grid", {"box", "h"});
    if (g.contains("box")) c.box = rd.box(g["box"], "grid.box");
    if (g.contains("h")) c.h = rd.positive(g["h"], "grid.h");
  }
  if (c.box.dim() != c.n) rd.fail("grid.box", "box dimension must equal n");
  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    rd.allowed(s, "sweep", {"k_min", "k_max"});
    if (s.contains("k_min")) c.k_min = rd.integer(s["k_min"], "sweep.k_min");
    if (s.contains("k_max")) c.k_max = rd.integer(s["k_max"], "sweep.k_max");
    if (c.k_min > c.k_max) rd.fail("sweep", "expected k_min <= k_max");
  }
  if (doc.contains("tolerances")) {
    const auto& t = doc["tolerances"];
    rd.allowed(t, "tolerances", {"slope"});
    if (t.contains("slope")) c.slope_tol = rd.positive(t["slope"], "tolerances.slope");
  }
  if (doc.contains("corpus")) {
    const auto& k = doc["corpus"];
    rd.allowed(k, "corpus",
               {"seed", "trials", "cubes_min", "cubes_max", "N", "window", "j_min", "j_max", "lambda_min", "lambda_max"});
    auto& law = c.corpus.law;
    if (k.contains("seed")) {
      if (!k["seed"].is_number_unsigned()) rd.fail("corpus.seed", "expected a nonnegative integer");
      c.corpus.seed = k["seed"].get<std::uint64_t>();
    }
    if (k.contains("trials")) c.corpus.trials = rd.integer(k["trials"], "corpus.trials");
    if (k.contains("cubes_min")) c.corpus.cubes_min = rd.integer(k["cubes_min"], "corpus.cubes_min");
    if (k.contains("cubes_max")) c.corpus.cubes_max = rd.integer(k["cubes_max"], "corpus.cubes_max");
    if (k.contains("N")) c.corpus.N = rd.integer(k["N"], "corpus.N");
    if (k.contains("window")) law.window = rd.box(k["window"], "corpus.window");
    if (k.contains("j_min")) law.j_min = rd.integer(k["j_min"], "corpus.j_min");
    if (k.contains("j_max")) law.j_max = rd.integer(k["j_max"], "corpus.j_max");
    if (k.contains("lambda_min")) law.lambda_min = rd.positive(k["lambda_min"], "corpus.lambda_min");
    if (k.contains("lambda_max")) law.lambda_max = rd.positive(k["lambda_max"], "corpus.lambda_max");
    if (c.corpus.trials < 1) rd.fail("corpus.trials", "expected at least one trial");
    if (c.corpus.cubes_min < 1 || c.corpus.cubes_max < c.corpus.cubes_min) {
      rd.fail("corpus.cubes_max", "expected 1 <= cubes_min <= cubes_max");
    }
    if (law.j_min > law.j_max) rd.fail("corpus.j_max", "expected j_min <= j_max");
    if (law.lambda_min > law.lambda_max) rd.fail("corpus.lambda_max", "expected lambda_min <= lambda_max");
    if (c.corpus.N < -1) rd.fail("corpus.N", "expected -1 (auto) or a nonnegative order");
  }
  if (c.corpus.law.window.dim() != c.n) rd.fail("corpus.window", "window dimension must equal n");
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) rd.fail("params", "expected an object");
    for (const auto& [k, v] : doc["params"].items()) c.params[k] = v;
  }
  c.corpus.law.N = std::max(c.corpus.N, 0);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), experiment, path.string());
}

}  // namespace fracharm
