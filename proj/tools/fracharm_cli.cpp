#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "fracharm/grid_io.hpp"
#include "fracharm/harness/experiments.hpp"
#include "fracharm/kernels.hpp"
#include "fracharm/var_exponent.hpp"
#include "fracharm/weights.hpp"

namespace fs = std::filesystem;
using namespace fracharm;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

nlohmann::json parse_arg(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("--") + what + ": " + e.what());
  }
}

int verify(const std::string& id, const std::string& config, std::optional<std::uint64_t> seed,
           std::optional<int> trials, const std::string& out) {
  const ExperimentInfo* info = find_experiment(id);
  if (!info) {
    std::cerr << "unknown experiment '" << id << "'; see 'fracharm list'\n";
    return kExitUsage;
  }
  ExperimentConfig cfg = config.empty() ? default_config(id) : load_config(config, id);
  if (seed) cfg.corpus.seed = *seed;
  if (trials) cfg.corpus.trials = *trials;
  const RatioReport r = info->run(cfg);
  write_outputs(r, out);
  std::cout << id << ": " << (r.pass ? "pass" : "FAIL") << "  max_ratio=" << r.max_ratio
            << "  slope=" << r.slope << "  rows=" << r.rows.size() << '\n';
  for (const auto& [name, ok] : r.gates) {
    if (!ok) std::cout << "  gate " << name << " failed\n";
  }
  return r.pass ? kExitPass : kExitFail;
}

int norm(const std::string& csv, const std::string& exponent, const std::string& weight) {
  const GridFunction f = read_grid_function(csv, sidecar_for(csv));
  const nlohmann::json p = parse_arg(exponent, "p");
  nlohmann::json out;
  if (p.is_number()) {
    const double pv = p.get<double>();
    const Weight w = weight.empty() ? Weight::constant(1.0, f.dim()) : weight_from_json(parse_arg(weight, "weight"), f.dim());
    out = {{"p", pv}, {"norm", weighted_lp_quasinorm(f, pv, w.to_grid(f.box(), f.h()))}};
  } else {
    if (!weight.empty()) throw ConfigError("--weight applies to constant exponents only");
    const ExponentFunction pe = exponent_from_json(p);
    out = {{"p", pe.descriptor()}, {"norm", luxemburg_norm(abs(f), pe)}, {"modular", modular(f, pe)}};
  }
  std::cout << out.dump(2) << '\n';
  return kExitPass;
}

int weight_const(const std::string& weight, const std::string& kind, double p, double q, double s, double lo, double hi,
                 double h) {
  const Weight w = weight_from_json(parse_arg(weight, "weight"), 1);
  const Box box{Interval{lo, hi}};
  const DyadicFamily fam = weight_family(box, h);
  WeightConstantReport r;
  if (kind == "a1") {
    r = a1_constant(w, fam);
  } else if (kind == "ap") {
    r = ap_constant(w, p, fam);
  } else if (kind == "rh") {
    r = rh_constant(w, s, fam);
  } else if (kind == "apq") {
    r = apq_constant(w, p, q, fam);
  } else {
    throw ConfigError("--kind must be a1, ap, rh or apq");
  }
  std::cout << r.to_json().dump(2) << '\n';
  return r.stable ? kExitPass : kExitFail;
}

int kernel_check(int m, int n, double gamma, int N, int samples) {
  const KernelSpec k = KernelSpec::kenig_stein(m, n, gamma, N);
  const double size = kernel_size_check(k, samples);
  const double smooth = kernel_smoothness_check(k, N, samples);
  const nlohmann::json out = {{"kernel", k.descriptor()}, {"size_constant", size}, {"smoothness_constant", smooth}};
  std::cout << out.dump(2) << '\n';
  return std::isfinite(size) && std::isfinite(smooth) ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracharm: numerical checks of multilinear fractional integral estimates"};
  app.require_subcommand(1);

  std::string id, config, out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  auto* v = app.add_subcommand("verify", "run an experiment and write <id>.report.json and <id>.trials.csv");
  v->add_option("experiment", id, "experiment id")->required();
  v->add_option("--config", config, "JSON config; defaults apply when omitted");
  v->add_option("--seed", seed, "override corpus.seed");
  v->add_option("--trials", trials, "override corpus.trials")->check(CLI::PositiveNumber);
  v->add_option("--out", out, "output directory");

  std::string csv, exponent = "1", weight;
  auto* nm = app.add_subcommand("norm", "norm of a grid function stored as CSV plus JSON sidecar");
  nm->add_option("file", csv, "grid CSV")->required()->check(CLI::ExistingFile);
  nm->add_option("--p", exponent, "number or exponent descriptor JSON");
  nm->add_option("--weight", weight, "weight descriptor JSON");

  std::string kind = "ap";
  double p = 2.0, q = 2.0, s = 2.0, lo = -2.0, hi = 2.0, h = 1.0 / 256.0;
  auto* wc = app.add_subcommand("weight-const", "A_1, A_p, RH_s or A_{p,q} constant of a 1D weight");
  wc->add_option("--weight", weight, "weight descriptor JSON")->required();
  wc->add_option("--kind", kind, "a1, ap, rh or apq");
  wc->add_option("--p", p);
  wc->add_option("--q", q);
  wc->add_option("--s", s);
  wc->add_option("--lo", lo);
  wc->add_option("--hi", hi);
  wc->add_option("--step", h, "grid spacing");

  int m = 2, n = 1, N = 1, samples = 200;
  double gamma = 0.5;
  auto* kc = app.add_subcommand("kernel-check", "size and smoothness constants of the Kenig-Stein kernel");
  kc->add_option("--m", m)->check(CLI::Range(1, 4));
  kc->add_option("--n", n)->check(CLI::Range(1, 2));
  kc->add_option("--gamma", gamma);
  kc->add_option("--N", N)->check(CLI::Range(1, 8));
  kc->add_option("--samples", samples)->check(CLI::PositiveNumber);

  auto* ls = app.add_subcommand("list", "list experiment ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*v) return verify(id, config, seed, trials, out);
    if (*nm) return norm(csv, exponent, weight);
    if (*wc) return weight_const(weight, kind, p, q, s, lo, hi, h);
    if (*kc) return kernel_check(m, n, gamma, N, samples);
    if (*ls) {
      for (const auto& e : experiment_registry()) std::cout << e.id << "  " << e.summary << '\n';
      return kExitPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis rejected: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
