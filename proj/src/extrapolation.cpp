#include "fracharm/extrapolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracharm {

GridFunction rubio_iterate(const GridFunction& h, double A, int K, const MaximalConfig& cfg) {
  if (!(A > 0.0)) throw std::invalid_argument("rubio_iterate: A must be positive");
  if (K < 0) throw std::invalid_argument("rubio_iterate: K must be nonnegative");
  for (double v : h.values()) {
    if (v < 0.0) throw std::invalid_argument("rubio_iterate: h must be nonnegative");
  }
  GridFunction out = h;
  GridFunction term = h;
  double factor = 1.0;
  for (int j = 1; j <= K; ++j) {
    term = hl_maximal(term, cfg);
    factor /= 2.0 * A;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += factor * term[i];
  }
  return out;
}

nlohmann::json RubioReport::to_json() const {
  return {{"A", A},
          {"K", K},
          {"domination_margin", domination_margin},
          {"norm_ratio", norm_ratio},
          {"a1_value", a1_value},
          {"a1_bound", a1_bound},
          {"tail_slack", tail_slack},
          {"rh", rh.to_json()},
          {"property1", property1},
          {"property2", property2},
          {"property3", property3},
          {"property4", property4},
          {"passed", passed()}};
}

RubioReport rubio_properties_check(const GridFunction& h, const ExponentFunction& sigma, double A, int K,
                                   const MaximalConfig& cfg, const DyadicFamily& family, double p, double q) {
  RubioReport r;
  r.A = A;
  r.K = K;
  const GridFunction R = rubio_iterate(h, A, K, cfg);
  r.domination_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < R.size(); ++i) r.domination_margin = std::min(r.domination_margin, R[i] - h[i]);
  r.property1 = r.domination_margin >= 0.0;

  const double nh = luxemburg_norm(h, sigma);
  r.norm_ratio = nh > 0.0 ? luxemburg_norm(R, sigma) / nh : 0.0;
  r.property2 = r.norm_ratio <= 2.0;

  GridFunction tail = iterated_maximal(h, K + 1, cfg);
  tail *= std::pow(2.0 * A, -K);
  r.tail_slack = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (R[i] > 0.0) r.tail_slack = std::max(r.tail_slack, tail[i] / R[i]);
  }
  const Weight rw = Weight::sampled(R);
  r.a1_value = a1_constant(rw, family).value;
  r.a1_bound = 2.0 * A + r.tail_slack;
  r.property3 = r.a1_value <= r.a1_bound;

  r.rh = rh_constant(rw.pow(p / q), q / p, family);
  r.property4 = std::isfinite(r.rh.value) && r.rh.stable;
  return r;
}

double maximal_opnorm_estimate(const ExponentFunction& sigma, const std::vector<GridFunction>& probes,
                               const MaximalConfig& cfg) {
  if (probes.empty()) throw std::invalid_argument("maximal_opnorm_estimate: probe set is empty");
  if (!(sigma.p_minus() > 1.0)) throw std::invalid_argument("maximal_opnorm_estimate: need [sigma]_- > 1");
  double best = 0.0;
  for (const auto& f : probes) {
    const double nf = luxemburg_norm(f, sigma);
    if (nf == 0.0) continue;
    best = std::max(best, luxemburg_norm(hl_maximal(f, cfg), sigma) / nf);
  }
  return 1.5 * best;
}

GridFunction dual_witness(const GridFunction& F, const ExponentFunction& q_bar) {
  if (sup_abs(F) == 0.0) throw std::invalid_argument("dual_witness: F is identically zero");
  const ExponentFunction qd = q_bar.dual();
  GridFunction h = F.zeros_like();
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F[i] < 0.0) throw std::invalid_argument("dual_witness: F must be nonnegative");
    if (F[i] > 0.0) h[i] = std::pow(F[i], q_bar(F.center(i)) - 1.0);
  }
  h *= 1.0 / luxemburg_norm(h, qd);
  return h;
}

double holder_constant(const GridFunction& f, const GridFunction& g, const ExponentFunction& p) {
  f.require_same_grid(g, "holder_constant");
  const double nf = luxemburg_norm(f, p), ng = luxemburg_norm(g, p.dual());
  if (nf == 0.0 || ng == 0.0) return 0.0;
  return integrate(abs(pointwise_product(f, g))) / (nf * ng);
}

}  // namespace fracharm
