#include "fracharm/var_exponent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fracharm/grid_io.hpp"

namespace fracharm {

namespace {

double log_e_plus(double r) { return std::log(std::numbers::e + r); }

double radius(const Point& x, const Point& c) {
  const double dx = x[0] - c[0], dy = x[1] - c[1];
  return std::sqrt(dx * dx + dy * dy);
}

void require_bounds(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("exponent bounds must satisfy 0 < p_minus <= p_plus < infinity");
  }
}

}  // namespace

double dual_exponent(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("dual exponent needs p > 1");
  return p / (p - 1.0);
}

ExponentFunction ExponentFunction::constant(double p) {
  require_bounds(p, p);
  ExponentFunction e;
  e.kind_ = Kind::Constant;
  e.fn_ = [p](const Point&) { return p; };
  e.p_minus_ = e.p_plus_ = p;
  e.log_holder_ = LogHolderData{0.0, 0.0, p};
  e.descriptor_ = {{"kind", "constant"}, {"params", {{"p", p}}}};
  return e;
}

ExponentFunction ExponentFunction::log_decay(double p_inf, double amplitude, const Point& center) {
  const double at_center = p_inf + amplitude;
  require_bounds(std::min(p_inf, at_center), std::max(p_inf, at_center));
  ExponentFunction e;
  e.kind_ = Kind::LogDecay;
  e.fn_ = [=](const Point& x) { return p_inf + amplitude / log_e_plus(radius(x, center)); };
  e.p_minus_ = std::min(p_inf, at_center);
  e.p_plus_ = std::max(p_inf, at_center);
  // |p'(r)| <= |a| / e and sup_{d < 1/2} d log(1/d) = 1/e.
  e.log_holder_ = LogHolderData{std::abs(amplitude) / (std::numbers::e * std::numbers::e), std::abs(amplitude), p_inf};
  e.descriptor_ = {{"kind", "log-decay"},
                   {"params", {{"p_inf", p_inf}, {"amplitude", amplitude}, {"center", {center[0], center[1]}}}}};
  return e;
}

ExponentFunction ExponentFunction::clipped_linear(double base, double slope, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("clipped linear exponent needs hi > lo");
  const double a = base + slope * lo, b = base + slope * hi;
  require_bounds(std::min(a, b), std::max(a, b));
  ExponentFunction e;
  e.kind_ = Kind::ClippedLinear;
  e.fn_ = [=](const Point& x) { return base + slope * std::clamp(x[0], lo, hi); };
  e.p_minus_ = std::min(a, b);
  e.p_plus_ = std::max(a, b);
  e.descriptor_ = {{"kind", "clipped-linear"}, {"params", {{"base", base}, {"slope", slope}, {"lo", lo}, {"hi", hi}}}};
  return e;
}

ExponentFunction ExponentFunction::sampled(GridFunction values) {
  if (values.size() == 0) throw std::invalid_argument("sampled exponent needs samples");
  const auto [mn, mx] = std::minmax_element(values.values().begin(), values.values().end());
  require_bounds(*mn, *mx);
  ExponentFunction e;
  e.kind_ = Kind::Sampled;
  e.p_minus_ = *mn;
  e.p_plus_ = *mx;
  e.descriptor_ = {{"kind", "sampled"}, {"params", {{"grid", grid_descriptor(values)}}}};
  e.fn_ = [g = std::move(values)](const Point& x) {
    const long c = g.cell_of(x);
    if (c < 0) throw std::out_of_range("sampled exponent evaluated outside its box");
    return g[static_cast<std::size_t>(c)];
  };
  return e;
}

ExponentFunction ExponentFunction::derived(std::function<double(const Point&)> fn, double p_minus, double p_plus,
                                           nlohmann::json descriptor) {
  require_bounds(p_minus, p_plus);
  ExponentFunction e;
  e.kind_ = Kind::Derived;
  e.fn_ = std::move(fn);
  e.p_minus_ = p_minus;
  e.p_plus_ = p_plus;
  e.descriptor_ = {{"kind", "derived"}, {"params", std::move(descriptor)}};
  return e;
}

ExponentFunction ExponentFunction::dual() const {
  if (!(p_minus_ > 1.0)) throw std::invalid_argument("dual exponent needs p_minus > 1");
  if (kind_ == Kind::Constant) return constant(dual_exponent(p_minus_));
  auto f = fn_;
  return derived([f](const Point& x) { return dual_exponent(f(x)); }, dual_exponent(p_plus_), dual_exponent(p_minus_),
                 {{"dual_of", descriptor_}});
}

ExponentFunction ExponentFunction::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("exponent scale must be positive");
  if (kind_ == Kind::Constant) return constant(c * p_minus_);
  auto f = fn_;
  return derived([f, c](const Point& x) { return c * f(x); }, c * p_minus_, c * p_plus_,
                 {{"scaled", c}, {"of", descriptor_}});
}

nlohmann::json ExponentFunction::descriptor() const {
  nlohmann::json j = descriptor_;
  j["p_minus"] = p_minus_;
  j["p_plus"] = p_plus_;
  return j;
}

ExponentFunction exponent_from_json(const nlohmann::json& j) {
  if (j.is_number()) return ExponentFunction::constant(j.get<double>());
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (kind == "constant") return ExponentFunction::constant(params.at("p").get<double>());
  if (kind == "log-decay") {
    Point c{0.0, 0.0};
    if (params.contains("center")) {
      const auto& a = params.at("center");
      c[0] = a.at(0).get<double>();
      if (a.size() > 1) c[1] = a.at(1).get<double>();
    }
    return ExponentFunction::log_decay(params.at("p_inf").get<double>(), params.at("amplitude").get<double>(), c);
  }
  if (kind == "clipped-linear") {
    return ExponentFunction::clipped_linear(params.at("base").get<double>(), params.at("slope").get<double>(),
                                            params.at("lo").get<double>(), params.at("hi").get<double>());
  }
  throw std::invalid_argument("unknown exponent kind '" + kind + "'");
}

double modular(const GridFunction& f, const ExponentFunction& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    if (a == 0.0) continue;
    s += std::pow(a, p(f.center(i)));
  }
  return s * f.cell_volume();
}

double luxemburg_norm(const GridFunction& f, const ExponentFunction& p) {
  if (sup_abs(f) == 0.0) return 0.0;
  // Exponents at the cell centers are fixed, so evaluate them once.
  std::vector<double> a, e;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    a.push_back(std::abs(f[i]));
    e.push_back(p(f.center(i)));
  }
  const double vol = f.cell_volume();
  auto rho = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(a[i] / lambda, e[i]);
    return s * vol;
  };
  double lo = 1.0, hi = 1.0;
  if (rho(1.0) > 1.0) {
    while (rho(hi) > 1.0) hi *= 2.0;
    lo = hi / 2.0;
  } else {
    while (rho(lo) <= 1.0) lo /= 2.0;
    hi = lo * 2.0;
  }
  while ((hi - lo) > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    (rho(mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

nlohmann::json LogHolderEstimate::to_json() const {
  return {{"C0", data.c0}, {"C_inf", data.c_inf}, {"p_inf", data.p_inf}, {"c0_by_level", c0_by_level}, {"stable", stable}};
}

LogHolderEstimate log_holder_estimate(const ExponentFunction& p, const LogHolderSampling& s) {
  if (s.dim != 1 && s.dim != 2) throw std::invalid_argument("log-Holder sampling: dim must be 1 or 2");
  if (s.points_per_axis < 2 || s.finest_level < 2) throw std::invalid_argument("log-Holder sampling: too few samples");
  std::vector<Point> base;
  const int P = s.points_per_axis;
  const double step = 2.0 * s.radius / (P - 1);
  for (int j = 0; j < (s.dim == 2 ? P : 1); ++j) {
    for (int i = 0; i < P; ++i) base.push_back(Point{-s.radius + i * step, s.dim == 2 ? -s.radius + j * step : 0.0});
  }
  std::vector<Point> dirs{{1.0, 0.0}};
  if (s.dim == 2) {
    dirs.push_back({0.0, 1.0});
    dirs.push_back({std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2});
  }
  LogHolderEstimate est;
  double c0 = 0.0;
  for (int level = 2; level <= s.finest_level; ++level) {
    const double d = std::ldexp(1.0, -level);
    const double weight = -std::log(d);
    for (const Point& x : base) {
      for (const Point& u : dirs) {
        const Point a{x[0] - 0.5 * d * u[0], x[1] - 0.5 * d * u[1]};
        const Point b{x[0] + 0.5 * d * u[0], x[1] + 0.5 * d * u[1]};
        c0 = std::max(c0, std::abs(p(a) - p(b)) * weight);
      }
    }
    est.c0_by_level.push_back(c0);
  }
  const double half = est.c0_by_level[static_cast<std::size_t>((s.finest_level - 2) / 2)];
  est.stable = c0 <= 1.1 * half + 1e-15;
  // Least squares p = p_inf + b u with u = 1 / log(e + |x|) over the far points.
  double su = 0.0, sp = 0.0;
  std::vector<std::pair<double, double>> far;
  for (const Point& x : base) {
    const double r = radius(x, {0.0, 0.0});
    if (r < s.fit_from) continue;
    far.emplace_back(1.0 / log_e_plus(r), p(x));
    su += far.back().first;
    sp += far.back().second;
  }
  double p_inf = 0.0;
  if (far.empty()) {
    p_inf = p(base.back());
  } else {
    const double mu = su / far.size(), mp = sp / far.size();
    double cov = 0.0, var = 0.0;
    for (const auto& [u, v] : far) {
      cov += (u - mu) * (v - mp);
      var += (u - mu) * (u - mu);
    }
    p_inf = var > 0.0 ? mp - (cov / var) * mu : mp;
  }
  double c_inf = 0.0;
  for (const Point& x : base) c_inf = std::max(c_inf, std::abs(p(x) - p_inf) * log_e_plus(radius(x, {0.0, 0.0})));
  est.data = LogHolderData{c0, c_inf, p_inf};
  return est;
}

double ExponentSystem::q_var(const Point& x) const {
  double s = -gamma_ / n_;
  for (const auto& p : p_) s += 1.0 / p(x);
  return 1.0 / s;
}

double ExponentSystem::sigma(int i, const Point& x) const {
  return p_i(i) / q_i(i) * dual_exponent(p_bar(i, x));
}

double ExponentSystem::theta(int i, const Point& x) const {
  return q_ * dual_exponent(q_bar(x)) / (p_i(i) * dual_exponent(p_bar(i, x)));
}

ExponentFunction ExponentSystem::q_var_fn() const {
  double inv_lo = -gamma_ / n_, inv_hi = -gamma_ / n_;
  for (const auto& p : p_) {
    inv_lo += 1.0 / p.p_plus();
    inv_hi += 1.0 / p.p_minus();
  }
  ExponentSystem self = *this;
  return ExponentFunction::derived([self](const Point& x) { return self.q_var(x); }, 1.0 / inv_hi, 1.0 / inv_lo,
                                   {{"name", "q(x)"}});
}

ExponentFunction ExponentSystem::q_bar_fn() const {
  const ExponentFunction qv = q_var_fn();
  ExponentSystem self = *this;
  return ExponentFunction::derived([self](const Point& x) { return self.q_bar(x); }, qv.p_minus() / q_,
                                   qv.p_plus() / q_, {{"name", "q_bar(x)"}});
}

ExponentFunction ExponentSystem::p_bar_fn(int i) const {
  ExponentSystem self = *this;
  return ExponentFunction::derived([self, i](const Point& x) { return self.p_bar(i, x); },
                                   p_var(i).p_minus() / p_i(i), p_var(i).p_plus() / p_i(i),
                                   {{"name", "p_bar(x)"}, {"slot", i}});
}

ExponentFunction ExponentSystem::sigma_fn(int i) const {
  const ExponentFunction pb = p_bar_fn(i);
  const double c = p_i(i) / q_i(i);
  ExponentSystem self = *this;
  return ExponentFunction::derived([self, i](const Point& x) { return self.sigma(i, x); },
                                   c * dual_exponent(pb.p_plus()), c * dual_exponent(pb.p_minus()),
                                   {{"name", "sigma(x)"}, {"slot", i}});
}

ExponentSystem derive_system(std::vector<ExponentFunction> p_var, std::vector<double> p_const, double gamma, int n,
                             double slack) {
  if (p_var.empty() || p_var.size() != p_const.size()) {
    throw std::invalid_argument("derive_system: need one constant exponent per variable exponent");
  }
  if (n != 1 && n != 2) throw std::invalid_argument("derive_system: n must be 1 or 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("derive_system: gamma must be positive");
  double inv_plus = 0.0;
  for (std::size_t i = 0; i < p_var.size(); ++i) {
    if (!(p_const[i] > 0.0 && p_const[i] < p_var[i].p_minus())) {
      throw std::invalid_argument("derive_system: need 0 < p_i < [p_i(.)]_-");
    }
    inv_plus += 1.0 / p_var[i].p_plus();
  }
  if (!(inv_plus > gamma / n)) throw std::invalid_argument("derive_system: sum 1/[p_i(.)]_+ must exceed gamma/n");
  std::vector<double> s;
  double total = 0.0;
  for (const auto& p : p_var) {
    s.push_back(n / p.p_plus() - slack);
    if (!(s.back() > 0.0)) throw std::invalid_argument("derive_system: slack leaves no admissible gamma_i split");
    total += s.back();
  }
  ExponentSystem sys;
  sys.n_ = n;
  sys.gamma_ = gamma;
  double inv_q = -gamma / n;
  for (std::size_t i = 0; i < p_var.size(); ++i) {
    const double gi = gamma * s[i] / total;
    if (!(p_var[i].p_plus() < n / gi)) throw std::invalid_argument("derive_system: no admissible gamma_i split");
    const double inv_qi = 1.0 / p_const[i] - gi / n;
    sys.gammas_.push_back(gi);
    sys.q_const_.push_back(1.0 / inv_qi);
    inv_q += 1.0 / p_const[i];
  }
  sys.q_ = 1.0 / inv_q;
  sys.p_ = std::move(p_var);
  sys.p_const_ = std::move(p_const);
  return sys;
}

nlohmann::json SystemCertificate::to_json() const {
  return {{"theta_sum_residual", theta_sum_residual},
          {"q_identity_residual", q_identity_residual},
          {"dual_identity_residual", dual_identity_residual},
          {"sigma_min_sampled", sigma_min_sampled},
          {"sigma_minus", sigma_minus},
          {"p_plus", p_plus},
          {"n_over_gamma_i", n_over_gamma_i},
          {"q_bar_minus", q_bar_minus},
          {"passed", passed}};
}

SystemCertificate certify(const ExponentSystem& sys, std::span<const Point> points) {
  SystemCertificate c;
  const int m = sys.m();
  c.sigma_min_sampled.assign(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
  for (const Point& x : points) {
    double theta = 0.0, inv = -sys.gamma() / sys.n();
    for (int i = 0; i < m; ++i) {
      theta += sys.theta(i, x);
      inv += 1.0 / sys.p_var(i)(x);
      const double pb = sys.p_bar(i, x);
      c.dual_identity_residual = std::max(c.dual_identity_residual, std::abs(1.0 / pb + 1.0 / dual_exponent(pb) - 1.0));
      auto& smin = c.sigma_min_sampled[static_cast<std::size_t>(i)];
      smin = std::min(smin, sys.sigma(i, x));
    }
    c.theta_sum_residual = std::max(c.theta_sum_residual, std::abs(theta - 1.0));
    c.q_identity_residual = std::max(c.q_identity_residual, std::abs(1.0 / sys.q_var(x) - inv));
  }
  c.q_bar_minus = sys.q_bar_fn().p_minus();
  c.passed = c.theta_sum_residual <= 1e-12 && c.q_bar_minus > 1.0;
  for (int i = 0; i < m; ++i) {
    c.sigma_minus.push_back(sys.sigma_fn(i).p_minus());
    c.p_plus.push_back(sys.p_var(i).p_plus());
    c.n_over_gamma_i.push_back(sys.n() / sys.gamma_i(i));
    c.passed = c.passed && c.sigma_minus.back() > 1.0 && c.sigma_min_sampled[static_cast<std::size_t>(i)] > 1.0 &&
               c.p_plus.back() < c.n_over_gamma_i.back();
  }
  return c;
}

}  // namespace fracharm
