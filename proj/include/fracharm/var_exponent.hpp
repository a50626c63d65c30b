#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracharm/grid.hpp"

namespace fracharm {

struct LogHolderData {
  double c0 = 0.0;
  double c_inf = 0.0;
  double p_inf = 0.0;
};

// A variable exponent p(.) with recorded bounds p_minus <= p(x) <= p_plus.
class ExponentFunction {
 public:
  enum class Kind { Constant, LogDecay, ClippedLinear, Sampled, Derived };

  static ExponentFunction constant(double p);
  // p_inf + amplitude / log(e + |x - center|).
  static ExponentFunction log_decay(double p_inf, double amplitude, const Point& center = {0.0, 0.0});
  // base + slope * clamp(x_1, lo, hi).
  static ExponentFunction clipped_linear(double base, double slope, double lo, double hi);
  // Piecewise constant on the cells of a grid; throws outside the box.
  static ExponentFunction sampled(GridFunction values);
  static ExponentFunction derived(std::function<double(const Point&)> fn, double p_minus, double p_plus,
                                  nlohmann::json descriptor);

  double operator()(const Point& x) const { return fn_(x); }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  const std::optional<LogHolderData>& log_holder() const { return log_holder_; }

  // Pointwise dual p'(x) = p(x) / (p(x) - 1); requires p_minus > 1.
  ExponentFunction dual() const;
  // c * p(.) for c > 0.
  ExponentFunction scaled(double c) const;

  nlohmann::json descriptor() const;

 private:
  ExponentFunction() = default;

  Kind kind_ = Kind::Constant;
  std::function<double(const Point&)> fn_;
  double p_minus_ = 1.0;
  double p_plus_ = 1.0;
  std::optional<LogHolderData> log_holder_;
  nlohmann::json descriptor_;
};

ExponentFunction exponent_from_json(const nlohmann::json& j);

double dual_exponent(double p);

// int |f(x)|^{p(x)} dx (midpoint rule).
double modular(const GridFunction& f, const ExponentFunction& p);
// inf{lambda > 0 : modular(f / lambda) <= 1}; 0 for f = 0.
double luxemburg_norm(const GridFunction& f, const ExponentFunction& p);

struct LogHolderSampling {
  int dim = 1;
  // Base points on a uniform lattice in [-radius, radius]^dim.
  double radius = 64.0;
  int points_per_axis = 257;
  // Pair distances 2^{-2}, ..., 2^{-finest_level}.
  int finest_level = 20;
  // |x| beyond fit_from enters the least-squares fit of p_inf.
  double fit_from = 8.0;
};

struct LogHolderEstimate {
  LogHolderData data;
  // Running sup of C0 as the pair distance shrinks, one entry per level. More
  // than 10% growth from half the finest level to the finest marks the
  // estimate unstable.
  std::vector<double> c0_by_level;
  bool stable = true;

  nlohmann::json to_json() const;
};

LogHolderEstimate log_holder_estimate(const ExponentFunction& p, const LogHolderSampling& s = {});

// Exponent algebra of the extrapolation argument.
class ExponentSystem {
 public:
  int n() const { return n_; }
  int m() const { return static_cast<int>(p_.size()); }
  double gamma() const { return gamma_; }
  double gamma_i(int i) const { return gammas_[static_cast<std::size_t>(i)]; }
  double p_i(int i) const { return p_const_[static_cast<std::size_t>(i)]; }
  double q_i(int i) const { return q_const_[static_cast<std::size_t>(i)]; }
  double q() const { return q_; }
  const ExponentFunction& p_var(int i) const { return p_[static_cast<std::size_t>(i)]; }

  // 1/q(x) = sum 1/p_i(x) - gamma/n.
  double q_var(const Point& x) const;
  double q_bar(const Point& x) const { return q_var(x) / q_; }
  double p_bar(int i, const Point& x) const { return p_var(i)(x) / p_i(i); }
  double sigma(int i, const Point& x) const;
  double theta(int i, const Point& x) const;

  ExponentFunction q_var_fn() const;
  ExponentFunction q_bar_fn() const;
  ExponentFunction sigma_fn(int i) const;
  ExponentFunction p_bar_fn(int i) const;

  friend ExponentSystem derive_system(std::vector<ExponentFunction> p_var, std::vector<double> p_const, double gamma,
                                      int n, double slack);

 private:
  int n_ = 1;
  double gamma_ = 0.0;
  std::vector<ExponentFunction> p_;
  std::vector<double> p_const_;
  std::vector<double> gammas_;
  std::vector<double> q_const_;
  double q_ = 0.0;
};

// gamma_i = gamma s_i / sum s_j with s_i = n / [p_i]_+ - slack.
ExponentSystem derive_system(std::vector<ExponentFunction> p_var, std::vector<double> p_const, double gamma, int n,
                             double slack = 0.0);

struct SystemCertificate {
  double theta_sum_residual = 0.0;
  double q_identity_residual = 0.0;
  double dual_identity_residual = 0.0;
  // Sampled minimum of sigma_i and the equivalent bound check per slot.
  std::vector<double> sigma_min_sampled;
  std::vector<double> sigma_minus;
  std::vector<double> p_plus;
  std::vector<double> n_over_gamma_i;
  double q_bar_minus = 0.0;
  bool passed = false;

  nlohmann::json to_json() const;
};

SystemCertificate certify(const ExponentSystem& sys, std::span<const Point> points);

}  // namespace fracharm
