#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "fracharm/grid.hpp"

namespace fracharm {

enum class KernelKind { KenigStein, Perturbed };

// K(x, y_1..y_m) = scale * mod(x) * (sum_i |x - y_i|)^{gamma - m n} with
// mod = 1 for Kenig-Stein and 1 + amplitude * sin(x_1) for the perturbed kind.
struct KernelSpec {
  KernelKind kind = KernelKind::KenigStein;
  int m = 1;
  int n = 1;
  double gamma = 0.5;
  int N = 1;
  double scale = 1.0;
  double amplitude = 0.0;
  double size_const = 1.0;
  double smooth_const = 0.0;

  static KernelSpec kenig_stein(int m, int n, double gamma, int N = 1);
  static KernelSpec perturbed(int m, int n, double gamma, double amplitude, int N = 1);

  double modulation(const Point& x) const;
  // +inf when every y_i coincides with x.
  double evaluate(const Point& x, std::span<const Point> ys) const;
  nlohmann::json descriptor() const;
};

KernelSpec kernel_from_json(const nlohmann::json& j);

// T(f_1..f_m) at the cell centers of the common input grid. Requires m n <= 4.
GridFunction apply_frac_operator(const KernelSpec& k, std::span<const GridFunction> fs);
// T(f_1..f_m) at an arbitrary point x.
double frac_operator_at(const KernelSpec& k, std::span<const GridFunction> fs, const Point& x);

// max of |K| (sum |x - y_i|)^{mn - gamma} over random off-diagonal samples.
double kernel_size_check(const KernelSpec& k, int sample_count, std::uint64_t seed = 1);

// max over samples of sum_i sum_{|beta| = N} |d^beta_{y_i} K| (sum |x - y_i|)^{mn + N - gamma}.
// Derivatives are central differences with step fd_fraction |x - y_i| and one
// Richardson step. With all_orders, orders 1..N are each checked and the max
// returned. N = 0 is the size check.
double kernel_smoothness_check(const KernelSpec& k, int N, int sample_count, double fd_fraction = 1.0 / 16.0,
                               std::uint64_t seed = 1, bool all_orders = false);

// Taylor polynomial of order N (terms |beta| < N) of y -> K(x, .., y, ..) in
// slot `slot` about c, with x and the other slots frozen.
struct TaylorData {
  int slot = 0;
  Point base{0.0, 0.0};
  int order = 1;
  Point x{0.0, 0.0};
  std::vector<Point> ys;
  std::vector<std::array<int, 2>> betas;
  std::vector<double> coefficients;

  double evaluate(const Point& y) const;
};

TaylorData taylor_polynomial(const KernelSpec& k, int slot, const Point& c, int N, const Point& x,
                             std::vector<Point> ys);

// max over y in samples (all in q) of |K - P_N| divided by
// l(q)^N / (sum_{i != slot} |x - y_i| + |x - c|)^{mn + N - gamma}.
// Throws when x lies in q*.
double taylor_remainder_check(const KernelSpec& k, const TaylorData& p, const Cube& q, std::span<const Point> samples);

// |I_gamma(chi_{Q_1}, .., chi_{Q_m})(x)| / prod l(Q_i)^{gamma_i} for x in the
// intersection of the Q_i*. Indicators use exact cell overlap on a grid with
// cells_per_side cells along the smallest cube.
double pointwise_G1_bound_check(std::span<const Cube> cubes, std::span<const double> gammas, const Point& x,
                                int cells_per_side = 64);

}  // namespace fracharm
