#include "fracharm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fracharm/parallel.hpp"

namespace fracharm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(const Point& a, const Point& b, int n) { return distance(a, b, n); }

double sup_dist(const Point& a, const Point& b, int n) {
  double d = std::abs(a[0] - b[0]);
  if (n == 2) d = std::max(d, std::abs(a[1] - b[1]));
  return d;
}

void validate(const KernelSpec& k) {
  if (k.m < 1) throw std::invalid_argument("kernel: m must be at least 1");
  if (k.n != 1 && k.n != 2) throw std::invalid_argument("kernel: n must be 1 or 2");
  if (!(k.gamma > 0.0 && k.gamma < k.m * k.n)) throw std::invalid_argument("kernel: need 0 < gamma < m n");
  if (k.N < 0) throw std::invalid_argument("kernel: N must be nonnegative");
}

void check_inputs(const KernelSpec& k, std::span<const GridFunction> fs) {
  if (static_cast<int>(fs.size()) != k.m) throw std::invalid_argument("frac operator: expected m input functions");
  if (k.m * k.n > 4) throw std::invalid_argument("frac operator: m n exceeds the cost cap of 4");
  for (const auto& f : fs) {
    fs[0].require_same_grid(f, "frac operator inputs");
    if (f.dim() != k.n) throw std::invalid_argument("frac operator: input dimension differs from kernel n");
  }
}

struct Entry {
  Point y;
  double v;
  long cell;
};

std::vector<std::vector<Entry>> supports(std::span<const GridFunction> fs) {
  std::vector<std::vector<Entry>> out;
  for (const auto& f : fs) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] != 0.0) e.push_back({f.center(i), f[i], static_cast<long>(i)});
    }
    out.push_back(std::move(e));
  }
  return out;
}

// Sum over sub-tuples of a singular cell tuple, subdivided once into thirds;
// the sub-tuple that is still singular is dropped. Returns the mean of K over
// the kept sub-tuples weighted by 3^{-mn}.
double subdivided(const KernelSpec& k, const Point& x, std::span<const Point> ys, double h) {
  const int per_slot = k.n == 1 ? 3 : 9;
  int total = 1;
  for (int i = 0; i < k.m; ++i) total *= per_slot;
  std::vector<Point> sub(ys.begin(), ys.end());
  double s = 0.0;
  for (int code = 0; code < total; ++code) {
    int c = code;
    bool singular = true;
    for (int i = 0; i < k.m; ++i) {
      const int o = c % per_slot;
      c /= per_slot;
      const auto ui = static_cast<std::size_t>(i);
      sub[ui][0] = ys[ui][0] + (o % 3 - 1) * h / 3.0;
      sub[ui][1] = k.n == 2 ? ys[ui][1] + (o / 3 - 1) * h / 3.0 : 0.0;
      if (sup_dist(x, sub[ui], k.n) >= h / 6.0 * (1.0 - 1e-12)) singular = false;
    }
    if (singular) continue;
    s += k.evaluate(x, sub);
  }
  return s / total;
}

double point_sum(const KernelSpec& k, const std::vector<std::vector<Entry>>& lists, const Point& x, double h) {
  std::vector<Point> ys(static_cast<std::size_t>(k.m));
  double total = 0.0;
  std::function<void(int, double)> rec = [&](int slot, double prod) {
    if (slot == k.m) {
      bool singular = true;
      for (const auto& y : ys) {
        if (sup_dist(x, y, k.n) >= h / 2.0 * (1.0 - 1e-12)) singular = false;
      }
      total += prod * (singular ? subdivided(k, x, ys, h) : k.evaluate(x, ys));
      return;
    }
    for (const Entry& e : lists[static_cast<std::size_t>(slot)]) {
      ys[static_cast<std::size_t>(slot)] = e.y;
      rec(slot + 1, prod * e.v);
    }
  };
  rec(0, 1.0);
  const double cell = k.n == 1 ? h : h * h;
  return total * std::pow(cell, k.m);
}

// 1D grid outputs: K depends on x only through mod(x) and the integer
// distance sum S, so a table kappa[S] replaces kernel evaluations.
GridFunction apply_1d(const KernelSpec& k, std::span<const GridFunction> fs) {
  const GridFunction& g = fs[0];
  const double h = g.h();
  const int G = g.extent(0);
  const auto lists = supports(fs);
  const int smax = k.m * (G - 1);
  std::vector<double> kappa(static_cast<std::size_t>(smax + 1));
  const double e = k.gamma - k.m;
  for (int s = 1; s <= smax; ++s) kappa[static_cast<std::size_t>(s)] = std::pow(s * h, e);
  {
    KernelSpec unit = k;
    unit.kind = KernelKind::KenigStein;
    unit.scale = 1.0;
    std::vector<Point> ys(static_cast<std::size_t>(k.m), Point{0.0, 0.0});
    kappa[0] = subdivided(unit, Point{0.0, 0.0}, ys, h);
  }
  GridFunction out = g.zeros_like();
  const double hm = std::pow(h, k.m);
  parallel_for(static_cast<std::size_t>(G), [&](std::size_t ui) {
    const int i = static_cast<int>(ui);
    double s = 0.0;
    if (k.m == 1) {
      for (const Entry& a : lists[0]) s += a.v * kappa[static_cast<std::size_t>(std::abs(i - a.cell))];
    } else if (k.m == 2) {
      for (const Entry& a : lists[0]) {
        const int base = std::abs(i - static_cast<int>(a.cell));
        double inner = 0.0;
        for (const Entry& b : lists[1]) inner += b.v * kappa[static_cast<std::size_t>(base + std::abs(i - b.cell))];
        s += a.v * inner;
      }
    } else {
      std::function<double(int, int)> rec = [&](int slot, int base) -> double {
        if (slot == k.m) return kappa[static_cast<std::size_t>(base)];
        double acc = 0.0;
        for (const Entry& a : lists[static_cast<std::size_t>(slot)]) {
          acc += a.v * rec(slot + 1, base + std::abs(i - static_cast<int>(a.cell)));
        }
        return acc;
      };
      s = rec(0, 0);
    }
    out[ui] = k.scale * k.modulation(g.center(ui)) * hm * s;
  });
  return out;
}

std::array<int, 2> beta_of(int n, int total, int a) { return n == 1 ? std::array<int, 2>{total, 0} : std::array<int, 2>{a, total - a}; }

double binom(int n, int r) {
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

// Central difference for d^beta f at y with one Richardson step.
double partial(const std::function<double(const Point&)>& f, const Point& y, std::array<int, 2> beta, double step) {
  if (beta[0] + beta[1] == 0) return f(y);
  auto diff = [&](double hh) {
    double s = 0.0;
    for (int j0 = 0; j0 <= beta[0]; ++j0) {
      for (int j1 = 0; j1 <= beta[1]; ++j1) {
        const double c = binom(beta[0], j0) * binom(beta[1], j1) * (((j0 + j1) % 2) ? -1.0 : 1.0);
        const Point p{y[0] + (0.5 * beta[0] - j0) * hh, y[1] + (0.5 * beta[1] - j1) * hh};
        s += c * f(p);
      }
    }
    return s / std::pow(hh, beta[0] + beta[1]);
  };
  return (4.0 * diff(0.5 * step) - diff(step)) / 3.0;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Point random_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Point p{u(rng), 0.0};
  if (n == 2) p[1] = u(rng);
  return p;
}

}  // namespace

KernelSpec KernelSpec::kenig_stein(int m, int n, double gamma, int N) {
  KernelSpec k;
  k.kind = KernelKind::KenigStein;
  k.m = m;
  k.n = n;
  k.gamma = gamma;
  k.N = N;
  validate(k);
  return k;
}

KernelSpec KernelSpec::perturbed(int m, int n, double gamma, double amplitude, int N) {
  KernelSpec k = kenig_stein(m, n, gamma, N);
  k.kind = KernelKind::Perturbed;
  k.amplitude = amplitude;
  k.size_const = 1.0 + std::abs(amplitude);
  return k;
}

double KernelSpec::modulation(const Point& x) const {
  return kind == KernelKind::Perturbed ? 1.0 + amplitude * std::sin(x[0]) : 1.0;
}

double KernelSpec::evaluate(const Point& x, std::span<const Point> ys) const {
  double s = 0.0;
  for (const Point& y : ys) s += norm(x, y, n);
  if (s == 0.0) return kInf;
  return scale * modulation(x) * std::pow(s, gamma - m * n);
}

nlohmann::json KernelSpec::descriptor() const {
  nlohmann::json params = {{"scale", scale}};
  if (kind == KernelKind::Perturbed) params["amplitude"] = amplitude;
  return {{"kind", kind == KernelKind::KenigStein ? "kenig-stein" : "perturbed"},
          {"m", m},
          {"n", n},
          {"gamma", gamma},
          {"N", N},
          {"params", params}};
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int m = j.at("m").get<int>(), n = j.at("n").get<int>(), N = j.value("N", 1);
  const double gamma = j.at("gamma").get<double>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  KernelSpec k;
  if (kind == "kenig-stein") {
    k = KernelSpec::kenig_stein(m, n, gamma, N);
  } else if (kind == "perturbed") {
    k = KernelSpec::perturbed(m, n, gamma, params.value("amplitude", 0.5), N);
  } else {
    throw std::invalid_argument("unknown kernel kind '" + kind + "'");
  }
  k.scale = params.value("scale", 1.0);
  k.size_const *= std::abs(k.scale);
  return k;
}

GridFunction apply_frac_operator(const KernelSpec& k, std::span<const GridFunction> fs) {
  validate(k);
  check_inputs(k, fs);
  if (k.n == 1) return apply_1d(k, fs);
  const GridFunction& g = fs[0];
  const auto lists = supports(fs);
  GridFunction out = g.zeros_like();
  parallel_for(out.size(), [&](std::size_t i) { out[i] = point_sum(k, lists, g.center(i), g.h()); });
  return out;
}

double frac_operator_at(const KernelSpec& k, std::span<const GridFunction> fs, const Point& x) {
  validate(k);
  check_inputs(k, fs);
  return point_sum(k, supports(fs), x, fs[0].h());
}

double kernel_size_check(const KernelSpec& k, int sample_count, std::uint64_t seed) {
  validate(k);
  std::mt19937_64 rng(seed);
  std::vector<Point> ys(static_cast<std::size_t>(k.m));
  double best = 0.0;
  for (int t = 0; t < sample_count; ++t) {
    const Point x = random_point(rng, k.n);
    double s = 0.0;
    for (auto& y : ys) {
      y = random_point(rng, k.n);
      s += norm(x, y, k.n);
    }
    if (s < 1e-9) continue;
    best = std::max(best, std::abs(k.evaluate(x, ys)) * std::pow(s, k.m * k.n - k.gamma));
  }
  return best;
}

double kernel_smoothness_check(const KernelSpec& k, int N, int sample_count, double fd_fraction, std::uint64_t seed,
                               bool all_orders) {
  validate(k);
  if (N < 0) throw std::invalid_argument("smoothness check: N must be nonnegative");
  if (N == 0) return kernel_size_check(k, sample_count, seed);
  if (!(fd_fraction > 0.0) || fd_fraction * N >= 1.0) {
    throw std::invalid_argument("smoothness check: samples too near the diagonal for the chosen fd step");
  }
  std::mt19937_64 rng(seed);
  std::vector<Point> ys(static_cast<std::size_t>(k.m));
  double best = 0.0;
  for (int t = 0; t < sample_count; ++t) {
    const Point x = random_point(rng, k.n);
    double s = 0.0;
    for (auto& y : ys) {
      y = random_point(rng, k.n);
      s += norm(x, y, k.n);
    }
    bool near = false;
    for (const auto& y : ys) near = near || norm(x, y, k.n) < 1e-6;
    if (near) continue;
    for (int order = all_orders ? 1 : N; order <= N; ++order) {
      double lhs = 0.0;
      for (int i = 0; i < k.m; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double step = fd_fraction * norm(x, ys[ui], k.n);
        auto fi = [&](const Point& yi) {
          std::vector<Point> z = ys;
          z[ui] = yi;
          return k.evaluate(x, z);
        };
        const int nb = k.n == 1 ? 1 : order + 1;
        for (int a = 0; a < nb; ++a) lhs += std::abs(partial(fi, ys[ui], beta_of(k.n, order, a), step));
      }
      best = std::max(best, lhs * std::pow(s, k.m * k.n + order - k.gamma));
    }
  }
  return best;
}

double TaylorData::evaluate(const Point& y) const {
  double s = 0.0;
  for (std::size_t t = 0; t < betas.size(); ++t) {
    s += coefficients[t] * std::pow(y[0] - base[0], betas[t][0]) * std::pow(y[1] - base[1], betas[t][1]);
  }
  return s;
}

TaylorData taylor_polynomial(const KernelSpec& k, int slot, const Point& c, int N, const Point& x,
                             std::vector<Point> ys) {
  validate(k);
  if (slot < 0 || slot >= k.m) throw std::invalid_argument("taylor: slot out of range");
  if (static_cast<int>(ys.size()) != k.m) throw std::invalid_argument("taylor: expected m points");
  if (N < 1) throw std::invalid_argument("taylor: order must be at least 1");
  TaylorData p;
  p.slot = slot;
  p.base = c;
  p.order = N;
  p.x = x;
  p.ys = std::move(ys);
  const auto us = static_cast<std::size_t>(slot);
  const double d = norm(x, c, k.n);
  if (d == 0.0) throw std::invalid_argument("taylor: base point coincides with x");
  auto f = [&](const Point& y) {
    std::vector<Point> z = p.ys;
    z[us] = y;
    return k.evaluate(x, z);
  };
  for (int order = 0; order < N; ++order) {
    const int nb = k.n == 1 ? 1 : order + 1;
    for (int a = 0; a < nb; ++a) {
      const auto beta = beta_of(k.n, order, a);
      p.betas.push_back(beta);
      p.coefficients.push_back(partial(f, c, beta, d / 16.0) / (factorial(beta[0]) * factorial(beta[1])));
    }
  }
  return p;
}

double taylor_remainder_check(const KernelSpec& k, const TaylorData& p, const Cube& q, std::span<const Point> samples) {
  if (star(q).contains(p.x)) throw std::invalid_argument("taylor remainder: x lies inside Q*");
  const auto us = static_cast<std::size_t>(p.slot);
  double others = 0.0;
  for (std::size_t i = 0; i < p.ys.size(); ++i) {
    if (i != us) others += norm(p.x, p.ys[i], k.n);
  }
  const double denom = others + norm(p.x, p.base, k.n);
  const double bound = std::pow(q.side(), p.order) / std::pow(denom, k.m * k.n + p.order - k.gamma);
  double best = 0.0;
  std::vector<Point> z = p.ys;
  for (const Point& y : samples) {
    if (!q.contains(y)) throw std::invalid_argument("taylor remainder: sample outside Q");
    z[us] = y;
    best = std::max(best, std::abs(k.evaluate(p.x, z) - p.evaluate(y)) / bound);
  }
  return best;
}

double pointwise_G1_bound_check(std::span<const Cube> cubes, std::span<const double> gammas, const Point& x,
                                int cells_per_side) {
  if (cubes.empty() || cubes.size() != gammas.size()) throw std::invalid_argument("G1 check: need one gamma per cube");
  const int n = cubes[0].dim();
  double gamma = 0.0, smallest = kInf;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (cubes[i].dim() != n) throw std::invalid_argument("G1 check: cube dimensions differ");
    if (!(gammas[i] > 0.0)) throw std::invalid_argument("G1 check: gamma_i must be positive");
    if (!star(cubes[i]).contains(x)) throw std::invalid_argument("G1 check: x lies outside the intersection of the Q_i*");
    gamma += gammas[i];
    smallest = std::min(smallest, cubes[i].side());
  }
  const int m = static_cast<int>(cubes.size());
  const KernelSpec k = KernelSpec::kenig_stein(m, n, gamma);
  const double h = smallest / cells_per_side;
  std::array<Interval, 2> axes{};
  for (int a = 0; a < n; ++a) {
    double lo = kInf, hi = -kInf;
    for (const Cube& q : cubes) {
      lo = std::min(lo, q.lower(a));
      hi = std::max(hi, q.upper(a));
    }
    axes[static_cast<std::size_t>(a)] = Interval{std::floor(lo / h) * h, std::ceil(hi / h) * h};
  }
  const Box box = n == 1 ? Box(axes[0]) : Box(axes[0], axes[1]);
  std::vector<GridFunction> fs;
  for (const Cube& q : cubes) fs.push_back(indicator_fraction(box, h, q));
  double denom = 1.0;
  for (std::size_t i = 0; i < cubes.size(); ++i) denom *= std::pow(cubes[i].side(), gammas[i]);
  return std::abs(frac_operator_at(k, fs, x)) / denom;
}

}  // namespace fracharm
