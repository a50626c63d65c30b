#include <doctest.h>

#include <cmath>
#include <random>

#include "fracharm/maximal.hpp"

using namespace fracharm;

namespace {

GridFunction random_grid(const Box& box, double h, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  return GridFunction::sample(box, h, [&](const Point&) { return u(rng); });
}

// sup over intervals [a, b] containing x, with a, b on a fine lattice, of
// (b - a)^gamma |[a, b] ∩ [0, 1]| / (b - a).
double brute_chi(double x, double gamma, double lo, double hi, double step) {
  double best = 0.0;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i < n; ++i) {
    const double a = lo + i * step;
    if (a > x) break;
    for (int j = i + 1; j <= n; ++j) {
      const double b = lo + j * step;
      if (b < x) continue;
      const double overlap = std::max(0.0, std::min(b, 1.0) - std::max(a, 0.0));
      best = std::max(best, std::pow(b - a, gamma) * overlap / (b - a));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("hl maximal of an indicator") {
  const Box box(Interval{-4, 4});
  const double h = std::ldexp(1.0, -6);
  const auto chi = indicator(box, h, Cube::interval(0, 1));
  const auto m = hl_maximal(chi, MaximalConfig::for_grid(chi));
  const long c = chi.cell_of({2.0 + h / 2, 0});
  const double x = chi.center(static_cast<std::size_t>(c))[0];
  const double brute = brute_chi(x, 0.0, -4, 4, h / 2);
  // Ladder slack is at most a factor 2^{1/4}.
  CHECK(m[static_cast<std::size_t>(c)] <= brute + 1e-12);
  CHECK(m[static_cast<std::size_t>(c)] >= brute / std::pow(2.0, 0.25));
  const long c2 = chi.cell_of({2.0 - h / 2, 0});
  CHECK(m[static_cast<std::size_t>(c2)] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("maximal of constants, domination, sublinearity, homogeneity") {
  const Box box(Interval{-2, 2});
  const double h = 1.0 / 64;
  const auto one = GridFunction::sample(box, h, [](const Point&) { return 3.0; });
  const auto m1 = hl_maximal(one, MaximalConfig::for_grid(one));
  for (double v : m1.values()) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
  const auto f = random_grid(box, h, 2), g = random_grid(box, h, 3);
  const auto cfg = MaximalConfig::for_grid(f);
  const auto mf = hl_maximal(f, cfg), mg = hl_maximal(g, cfg), mfg = hl_maximal(f + g, cfg);
  auto f3 = f;
  f3 *= -2.5;
  const auto m3 = hl_maximal(f3, cfg);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(mf[i] >= std::abs(f[i]) * (1 - 1e-12));
    CHECK(mfg[i] <= mf[i] + mg[i] + 1e-12);
    CHECK(m3[i] == doctest::Approx(2.5 * mf[i]).epsilon(1e-12));
  }
  MaximalConfig centered = cfg;
  centered.centered = true;
  const auto mc = hl_maximal(f, centered);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(mc[i] >= std::abs(f[i]) * (1 - 1e-12));
    CHECK(mc[i] <= mf[i] + 1e-12);
  }
}

TEST_CASE("fractional maximal") {
  const Box box(Interval{-4, 4});
  const double h = std::ldexp(1.0, -6);
  const auto chi = indicator(box, h, Cube::interval(0, 1));
  const auto cfg = MaximalConfig::for_grid(chi);
  const auto m = frac_maximal(chi, 0.5, cfg);
  const long c = chi.cell_of({0.5 + h / 2, 0});
  CHECK(m[static_cast<std::size_t>(c)] == doctest::Approx(1.0).epsilon(1e-12));
  const double x = chi.center(static_cast<std::size_t>(c))[0];
  CHECK(m[static_cast<std::size_t>(c)] <= brute_chi(x, 0.5, -4, 4, h / 2) + 1e-12);
  const auto f = random_grid(box, h, 5);
  const auto a = frac_maximal(f, 0.0, cfg), b = hl_maximal(f, cfg);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(a[i] == b[i]);
  // Truncation: the largest cube is the whole box.
  const Box big(Interval{0, 1024});
  const auto ones = GridFunction::sample(big, 1.0, [](const Point&) { return 1.0; });
  const auto mt = frac_maximal(ones, 0.5, MaximalConfig::for_grid(ones));
  CHECK(mt[500] == doctest::Approx(32.0).epsilon(1e-12));
  // Monotone in gamma when every cube has side >= 1.
  const Box wide(Interval{0, 64});
  const auto r = random_grid(wide, 1.0, 8, 0.0, 1.0);
  MaximalConfig c1 = MaximalConfig::for_grid(r);
  const auto lo = frac_maximal(r, 0.2, c1), hi = frac_maximal(r, 0.6, c1);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(hi[i] >= lo[i]);
}

TEST_CASE("iterated maximal") {
  const Box box(Interval{-2, 2});
  const double h = 1.0 / 32;
  const auto f = random_grid(box, h, 11, 0.0, 1.0);
  const auto cfg = MaximalConfig::for_grid(f);
  const auto m0 = iterated_maximal(f, 0, cfg), m1 = iterated_maximal(f, 1, cfg), m2 = iterated_maximal(f, 2, cfg);
  const auto direct = hl_maximal(f, cfg);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(m0[i] == f[i]);
    CHECK(m1[i] == direct[i]);
    CHECK(m2[i] >= m1[i] * (1 - 1e-12));
  }
  CHECK_THROWS(iterated_maximal(f, -1, cfg));
}

TEST_CASE("2D maximal against brute force") {
  const Box box(Interval{0, 1}, Interval{0, 1});
  const double h = 1.0 / 16;
  const auto f = random_grid(box, h, 21, 0.0, 1.0);
  MaximalConfig cfg = MaximalConfig::for_grid(f);
  const auto m = hl_maximal(f, cfg);
  const auto ks = ladder_cells(cfg, h);
  for (std::size_t idx = 0; idx < f.size(); idx += 7) {
    const int i = static_cast<int>(idx % 16), j = static_cast<int>(idx / 16);
    double best = 0.0;
    for (int k : ks) {
      for (int s = i - k + 1; s <= i; ++s) {
        for (int t = j - k + 1; t <= j; ++t) {
          double sum = 0.0;
          for (int a = std::max(s, 0); a < std::min(s + k, 16); ++a) {
            for (int b = std::max(t, 0); b < std::min(t + k, 16); ++b) sum += f[f.index(a, b)];
          }
          best = std::max(best, sum / (k * k));
        }
      }
    }
    CHECK(m[idx] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("grand maximal") {
  const Box box(Interval{-4, 4});
  const double h = std::ldexp(1.0, -6);
  Mollifier phi{1, -3, 0, 1.0};
  const auto bump = GridFunction::sample(box, h, [&](const Point& x) { return phi.profile(std::abs(x[0])); });
  const auto gm = grand_maximal(bump, phi);
  for (double v : gm.values()) CHECK(v >= 0.0);
  // Direct convolution oracle: (phi * phi)(0) = int phi^2 = c^2 int (1 - x^2)^8.
  const double c = 315.0 / 256.0;
  const double int_sq = c * c * 2.0 * 32768.0 / 109395.0;
  const long zero = bump.cell_of({h / 2, 0});
  CHECK(gm[static_cast<std::size_t>(zero)] >= mollify(bump, phi, 1.0)[static_cast<std::size_t>(zero)] - 1e-15);
  CHECK(mollify(bump, phi, 1.0)[static_cast<std::size_t>(zero)] == doctest::Approx(int_sq).epsilon(0.01));
  const double sup = sup_abs(bump);
  for (double v : gm.values()) CHECK(v <= sup + 1e-12);
  // Mass of each discrete dilate is one.
  const auto delta = GridFunction::sample(box, h, [&](const Point& x) { return std::abs(x[0] - h / 2) < h / 4 ? 1.0 : 0.0; });
  for (double t : phi.scales()) CHECK(integrate(mollify(delta, phi, t)) == doctest::Approx(h).epsilon(1e-12));
  // Dilation covariance with the scale ladder carried along.
  const Box box2(Interval{-8, 8});
  const auto f = GridFunction::sample(box, h, [](const Point& x) { return std::abs(x[0]) < 1 ? std::cos(3 * x[0]) : 0.0; });
  const auto f2 = GridFunction(box2, 2 * h, std::vector<double>(f.values().begin(), f.values().end()));
  Mollifier phi2 = phi;
  phi2.unit = 2.0;
  const auto g1 = grand_maximal(f, phi), g2 = grand_maximal(f2, phi2);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g2[i] == doctest::Approx(g1[i]).epsilon(1e-12));
  // Margin violation.
  const auto edge = GridFunction::sample(box, h, [](const Point& x) { return x[0] > 3.5 ? 1.0 : 0.0; });
  CHECK_THROWS(grand_maximal(edge, phi));
}

TEST_CASE("2D mollifier mass") {
  const Box box(Interval{-2, 2}, Interval{-2, 2});
  const double h = 1.0 / 16;
  Mollifier phi{2, -2, 0, 1.0};
  GridFunction d(box, h);
  d[d.index(32, 32)] = 1.0;
  for (double t : phi.scales()) CHECK(integrate(mollify(d, phi, t)) == doctest::Approx(h * h).epsilon(1e-12));
}

TEST_CASE("eq008 pointwise bound") {
  const auto r = eq008_check(Cube::interval(0, 1), 0.5, 1.0);
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.max_ratio >= 1.0);
  // Interior of Q: M_{1/2} chi_Q = 1.
  CHECK(r.max_ratio <= std::sqrt(1.5) * std::pow(2.0, 0.125));
  double lo = 1e300, hi = 0;
  for (int k = -3; k <= 3; ++k) {
    const double s = std::ldexp(1.0, k);
    const double v = eq008_check(Cube(Point{0.5 * s, 0}, s, 1), 0.5, 1.0).max_ratio;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi <= 1.1 * lo);
  const auto half = eq008_check(Cube::interval(0, 1), 0.5, 0.5);
  CHECK(std::isfinite(half.max_ratio));
  CHECK_THROWS(eq008_check(Cube::interval(0, 1), 2.0, 1.0));
  const auto two = eq008_check(Cube(Point{0, 0}, 1.0, 2), 0.5, 1.0, 16);
  CHECK(std::isfinite(two.max_ratio));
}
