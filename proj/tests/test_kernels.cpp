#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "fracharm/kernels.hpp"

using namespace fracharm;

namespace {

double at_zero_1(double h) {
  const Box box(Interval{0, 1});
  std::vector<GridFunction> fs{indicator(box, h, Cube::interval(0, 1))};
  return frac_operator_at(KernelSpec::kenig_stein(1, 1, 0.5), fs, {0, 0});
}

GridFunction random_grid(const Box& box, double h, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return GridFunction::sample(box, h, [&](const Point& x) { return std::abs(x[0]) < 0.5 ? u(rng) : 0.0; });
}

}  // namespace

TEST_CASE("closed-form quadrature oracles") {
  const auto t0 = std::chrono::steady_clock::now();
  // int_0^1 y^{-1/2} dy = 2.
  CHECK(std::abs(at_zero_1(std::ldexp(1.0, -10)) - 2.0) <= 0.01 * 2.0);
  // int_0^1 int_0^1 (y1 + y2)^{-1} = 2 ln 2.
  const double h = std::ldexp(1.0, -8);
  const Box box(Interval{0, 1});
  const auto chi = indicator(box, h, Cube::interval(0, 1));
  std::vector<GridFunction> fs{chi, chi};
  const double v = frac_operator_at(KernelSpec::kenig_stein(2, 1, 1.0), fs, {0, 0});
  CHECK(std::abs(v - 2 * std::log(2.0)) <= 0.01 * 2 * std::log(2.0));
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 30.0);
}

TEST_CASE("quadrature convergence order") {
  std::vector<double> err;
  for (int k = 8; k <= 10; ++k) err.push_back(std::abs(at_zero_1(std::ldexp(1.0, -k)) - 2.0));
  CHECK(std::log2(err[0] / err[1]) >= 0.5 - 1e-3);
  CHECK(std::log2(err[1] / err[2]) >= 0.5 - 1e-3);
}

TEST_CASE("grid apply: singular cell rule and fast path agree with point evaluation") {
  const Box box(Interval{-1, 1});
  const double h = 1.0 / 32;
  const auto f = random_grid(box, h, 1), g = random_grid(box, h, 2);
  std::vector<GridFunction> fs{f, g};
  for (const auto& k : {KernelSpec::kenig_stein(2, 1, 0.5), KernelSpec::perturbed(2, 1, 1.2, 0.5)}) {
    const auto out = apply_frac_operator(k, fs);
    for (std::size_t i = 0; i < out.size(); i += 5) {
      CHECK(out[i] == doctest::Approx(frac_operator_at(k, fs, out.center(i))).epsilon(1e-10));
    }
  }
  std::vector<GridFunction> three{f, g, f};
  const auto k3 = KernelSpec::kenig_stein(3, 1, 0.7);
  const auto out3 = apply_frac_operator(k3, three);
  for (std::size_t i = 0; i < out3.size(); i += 13) {
    CHECK(out3[i] == doctest::Approx(frac_operator_at(k3, three, out3.center(i))).epsilon(1e-10));
  }
}

TEST_CASE("multilinearity, symmetry, translation, dilation") {
  const Box box(Interval{-2, 2});
  const double h = std::ldexp(1.0, -6);
  const auto f = random_grid(box, h, 3), g = random_grid(box, h, 4);
  const auto k = KernelSpec::kenig_stein(2, 1, 0.5);
  std::vector<GridFunction> fs{f, g}, gs{g, f};
  auto f2 = f;
  f2 *= 2.0;
  std::vector<GridFunction> f2s{f2, g};
  const auto a = apply_frac_operator(k, fs), b = apply_frac_operator(k, f2s), c = apply_frac_operator(k, gs);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i] == doctest::Approx(2.0 * a[i]).epsilon(1e-13));
    CHECK(c[i] == doctest::Approx(a[i]).epsilon(1e-12));
  }
  // Shift by 5 cells.
  auto shift = [&](const GridFunction& u) {
    GridFunction s = u.zeros_like();
    for (std::size_t i = 0; i + 5 < u.size(); ++i) s[i + 5] = u[i];
    return s;
  };
  std::vector<GridFunction> shifted{shift(f), shift(g)};
  const auto d = apply_frac_operator(k, shifted);
  for (std::size_t i = 0; i + 5 < a.size(); ++i) CHECK(d[i + 5] == doctest::Approx(a[i]).epsilon(1e-12));
  // Dilation by 2: same samples on a grid twice as coarse and wide.
  const double hh = std::ldexp(1.0, -8);
  const Box small(Interval{-1, 1});
  auto smooth = [](const Point& x) { return std::abs(x[0]) < 0.5 ? std::cos(M_PI * x[0]) : 0.0; };
  const auto u = GridFunction::sample(small, hh, smooth);
  const auto ul = GridFunction::sample(Box(Interval{-2, 2}), 2 * hh, [&](const Point& x) { return smooth({x[0] / 2, 0}); });
  std::vector<GridFunction> us{u, u}, uls{ul, ul};
  const auto t1 = apply_frac_operator(k, us), t2 = apply_frac_operator(k, uls);
  for (std::size_t i = 0; i < t1.size(); i += 17) {
    CHECK(t2[i] == doctest::Approx(std::pow(2.0, 0.5) * t1[i]).epsilon(0.02));
  }
}

TEST_CASE("operator errors") {
  const Box box(Interval{0, 1});
  const auto f = indicator(box, 0.25, Cube::interval(0, 1));
  const auto g = indicator(Box(Interval{0, 2}), 0.25, Cube::interval(0, 1));
  std::vector<GridFunction> mismatch{f, g};
  CHECK_THROWS_AS(apply_frac_operator(KernelSpec::kenig_stein(2, 1, 0.5), mismatch), GridMismatch);
  std::vector<GridFunction> five(5, f);
  CHECK_THROWS(apply_frac_operator(KernelSpec::kenig_stein(5, 1, 0.5), five));
  CHECK_THROWS(KernelSpec::kenig_stein(2, 1, 2.0));
  CHECK_THROWS(KernelSpec::kenig_stein(2, 1, 0.0));
}

TEST_CASE("2D operator") {
  const Box box(Interval{-1, 1}, Interval{-1, 1});
  const double h = 1.0 / 8;
  const auto chi = indicator(box, h, Cube(Point{0, 0}, 1.0, 2));
  std::vector<GridFunction> fs{chi};
  const auto k = KernelSpec::kenig_stein(1, 2, 1.0);
  const auto out = apply_frac_operator(k, fs);
  // I_1 chi at the center of the unit square: int r^{-1} over the square = 4 asinh(1).
  const long c = out.cell_of({h / 2, h / 2});
  CHECK(std::isfinite(out[static_cast<std::size_t>(c)]));
  // First-order convergence: one Richardson step on h = 1/32, 1/64.
  auto at = [&](double hh) {
    std::vector<GridFunction> g{indicator(box, hh, Cube(Point{0, 0}, 1.0, 2))};
    return frac_operator_at(k, g, {0, 0});
  };
  const double coarse = at(1.0 / 32), fine = at(1.0 / 64);
  CHECK(fine < 4 * std::asinh(1.0));
  CHECK(2 * fine - coarse == doctest::Approx(4 * std::asinh(1.0)).epsilon(1e-3));
}

TEST_CASE("size condition") {
  CHECK(kernel_size_check(KernelSpec::kenig_stein(2, 1, 0.5), 500) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kernel_size_check(KernelSpec::kenig_stein(2, 2, 1.5), 500) == doctest::Approx(1.0).epsilon(1e-12));
  auto scaled = KernelSpec::kenig_stein(1, 1, 0.5);
  scaled.scale = 3.0;
  CHECK(kernel_size_check(scaled, 200) == doctest::Approx(3.0).epsilon(1e-12));
  const double pert = kernel_size_check(KernelSpec::perturbed(1, 1, 0.5, 0.5), 2000);
  CHECK(pert <= 1.5 + 1e-12);
  CHECK(pert >= 1.4);
}

TEST_CASE("smoothness condition") {
  CHECK(kernel_smoothness_check(KernelSpec::kenig_stein(1, 1, 0.5), 1, 200) == doctest::Approx(0.5).epsilon(1e-6));
  // Hand differentiation: d^2/dy_i^2 S^{gamma - 2} = (2 - gamma)(3 - gamma) S^{gamma - 4} per slot.
  CHECK(kernel_smoothness_check(KernelSpec::kenig_stein(2, 1, 0.5), 2, 200) == doctest::Approx(7.5).epsilon(1e-5));
  const double a = kernel_smoothness_check(KernelSpec::kenig_stein(2, 1, 0.5), 2, 100, 1.0 / 16, 1);
  const double b = kernel_smoothness_check(KernelSpec::kenig_stein(2, 1, 0.5), 2, 1000, 1.0 / 16, 2);
  CHECK(b == doctest::Approx(a).epsilon(1e-4));
  CHECK(kernel_smoothness_check(KernelSpec::kenig_stein(2, 1, 0.5), 0, 100) ==
        kernel_size_check(KernelSpec::kenig_stein(2, 1, 0.5), 100));
  CHECK_THROWS(kernel_smoothness_check(KernelSpec::kenig_stein(2, 1, 0.5), 2, 10, 0.6));
  const double two_d = kernel_smoothness_check(KernelSpec::kenig_stein(2, 2, 1.0), 1, 200, 1.0 / 16, 3, true);
  CHECK(std::isfinite(two_d));
  CHECK(two_d > 0.0);
}

TEST_CASE("Taylor remainder") {
  const auto k = KernelSpec::kenig_stein(1, 1, 0.5);
  const Cube q = Cube::interval(0, 1);
  std::vector<Point> ys{{0, 0}};
  std::vector<Point> samples;
  for (int i = 0; i <= 400; ++i) samples.push_back({i / 400.0, 0});
  double worst = 0.0;
  for (double x : {2.5, 3.0, 5.0, 10.0, -1.5, -4.0}) {
    const auto p = taylor_polynomial(k, 0, q.center(), 1, {x, 0}, ys);
    CHECK(p.evaluate(q.center()) == doctest::Approx(k.evaluate({x, 0}, std::vector<Point>{q.center()})));
    worst = std::max(worst, taylor_remainder_check(k, p, q, samples));
  }
  CHECK(worst <= 3.0 / 8.0 + 1e-9);
  CHECK(worst > 0.2);
  const auto p = taylor_polynomial(k, 0, q.center(), 1, {3.0, 0}, ys);
  std::vector<Point> at_c{q.center()};
  CHECK(taylor_remainder_check(k, p, q, at_c) <= 1e-12);
  // Dilation of the configuration leaves the ratio unchanged.
  const auto k2 = KernelSpec::kenig_stein(2, 1, 0.5);
  std::vector<Point> y2{{0, 0}, {4.0, 0}};
  const auto p1 = taylor_polynomial(k2, 0, q.center(), 3, {3.0, 0}, y2);
  std::vector<Point> y2s{{0, 0}, {8.0, 0}};
  std::vector<Point> samples2;
  for (const auto& s : samples) samples2.push_back({2 * s[0], 0});
  const Cube q2 = Cube::interval(0, 2);
  const auto p2 = taylor_polynomial(k2, 0, q2.center(), 3, {6.0, 0}, y2s);
  const double r1 = taylor_remainder_check(k2, p1, q, samples), r2 = taylor_remainder_check(k2, p2, q2, samples2);
  CHECK(r2 == doctest::Approx(r1).epsilon(0.1));
  CHECK_THROWS(taylor_remainder_check(k, taylor_polynomial(k, 0, q.center(), 1, {1.2, 0}, ys), q, samples));
}

TEST_CASE("pointwise G1 bound") {
  std::vector<Cube> cubes{Cube::interval(0, 1), Cube::interval(0, 1)};
  std::vector<double> g{0.5, 0.5};
  const double r = pointwise_G1_bound_check(cubes, g, {0, 0});
  CHECK(r == doctest::Approx(2 * std::log(2.0)).epsilon(0.01));
  for (int k = -3; k <= 3; ++k) {
    const double s = std::ldexp(1.0, k);
    std::vector<Cube> c{Cube::interval(0, s), Cube::interval(0, s)};
    CHECK(pointwise_G1_bound_check(c, g, {0, 0}) == doctest::Approx(r).epsilon(0.05));
  }
  std::vector<Cube> far{Cube::interval(0, 1), Cube::interval(10, 11)};
  CHECK_THROWS(pointwise_G1_bound_check(far, g, {0.5, 0}));
}
