#include <doctest.h>

#include <cmath>
#include <random>

#include "fracharm/atoms.hpp"

using namespace fracharm;

namespace {

const Box kBox(Interval{-2, 2});
const double kH = std::ldexp(1.0, -8);

GridFunction profile_on(const Cube& q, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return GridFunction::sample(kBox, kH, [&](const Point& x) { return q.contains_half_open(x) ? u(rng) : 0.0; });
}

// Projection onto span{1, t, .., t^N} by the normal equations (Gaussian elimination).
std::vector<double> normal_equation_residual(const std::vector<double>& t, const std::vector<double>& f, int N) {
  const int d = N + 1;
  std::vector<double> a(static_cast<std::size_t>(d * d)), b(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < t.size(); ++k) {
    for (int i = 0; i < d; ++i) {
      b[static_cast<std::size_t>(i)] += std::pow(t[k], i) * f[k];
      for (int j = 0; j < d; ++j) a[static_cast<std::size_t>(i * d + j)] += std::pow(t[k], i + j);
    }
  }
  for (int c = 0; c < d; ++c) {
    for (int r = c + 1; r < d; ++r) {
      const double m = a[static_cast<std::size_t>(r * d + c)] / a[static_cast<std::size_t>(c * d + c)];
      for (int j = c; j < d; ++j) a[static_cast<std::size_t>(r * d + j)] -= m * a[static_cast<std::size_t>(c * d + j)];
      b[static_cast<std::size_t>(r)] -= m * b[static_cast<std::size_t>(c)];
    }
  }
  std::vector<double> coef(static_cast<std::size_t>(d));
  for (int r = d - 1; r >= 0; --r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int j = r + 1; j < d; ++j) s -= a[static_cast<std::size_t>(r * d + j)] * coef[static_cast<std::size_t>(j)];
    coef[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r * d + r)];
  }
  std::vector<double> res(f);
  for (std::size_t k = 0; k < t.size(); ++k) {
    for (int i = 0; i < d; ++i) res[k] -= coef[static_cast<std::size_t>(i)] * std::pow(t[k], i);
  }
  return res;
}

}  // namespace

TEST_CASE("make_atom") {
  const Cube q = Cube::interval(0, 1);
  const auto flat = indicator(kBox, kH, q);
  CHECK_THROWS(make_atom(flat, q, 0));
  const Cube centered = Cube::interval(-0.5, 0.5);
  const auto odd = GridFunction::sample(kBox, kH, [&](const Point& x) { return centered.contains_half_open(x) ? x[0] : 0.0; });
  const Atom a0 = make_atom(odd, centered, 0);
  const double s = sup_abs(odd);
  for (std::size_t i = 0; i < odd.size(); ++i) CHECK(a0.values[i] == doctest::Approx(odd[i] / s).epsilon(1e-12));
  // Random profile, N = 3: moments vanish and the atom matches the normal-equations projection.
  const auto prof = profile_on(q, 5);
  const Atom a = make_atom(prof, q, 3);
  for (double m : scaled_moments(a.values, q, 3)) CHECK(std::abs(m) <= kMomentTolerance);
  CHECK(sup_abs(a.values) == doctest::Approx(1.0));
  std::vector<double> t, f;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    if (prof[i] != 0.0) {
      t.push_back((prof.center(i)[0] - 0.5));
      f.push_back(prof[i]);
      idx.push_back(i);
    }
  }
  auto res = normal_equation_residual(t, f, 3);
  double sup = 0.0;
  for (double v : res) sup = std::max(sup, std::abs(v));
  for (std::size_t k = 0; k < idx.size(); ++k) CHECK(a.values[idx[k]] == doctest::Approx(res[k] / sup).epsilon(1e-8));
  CHECK_THROWS(make_atom(profile_on(Cube::interval(0, 2), 1), q, 1));
}

TEST_CASE("moments survive joint dilation") {
  const Box big(Interval{-4, 4});
  const Cube q = Cube::interval(0, 0.5), q2 = Cube::interval(0, 1);
  auto prof = [](double u) { return std::sin(7 * u) + u * u; };
  const auto p1 = GridFunction::sample(kBox, kH, [&](const Point& x) { return q.contains_half_open(x) ? prof(x[0] / 0.5) : 0.0; });
  const auto p2 = GridFunction::sample(big, 2 * kH, [&](const Point& x) { return q2.contains_half_open(x) ? prof(x[0]) : 0.0; });
  const auto m1 = scaled_moments(make_atom(p1, q, 2).values, q, 2), m2 = scaled_moments(make_atom(p2, q2, 2).values, q2, 2);
  for (std::size_t i = 0; i < m1.size(); ++i) {
    CHECK(std::abs(m1[i]) <= kMomentTolerance);
    CHECK(std::abs(m2[i]) <= kMomentTolerance);
  }
}

TEST_CASE("2D atoms") {
  const Box box(Interval{-1, 1}, Interval{-1, 1});
  const Cube q(Point{0.25, 0.25}, 0.5, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto prof = GridFunction::sample(box, 1.0 / 32, [&](const Point& x) { return q.contains_half_open(x) ? u(rng) : 0.0; });
  const Atom a = make_atom(prof, q, 2);
  const auto m = scaled_moments(a.values, q, 2);
  CHECK(m.size() == 6);
  for (double v : m) CHECK(std::abs(v) <= kMomentTolerance);
}

TEST_CASE("atomic sums and envelopes") {
  AtomLaw law;
  law.N = 1;
  const auto s = random_atomic_family(7, 50, law, kBox, kH);
  const auto s2 = random_atomic_family(7, 50, law, kBox, kH);
  for (std::size_t i = 0; i < s.realized.size(); ++i) {
    CHECK(s.realized[i] == s2.realized[i]);
    CHECK(std::abs(s.realized[i]) <= s.envelope[i] + 1e-15);
  }
  CHECK(s.atoms.size() == 50);
  const auto empty = random_atomic_family(7, 0, law, kBox, kH);
  CHECK(sup_abs(empty.realized) == 0.0);
  const auto js = s.to_json();
  CHECK(js["atoms"].size() == 50);
  CHECK(js["seed"] == 7);
  const Weight one = Weight::constant(1.0, 1);
  const Cube q = Cube::interval(0, 2);
  const auto prof = GridFunction::sample(kBox, kH, [&](const Point& x) { return q.contains_half_open(x) ? std::sin(5 * x[0]) : 0.0; });
  const auto single = make_atomic_sum({1.0}, {make_atom(prof, q, 0)}, kBox, kH);
  CHECK(envelope_norm(single, 0.5, one) == doctest::Approx(4.0).epsilon(1e-12));
  const Cube qa = Cube::interval(-1.5, -1), qb = Cube::interval(0.5, 1.5);
  auto mk = [&](const Cube& c) {
    return make_atom(GridFunction::sample(kBox, kH, [&](const Point& x) { return c.contains_half_open(x) ? x[0] - c.lower(0) : 0.0; }), c, 0);
  };
  const auto two = make_atomic_sum({2.0, 3.0}, {mk(qa), mk(qb)}, kBox, kH);
  CHECK(envelope_norm(two, 1.0, one) == doctest::Approx(2.0 * 0.5 + 3.0 * 1.0).epsilon(1e-12));
  // Overlap: direct modular integration of the envelope.
  const Cube qc = Cube::interval(0.0, 1.0);
  const auto over = make_atomic_sum({2.0, 3.0}, {mk(qc), mk(qb)}, kBox, kH);
  const double direct = std::pow(0.5 * std::sqrt(2.0) + 0.5 * std::sqrt(5.0) + 0.5 * std::sqrt(3.0), 2.0);
  CHECK(envelope_norm(over, 0.5, one) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("Hardy quasinorm") {
  Mollifier phi{1, -6, 0, 1.0};
  const Weight one = Weight::constant(1.0, 1);
  CHECK(hardy_quasinorm(GridFunction(kBox, kH), 1.0, one, phi) == 0.0);
  const Cube q = Cube::interval(0, 1);
  auto prof = [](double x) { return std::cos(3 * x) + x; };
  auto norm_at = [&](int k) {
    const double h = std::ldexp(1.0, -k);
    Mollifier p = phi;
    p.j_min = -k;
    const auto g = GridFunction::sample(Box(Interval{-3, 4}), h, [&](const Point& x) { return q.contains_half_open(x) ? prof(x[0]) : 0.0; });
    return hardy_quasinorm(make_atom(g, q, 1).values, 1.0, one, p);
  };
  const double a = norm_at(7), b = norm_at(8), c = norm_at(9);
  CHECK(std::isfinite(c));
  CHECK(c == doctest::Approx(b).epsilon(0.01));
  CHECK(b == doctest::Approx(a).epsilon(0.03));
  const auto g = GridFunction::sample(kBox, kH, [&](const Point& x) { return q.contains_half_open(x) ? prof(x[0]) : 0.0; });
  const auto at = make_atom(g, q, 1);
  auto at3 = at.values;
  at3 *= -3.0;
  CHECK(hardy_quasinorm(at3, 1.0, one, phi) == doctest::Approx(3 * hardy_quasinorm(at.values, 1.0, one, phi)).epsilon(1e-13));
}
