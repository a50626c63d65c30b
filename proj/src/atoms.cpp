#include "fracharm/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fracharm {

namespace {

std::vector<std::array<int, 2>> multi_indices(int dim, int N) {
  std::vector<std::array<int, 2>> out;
  for (int d = 0; d <= N; ++d) {
    if (dim == 1) {
      out.push_back({d, 0});
    } else {
      for (int a = d; a >= 0; --a) out.push_back({a, d - a});
    }
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void subtract_projection(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (const auto& e : basis) {
    const double c = dot(v, e);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * e[i];
  }
}

}  // namespace

std::vector<double> scaled_moments(const GridFunction& f, const Cube& q, int N) {
  std::vector<double> out;
  const double vol = f.cell_volume();
  for (const auto& alpha : multi_indices(f.dim(), N)) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] == 0.0) continue;
      const Point x = f.center(i);
      double mono = std::pow((x[0] - q.center()[0]) / q.side(), alpha[0]);
      if (f.dim() == 2) mono *= std::pow((x[1] - q.center()[1]) / q.side(), alpha[1]);
      s += mono * f[i];
    }
    out.push_back(s * vol / (f.dim() == 1 ? q.side() : q.side() * q.side()));
  }
  return out;
}

Atom make_atom(const GridFunction& profile, const Cube& q, int N) {
  if (N < 0) throw std::invalid_argument("make_atom: N must be nonnegative");
  if (q.dim() != profile.dim()) throw std::invalid_argument("make_atom: cube and grid dimensions differ");
  const CellRange r = cells_in(profile, q);
  if (r.empty(profile.dim())) throw std::invalid_argument("make_atom: cube contains no grid cells");
  std::vector<std::size_t> cells;
  for (int j = r.first[1]; j <= r.last[1]; ++j) {
    for (int i = r.first[0]; i <= r.last[0]; ++i) cells.push_back(profile.index(i, j));
  }
  {
    std::vector<char> inside(profile.size(), 0);
    for (auto c : cells) inside[c] = 1;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      if (!inside[i] && profile[i] != 0.0) throw std::invalid_argument("make_atom: profile is not supported in Q");
    }
  }
  // Orthonormal basis of scaled monomials on the cells of Q.
  std::vector<std::vector<double>> basis;
  for (const auto& alpha : multi_indices(profile.dim(), N)) {
    std::vector<double> v(cells.size());
    for (std::size_t t = 0; t < cells.size(); ++t) {
      const Point x = profile.center(cells[t]);
      double mono = std::pow((x[0] - q.center()[0]) / q.side(), alpha[0]);
      if (profile.dim() == 2) mono *= std::pow((x[1] - q.center()[1]) / q.side(), alpha[1]);
      v[t] = mono;
    }
    for (int pass = 0; pass < 2; ++pass) subtract_projection(v, basis);
    const double nv = std::sqrt(dot(v, v));
    if (nv < 1e-12) continue;  // fewer cells than monomials
    for (double& x : v) x /= nv;
    basis.push_back(std::move(v));
  }
  std::vector<double> a(cells.size());
  double before = 0.0;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    a[t] = profile[cells[t]];
    before = std::max(before, std::abs(a[t]));
  }
  for (int pass = 0; pass < 2; ++pass) subtract_projection(a, basis);
  double after = 0.0;
  for (double v : a) after = std::max(after, std::abs(v));
  if (before == 0.0 || after <= 1e-10 * before) {
    throw std::invalid_argument("make_atom: projection annihilates the profile");
  }
  Atom atom{q, N, profile.zeros_like()};
  for (std::size_t t = 0; t < cells.size(); ++t) atom.values[cells[t]] = a[t] / after;
  return atom;
}

AtomicSum make_atomic_sum(std::vector<double> lambdas, std::vector<Atom> atoms, const Box& box, double h) {
  if (lambdas.size() != atoms.size()) throw std::invalid_argument("atomic sum: one lambda per atom");
  AtomicSum s{std::move(lambdas), std::move(atoms), GridFunction(box, h), GridFunction(box, h), 0};
  for (std::size_t k = 0; k < s.atoms.size(); ++k) {
    if (!(s.lambdas[k] > 0.0)) throw std::invalid_argument("atomic sum: lambdas must be positive");
    const Atom& a = s.atoms[k];
    s.realized.require_same_grid(a.values, "atomic sum");
    for (std::size_t i = 0; i < a.values.size(); ++i) s.realized[i] += s.lambdas[k] * a.values[i];
    const CellRange r = cells_in(s.envelope, a.cube);
    for (int j = r.first[1]; j <= r.last[1]; ++j) {
      for (int i = r.first[0]; i <= r.last[0]; ++i) s.envelope[s.envelope.index(i, j)] += s.lambdas[k];
    }
  }
  return s;
}

AtomicSum random_atomic_family(std::uint64_t seed, int count, const AtomLaw& law, const Box& box, double h) {
  if (count < 0) throw std::invalid_argument("random family: count must be nonnegative");
  if (law.j_min > law.j_max) throw std::invalid_argument("random family: empty side range");
  if (!(law.lambda_min > 0.0 && law.lambda_max >= law.lambda_min)) {
    throw std::invalid_argument("random family: need 0 < lambda_min <= lambda_max");
  }
  const int dim = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(law.j_min, law.j_max);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  std::vector<double> lambdas;
  std::vector<Atom> atoms;
  const Box window = law.window.scaled(law.unit);
  int attempts = 0;
  while (static_cast<int>(atoms.size()) < count) {
    if (++attempts > 64 * (count + 1)) throw std::runtime_error("random family: too many degenerate draws");
    const double side = std::ldexp(law.unit, level(rng));
    Point c{0.0, 0.0};
    for (int k = 0; k < dim; ++k) {
      const auto& ax = window.axis(k);
      const double raw = ax.lo + unit01(rng) * ax.length();
      // Lower edge on a cell boundary.
      const double lo = box.axis(k).lo + std::round((raw - 0.5 * side - box.axis(k).lo) / h) * h;
      c[static_cast<std::size_t>(k)] = lo + 0.5 * side;
    }
    const double lambda =
        std::exp(std::log(law.lambda_min) + unit01(rng) * (std::log(law.lambda_max) - std::log(law.lambda_min)));
    std::array<std::array<double, 3>, 2> amp{}, phase{};
    for (int k = 0; k < 2; ++k) {
      for (int t = 0; t < 3; ++t) {
        amp[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] = unit01(rng) * 2.0 - 1.0;
        phase[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] = unit01(rng) * 2.0 * std::numbers::pi;
      }
    }
    const Cube q(c, side, dim);
    for (int k = 0; k < dim; ++k) {
      if (q.lower(k) < box.axis(k).lo || q.upper(k) > box.axis(k).hi) {
        throw std::invalid_argument("random family: cube leaves the box");
      }
    }
    auto wave = [&](int k, double u) {
      double s = 0.0;
      for (int t = 0; t < 3; ++t) {
        s += amp[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] *
             std::sin((t + 1) * std::numbers::pi * u + phase[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)]);
      }
      return s;
    };
    GridFunction profile(box, h);
    const CellRange r = cells_in(profile, q);
    for (int j = r.first[1]; j <= r.last[1]; ++j) {
      for (int i = r.first[0]; i <= r.last[0]; ++i) {
        const Point x = profile.center(i, j);
        double v = wave(0, (x[0] - q.lower(0)) / side);
        if (dim == 2) v = v * wave(1, (x[1] - q.lower(1)) / side) + 0.5 * wave(1, (x[1] - q.lower(1)) / side);
        profile[profile.index(i, j)] = v;
      }
    }
    try {
      atoms.push_back(make_atom(profile, q, law.N));
      lambdas.push_back(lambda);
    } catch (const std::invalid_argument&) {
      // Degenerate draw; the next iteration draws a fresh cube.
    }
  }
  AtomicSum s = make_atomic_sum(std::move(lambdas), std::move(atoms), box, h);
  s.seed = seed;
  return s;
}

nlohmann::json AtomicSum::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const Cube& q = atoms[k].cube;
    nlohmann::json center = nlohmann::json::array({q.center()[0]});
    if (q.dim() == 2) center.push_back(q.center()[1]);
    list.push_back({{"cube", {{"center", center}, {"side", q.side()}, {"dim", q.dim()}}},
                    {"N", atoms[k].N},
                    {"values_ref", "atom_" + std::to_string(k)}});
  }
  return {{"atoms", list}, {"lambdas", lambdas}, {"seed", seed}};
}

double hardy_quasinorm(const GridFunction& f, double p, const Weight& w, const Mollifier& phi) {
  const GridFunction m = grand_maximal(f, phi);
  return weighted_lp_quasinorm(m, p, w.to_grid(f.box(), f.h()));
}

double envelope_norm(const AtomicSum& s, double p, const Weight& w) {
  return weighted_lp_quasinorm(s.envelope, p, w.to_grid(s.envelope.box(), s.envelope.h()));
}

}  // namespace fracharm
