#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "fracharm/grid.hpp"
#include "fracharm/maximal.hpp"
#include "fracharm/weights.hpp"

namespace fracharm {

// Supported on the cells of Q (cell-center rule), |a| <= 1, and
// int (x - c_Q)^alpha a(x) dx = 0 for |alpha| <= N.
struct Atom {
  Cube cube;
  int N = 0;
  GridFunction values;
};

inline constexpr double kMomentTolerance = 1e-10;

// Removes the discrete L2(Q) projection of profile onto polynomials of total
// degree <= N, then rescales to sup |a| = 1. Throws when nothing survives the
// projection or when profile is nonzero outside Q.
Atom make_atom(const GridFunction& profile, const Cube& q, int N);

// int (x - c_Q)^alpha f / l(Q)^{n + |alpha|} for all |alpha| <= N, ordered by
// total degree then by the power of x.
std::vector<double> scaled_moments(const GridFunction& f, const Cube& q, int N);

struct AtomicSum {
  std::vector<double> lambdas;
  std::vector<Atom> atoms;
  GridFunction realized;
  GridFunction envelope;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

// f = sum lambda_k a_k and g = sum lambda_k chi_{Q_k} on (box, h).
AtomicSum make_atomic_sum(std::vector<double> lambdas, std::vector<Atom> atoms, const Box& box, double h);

// Cube and coefficient law for random families. Sides are unit * 2^j with j
// uniform in [j_min, j_max]; centers are uniform in unit * window and snapped
// so cube edges fall on cell boundaries; lambda is log-uniform.
struct AtomLaw {
  Box window{Interval{-0.5, 0.5}};
  int j_min = -4;
  int j_max = -2;
  double lambda_min = 0.5;
  double lambda_max = 2.0;
  int N = 1;
  double unit = 1.0;
};

AtomicSum random_atomic_family(std::uint64_t seed, int count, const AtomLaw& law, const Box& box, double h);

// ||grand_maximal(f)||_{L^p(w)}.
double hardy_quasinorm(const GridFunction& f, double p, const Weight& w, const Mollifier& phi);
// ||sum lambda chi_Q||_{L^p(w)}.
double envelope_norm(const AtomicSum& s, double p, const Weight& w);

}  // namespace fracharm
