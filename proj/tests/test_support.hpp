#pragma once

// Shared helpers for the test suites: seeded random distributions and a few
// hand-rolled generators (no external property-testing dependency).

#include <cmath>
#include <cstdint>
#include <vector>

#include "sccs/distribution.hpp"
#include "sccs/rng.hpp"

namespace sccs::testing {

/// Deterministic exponential draws -> Dirichlet(1) point on the simplex.
inline std::vector<double> random_simplex(std::size_t n, std::uint64_t seed,
                                          std::uint64_t stream) {
  StreamRng rng(seed, {0xD1D1, stream});
  std::vector<double> v(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform(i);
    v[i] = -std::log(1.0 - u);
    sum += v[i];
  }
  for (double& x : v) x /= sum;
  // exact renormalization so pmf validation at 1e-12 always passes
  double s2 = 0.0;
  for (double x : v) s2 += x;
  for (double& x : v) x /= s2;
  return v;
}

inline JointDistribution random_joint(const std::vector<Variable>& vars,
                                      std::uint64_t seed, std::uint64_t stream = 0) {
  std::size_t total = 1;
  for (const auto& v : vars) total *= v.card;
  return JointDistribution::dense(vars, random_simplex(total, seed, stream));
}

inline double h2(double p) {
  auto xlx = [](double q) { return q > 0 ? q * std::log2(q) : 0.0; };
  return -xlx(p) - xlx(1.0 - p);
}

/// X uniform binary, Y = BSC(p)(X), Z = BSC(q)(Y).
inline JointDistribution binary_chain_target(double p, double q) {
  std::vector<double> mass(8);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t z = 0; z < 2; ++z)
        mass[4 * x + 2 * y + z] =
            0.5 * (y != x ? p : 1 - p) * (z != y ? q : 1 - q);
  return JointDistribution::dense({{"X", 2}, {"Y", 2}, {"Z", 2}}, std::move(mass));
}

}  // namespace sccs::testing
