#include <cmath>

#include "doctest.h"
#include "sccs/coupling.hpp"
#include "sccs/relay.hpp"
#include "test_support.hpp"

using namespace sccs;

namespace {

double mean_tv_at(const ExperimentReport& rep, unsigned n) {
  for (const auto& p : report_trend(rep))
    if (p.n == n) return p.mean;
  throw std::runtime_error("missing n");
}

double extra_of(const ExperimentRow& r, const std::string& k) {
  for (const auto& [key, v] : r.extra)
    if (key == k) return v;
  throw std::runtime_error("missing extra");
}

/// scatter m=2 with U = X: (X,Z) uniform on distinct pairs, Z = 1 - X.
JointDistribution scatter2_coupling() {
  std::vector<double> m(2 * 2 * 2, 0.0);
  // vars X, U, Z; U = X, Z = 1-X
  m[(0 * 2 + 0) * 2 + 1] = 0.5;
  m[(1 * 2 + 1) * 2 + 0] = 0.5;
  return JointDistribution::dense({{"X", 2}, {"U", 2}, {"Z", 2}}, std::move(m));
}

}  // namespace

TEST_CASE("independent target with empty U: coding adds no coupling error") {
  // X and Z independent, U singleton
  auto px = testing::random_simplex(2, 3, 0);
  auto pz = testing::random_simplex(2, 3, 1);
  std::vector<double> m(2 * 1 * 2);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t z = 0; z < 2; ++z) m[(x * 1 + 0) * 2 + z] = px[x] * pz[z];
  auto cj = JointDistribution::dense({{"X", 2}, {"U", 1}, {"Z", 2}}, std::move(m));
  auto q = cj.marginal({"X", "Z"});
  std::vector<unsigned> ns = {1, 2, 3};
  auto rep = relay_scheme_experiment(q, cj, 0.0, 0.0, ns, 4, 11);
  for (const auto& r : rep.rows) {
    // stage 1 is exact and the total TV is exactly the z-mixture residue:
    // the cross-coupling contributes nothing
    CHECK(extra_of(r, "stage1_tv") <= 1e-12);
    CHECK(r.tv == doctest::Approx(extra_of(r, "zmix_tv")).epsilon(1e-12));
  }
}

TEST_CASE("scatter m=2 at corner rates plus margin: decreasing trend") {
  auto cj = scatter2_coupling();
  auto q = cj.marginal({"X", "Z"});
  std::vector<unsigned> ns = {2, 3, 4};
  auto rep = relay_scheme_experiment(q, cj, 1.25, 1.25, ns, 24, 5);
  double prev = 1e9;
  for (unsigned n : ns) {
    const double m = mean_tv_at(rep, n);
    CHECK(m < prev);
    prev = m;
  }
}

TEST_CASE("rates below the floor keep TV away from zero") {
  auto cj = scatter2_coupling();
  auto q = cj.marginal({"X", "Z"});
  std::vector<unsigned> ns = {2, 3, 4};
  // I(X;U) = 1; run at R1 = 0.4
  auto rep = relay_scheme_experiment(q, cj, 0.4, 1.25, ns, 16, 5);
  for (unsigned n : ns) CHECK(mean_tv_at(rep, n) > 0.15);
}

TEST_CASE("chain violation raises") {
  // U independent of everything, X = Z correlated: I(X;Z|U) > 0
  std::vector<double> m(2 * 2 * 2, 0.0);
  for (std::size_t u = 0; u < 2; ++u) {
    m[(0 * 2 + u) * 2 + 0] = 0.25;
    m[(1 * 2 + u) * 2 + 1] = 0.25;
  }
  auto cj = JointDistribution::dense({{"X", 2}, {"U", 2}, {"Z", 2}}, std::move(m));
  auto q = cj.marginal({"X", "Z"});
  std::vector<unsigned> ns = {1};
  CHECK_THROWS_AS(relay_scheme_experiment(q, cj, 1.0, 1.0, ns, 1, 1),
                  ConstraintError);
}
