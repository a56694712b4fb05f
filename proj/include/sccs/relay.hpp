#pragma once

#include <span>

#include "sccs/distribution.hpp"
#include "sccs/report.hpp"

namespace sccs {

struct RelayOptions {
  double cr_rate1 = 2.0;  // common randomness rate on link 1, bits/symbol
  double cr_rate2 = 2.0;  // common randomness rate on link 2
  std::uint64_t size_guard = kDefaultSizeGuard;
  double chain_tol = 1e-6;
};

/// Two stitched point-to-point schemes: stage 1 synthesizes (X^n, U^n) at rate
/// r1 against a U-codebook, the relay then synthesizes Z^n from U^n at rate r2
/// against a Z-codebook. Reports the exact TV of (X^n, Z^n) to the iid target.
/// coupling_xuz has variables X, U, Z with X - U - Z within chain_tol.
ExperimentReport relay_scheme_experiment(const JointDistribution& q_xz,
                                         const JointDistribution& coupling_xuz,
                                         double r1, double r2,
                                         std::span<const unsigned> n_list,
                                         unsigned trials, std::uint64_t seed,
                                         const RelayOptions& options = {});

}  // namespace sccs
