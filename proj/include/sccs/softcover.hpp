#pragma once

#include <span>

#include "sccs/distribution.hpp"
#include "sccs/report.hpp"

namespace sccs {

/// Single-layer soft-covering run: for each (n, trial), draw ceil(2^{nR})
/// codewords iid from Q_U, push the uniform codeword mixture through Q_{X|U}
/// and record the exact TV to the iid target. q_ux has variables U, X.
ExperimentReport softcover_experiment(const JointDistribution& q_ux, double rate,
                                      std::span<const unsigned> n_list, unsigned trials,
                                      std::uint64_t seed,
                                      std::uint64_t size_guard = kDefaultSizeGuard);

/// Two-layer variant: base words from Q_V, per-parent words through Q_{U|V},
/// mixture through Q_{X|UV}. q_xuv has variables U, V, X.
ExperimentReport superposition_softcover_experiment(
    const JointDistribution& q_xuv, double rate_a, double rate_b,
    std::span<const unsigned> n_list, unsigned trials, std::uint64_t seed,
    std::uint64_t size_guard = kDefaultSizeGuard);

}  // namespace sccs
