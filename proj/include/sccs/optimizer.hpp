#pragma once

#include <array>
#include <utility>

#include "sccs/coupling.hpp"

namespace sccs {

struct OptimizerConfig {
  unsigned restarts = 12;        // restarts per structural stage
  unsigned grid_resolution = 7;  // annealing iterations per ladder rung x10
  unsigned max_iterations = 4000;  // final feasibility-polish budget
  std::uint64_t seed = 1;
  double tolerance = 1e-6;  // feasibility tolerance on constraint deviations

  void validate() const {
    if (restarts == 0 || grid_resolution == 0 || max_iterations == 0 ||
        !(tolerance > 0))
      throw ArgumentError("optimizer configuration fields must be positive");
  }
};

struct OptimizeResult {
  AuxiliaryCoupling coupling;
  RatePoint rates;
  double objective = 0.0;
  MembershipReport membership;
};

/// Heuristic multi-restart search for the best coupling in D (or D' when
/// restrict_to_dprime) under a weighted rate objective. The result certifies
/// an upper bound on the true optimum; constraint deviations are reported.
OptimizeResult minimize_rates(const JointDistribution& target,
                              const std::array<double, 3>& weights,
                              std::pair<unsigned, unsigned> cards,
                              bool restrict_to_dprime, const OptimizerConfig& cfg);

/// min I(X,Y;U) over U making X and Y conditionally independent.
double wyner_common_information(const JointDistribution& q_xy, unsigned card_u,
                                const OptimizerConfig& cfg);

/// min I(X,Y,Z;U) over U making X, Y and Z conditionally independent.
double triple_wyner(const JointDistribution& q_xyz, unsigned card_u,
                    const OptimizerConfig& cfg);

/// min I(X,Y,Z;U,V) over the two cascade chains; cards defaults to (2, 10).
double cascade_common_information(const JointDistribution& q_xyz,
                                  const OptimizerConfig& cfg);
double cascade_common_information(const JointDistribution& q_xyz,
                                  std::pair<unsigned, unsigned> cards,
                                  const OptimizerConfig& cfg);

}  // namespace sccs
