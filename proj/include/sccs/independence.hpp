#pragma once

#include <vector>

#include "sccs/cascade.hpp"

namespace sccs {

struct IndependenceTestResult {
  bool conclusive = false;   // false on degenerate contingency tables
  bool reject = false;       // reject independence at the given significance
  double g_statistic = 0.0;  // 2 sum O ln(O/E)
  double dof = 0.0;
  double p_value = 1.0;
  std::size_t message_cells = 0;
  std::size_t sequence_cells = 0;
  std::size_t samples = 0;
};

/// G-test of independence between the message pair (m1, m2) and the sequence
/// triple (x^n, y^n, z^n) on plug-in empirical counts.
IndependenceTestResult eavesdropper_independence_test(
    const std::vector<CascadeSample>& samples, double significance);

/// Upper-tail probability of the chi-square distribution with k dof.
double chi_square_sf(double x, double k);

}  // namespace sccs
