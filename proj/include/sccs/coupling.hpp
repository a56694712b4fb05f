#pragma once

#include "sccs/distribution.hpp"
#include "sccs/frontier.hpp"

namespace sccs {

struct MembershipReport {
  bool marginal_ok = false;
  double marginal_dev = 0.0;  // TV between the (X,Y,Z) marginal and the target
  double chain1_dev = 0.0;    // I(X;Y|U,V)
  double chain2_dev = 0.0;    // I(X,Y,U;Z|V)
  bool cardinality_ok = false;
  bool functional_v_of_u = false;  // H(V|U) <= tol
};

/// A joint over (X,Y,Z,U,V) tied to a synthesis target over (X,Y,Z).
/// Construction verifies the marginal match and the cardinality bounds
/// |V| <= |X||Y||Z| + slack, |U| <= |X||Y||Z||V| + slack.
class AuxiliaryCoupling {
 public:
  AuxiliaryCoupling(JointDistribution joint, JointDistribution target,
                    double marginal_tol = 1e-9, unsigned cardinality_slack = 3);

  const JointDistribution& joint() const noexcept { return joint_; }
  const JointDistribution& target() const noexcept { return target_; }
  double marginal_tolerance() const noexcept { return marginal_tol_; }
  unsigned cardinality_slack() const noexcept { return slack_; }

 private:
  JointDistribution joint_;
  JointDistribution target_;
  double marginal_tol_;
  unsigned slack_;
};

/// Minimal certified rates of a coupling: (I(X,Y,Z;U,V), I(X;U,V), I(X;V)).
RatePoint rate_triple(const AuxiliaryCoupling& aux);

MembershipReport check_membership_D(const AuxiliaryCoupling& aux, double tol);

enum class VariationRegion { kThm2Inner, kThm2Outer, kThm3, kThm4Relay };

struct VariationRates {
  RatePoint point;          // (R0, R1, R2); relay carries (R1,R2) with r0 = 0
  double sum_r1_r0 = 0.0;   // R1 + R0 floor, when the region has one
  bool has_sum = false;
};

/// Constraint right-hand sides of the requested region at the given coupling.
/// Thm2/Thm3 expect a joint over (X,Y,Z,U,V) in D; the relay expects (X,Z,U)
/// with X - U - Z. Chain violations beyond tol raise ConstraintError.
VariationRates variation_rates(const JointDistribution& joint, VariationRegion which,
                               double tol = 1e-6, unsigned cardinality_slack = 3);

/// Rate vector (R0, R1, ..., R_{m-1}) for an m-node coupling over
/// (X, Y1..Y_{m-1}, U1..U_{m-1}) satisfying the D_m chains, the nesting
/// H(U_i^{m-1}|U_i) = 0 and the cardinality bounds, all within tol.
std::vector<double> general_cascade_rates(const JointDistribution& joint, unsigned m,
                                          double tol = 1e-6);

// ---------------------------------------------------------------------------
// Preset targets and couplings

/// (X,Y,Z) uniform over ordered distinct triples from [m] (task assignment).
JointDistribution task_target(unsigned m);

/// (X,Z) uniform over ordered distinct pairs from [m] (scatter channel).
JointDistribution scatter_target(unsigned m);

/// X uniform binary, Y = BSC(p)(X), Z = BSC(q)(Y).
JointDistribution binary_chain_target(double p, double q);

/// The canonical coupling (U,V) = (Y,Z) of a 3-variable target.
JointDistribution coupling_from_yz(const JointDistribution& target);

/// All-soft binary coupling: V uniform, U = BSC(e)(V), X = BSC(a)(V),
/// Y = BSC(f)(U), Z = BSC(b)(V). Lies in D by construction.
JointDistribution diamond_coupling(double a, double b, double e, double f);

/// m-node coupling with U_i = (Y_i, ..., Y_{m-1}); the target has variables
/// X, Y1..Y_{m-1}. Generalizes (U,V) = (Y,Z).
JointDistribution tail_coupling(const JointDistribution& target);

}  // namespace sccs
