#pragma once

#include <string>
#include <vector>

#include "sccs/errors.hpp"

namespace sccs {

/// A point on a rate surface: common-randomness rate plus communication rates.
struct RatePoint {
  double r0 = 0.0;
  std::vector<double> r;

  RatePoint() = default;
  RatePoint(double r0_, std::vector<double> r_);

  std::size_t dim() const noexcept { return 1 + r.size(); }
  std::vector<double> coords() const;
};

struct Corner {
  std::string generator;        // e.g. "a=2;b=1"
  std::vector<double> x;        // coordinates in axis order
};

struct HullFacet {
  std::vector<std::size_t> vertices;  // indices into corners
  std::vector<double> normal;         // outward
  double offset = 0.0;                // normal . x <= offset inside
};

/// Corners of an achievable-rate surface plus their convex hull.
struct RegionFrontier {
  std::vector<std::string> axes;   // e.g. {"R0","R1","R2"} or {"R1","R2"}
  std::vector<Corner> raw;         // full generator enumeration, in generator order
  std::vector<Corner> corners;     // after dominated-corner removal
  std::size_t raw_corner_count = 0;
  int hull_dimension = 0;          // affine dimension of the corner cloud
  std::vector<HullFacet> facets;   // over `corners`, full-dimensional hulls only
};

/// Uniform assignment of 3 of m tasks to the cascade nodes.
RegionFrontier task_region(unsigned m);

/// Relay network corners for the m-symbol scatter channel, plus comparison data.
struct ScatterRelayRegion {
  RegionFrontier frontier;      // axes {R1,R2}
  double empirical_rate = 0.0;  // log2(m/(m-1)), both rates
  double gap_at_max_a = 0.0;    // R2 - R2_emp at a = m-1
  double min_sum_rate = 0.0;    // over corners
};
ScatterRelayRegion scatter_relay_region(unsigned m);

/// True iff p coordinatewise-dominates some convex combination of the corners.
bool point_in_region(const std::vector<double>& p, const RegionFrontier& f,
                     double tol = 1e-9);
bool point_in_region(const RatePoint& p, const RegionFrontier& f, double tol = 1e-9);

/// True iff x lies inside conv(corners) within tol (used by invariants/tests).
bool hull_contains(const std::vector<double>& x, const RegionFrontier& f,
                   double tol = 1e-9);

namespace detail {
/// Remove strictly dominated and duplicate corners (\\le all coords, < one).
std::vector<Corner> remove_dominated(std::vector<Corner> corners);
/// Compute affine dimension and, when full-dimensional in 2D/3D, hull facets.
void build_hull(RegionFrontier& f, double collinear_tol = 1e-9);
}  // namespace detail

}  // namespace sccs
