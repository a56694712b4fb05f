#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sccs {

/// Bad call: empty subsets, unknown variable names, overlapping sets, ...
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operands with incompatible variable lists or alphabet sizes.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// A state space or index space exceeded its guard. Carries the required size.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, std::uint64_t required, std::uint64_t guard)
      : std::runtime_error(what + " (required " + std::to_string(required) +
                           ", guard " + std::to_string(guard) + ")"),
        required_(required),
        guard_(guard) {}
  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t guard() const noexcept { return guard_; }

 private:
  std::uint64_t required_;
  std::uint64_t guard_;
};

/// A Markov chain / marginal / functional constraint is violated beyond tolerance.
class ConstraintError : public std::runtime_error {
 public:
  explicit ConstraintError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown: negative information beyond round-off, invalid support ratio.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Optimizer failed to reach feasibility. Carries the best deviation seen.
class SearchError : public std::runtime_error {
 public:
  SearchError(const std::string& what, double best_deviation)
      : std::runtime_error(what + " (best deviation " + std::to_string(best_deviation) + ")"),
        best_deviation_(best_deviation) {}
  double best_deviation() const noexcept { return best_deviation_; }

 private:
  double best_deviation_;
};

/// Likelihood encoder saw a block with zero likelihood under every codeword.
class DegeneratePosteriorError : public std::runtime_error {
 public:
  explicit DegeneratePosteriorError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sccs
