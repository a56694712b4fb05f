#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sccs/errors.hpp"

namespace sccs {

constexpr double kProbSumTolerance = 1e-12;
constexpr double kInfoClampTolerance = 1e-9;
constexpr std::uint64_t kDenseStateLimit = std::uint64_t{1} << 24;
constexpr std::uint64_t kDefaultSizeGuard = 100000000;  // weighted entries

/// Compensated (Neumaier) summation; keeps long reductions near 1 ulp.
class NeumaierSum {
 public:
  void add(double x) noexcept {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Variable {
  std::string name;
  std::size_t card = 0;
  friend bool operator==(const Variable&, const Variable&) = default;
};

/// A pmf over an indexed finite alphabet. Entries are validated at construction:
/// nonnegative and summing to 1 within kProbSumTolerance.
class FiniteDistribution {
 public:
  explicit FiniteDistribution(std::vector<double> mass);
  static FiniteDistribution uniform(std::size_t card);
  static FiniteDistribution point_mass(std::size_t at, std::size_t card);

  std::size_t size() const noexcept { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_.at(i); }
  const std::vector<double>& mass() const noexcept { return mass_; }
  double entropy_bits() const;

 private:
  std::vector<double> mass_;
};

double total_variation(const FiniteDistribution& p, const FiniteDistribution& q);

/// Multiway pmf over a named list of finite variables. Dense storage up to
/// kDenseStateLimit states, sparse map above.
class JointDistribution {
 public:
  using Index = std::uint64_t;

  static JointDistribution dense(std::vector<Variable> vars, std::vector<double> mass);
  static JointDistribution sparse(std::vector<Variable> vars,
                                  std::unordered_map<Index, double> mass);

  const std::vector<Variable>& variables() const noexcept { return vars_; }
  std::size_t arity() const noexcept { return vars_.size(); }
  Index total_states() const noexcept { return total_states_; }
  bool is_dense() const noexcept { return dense_storage_; }
  std::size_t var_index(const std::string& name) const;
  bool has_variable(const std::string& name) const;

  Index pack(std::span<const std::size_t> idx) const;
  void unpack(Index linear, std::span<std::size_t> out) const;

  double prob(std::span<const std::size_t> idx) const;
  double prob_linear(Index linear) const;

  /// Visit all nonzero entries as (linear index, probability).
  template <class F>
  void for_each(F&& f) const {
    if (dense_storage_) {
      for (Index i = 0; i < dense_.size(); ++i)
        if (dense_[i] > 0.0) f(i, dense_[i]);
    } else {
      for (const auto& [k, v] : sparse_)
        if (v > 0.0) f(k, v);
    }
  }

  Index support_size() const;

  JointDistribution marginal(std::span<const std::string> names) const;
  JointDistribution marginal(std::initializer_list<std::string> names) const;

  double entropy(std::span<const std::string> names) const;
  double entropy(std::initializer_list<std::string> names) const;
  double entropy_all() const;

  double mutual_information(std::span<const std::string> a,
                            std::span<const std::string> b) const;
  double mutual_information(std::initializer_list<std::string> a,
                            std::initializer_list<std::string> b) const;

  /// I(A;C|B): the middle argument conditions, matching the chain A - B - C.
  double conditional_mutual_information(std::span<const std::string> a,
                                        std::span<const std::string> b,
                                        std::span<const std::string> c) const;
  double conditional_mutual_information(std::initializer_list<std::string> a,
                                        std::initializer_list<std::string> b,
                                        std::initializer_list<std::string> c) const;

  JointDistribution product_extension(unsigned n,
                                      std::uint64_t size_guard = kDefaultSizeGuard) const;

  JointDistribution renamed(const std::vector<std::string>& new_names) const;

 private:
  JointDistribution() = default;
  void init_layout(std::vector<Variable> vars);
  void validate_mass() const;

  std::vector<Variable> vars_;
  std::vector<Index> strides_;
  Index total_states_ = 1;
  bool dense_storage_ = true;
  std::vector<double> dense_;
  std::unordered_map<Index, double> sparse_;
};

double total_variation(const JointDistribution& p, const JointDistribution& q);

struct MarkovChain {
  std::vector<std::string> a, b, c;  // chain A - B - C
};

struct MarkovCheck {
  bool holds = false;
  double deviation = 0.0;  // I(A;C|B)
};

MarkovCheck is_markov(const JointDistribution& p, const MarkovChain& chain, double tol);

FiniteDistribution empirical_distribution(std::span<const std::size_t> sequence,
                                          std::size_t alphabet_size);

/// Memoryless channel: one pmf row per (flattened) input symbol.
class Channel {
 public:
  Channel(std::size_t input_alphabet, std::vector<Variable> output_variables,
          std::vector<FiniteDistribution> rows);

  /// Conditional of `outputs` given `given`, rows indexed row-major in the
  /// order of `given`. Rows conditioned on zero-mass events are uniform and
  /// flagged invalid.
  static Channel conditional(const JointDistribution& joint,
                             std::span<const std::string> given,
                             std::span<const std::string> outputs);
  static Channel conditional(const JointDistribution& joint,
                             std::initializer_list<std::string> given,
                             std::initializer_list<std::string> outputs);

  std::size_t input_alphabet() const noexcept { return rows_.size(); }
  const std::vector<Variable>& output_variables() const noexcept { return outputs_; }
  std::size_t output_states() const noexcept { return output_states_; }
  const FiniteDistribution& row(std::size_t i) const { return rows_.at(i); }
  bool row_valid(std::size_t i) const { return valid_.at(i); }

 private:
  std::vector<Variable> outputs_;
  std::size_t output_states_ = 1;
  std::vector<FiniteDistribution> rows_;
  std::vector<bool> valid_;
};

namespace detail {
/// Clamp small negative information values to zero; aborts on real negatives.
double clamp_information(double v, const char* what);
double xlog2x(double p) noexcept;
}  // namespace detail

}  // namespace sccs
