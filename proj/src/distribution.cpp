#include "sccs/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace sccs {

namespace detail {

double clamp_information(double v, const char* what) {
  if (v < -kInfoClampTolerance)
    throw NumericError(std::string(what) + " came out " + std::to_string(v) +
                       " bits, below the round-off clamp");
  return v < 0.0 ? 0.0 : v;
}

double xlog2x(double p) noexcept { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace detail

// ---------------------------------------------------------------------------
// FiniteDistribution

FiniteDistribution::FiniteDistribution(std::vector<double> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) throw ArgumentError("distribution needs at least one symbol");
  NeumaierSum total;
  for (double p : mass_) {
    if (!(p >= 0.0)) throw ArgumentError("negative or NaN probability entry");
    total.add(p);
  }
  if (std::abs(total.value() - 1.0) > kProbSumTolerance)
    throw ArgumentError("probabilities sum to " + std::to_string(total.value()) +
                        ", not 1 within 1e-12");
}

FiniteDistribution FiniteDistribution::uniform(std::size_t card) {
  if (card == 0) throw ArgumentError("empty alphabet");
  return FiniteDistribution(std::vector<double>(card, 1.0 / static_cast<double>(card)));
}

FiniteDistribution FiniteDistribution::point_mass(std::size_t at, std::size_t card) {
  if (at >= card) throw ArgumentError("point mass outside alphabet");
  std::vector<double> m(card, 0.0);
  m[at] = 1.0;
  return FiniteDistribution(std::move(m));
}

double FiniteDistribution::entropy_bits() const {
  NeumaierSum h;
  for (double p : mass_) h.add(-detail::xlog2x(p));
  return detail::clamp_information(h.value(), "entropy");
}

double total_variation(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (p.size() != q.size())
    throw DimensionError("total variation between alphabets of size " +
                         std::to_string(p.size()) + " and " + std::to_string(q.size()));
  NeumaierSum s;
  for (std::size_t i = 0; i < p.size(); ++i) s.add(std::abs(p[i] - q[i]));
  return 0.5 * s.value();
}

// ---------------------------------------------------------------------------
// JointDistribution

void JointDistribution::init_layout(std::vector<Variable> vars) {
  if (vars.empty()) throw ArgumentError("joint distribution needs at least one variable");
  std::unordered_set<std::string> seen;
  for (const auto& v : vars) {
    if (v.name.empty()) throw ArgumentError("variable with empty name");
    if (v.card == 0) throw ArgumentError("variable '" + v.name + "' has empty alphabet");
    if (!seen.insert(v.name).second)
      throw ArgumentError("duplicate variable name '" + v.name + "'");
  }
  vars_ = std::move(vars);
  strides_.assign(vars_.size(), 1);
  unsigned __int128 total = 1;
  for (std::size_t i = vars_.size(); i-- > 0;) {
    strides_[i] = static_cast<Index>(total);
    total *= vars_[i].card;
    if (total > (static_cast<unsigned __int128>(1) << 62))
      throw CapacityError("joint state space does not fit in 62-bit indices",
                          UINT64_MAX, std::uint64_t{1} << 62);
  }
  total_states_ = static_cast<Index>(total);
}

void JointDistribution::validate_mass() const {
  NeumaierSum total;
  auto check = [&](double p) {
    if (!(p >= 0.0)) throw ArgumentError("negative or NaN probability entry");
    total.add(p);
  };
  if (dense_storage_) {
    for (double p : dense_) check(p);
  } else {
    for (const auto& [k, v] : sparse_) {
      if (k >= total_states_) throw ArgumentError("sparse index outside the state space");
      check(v);
    }
  }
  if (std::abs(total.value() - 1.0) > kProbSumTolerance)
    throw ArgumentError("joint probabilities sum to " + std::to_string(total.value()) +
                        ", not 1 within 1e-12");
}

JointDistribution JointDistribution::dense(std::vector<Variable> vars,
                                           std::vector<double> mass) {
  JointDistribution d;
  d.init_layout(std::move(vars));
  if (d.total_states_ > kDenseStateLimit)
    throw CapacityError("dense storage exceeds the 2^24-state limit; use sparse()",
                        d.total_states_, kDenseStateLimit);
  if (mass.size() != d.total_states_)
    throw DimensionError("mass vector has " + std::to_string(mass.size()) +
                         " entries for a " + std::to_string(d.total_states_) +
                         "-state space");
  d.dense_storage_ = true;
  d.dense_ = std::move(mass);
  d.validate_mass();
  return d;
}

JointDistribution JointDistribution::sparse(std::vector<Variable> vars,
                                            std::unordered_map<Index, double> mass) {
  JointDistribution d;
  d.init_layout(std::move(vars));
  d.dense_storage_ = false;
  d.sparse_ = std::move(mass);
  d.validate_mass();
  return d;
}

std::size_t JointDistribution::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return i;
  throw ArgumentError("unknown variable '" + name + "'");
}

bool JointDistribution::has_variable(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.name == name) return true;
  return false;
}

JointDistribution::Index JointDistribution::pack(std::span<const std::size_t> idx) const {
  if (idx.size() != vars_.size())
    throw DimensionError("index tuple arity " + std::to_string(idx.size()) +
                         " does not match " + std::to_string(vars_.size()) + " variables");
  Index linear = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= vars_[i].card)
      throw ArgumentError("symbol out of range for variable '" + vars_[i].name + "'");
    linear += idx[i] * strides_[i];
  }
  return linear;
}

void JointDistribution::unpack(Index linear, std::span<std::size_t> out) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    out[i] = static_cast<std::size_t>(linear / strides_[i]);
    linear %= strides_[i];
  }
}

double JointDistribution::prob(std::span<const std::size_t> idx) const {
  return prob_linear(pack(idx));
}

double JointDistribution::prob_linear(Index linear) const {
  if (dense_storage_) return dense_[linear];
  auto it = sparse_.find(linear);
  return it == sparse_.end() ? 0.0 : it->second;
}

JointDistribution::Index JointDistribution::support_size() const {
  Index n = 0;
  for_each([&](Index, double) { ++n; });
  return n;
}

JointDistribution JointDistribution::marginal(std::span<const std::string> names) const {
  if (names.empty()) throw ArgumentError("marginal over an empty variable set");
  std::vector<std::size_t> which(names.size());
  std::unordered_set<std::size_t> used;
  for (std::size_t i = 0; i < names.size(); ++i) {
    which[i] = var_index(std::string(names[i]));
    if (!used.insert(which[i]).second)
      throw ArgumentError("variable '" + std::string(names[i]) + "' listed twice");
  }
  std::vector<Variable> out_vars(names.size());
  unsigned __int128 out_total = 1;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out_vars[i] = vars_[which[i]];
    out_total *= out_vars[i].card;
  }
  std::vector<Index> out_strides(names.size(), 1);
  {
    Index s = 1;
    for (std::size_t i = names.size(); i-- > 0;) {
      out_strides[i] = s;
      s *= out_vars[i].card;
    }
  }
  const bool out_dense = out_total <= kDenseStateLimit;
  std::vector<double> acc_dense;
  std::unordered_map<Index, double> acc_sparse;
  if (out_dense) acc_dense.assign(static_cast<std::size_t>(out_total), 0.0);

  std::vector<std::size_t> idx(vars_.size());
  for_each([&](Index linear, double p) {
    unpack(linear, idx);
    Index o = 0;
    for (std::size_t i = 0; i < which.size(); ++i) o += idx[which[i]] * out_strides[i];
    if (out_dense)
      acc_dense[o] += p;
    else
      acc_sparse[o] += p;
  });
  return out_dense ? JointDistribution::dense(std::move(out_vars), std::move(acc_dense))
                   : JointDistribution::sparse(std::move(out_vars), std::move(acc_sparse));
}

JointDistribution JointDistribution::marginal(std::initializer_list<std::string> names) const {
  std::vector<std::string> v(names);
  return marginal(std::span<const std::string>(v));
}

double JointDistribution::entropy_all() const {
  NeumaierSum h;
  for_each([&](Index, double p) { h.add(-detail::xlog2x(p)); });
  return detail::clamp_information(h.value(), "entropy");
}

double JointDistribution::entropy(std::span<const std::string> names) const {
  if (names.empty()) throw ArgumentError("entropy of an empty variable set");
  if (names.size() == vars_.size()) {
    bool all = true;
    for (const auto& n : names)
      if (!has_variable(std::string(n))) all = false;
    if (all) return entropy_all();
  }
  return marginal(names).entropy_all();
}

double JointDistribution::entropy(std::initializer_list<std::string> names) const {
  std::vector<std::string> v(names);
  return entropy(std::span<const std::string>(v));
}

namespace {

void check_disjoint(std::span<const std::string> a, std::span<const std::string> b,
                    const char* what) {
  std::unordered_set<std::string> sa(a.begin(), a.end());
  for (const auto& n : b)
    if (sa.count(std::string(n)))
      throw ArgumentError(std::string(what) + ": variable sets overlap at '" +
                          std::string(n) + "'");
}

std::vector<std::string> concat(std::span<const std::string> a,
                                std::span<const std::string> b) {
  std::vector<std::string> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

double JointDistribution::mutual_information(std::span<const std::string> a,
                                             std::span<const std::string> b) const {
  if (a.empty() || b.empty()) throw ArgumentError("mutual information with an empty set");
  check_disjoint(a, b, "mutual_information");
  const auto ab = concat(a, b);
  const double v = entropy(a) + entropy(b) - entropy(std::span<const std::string>(ab));
  return detail::clamp_information(v, "mutual information");
}

double JointDistribution::mutual_information(std::initializer_list<std::string> a,
                                             std::initializer_list<std::string> b) const {
  std::vector<std::string> va(a), vb(b);
  return mutual_information(std::span<const std::string>(va),
                            std::span<const std::string>(vb));
}

double JointDistribution::conditional_mutual_information(
    std::span<const std::string> a, std::span<const std::string> b,
    std::span<const std::string> c) const {
  if (a.empty() || c.empty())
    throw ArgumentError("conditional mutual information with an empty end set");
  check_disjoint(a, b, "conditional_mutual_information");
  check_disjoint(b, c, "conditional_mutual_information");
  check_disjoint(a, c, "conditional_mutual_information");
  // I(A;C|B) = H(A,B) + H(C,B) - H(B) - H(A,B,C)
  const auto abv = concat(a, b);
  const auto cbv = concat(c, b);
  const auto abcv = concat(std::span<const std::string>(abv), c);
  double v = entropy(std::span<const std::string>(abv)) +
             entropy(std::span<const std::string>(cbv)) -
             entropy(std::span<const std::string>(abcv));
  if (!b.empty()) v -= entropy(b);
  return detail::clamp_information(v, "conditional mutual information");
}

double JointDistribution::conditional_mutual_information(
    std::initializer_list<std::string> a, std::initializer_list<std::string> b,
    std::initializer_list<std::string> c) const {
  std::vector<std::string> va(a), vb(b), vc(c);
  return conditional_mutual_information(std::span<const std::string>(va),
                                        std::span<const std::string>(vb),
                                        std::span<const std::string>(vc));
}

JointDistribution JointDistribution::product_extension(unsigned n,
                                                       std::uint64_t size_guard) const {
  if (n == 0) throw ArgumentError("product extension needs n >= 1");
  // required size: dense -> total_states^n; sparse -> support^n
  const unsigned __int128 base =
      dense_storage_ ? static_cast<unsigned __int128>(total_states_)
                     : static_cast<unsigned __int128>(support_size());
  unsigned __int128 required = 1;
  for (unsigned t = 0; t < n; ++t) {
    required *= base;
    if (required > size_guard)
      throw CapacityError("product extension exceeds the size guard",
                          required > UINT64_MAX ? UINT64_MAX
                                                : static_cast<std::uint64_t>(required),
                          size_guard);
  }

  std::vector<Variable> out_vars;
  out_vars.reserve(vars_.size() * n);
  for (unsigned t = 1; t <= n; ++t)
    for (const auto& v : vars_)
      out_vars.push_back({v.name + "@" + std::to_string(t), v.card});

  unsigned __int128 out_total = 1;
  for (const auto& v : out_vars) out_total *= v.card;
  const bool out_dense = out_total <= kDenseStateLimit;

  // collect base support once
  std::vector<std::pair<Index, double>> supp;
  for_each([&](Index i, double p) { supp.emplace_back(i, p); });

  std::vector<double> acc_dense;
  std::unordered_map<Index, double> acc_sparse;
  if (out_dense) acc_dense.assign(static_cast<std::size_t>(out_total), 0.0);

  std::vector<std::size_t> pick(n, 0);
  while (true) {
    double p = 1.0;
    Index linear = 0;
    for (unsigned t = 0; t < n; ++t) {
      p *= supp[pick[t]].second;
      linear = linear * total_states_ + supp[pick[t]].first;
    }
    if (out_dense)
      acc_dense[linear] = p;
    else
      acc_sparse[linear] = p;
    unsigned t = n;
    while (t > 0) {
      --t;
      if (++pick[t] < supp.size()) break;
      pick[t] = 0;
      if (t == 0) {
        return out_dense
                   ? JointDistribution::dense(std::move(out_vars), std::move(acc_dense))
                   : JointDistribution::sparse(std::move(out_vars), std::move(acc_sparse));
      }
    }
  }
}

JointDistribution JointDistribution::renamed(const std::vector<std::string>& new_names) const {
  if (new_names.size() != vars_.size())
    throw DimensionError("renamed() needs one name per variable");
  JointDistribution d(*this);
  std::vector<Variable> vars = vars_;
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i].name = new_names[i];
  d.vars_.clear();
  d.init_layout(std::move(vars));
  return d;
}

double total_variation(const JointDistribution& p, const JointDistribution& q) {
  if (p.variables() != q.variables())
    throw DimensionError("total variation between joints with different variables");
  if (p.is_dense() && q.is_dense()) {
    NeumaierSum s;
    for (JointDistribution::Index i = 0; i < p.total_states(); ++i)
      s.add(std::abs(p.prob_linear(i) - q.prob_linear(i)));
    return 0.5 * s.value();
  }
  NeumaierSum s;
  p.for_each([&](JointDistribution::Index i, double pp) {
    s.add(std::abs(pp - q.prob_linear(i)));
  });
  q.for_each([&](JointDistribution::Index i, double qq) {
    if (p.prob_linear(i) == 0.0) s.add(qq);
  });
  return 0.5 * s.value();
}

MarkovCheck is_markov(const JointDistribution& p, const MarkovChain& chain, double tol) {
  const double dev = p.conditional_mutual_information(
      std::span<const std::string>(chain.a), std::span<const std::string>(chain.b),
      std::span<const std::string>(chain.c));
  return {dev <= tol, dev};
}

FiniteDistribution empirical_distribution(std::span<const std::size_t> sequence,
                                          std::size_t alphabet_size) {
  if (sequence.empty()) throw ArgumentError("empirical distribution of an empty sequence");
  if (alphabet_size == 0) throw ArgumentError("empty alphabet");
  std::vector<double> counts(alphabet_size, 0.0);
  for (std::size_t s : sequence) {
    if (s >= alphabet_size) throw ArgumentError("symbol out of range");
    counts[s] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(sequence.size());
  return FiniteDistribution(std::move(counts));
}

// ---------------------------------------------------------------------------
// Channel

Channel::Channel(std::size_t input_alphabet, std::vector<Variable> output_variables,
                 std::vector<FiniteDistribution> rows)
    : outputs_(std::move(output_variables)), rows_(std::move(rows)) {
  if (input_alphabet == 0) throw ArgumentError("channel with empty input alphabet");
  if (rows_.size() != input_alphabet)
    throw DimensionError("channel needs one row per input symbol");
  output_states_ = 1;
  for (const auto& v : outputs_) {
    if (v.card == 0) throw ArgumentError("channel output with empty alphabet");
    output_states_ *= v.card;
  }
  for (const auto& r : rows_)
    if (r.size() != output_states_)
      throw DimensionError("channel row size does not match the output state space");
  valid_.assign(rows_.size(), true);
}

Channel Channel::conditional(const JointDistribution& joint,
                             std::span<const std::string> given,
                             std::span<const std::string> outputs) {
  if (given.empty() || outputs.empty())
    throw ArgumentError("conditional() needs nonempty given and output sets");
  check_disjoint(given, outputs, "conditional");
  const auto all = concat(given, outputs);
  const JointDistribution m = joint.marginal(std::span<const std::string>(all));

  std::size_t in_states = 1;
  for (std::size_t i = 0; i < given.size(); ++i) in_states *= m.variables()[i].card;
  std::size_t out_states = m.total_states() / in_states;

  std::vector<Variable> out_vars(m.variables().begin() + given.size(),
                                 m.variables().end());
  std::vector<FiniteDistribution> rows;
  std::vector<bool> valid(in_states, true);
  rows.reserve(in_states);
  for (std::size_t g = 0; g < in_states; ++g) {
    NeumaierSum total;
    for (std::size_t o = 0; o < out_states; ++o)
      total.add(m.prob_linear(static_cast<JointDistribution::Index>(g) * out_states + o));
    const double z = total.value();
    if (z <= 0.0) {
      valid[g] = false;
      rows.push_back(FiniteDistribution::uniform(out_states));
      continue;
    }
    std::vector<double> row(out_states);
    for (std::size_t o = 0; o < out_states; ++o)
      row[o] =
          m.prob_linear(static_cast<JointDistribution::Index>(g) * out_states + o) / z;
    // renormalize exactly so each row passes pmf validation
    double s = 0.0;
    for (double v : row) s += v;
    for (double& v : row) v /= s;
    rows.push_back(FiniteDistribution(std::move(row)));
  }
  Channel ch(in_states, std::move(out_vars), std::move(rows));
  ch.valid_ = std::move(valid);
  return ch;
}

Channel Channel::conditional(const JointDistribution& joint,
                             std::initializer_list<std::string> given,
                             std::initializer_list<std::string> outputs) {
  std::vector<std::string> g(given), o(outputs);
  return conditional(joint, std::span<const std::string>(g),
                     std::span<const std::string>(o));
}

}  // namespace sccs
