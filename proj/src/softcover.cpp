#include "sccs/softcover.hpp"

#include <cmath>
#include <unordered_map>

#include "sccs/codebook.hpp"
#include "sccs/rng.hpp"

namespace sccs {

namespace {

std::uint64_t checked_pow(std::uint64_t base, unsigned n, const char* what) {
  unsigned __int128 p = 1;
  for (unsigned t = 0; t < n; ++t) {
    p *= base;
    if (p > (static_cast<unsigned __int128>(1) << 62))
      throw CapacityError(std::string(what) + " block space overflows 62-bit indices",
                          UINT64_MAX, std::uint64_t{1} << 62);
  }
  return static_cast<std::uint64_t>(p);
}

std::vector<double> tensor_power(const std::vector<double>& letter, unsigned n) {
  std::vector<double> out = {1.0};
  for (unsigned t = 0; t < n; ++t) {
    std::vector<double> next(out.size() * letter.size());
    std::size_t i = 0;
    for (double o : out)
      for (double l : letter) next[i++] = o * l;
    out = std::move(next);
  }
  return out;
}

/// Distinct codewords in first-occurrence order with multiplicities.
struct WordPool {
  std::vector<std::vector<std::uint32_t>> words;
  std::vector<double> weight;
  std::unordered_map<std::uint64_t, std::size_t> slot;  // packed word -> index

  void add(const std::vector<std::uint32_t>& w, std::size_t card) {
    std::uint64_t key = 0;
    for (auto s : w) key = key * card + s;
    auto [it, fresh] = slot.try_emplace(key, words.size());
    if (fresh) {
      words.push_back(w);
      weight.push_back(1.0);
    } else {
      weight[it->second] += 1.0;
    }
  }
};

double mixture_tv(const WordPool& pool, double divisor, const Channel& x_channel,
                  const std::vector<double>& qx_letter,
                  const std::vector<std::vector<std::size_t>>& in_index, unsigned n) {
  // push each distinct word through the channel, accumulate the mixture
  const std::size_t cx = qx_letter.size();
  const std::uint64_t cxn = checked_pow(cx, n, "X");
  std::vector<double> mix(cxn, 0.0);
  for (std::size_t w = 0; w < pool.words.size(); ++w) {
    std::vector<double> acc = {pool.weight[w] / divisor};
    for (unsigned t = 0; t < n; ++t) {
      const auto& row = x_channel.row(in_index[w][t]);
      std::vector<double> next(acc.size() * cx);
      std::size_t i = 0;
      for (double a : acc)
        for (std::size_t x = 0; x < cx; ++x) next[i++] = a * row[x];
      acc = std::move(next);
    }
    for (std::uint64_t i = 0; i < cxn; ++i) mix[i] += acc[i];
  }
  const std::vector<double> ref = tensor_power(qx_letter, n);
  NeumaierSum tv;
  for (std::uint64_t i = 0; i < cxn; ++i) tv.add(std::abs(mix[i] - ref[i]));
  return 0.5 * tv.value();
}

}  // namespace

ExperimentReport softcover_experiment(const JointDistribution& q_ux, double rate,
                                      std::span<const unsigned> n_list, unsigned trials,
                                      std::uint64_t seed, std::uint64_t size_guard) {
  if (trials == 0) throw ArgumentError("soft-covering needs at least one trial");
  if (!q_ux.has_variable("U") || !q_ux.has_variable("X"))
    throw ArgumentError("soft-covering joint needs variables U and X");
  const std::size_t cu = q_ux.variables()[q_ux.var_index("U")].card;
  const std::size_t cx = q_ux.variables()[q_ux.var_index("X")].card;
  const auto qu = q_ux.marginal({"U"});
  std::vector<double> qu_row(cu);
  for (std::size_t u = 0; u < cu; ++u) qu_row[u] = qu.prob_linear(u);
  const Channel qx_u = Channel::conditional(q_ux, {"U"}, {"X"});
  const auto qxm = q_ux.marginal({"X"});
  std::vector<double> qx_letter(cx);
  for (std::size_t x = 0; x < cx; ++x) qx_letter[x] = qxm.prob_linear(x);

  ExperimentReport rep;
  rep.kind = "softcover-single";
  rep.extra_columns = {"codewords", "distinct"};
  for (unsigned n : n_list) {
    const std::uint64_t mwords = rate_index_count(rate, n);
    const std::uint64_t cxn = checked_pow(cx, n, "X");
    (void)checked_pow(cu, n, "U");
    const unsigned __int128 need =
        static_cast<unsigned __int128>(mwords) * n + cxn;
    if (need > size_guard)
      throw CapacityError("soft-covering run exceeds the size guard",
                          need > UINT64_MAX ? UINT64_MAX
                                            : static_cast<std::uint64_t>(need),
                          size_guard);
    for (unsigned trial = 0; trial < trials; ++trial) {
      WordPool pool;
      std::vector<std::uint32_t> w(n);
      for (std::uint64_t m = 0; m < mwords; ++m) {
        StreamRng rng(seed, {kStreamSoftcoverWord, n, trial, m});
        for (unsigned t = 0; t < n; ++t)
          w[t] = static_cast<std::uint32_t>(
              sample_categorical(qu_row, rng.uniform(t)));
        pool.add(w, cu);
      }
      std::vector<std::vector<std::size_t>> in_index(pool.words.size());
      for (std::size_t i = 0; i < pool.words.size(); ++i) {
        in_index[i].resize(n);
        for (unsigned t = 0; t < n; ++t) in_index[i][t] = pool.words[i][t];
      }
      const double tv = mixture_tv(pool, static_cast<double>(mwords), qx_u,
                                   qx_letter, in_index, n);
      ExperimentRow row;
      row.seed = seed;
      row.n = n;
      row.trial = trial;
      row.tv = tv;
      row.extra = {{"codewords", static_cast<double>(mwords)},
                   {"distinct", static_cast<double>(pool.words.size())}};
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

ExperimentReport superposition_softcover_experiment(
    const JointDistribution& q_xuv, double rate_a, double rate_b,
    std::span<const unsigned> n_list, unsigned trials, std::uint64_t seed,
    std::uint64_t size_guard) {
  if (trials == 0) throw ArgumentError("soft-covering needs at least one trial");
  for (const char* v : {"U", "V", "X"})
    if (!q_xuv.has_variable(v))
      throw ArgumentError("superposition joint needs variables U, V and X");
  const std::size_t cu = q_xuv.variables()[q_xuv.var_index("U")].card;
  const std::size_t cv = q_xuv.variables()[q_xuv.var_index("V")].card;
  const std::size_t cx = q_xuv.variables()[q_xuv.var_index("X")].card;
  const auto qv = q_xuv.marginal({"V"});
  std::vector<double> qv_row(cv);
  for (std::size_t v = 0; v < cv; ++v) qv_row[v] = qv.prob_linear(v);
  const Channel qu_v = Channel::conditional(q_xuv, {"V"}, {"U"});
  const Channel qx_uv = Channel::conditional(q_xuv, {"U", "V"}, {"X"});
  const auto qxm = q_xuv.marginal({"X"});
  std::vector<double> qx_letter(cx);
  for (std::size_t x = 0; x < cx; ++x) qx_letter[x] = qxm.prob_linear(x);

  ExperimentReport rep;
  rep.kind = "softcover-superposition";
  rep.extra_columns = {"codewords", "distinct", "base_words"};
  for (unsigned n : n_list) {
    const std::uint64_t na = rate_index_count(rate_a, n);
    const std::uint64_t nb = rate_index_count(rate_b, n);
    const std::uint64_t cxn = checked_pow(cx, n, "X");
    (void)checked_pow(cu * cv, n, "UV");
    const unsigned __int128 need =
        static_cast<unsigned __int128>(na) * nb * n + nb * n + cxn;
    if (need > size_guard)
      throw CapacityError("soft-covering run exceeds the size guard",
                          need > UINT64_MAX ? UINT64_MAX
                                            : static_cast<std::uint64_t>(need),
                          size_guard);
    for (unsigned trial = 0; trial < trials; ++trial) {
      // base layer
      std::vector<std::vector<std::uint32_t>> vwords(nb,
                                                     std::vector<std::uint32_t>(n));
      for (std::uint64_t mb = 0; mb < nb; ++mb) {
        StreamRng rng(seed, {kStreamSoftcoverBaseWord, n, trial, mb});
        for (unsigned t = 0; t < n; ++t)
          vwords[mb][t] = static_cast<std::uint32_t>(
              sample_categorical(qv_row, rng.uniform(t)));
      }
      // upper layer, word index mb*na + ma matches the single-layer stream,
      // so a degenerate base (|V| = 1) collapses to the single-layer run
      WordPool pool;  // over (u,v) pairs
      std::vector<std::uint32_t> w(n);
      for (std::uint64_t mb = 0; mb < nb; ++mb)
        for (std::uint64_t ma = 0; ma < na; ++ma) {
          StreamRng rng(seed, {kStreamSoftcoverWord, n, trial, mb * na + ma});
          for (unsigned t = 0; t < n; ++t) {
            const auto& row = qu_v.row(vwords[mb][t]);
            const std::size_t u = sample_categorical(row.mass(), rng.uniform(t));
            w[t] = static_cast<std::uint32_t>(u * cv + vwords[mb][t]);
          }
          pool.add(w, cu * cv);
        }
      std::vector<std::vector<std::size_t>> in_index(pool.words.size());
      for (std::size_t i = 0; i < pool.words.size(); ++i) {
        in_index[i].resize(n);
        for (unsigned t = 0; t < n; ++t) in_index[i][t] = pool.words[i][t];
      }
      const double tv = mixture_tv(pool, static_cast<double>(na * nb), qx_uv,
                                   qx_letter, in_index, n);
      ExperimentRow row;
      row.seed = seed;
      row.n = n;
      row.trial = trial;
      row.tv = tv;
      row.extra = {{"codewords", static_cast<double>(na * nb)},
                   {"distinct", static_cast<double>(pool.words.size())},
                   {"base_words", static_cast<double>(nb)}};
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

}  // namespace sccs
