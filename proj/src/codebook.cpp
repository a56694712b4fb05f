#include "sccs/codebook.hpp"

#include <cmath>
#include <functional>

#include "sccs/rng.hpp"

namespace sccs {

std::uint64_t rate_index_count(double rate_bits, unsigned n) {
  if (rate_bits < -1e-12) throw ArgumentError("negative rate");
  if (rate_bits < 0) rate_bits = 0;
  const double x = std::exp2(static_cast<double>(n) * rate_bits);
  if (x > 9e15) throw CapacityError("index count overflows", UINT64_MAX, 9000000000000000ULL);
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x))
    return static_cast<std::uint64_t>(r) < 1 ? 1 : static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

SuperpositionCodebook sample_codebook(const AuxiliaryCoupling& coupling, unsigned n,
                                      CodebookRates rates, std::uint64_t seed,
                                      std::uint64_t index_guard) {
  if (n == 0) throw ArgumentError("block length must be positive");
  if (rates.r1 < rates.r2 - 1e-12)
    throw ArgumentError("superposition codebook needs R1 >= R2");
  if (rates.r2 < -1e-12 || rates.r0 < -1e-12)
    throw ArgumentError("rates must be nonnegative");

  SuperpositionCodebook cb;
  cb.n = n;
  cb.rates = rates;
  cb.seed = seed;
  cb.nk = rate_index_count(rates.r0, n);
  cb.nb = rate_index_count(rates.r2, n);
  cb.na = rate_index_count(rates.r1 - rates.r2, n);

  const auto& joint = coupling.joint();
  cb.u_card = joint.variables()[joint.var_index("U")].card;
  cb.v_card = joint.variables()[joint.var_index("V")].card;

  const unsigned __int128 symbols =
      static_cast<unsigned __int128>(cb.nb) * cb.nk * (1 + cb.na) * n;
  if (symbols > index_guard)
    throw CapacityError("codebook exceeds the index guard",
                        symbols > UINT64_MAX ? UINT64_MAX
                                             : static_cast<std::uint64_t>(symbols),
                        index_guard);

  const auto qv = joint.marginal({"V"});
  std::vector<double> qv_row(cb.v_card);
  for (std::size_t v = 0; v < cb.v_card; ++v) qv_row[v] = qv.prob_linear(v);
  const Channel qu_v = Channel::conditional(joint, {"V"}, {"U"});

  cb.v_words.resize(cb.nb * cb.nk * n);
  for (std::size_t mb = 0; mb < cb.nb; ++mb)
    for (std::size_t k = 0; k < cb.nk; ++k) {
      StreamRng rng(seed, {kStreamCodebook, 0, k, mb});
      for (unsigned t = 0; t < n; ++t)
        cb.v_words[(mb * cb.nk + k) * n + t] =
            static_cast<std::uint32_t>(sample_categorical(qv_row, rng.uniform(t)));
    }

  cb.u_words.resize(cb.na * cb.nb * cb.nk * n);
  for (std::size_t ma = 0; ma < cb.na; ++ma)
    for (std::size_t mb = 0; mb < cb.nb; ++mb)
      for (std::size_t k = 0; k < cb.nk; ++k) {
        StreamRng rng(seed, {kStreamCodebook, 1, k, mb, ma});
        const auto vw = cb.v_word(mb, k);
        for (unsigned t = 0; t < n; ++t) {
          const auto& row = qu_v.row(vw[t]);
          cb.u_words[((ma * cb.nb + mb) * cb.nk + k) * n + t] =
              static_cast<std::uint32_t>(sample_categorical(row.mass(), rng.uniform(t)));
        }
      }
  return cb;
}

std::span<const std::uint32_t> LayeredCodebook::word(std::size_t l,
                                                     std::span<const std::size_t> msgs,
                                                     std::size_t k) const {
  // flat index: (((m_l * count_{l-1} + m_{l-1}) * ...) * count_0 + m_0) * nk + k
  std::size_t idx = msgs[l];
  for (std::size_t j = l; j-- > 0;) idx = idx * counts[j] + msgs[j];
  idx = idx * nk + k;
  return {words[l].data() + idx * n, n};
}

LayeredCodebook sample_layered_codebook(const JointDistribution& coupling_joint,
                                        unsigned m, unsigned n, double r0,
                                        std::span<const double> comm_rates,
                                        std::uint64_t seed,
                                        std::uint64_t index_guard) {
  if (m < 3) throw ArgumentError("layered codebook needs m >= 3 nodes");
  if (n == 0) throw ArgumentError("block length must be positive");
  const std::size_t L = m - 1;
  if (comm_rates.size() != L)
    throw ArgumentError("need one communication rate per cascade link");
  for (std::size_t i = 0; i + 1 < L; ++i)
    if (comm_rates[i] < comm_rates[i + 1] - 1e-12)
      throw ArgumentError("layered codebook needs R_1 >= R_2 >= ... >= R_{m-1}");

  LayeredCodebook cb;
  cb.n = n;
  cb.seed = seed;
  cb.nk = rate_index_count(r0, n);
  cb.counts.resize(L);
  cb.cards.resize(L);
  // layer l holds U_{m-1-l}; base layer 0 holds U_{m-1}
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t i = L - 1 - l;  // zero-based auxiliary index of U_{i+1}
    cb.counts[l] = i + 1 == L
                       ? rate_index_count(comm_rates[i], n)
                       : rate_index_count(comm_rates[i] - comm_rates[i + 1], n);
    const std::string uname = "U" + std::to_string(L - l);
    cb.cards[l] = coupling_joint.variables()[coupling_joint.var_index(uname)].card;
  }

  unsigned __int128 total_symbols = 0, span = cb.nk;
  for (std::size_t l = 0; l < L; ++l) {
    span *= cb.counts[l];
    total_symbols += span * n;
  }
  if (total_symbols > index_guard)
    throw CapacityError("codebook exceeds the index guard",
                        total_symbols > UINT64_MAX
                            ? UINT64_MAX
                            : static_cast<std::uint64_t>(total_symbols),
                        index_guard);

  // base-layer pmf and per-layer conditional channels given all lower layers
  const std::string base_name = "U" + std::to_string(L);
  const auto q_base = coupling_joint.marginal(
      std::span<const std::string>(std::vector<std::string>{base_name}));
  std::vector<double> base_row(cb.cards[0]);
  for (std::size_t s = 0; s < cb.cards[0]; ++s) base_row[s] = q_base.prob_linear(s);

  std::vector<Channel> channels;  // channels[l-1] feeds layer l, l >= 1
  for (std::size_t l = 1; l < L; ++l) {
    std::vector<std::string> given;
    for (std::size_t j = 0; j < l; ++j) given.push_back("U" + std::to_string(L - j));
    const std::vector<std::string> out = {"U" + std::to_string(L - l)};
    channels.push_back(Channel::conditional(coupling_joint,
                                            std::span<const std::string>(given),
                                            std::span<const std::string>(out)));
  }

  cb.words.resize(L);
  std::size_t idx_span = cb.nk;
  for (std::size_t l = 0; l < L; ++l) {
    idx_span *= cb.counts[l];
    cb.words[l].resize(idx_span * n);
  }

  // enumerate message tuples layer by layer
  std::vector<std::size_t> msgs(L, 0);
  std::function<void(std::size_t)> fill = [&](std::size_t l) {
    for (msgs[l] = 0; msgs[l] < cb.counts[l]; ++msgs[l]) {
      for (std::size_t k = 0; k < cb.nk; ++k) {
        std::vector<std::uint64_t> stream = {kStreamCodebook, l, k};
        for (std::size_t j = 0; j <= l; ++j) stream.push_back(msgs[j]);
        StreamRng rng(seed, stream);
        // locate the output slot
        std::size_t idx = msgs[l];
        for (std::size_t j = l; j-- > 0;) idx = idx * cb.counts[j] + msgs[j];
        idx = idx * cb.nk + k;
        std::uint32_t* out = cb.words[l].data() + idx * n;
        if (l == 0) {
          for (unsigned t = 0; t < n; ++t)
            out[t] = static_cast<std::uint32_t>(
                sample_categorical(base_row, rng.uniform(t)));
        } else {
          // channel input: lower-layer symbols, base first
          std::vector<std::span<const std::uint32_t>> lower;
          for (std::size_t j = 0; j < l; ++j)
            lower.push_back(
                cb.word(j, std::span<const std::size_t>(msgs.data(), j + 1), k));
          for (unsigned t = 0; t < n; ++t) {
            std::size_t in_idx = 0;
            for (std::size_t j = 0; j < l; ++j)
              in_idx = in_idx * cb.cards[j] + lower[j][t];
            out[t] = static_cast<std::uint32_t>(sample_categorical(
                channels[l - 1].row(in_idx).mass(), rng.uniform(t)));
          }
        }
      }
      if (l + 1 < L) fill(l + 1);
    }
  };
  fill(0);
  return cb;
}

}  // namespace sccs
