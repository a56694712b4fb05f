#include "sccs/relay.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "sccs/codebook.hpp"
#include "sccs/rng.hpp"

namespace sccs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

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

void decode_block(std::uint64_t block, std::size_t card, unsigned n,
                  std::uint32_t* out) {
  for (unsigned t = n; t-- > 0;) {
    out[t] = static_cast<std::uint32_t>(block % card);
    block /= card;
  }
}

/// Likelihood-encoder posterior over codeword indices for one stage; rows[m]
/// is the per-letter likelihood of the observation under word m. Falls back
/// to the uniform message when every word has zero likelihood (the encoder
/// must still send something).
std::vector<double> stage_posterior(const std::vector<std::vector<double>>& log_lik) {
  const std::size_t m = log_lik.size();
  std::vector<double> logs(m, 0.0);
  double best = kNegInf;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0;
    for (double v : log_lik[i]) {
      if (v == kNegInf) {
        s = kNegInf;
        break;
      }
      s += v;
    }
    logs[i] = s;
    best = std::max(best, s);
  }
  std::vector<double> post(m, 0.0);
  if (best == kNegInf) {
    for (double& p : post) p = 1.0 / static_cast<double>(m);
    return post;
  }
  double total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (logs[i] == kNegInf) continue;
    post[i] = std::exp(logs[i] - best);
    total += post[i];
  }
  for (double& p : post) p /= total;
  return post;
}

}  // namespace

ExperimentReport relay_scheme_experiment(const JointDistribution& q_xz,
                                         const JointDistribution& coupling_xuz,
                                         double r1, double r2,
                                         std::span<const unsigned> n_list,
                                         unsigned trials, std::uint64_t seed,
                                         const RelayOptions& options) {
  if (trials == 0) throw ArgumentError("relay experiment needs at least one trial");
  for (const char* v : {"X", "U", "Z"})
    if (!coupling_xuz.has_variable(v))
      throw ArgumentError("relay coupling needs variables X, U and Z");
  const double chain_dev =
      coupling_xuz.conditional_mutual_information({"X"}, {"U"}, {"Z"});
  if (chain_dev > options.chain_tol)
    throw ConstraintError("relay coupling violates X - U - Z (I(X;Z|U) = " +
                          std::to_string(chain_dev) + ")");

  const std::size_t cx = coupling_xuz.variables()[coupling_xuz.var_index("X")].card;
  const std::size_t cu = coupling_xuz.variables()[coupling_xuz.var_index("U")].card;
  const std::size_t cz = coupling_xuz.variables()[coupling_xuz.var_index("Z")].card;

  const auto qu = coupling_xuz.marginal({"U"});
  std::vector<double> qu_row(cu);
  for (std::size_t u = 0; u < cu; ++u) qu_row[u] = qu.prob_linear(u);
  const Channel qx_u = Channel::conditional(coupling_xuz, {"U"}, {"X"});
  const Channel qu_z = Channel::conditional(coupling_xuz, {"Z"}, {"U"});
  const auto qz = coupling_xuz.marginal({"Z"});
  std::vector<double> qz_row(cz);
  for (std::size_t z = 0; z < cz; ++z) qz_row[z] = qz.prob_linear(z);
  const auto qx = coupling_xuz.marginal({"X"});
  std::vector<double> qx_row(cx);
  for (std::size_t x = 0; x < cx; ++x) qx_row[x] = qx.prob_linear(x);
  const auto target = q_xz.marginal({"X", "Z"});

  ExperimentReport rep;
  rep.kind = "relay";
  rep.extra_columns = {"stage1_tv", "zmix_tv"};

  for (unsigned n : n_list) {
    const std::uint64_t n1 = rate_index_count(r1, n);
    const std::uint64_t k1 = rate_index_count(options.cr_rate1, n);
    const std::uint64_t n2 = rate_index_count(r2, n);
    const std::uint64_t k2 = rate_index_count(options.cr_rate2, n);
    const std::uint64_t cxn = checked_pow(cx, n, "X");
    const std::uint64_t czn = checked_pow(cz, n, "Z");
    (void)checked_pow(cu, n, "U");
    const unsigned __int128 need = static_cast<unsigned __int128>(cxn) * czn +
                                   static_cast<unsigned __int128>(n1) * k1 * cxn +
                                   static_cast<unsigned __int128>(n2) * k2;
    if (need > options.size_guard)
      throw CapacityError("relay run exceeds the size guard",
                          need > UINT64_MAX ? UINT64_MAX
                                            : static_cast<std::uint64_t>(need),
                          options.size_guard);

    for (unsigned trial = 0; trial < trials; ++trial) {
      // stage 1: U-codebook, exact joint P(x^n, distinct u-word)
      std::unordered_map<std::uint64_t, std::size_t> uslot;
      std::vector<std::vector<std::uint32_t>> uwords;
      std::vector<std::vector<std::size_t>> uword_of(k1);  // [k1][m1] -> slot
      std::vector<std::uint32_t> w(n);
      for (std::uint64_t k = 0; k < k1; ++k) {
        uword_of[k].resize(n1);
        for (std::uint64_t m = 0; m < n1; ++m) {
          StreamRng rng(seed, {kStreamRelay, n, trial, 1, k, m});
          std::uint64_t key = 0;
          for (unsigned t = 0; t < n; ++t) {
            w[t] = static_cast<std::uint32_t>(
                sample_categorical(qu_row, rng.uniform(t)));
            key = key * cu + w[t];
          }
          auto [it, fresh] = uslot.try_emplace(key, uwords.size());
          if (fresh) uwords.push_back(w);
          uword_of[k][m] = it->second;
        }
      }
      const std::size_t nslots = uwords.size();
      std::vector<std::vector<double>> p1(cxn, std::vector<double>(nslots, 0.0));
      std::vector<std::uint32_t> xs(n);
      for (std::uint64_t k = 0; k < k1; ++k) {
        for (std::uint64_t xb = 0; xb < cxn; ++xb) {
          decode_block(xb, cx, n, xs.data());
          double qxn = 1.0;
          for (unsigned t = 0; t < n; ++t) qxn *= qx_row[xs[t]];
          if (qxn <= 0.0) continue;
          std::vector<std::vector<double>> loglik(n1, std::vector<double>(n));
          for (std::uint64_t m = 0; m < n1; ++m) {
            const auto& uw = uwords[uword_of[k][m]];
            for (unsigned t = 0; t < n; ++t) {
              const double p = qx_u.row(uw[t])[xs[t]];
              loglik[m][t] = p > 0 ? std::log(p) : kNegInf;
            }
          }
          const auto post = stage_posterior(loglik);
          const double base = qxn / static_cast<double>(k1);
          for (std::uint64_t m = 0; m < n1; ++m)
            if (post[m] > 0) p1[xb][uword_of[k][m]] += base * post[m];
        }
      }
      // stage 2: Z-codebook, transition T(slot -> z^n)
      std::vector<std::vector<std::uint32_t>> zwords(n2 * k2,
                                                     std::vector<std::uint32_t>(n));
      for (std::uint64_t k = 0; k < k2; ++k)
        for (std::uint64_t m = 0; m < n2; ++m) {
          StreamRng rng(seed, {kStreamRelay, n, trial, 2, k, m});
          for (unsigned t = 0; t < n; ++t)
            zwords[k * n2 + m][t] = static_cast<std::uint32_t>(
                sample_categorical(qz_row, rng.uniform(t)));
        }
      std::vector<std::unordered_map<std::uint64_t, double>> t2(nslots);
      for (std::size_t s = 0; s < nslots; ++s) {
        const auto& uw = uwords[s];
        for (std::uint64_t k = 0; k < k2; ++k) {
          std::vector<std::vector<double>> loglik(n2, std::vector<double>(n));
          for (std::uint64_t m = 0; m < n2; ++m) {
            const auto& zw = zwords[k * n2 + m];
            for (unsigned t = 0; t < n; ++t) {
              const double p = qu_z.row(zw[t])[uw[t]];
              loglik[m][t] = p > 0 ? std::log(p) : kNegInf;
            }
          }
          const auto post = stage_posterior(loglik);
          for (std::uint64_t m = 0; m < n2; ++m) {
            if (post[m] <= 0) continue;
            const auto& zw = zwords[k * n2 + m];
            std::uint64_t zb = 0;
            for (unsigned t = 0; t < n; ++t) zb = zb * cz + zw[t];
            t2[s][zb] += post[m] / static_cast<double>(k2);
          }
        }
      }
      // combine and measure
      std::vector<double> pxz(cxn * czn, 0.0);
      for (std::uint64_t xb = 0; xb < cxn; ++xb)
        for (std::size_t s = 0; s < nslots; ++s) {
          const double p = p1[xb][s];
          if (p <= 0) continue;
          for (const auto& [zb, q] : t2[s]) pxz[xb * czn + zb] += p * q;
        }
      NeumaierSum tv;
      std::vector<std::uint32_t> zs(n);
      for (std::uint64_t xb = 0; xb < cxn; ++xb) {
        decode_block(xb, cx, n, xs.data());
        for (std::uint64_t zb = 0; zb < czn; ++zb) {
          decode_block(zb, cz, n, zs.data());
          double q = 1.0;
          for (unsigned t = 0; t < n; ++t)
            q *= target.prob_linear(xs[t] * cz + zs[t]);
          tv.add(std::abs(pxz[xb * czn + zb] - q));
        }
      }
      // stage-1 fidelity: TV(P(x^n, u^n), prod Q_XU), support-aware
      NeumaierSum tv1;
      NeumaierSum ref_mass_on_slots;
      const auto qxu = coupling_xuz.marginal({"X", "U"});
      for (std::uint64_t xb = 0; xb < cxn; ++xb) {
        decode_block(xb, cx, n, xs.data());
        for (std::size_t s = 0; s < nslots; ++s) {
          const auto& uw = uwords[s];
          double q = 1.0;
          for (unsigned t = 0; t < n; ++t)
            q *= qxu.prob_linear(xs[t] * cu + uw[t]);
          tv1.add(std::abs(p1[xb][s] - q));
          ref_mass_on_slots.add(q);
        }
      }
      tv1.add(1.0 - ref_mass_on_slots.value());  // reference mass off-support
      // z-mixture fidelity: TV(P_{Z^n}, prod Q_Z)
      std::vector<double> zmix(czn, 0.0);
      for (std::uint64_t xb = 0; xb < cxn; ++xb)
        for (std::uint64_t zb = 0; zb < czn; ++zb) zmix[zb] += pxz[xb * czn + zb];
      NeumaierSum tvz;
      for (std::uint64_t zb = 0; zb < czn; ++zb) {
        decode_block(zb, cz, n, zs.data());
        double q = 1.0;
        for (unsigned t = 0; t < n; ++t) q *= qz_row[zs[t]];
        tvz.add(std::abs(zmix[zb] - q));
      }

      ExperimentRow row;
      row.seed = seed;
      row.n = n;
      row.trial = trial;
      row.tv = 0.5 * tv.value();
      row.extra = {{"stage1_tv", 0.5 * tv1.value()}, {"zmix_tv", 0.5 * tvz.value()}};
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

}  // namespace sccs
