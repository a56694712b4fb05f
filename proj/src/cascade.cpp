#include "sccs/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

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

struct SparseVec {
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
};

SparseVec sparsify(const std::vector<double>& v) {
  SparseVec s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) {
      s.idx.push_back(static_cast<std::uint32_t>(i));
      s.val.push_back(v[i]);
    }
  return s;
}

}  // namespace

CascadeSystem::CascadeSystem(AuxiliaryCoupling coupling, SuperpositionCodebook codebook,
                             double chain_tol)
    : coupling_(std::move(coupling)),
      codebook_(std::move(codebook)),
      qx_(Channel::conditional(coupling_.joint(), {"U", "V"}, {"X"})),
      qy_(Channel::conditional(coupling_.joint(), {"U", "V"}, {"Y"})),
      qz_(Channel::conditional(coupling_.joint(), {"V"}, {"Z"})) {
  const auto rep = check_membership_D(coupling_, chain_tol);
  if (rep.chain1_dev > chain_tol)
    throw ConstraintError("cascade system coupling violates X - (U,V) - Y (dev " +
                          std::to_string(rep.chain1_dev) + ")");
  if (rep.chain2_dev > chain_tol)
    throw ConstraintError("cascade system coupling violates (X,Y,U) - V - Z (dev " +
                          std::to_string(rep.chain2_dev) + ")");
  const auto& j = coupling_.joint();
  cx_ = j.variables()[j.var_index("X")].card;
  cy_ = j.variables()[j.var_index("Y")].card;
  cz_ = j.variables()[j.var_index("Z")].card;
  if (codebook_.u_card != j.variables()[j.var_index("U")].card ||
      codebook_.v_card != j.variables()[j.var_index("V")].card)
    throw DimensionError("codebook alphabets do not match the coupling");
  const auto qx = coupling_.target().marginal({"X"});
  qx_letter_.resize(cx_);
  for (std::size_t x = 0; x < cx_; ++x) qx_letter_[x] = qx.prob_linear(x);
}

namespace {

/// Log-space posterior over (ma, mb); shared by the op and the enumerator.
FiniteDistribution posterior_impl(std::span<const std::uint32_t> x_block,
                                  std::size_t k, const CascadeSystem& sys) {
  const auto& cb = sys.codebook();
  const unsigned n = cb.n;
  std::vector<double> logs(cb.na * cb.nb, kNegInf);
  double best = kNegInf;
  for (std::size_t ma = 0; ma < cb.na; ++ma)
    for (std::size_t mb = 0; mb < cb.nb; ++mb) {
      const auto uw = cb.u_word(ma, mb, k);
      const auto vw = cb.v_word(mb, k);
      double s = 0.0;
      for (unsigned t = 0; t < n; ++t) {
        const double p = sys.qx_uv(uw[t], vw[t], x_block[t]);
        if (p <= 0.0) {
          s = kNegInf;
          break;
        }
        s += std::log(p);
      }
      logs[ma * cb.nb + mb] = s;
      best = std::max(best, s);
    }
  if (best == kNegInf)
    throw DegeneratePosteriorError(
        "source block has zero likelihood under every codeword pair");
  std::vector<double> post(logs.size(), 0.0);
  NeumaierSum total;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (logs[i] == kNegInf) continue;
    post[i] = std::exp(logs[i] - best);
    total.add(post[i]);
  }
  const double z = total.value();
  for (double& p : post) p /= z;
  double s2 = 0;  // exact renormalization for the pmf validator
  for (double p : post) s2 += p;
  for (double& p : post) p /= s2;
  return FiniteDistribution(std::move(post));
}

}  // namespace

FiniteDistribution likelihood_encoder_posterior(std::span<const std::uint32_t> x_block,
                                                std::size_t k,
                                                const CascadeSystem& sys) {
  if (x_block.size() != sys.n())
    throw ArgumentError("source block length does not match the codebook");
  if (k >= sys.codebook().nk)
    throw ArgumentError("common randomness index out of range");
  for (auto s : x_block)
    if (s >= sys.x_card()) throw ArgumentError("source symbol out of range");
  return posterior_impl(x_block, k, sys);
}

std::unordered_map<std::uint64_t, double> InducedDistribution::mass_marginal() const {
  std::unordered_map<std::uint64_t, double> out;
  for (const auto& [key, p] : mass_) out[key / nk] += p;
  return out;
}

double InducedDistribution::total() const {
  NeumaierSum s;
  for (const auto& [k, p] : mass_) {
    (void)k;
    s.add(p);
  }
  return s.value();
}

std::vector<double> InducedDistribution::x_marginal() const {
  std::vector<NeumaierSum> acc(cxn);
  const std::uint64_t per_x = cyn * czn * na * nb * nk;
  for (const auto& [key, p] : mass_) acc[key / per_x].add(p);
  std::vector<double> out(cxn);
  for (std::uint64_t i = 0; i < cxn; ++i) out[i] = acc[i].value();
  return out;
}

JointDistribution InducedDistribution::to_joint(bool include_k) const {
  std::vector<Variable> vars = {{"Xn", cxn}, {"Yn", cyn}, {"Zn", czn},
                                {"Ma", na},  {"Mb", nb}};
  std::unordered_map<std::uint64_t, double> m;
  if (include_k) {
    vars.push_back({"K", nk});
    m = mass_;
  } else {
    m = mass_marginal();
  }
  unsigned __int128 total = 1;
  for (const auto& v : vars) total *= v.card;
  if (total <= kDenseStateLimit) {
    std::vector<double> dense(static_cast<std::size_t>(total), 0.0);
    for (const auto& [k, p] : m) dense[static_cast<std::size_t>(k)] += p;
    return JointDistribution::dense(std::move(vars), std::move(dense));
  }
  return JointDistribution::sparse(std::move(vars), std::move(m));
}

InducedDistribution induced_distribution_exact(const CascadeSystem& sys,
                                               std::uint64_t size_guard) {
  const auto& cb = sys.codebook();
  const unsigned n = sys.n();
  InducedDistribution ind;
  ind.n = n;
  ind.cxn = checked_pow(sys.x_card(), n, "X");
  ind.cyn = checked_pow(sys.y_card(), n, "Y");
  ind.czn = checked_pow(sys.z_card(), n, "Z");
  ind.na = cb.na;
  ind.nb = cb.nb;
  ind.nk = cb.nk;

  const unsigned __int128 states = static_cast<unsigned __int128>(ind.cxn) * ind.cyn *
                                   ind.czn * ind.na * ind.nb * ind.nk;
  if (states > size_guard)
    throw CapacityError("exact enumeration exceeds the size guard",
                        states > UINT64_MAX ? UINT64_MAX
                                            : static_cast<std::uint64_t>(states),
                        size_guard);

  const std::vector<double> qxn = tensor_power(sys.qx_letter(), n);
  std::vector<std::uint32_t> xsym(n);

  for (std::size_t k = 0; k < cb.nk; ++k) {
    std::vector<SparseVec> zdist(cb.nb);
    for (std::size_t mb = 0; mb < cb.nb; ++mb) {
      const auto vw = cb.v_word(mb, k);
      std::vector<double> acc = {1.0};
      for (unsigned t = 0; t < n; ++t) {
        std::vector<double> next(acc.size() * sys.z_card());
        std::size_t i = 0;
        for (double a : acc)
          for (std::size_t z = 0; z < sys.z_card(); ++z)
            next[i++] = a * sys.qz_v(vw[t], z);
        acc = std::move(next);
      }
      zdist[mb] = sparsify(acc);
    }
    std::vector<SparseVec> ydist(cb.na * cb.nb);
    for (std::size_t ma = 0; ma < cb.na; ++ma)
      for (std::size_t mb = 0; mb < cb.nb; ++mb) {
        const auto uw = cb.u_word(ma, mb, k);
        const auto vw = cb.v_word(mb, k);
        std::vector<double> acc = {1.0};
        for (unsigned t = 0; t < n; ++t) {
          std::vector<double> next(acc.size() * sys.y_card());
          std::size_t i = 0;
          for (double a : acc)
            for (std::size_t y = 0; y < sys.y_card(); ++y)
              next[i++] = a * sys.qy_uv(uw[t], vw[t], y);
          acc = std::move(next);
        }
        ydist[ma * cb.nb + mb] = sparsify(acc);
      }

    for (std::uint64_t xb = 0; xb < ind.cxn; ++xb) {
      if (qxn[xb] <= 0.0) continue;
      decode_block(xb, sys.x_card(), n, xsym.data());
      const FiniteDistribution post = posterior_impl(xsym, k, sys);
      const double w = qxn[xb] / static_cast<double>(cb.nk);
      for (std::size_t ma = 0; ma < cb.na; ++ma)
        for (std::size_t mb = 0; mb < cb.nb; ++mb) {
          const double pm = post[ma * cb.nb + mb];
          if (pm <= 0.0) continue;
          const double base = w * pm;
          const auto& yd = ydist[ma * cb.nb + mb];
          const auto& zd = zdist[mb];
          for (std::size_t yi = 0; yi < yd.idx.size(); ++yi) {
            const double by = base * yd.val[yi];
            const std::uint64_t yb = yd.idx[yi];
            for (std::size_t zi = 0; zi < zd.idx.size(); ++zi)
              ind.mass_[ind.pack(xb, yb, zd.idx[zi], ma, mb, k)] += by * zd.val[zi];
          }
        }
    }
  }
  return ind;
}

double secrecy_tv(const InducedDistribution& induced, const JointDistribution& target) {
  const auto tgt = target.marginal({"X", "Y", "Z"});
  const std::size_t cx = tgt.variables()[0].card, cy = tgt.variables()[1].card,
                    cz = tgt.variables()[2].card;
  const unsigned n = induced.n;
  if (checked_pow(cx, n, "X") != induced.cxn ||
      checked_pow(cy, n, "Y") != induced.cyn ||
      checked_pow(cz, n, "Z") != induced.czn)
    throw DimensionError("induced distribution does not match the target alphabets");

  const auto marg = induced.mass_marginal();
  std::vector<double> pm(induced.na * induced.nb, 0.0);
  for (const auto& [key, p] : marg) pm[key % (induced.na * induced.nb)] += p;

  std::vector<std::uint32_t> xs(n), ys(n);
  NeumaierSum tv;
  for (std::uint64_t xb = 0; xb < induced.cxn; ++xb) {
    decode_block(xb, cx, n, xs.data());
    for (std::uint64_t yb = 0; yb < induced.cyn; ++yb) {
      decode_block(yb, cy, n, ys.data());
      std::vector<double> zacc = {1.0};
      for (unsigned t = 0; t < n; ++t) {
        std::vector<double> next(zacc.size() * cz);
        std::size_t i = 0;
        for (double a : zacc)
          for (std::size_t z = 0; z < cz; ++z)
            next[i++] = a * tgt.prob_linear((xs[t] * cy + ys[t]) * cz + z);
        zacc = std::move(next);
      }
      for (std::uint64_t zb = 0; zb < induced.czn; ++zb) {
        const double q = zacc[zb];
        const std::uint64_t base =
            ((xb * induced.cyn + yb) * induced.czn + zb) * induced.na * induced.nb;
        for (std::size_t mm = 0; mm < induced.na * induced.nb; ++mm) {
          const auto it = marg.find(base + mm);
          const double p = it == marg.end() ? 0.0 : it->second;
          tv.add(std::abs(p - q * pm[mm]));
        }
      }
    }
  }
  return 0.5 * tv.value();
}

std::vector<CascadeSample> sample_operational(const CascadeSystem& sys,
                                              std::size_t count, std::uint64_t seed) {
  const auto& cb = sys.codebook();
  const unsigned n = sys.n();
  std::vector<CascadeSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    StreamRng rng(seed, {kStreamSample, i});
    CascadeSample s;
    std::uint64_t ctr = 0;
    s.k = std::min<std::size_t>(
        cb.nk - 1, static_cast<std::size_t>(rng.uniform(ctr++) * cb.nk));
    s.xb.resize(n);
    for (unsigned t = 0; t < n; ++t)
      s.xb[t] = static_cast<std::uint32_t>(
          sample_categorical(sys.qx_letter(), rng.uniform(ctr++)));
    const FiniteDistribution post = posterior_impl(s.xb, s.k, sys);
    const std::size_t msg = sample_categorical(post.mass(), rng.uniform(ctr++));
    s.ma = msg / cb.nb;
    s.mb = msg % cb.nb;
    const auto uw = cb.u_word(s.ma, s.mb, s.k);
    const auto vw = cb.v_word(s.mb, s.k);
    s.yb.resize(n);
    s.zb.resize(n);
    std::vector<double> row;
    for (unsigned t = 0; t < n; ++t) {
      row.assign(sys.y_card(), 0.0);
      for (std::size_t y = 0; y < sys.y_card(); ++y)
        row[y] = sys.qy_uv(uw[t], vw[t], y);
      s.yb[t] =
          static_cast<std::uint32_t>(sample_categorical(row, rng.uniform(ctr++)));
    }
    for (unsigned t = 0; t < n; ++t) {
      row.assign(sys.z_card(), 0.0);
      for (std::size_t z = 0; z < sys.z_card(); ++z) row[z] = sys.qz_v(vw[t], z);
      s.zb[t] =
          static_cast<std::uint32_t>(sample_categorical(row, rng.uniform(ctr++)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arbitrary-length cascades

namespace {

JointDistribution make_general_target(const JointDistribution& coupling, unsigned m) {
  std::vector<std::string> names = {"X"};
  for (unsigned i = 1; i < m; ++i) names.push_back("Y" + std::to_string(i));
  return coupling.marginal(std::span<const std::string>(names));
}

Channel make_x_channel(const JointDistribution& coupling, unsigned m) {
  std::vector<std::string> given;  // base first: U_{m-1}, ..., U_1
  for (unsigned j = m - 1; j >= 1; --j) given.push_back("U" + std::to_string(j));
  const std::vector<std::string> out = {"X"};
  return Channel::conditional(coupling, std::span<const std::string>(given),
                              std::span<const std::string>(out));
}

}  // namespace

GeneralCascadeSystem::GeneralCascadeSystem(JointDistribution coupling_joint, unsigned m,
                                           LayeredCodebook codebook, double chain_tol)
    : coupling_(std::move(coupling_joint)),
      target_(make_general_target(coupling_, m)),
      codebook_(std::move(codebook)),
      m_(m),
      qx_(make_x_channel(coupling_, m)) {
  (void)general_cascade_rates(coupling_, m, chain_tol);  // validates membership in D_m
  const std::size_t L = m - 1;
  cx_ = coupling_.variables()[coupling_.var_index("X")].card;
  for (std::size_t i = 0; i < L; ++i) {
    std::vector<std::string> g;  // U_{m-1}, ..., U_{i+1}
    for (std::size_t j = L; j >= i + 1; --j) g.push_back("U" + std::to_string(j));
    const std::vector<std::string> out = {"Y" + std::to_string(i + 1)};
    qy_.push_back(Channel::conditional(coupling_, std::span<const std::string>(g),
                                       std::span<const std::string>(out)));
    cy_.push_back(coupling_.variables()[coupling_.var_index(out[0])].card);
  }
  const auto qx = target_.marginal({"X"});
  qx_letter_.resize(cx_);
  for (std::size_t x = 0; x < cx_; ++x) qx_letter_[x] = qx.prob_linear(x);
  if (codebook_.layers() != L)
    throw DimensionError("codebook layer count does not match the cascade length");
  for (std::size_t l = 0; l < L; ++l) {
    const std::string uname = "U" + std::to_string(L - l);
    if (codebook_.cards[l] != coupling_.variables()[coupling_.var_index(uname)].card)
      throw DimensionError("codebook alphabets do not match the coupling");
  }
}

std::uint64_t GeneralInduced::pack(std::uint64_t xb, std::span<const std::uint64_t> ybs,
                                   std::span<const std::size_t> msgs_top_first,
                                   std::size_t k) const {
  std::uint64_t key = xb;
  for (std::size_t i = 0; i < ybs.size(); ++i) key = key * cyn[i] + ybs[i];
  const std::size_t L = counts.size();
  for (std::size_t i = 0; i < L; ++i) key = key * counts[L - 1 - i] + msgs_top_first[i];
  return key * nk + k;
}

double GeneralInduced::total() const {
  NeumaierSum s;
  for (const auto& [k, p] : mass_) {
    (void)k;
    s.add(p);
  }
  return s.value();
}

std::vector<double> GeneralInduced::x_marginal() const {
  std::uint64_t per_x = nk;
  for (std::size_t i = 0; i < counts.size(); ++i) per_x *= counts[i];
  for (std::size_t i = 0; i < cyn.size(); ++i) per_x *= cyn[i];
  std::vector<NeumaierSum> acc(cxn);
  for (const auto& [key, p] : mass_) acc[key / per_x].add(p);
  std::vector<double> out(cxn);
  for (std::uint64_t i = 0; i < cxn; ++i) out[i] = acc[i].value();
  return out;
}

GeneralInduced general_cascade_exact(const GeneralCascadeSystem& sys,
                                     std::uint64_t size_guard) {
  const auto& cb = sys.codebook();
  const unsigned n = sys.n();
  const std::size_t L = cb.layers();
  GeneralInduced ind;
  ind.n = n;
  ind.m = sys.m();
  ind.cxn = checked_pow(sys.x_card(), n, "X");
  ind.cyn.resize(L);
  for (std::size_t i = 0; i < L; ++i) ind.cyn[i] = checked_pow(sys.y_card(i), n, "Y");
  ind.counts = cb.counts;
  ind.nk = cb.nk;

  unsigned __int128 states = static_cast<unsigned __int128>(ind.cxn) * ind.nk;
  for (std::size_t i = 0; i < L; ++i) states *= ind.cyn[i];
  for (std::size_t i = 0; i < L; ++i) states *= cb.counts[i];
  if (states > size_guard)
    throw CapacityError("exact enumeration exceeds the size guard",
                        states > UINT64_MAX ? UINT64_MAX
                                            : static_cast<std::uint64_t>(states),
                        size_guard);

  const std::vector<double> qxn = tensor_power(sys.qx_letter(), n);
  std::size_t total_msgs = 1;
  for (std::size_t l = 0; l < L; ++l) total_msgs *= cb.counts[l];

  std::vector<std::uint32_t> xsym(n);
  std::vector<std::size_t> msgs(L);

  auto decode_tuple = [&](std::size_t tup) {  // base-first decomposition
    for (std::size_t l = 0; l < L; ++l) {
      msgs[l] = tup % cb.counts[l];
      tup /= cb.counts[l];
    }
  };

  for (std::size_t k = 0; k < cb.nk; ++k) {
    // likelihood of each x block under every message tuple
    std::vector<std::vector<double>> lik(ind.cxn,
                                         std::vector<double>(total_msgs, 0.0));
    for (std::size_t tup = 0; tup < total_msgs; ++tup) {
      decode_tuple(tup);
      std::vector<std::span<const std::uint32_t>> wordvec(L);
      for (std::size_t l = 0; l < L; ++l)
        wordvec[l] = cb.word(l, std::span<const std::size_t>(msgs.data(), l + 1), k);
      std::vector<std::size_t> full_in(n);
      for (unsigned t = 0; t < n; ++t) {
        std::size_t idx = 0;
        for (std::size_t l = 0; l < L; ++l) idx = idx * cb.cards[l] + wordvec[l][t];
        full_in[t] = idx;
      }
      for (std::uint64_t xb = 0; xb < ind.cxn; ++xb) {
        decode_block(xb, sys.x_card(), n, xsym.data());
        double l2 = 1.0;
        for (unsigned t = 0; t < n && l2 > 0.0; ++t)
          l2 *= sys.x_channel().row(full_in[t])[xsym[t]];
        lik[xb][tup] = l2;
      }
    }
    for (std::uint64_t xb = 0; xb < ind.cxn; ++xb) {
      if (qxn[xb] <= 0.0) continue;
      double total = 0.0;
      for (double v : lik[xb]) total += v;
      if (total <= 0.0)
        throw DegeneratePosteriorError(
            "source block has zero likelihood under every codeword tuple");
      const double w = qxn[xb] / static_cast<double>(cb.nk);
      for (std::size_t tup = 0; tup < total_msgs; ++tup) {
        if (lik[xb][tup] <= 0.0) continue;
        const double base = w * lik[xb][tup] / total;
        decode_tuple(tup);
        std::vector<std::span<const std::uint32_t>> wordvec(L);
        for (std::size_t l = 0; l < L; ++l)
          wordvec[l] = cb.word(l, std::span<const std::size_t>(msgs.data(), l + 1), k);
        std::vector<SparseVec> ydists(L);
        for (std::size_t i = 0; i < L; ++i) {
          const auto& ch = sys.y_channel(i);
          std::vector<double> acc = {1.0};
          for (unsigned t = 0; t < n; ++t) {
            std::size_t idx = 0;
            for (std::size_t l = 0; l + i < L; ++l)
              idx = idx * cb.cards[l] + wordvec[l][t];
            const auto& row = ch.row(idx);
            std::vector<double> next(acc.size() * sys.y_card(i));
            std::size_t wv = 0;
            for (double a : acc)
              for (std::size_t y = 0; y < sys.y_card(i); ++y) next[wv++] = a * row[y];
            acc = std::move(next);
          }
          ydists[i] = sparsify(acc);
        }
        std::vector<std::size_t> msgs_top_first(L);
        for (std::size_t i = 0; i < L; ++i) msgs_top_first[i] = msgs[L - 1 - i];
        std::vector<std::uint64_t> ybs(L, 0);
        std::function<void(std::size_t, double)> emit = [&](std::size_t i, double p) {
          if (i == L) {
            ind.mass_[ind.pack(xb, ybs, msgs_top_first, k)] += p;
            return;
          }
          const auto& yd = ydists[i];
          for (std::size_t j = 0; j < yd.idx.size(); ++j) {
            ybs[i] = yd.idx[j];
            emit(i + 1, p * yd.val[j]);
          }
        };
        emit(0, base);
      }
    }
  }
  return ind;
}

double general_secrecy_tv(const GeneralInduced& induced,
                          const JointDistribution& target) {
  const std::size_t L = induced.cyn.size();
  std::vector<std::string> names = {"X"};
  for (std::size_t i = 1; i <= L; ++i) names.push_back("Y" + std::to_string(i));
  const auto tgt = target.marginal(std::span<const std::string>(names));
  const unsigned n = induced.n;

  std::size_t total_msgs = 1;
  for (std::size_t l = 0; l < L; ++l) total_msgs *= induced.counts[l];
  std::unordered_map<std::uint64_t, double> marg;
  for (const auto& [key, p] : induced.mass_) marg[key / induced.nk] += p;
  std::vector<double> pm(total_msgs, 0.0);
  for (const auto& [key, p] : marg) pm[key % total_msgs] += p;

  std::vector<std::size_t> cards = {tgt.variables()[0].card};
  for (std::size_t i = 0; i < L; ++i) cards.push_back(tgt.variables()[i + 1].card);

  std::uint64_t blocks = induced.cxn;
  for (std::size_t i = 0; i < L; ++i) blocks *= induced.cyn[i];

  std::vector<std::uint32_t> sym((1 + L) * n);
  NeumaierSum tv;
  for (std::uint64_t blk = 0; blk < blocks; ++blk) {
    std::uint64_t rem = blk;
    std::vector<std::uint64_t> parts(1 + L);
    for (std::size_t i = L; i-- > 0;) {
      parts[1 + i] = rem % induced.cyn[i];
      rem /= induced.cyn[i];
    }
    parts[0] = rem;
    decode_block(parts[0], cards[0], n, sym.data());
    for (std::size_t i = 0; i < L; ++i)
      decode_block(parts[1 + i], cards[1 + i], n, sym.data() + (1 + i) * n);
    double q = 1.0;
    for (unsigned t = 0; t < n; ++t) {
      std::size_t idx = sym[t];
      for (std::size_t i = 0; i < L; ++i)
        idx = idx * cards[1 + i] + sym[(1 + i) * n + t];
      q *= tgt.prob_linear(idx);
    }
    const std::uint64_t base = blk * total_msgs;
    for (std::size_t mm = 0; mm < total_msgs; ++mm) {
      const auto it = marg.find(base + mm);
      const double p = it == marg.end() ? 0.0 : it->second;
      tv.add(std::abs(p - q * pm[mm]));
    }
  }
  return 0.5 * tv.value();
}

}  // namespace sccs
