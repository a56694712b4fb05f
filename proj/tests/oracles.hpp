#pragma once

// Independent brute-force enumerators used as oracles. These deliberately
// avoid the production code paths: plain probability products, no log-space,
// no sparse structures, conditionals computed from raw sums.

#include <cmath>
#include <map>
#include <vector>

#include "sccs/cascade.hpp"

namespace sccs::testing {

struct OracleTables {
  std::size_t cx, cy, cz, cu, cv;
  // raw conditionals, indexed [u][v][x] etc.
  std::vector<double> qx_uv, qy_uv, qz_v, qx;
};

inline OracleTables oracle_tables(const AuxiliaryCoupling& coupling) {
  const auto& j = coupling.joint();
  OracleTables t;
  t.cx = j.variables()[j.var_index("X")].card;
  t.cy = j.variables()[j.var_index("Y")].card;
  t.cz = j.variables()[j.var_index("Z")].card;
  t.cu = j.variables()[j.var_index("U")].card;
  t.cv = j.variables()[j.var_index("V")].card;
  auto p5 = [&](std::size_t x, std::size_t y, std::size_t z, std::size_t u,
                std::size_t v) {
    std::vector<std::size_t> idx(5);
    idx[j.var_index("X")] = x;
    idx[j.var_index("Y")] = y;
    idx[j.var_index("Z")] = z;
    idx[j.var_index("U")] = u;
    idx[j.var_index("V")] = v;
    return j.prob(idx);
  };
  t.qx_uv.assign(t.cu * t.cv * t.cx, 0.0);
  t.qy_uv.assign(t.cu * t.cv * t.cy, 0.0);
  t.qz_v.assign(t.cv * t.cz, 0.0);
  t.qx.assign(t.cx, 0.0);
  for (std::size_t u = 0; u < t.cu; ++u)
    for (std::size_t v = 0; v < t.cv; ++v) {
      double puv = 0;
      for (std::size_t x = 0; x < t.cx; ++x)
        for (std::size_t y = 0; y < t.cy; ++y)
          for (std::size_t z = 0; z < t.cz; ++z) puv += p5(x, y, z, u, v);
      for (std::size_t x = 0; x < t.cx; ++x) {
        double px = 0;
        for (std::size_t y = 0; y < t.cy; ++y)
          for (std::size_t z = 0; z < t.cz; ++z) px += p5(x, y, z, u, v);
        t.qx_uv[(u * t.cv + v) * t.cx + x] = puv > 0 ? px / puv : 1.0 / t.cx;
      }
      for (std::size_t y = 0; y < t.cy; ++y) {
        double py = 0;
        for (std::size_t x = 0; x < t.cx; ++x)
          for (std::size_t z = 0; z < t.cz; ++z) py += p5(x, y, z, u, v);
        t.qy_uv[(u * t.cv + v) * t.cy + y] = puv > 0 ? py / puv : 1.0 / t.cy;
      }
    }
  for (std::size_t v = 0; v < t.cv; ++v) {
    double pv = 0;
    for (std::size_t u = 0; u < t.cu; ++u)
      for (std::size_t x = 0; x < t.cx; ++x)
        for (std::size_t y = 0; y < t.cy; ++y)
          for (std::size_t z = 0; z < t.cz; ++z) pv += p5(x, y, z, u, v);
    for (std::size_t z = 0; z < t.cz; ++z) {
      double pz = 0;
      for (std::size_t u = 0; u < t.cu; ++u)
        for (std::size_t x = 0; x < t.cx; ++x)
          for (std::size_t y = 0; y < t.cy; ++y) pz += p5(x, y, z, u, v);
      t.qz_v[v * t.cz + z] = pv > 0 ? pz / pv : 1.0 / t.cz;
    }
  }
  for (std::size_t x = 0; x < t.cx; ++x) {
    double px = 0;
    for (std::size_t y = 0; y < t.cy; ++y)
      for (std::size_t z = 0; z < t.cz; ++z)
        for (std::size_t u = 0; u < t.cu; ++u)
          for (std::size_t v = 0; v < t.cv; ++v) px += p5(x, y, z, u, v);
    t.qx[x] = px;
  }
  return t;
}

/// Direct-normalization posterior oracle over (ma, mb), no log-space.
inline std::vector<double> oracle_posterior(const OracleTables& t,
                                            const SuperpositionCodebook& cb,
                                            std::span<const std::uint32_t> xb,
                                            std::size_t k) {
  std::vector<double> lik(cb.na * cb.nb, 0.0);
  double total = 0;
  for (std::size_t ma = 0; ma < cb.na; ++ma)
    for (std::size_t mb = 0; mb < cb.nb; ++mb) {
      const auto uw = cb.u_word(ma, mb, k);
      const auto vw = cb.v_word(mb, k);
      double p = 1.0;
      for (unsigned tt = 0; tt < cb.n; ++tt)
        p *= t.qx_uv[(uw[tt] * t.cv + vw[tt]) * t.cx + xb[tt]];
      lik[ma * cb.nb + mb] = p;
      total += p;
    }
  for (double& p : lik) p /= total;
  return lik;
}

/// Fully independent enumeration of the induced law over (x,y,z,ma,mb) at any
/// block length the loops can afford; keys match InducedDistribution::pack
/// marginalized over k.
inline std::map<std::uint64_t, double> oracle_induced_marginal(
    const CascadeSystem& sys) {
  const auto t = oracle_tables(sys.coupling());
  const auto& cb = sys.codebook();
  const unsigned n = cb.n;
  std::uint64_t cxn = 1, cyn = 1, czn = 1;
  for (unsigned i = 0; i < n; ++i) {
    cxn *= t.cx;
    cyn *= t.cy;
    czn *= t.cz;
  }
  std::map<std::uint64_t, double> out;
  std::vector<std::uint32_t> xs(n), ys(n), zs(n);
  auto decode = [&](std::uint64_t b, std::size_t card, std::vector<std::uint32_t>& o) {
    for (unsigned i = n; i-- > 0;) {
      o[i] = static_cast<std::uint32_t>(b % card);
      b /= card;
    }
  };
  for (std::size_t k = 0; k < cb.nk; ++k)
    for (std::uint64_t xb = 0; xb < cxn; ++xb) {
      decode(xb, t.cx, xs);
      double qxn = 1.0;
      for (unsigned i = 0; i < n; ++i) qxn *= t.qx[xs[i]];
      const auto post = oracle_posterior(t, cb, xs, k);
      for (std::size_t ma = 0; ma < cb.na; ++ma)
        for (std::size_t mb = 0; mb < cb.nb; ++mb) {
          const double pm = post[ma * cb.nb + mb];
          if (pm <= 0) continue;
          const auto uw = cb.u_word(ma, mb, k);
          const auto vw = cb.v_word(mb, k);
          for (std::uint64_t yb = 0; yb < cyn; ++yb) {
            decode(yb, t.cy, ys);
            double py = 1.0;
            for (unsigned i = 0; i < n; ++i)
              py *= t.qy_uv[(uw[i] * t.cv + vw[i]) * t.cy + ys[i]];
            if (py <= 0) continue;
            for (std::uint64_t zb = 0; zb < czn; ++zb) {
              decode(zb, t.cz, zs);
              double pz = 1.0;
              for (unsigned i = 0; i < n; ++i) pz *= t.qz_v[vw[i] * t.cz + zs[i]];
              if (pz <= 0) continue;
              const std::uint64_t key =
                  (((xb * cyn + yb) * czn + zb) * cb.na + ma) * cb.nb + mb;
              out[key] += qxn / static_cast<double>(cb.nk) * pm * py * pz;
            }
          }
        }
    }
  return out;
}

}  // namespace sccs::testing
