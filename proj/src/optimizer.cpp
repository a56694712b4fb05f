#include "sccs/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sccs/rng.hpp"

// The searches below work in the reverse parametrization r(w|s): the target
// marginal is exact by construction and the factorization constraints are
// driven to zero by a lambda-annealed alternating minimization whose steps are
// closed-form (the lambda -> infinity limit is the plain mixture-model EM
// update). Cardinality ladders with warm starts plus an overparametrized
// escape pass, reduced back by merging near-identical atoms, make the search
// reliable at the desk scales the acceptance harness exercises.

namespace sccs {

namespace {

constexpr double kFeasible = 1e-9;  // bits of residual factorization violation

double xlog2(double p) { return p > 0 ? p * std::log2(p) : 0.0; }

double entropy_of(const std::vector<double>& p) {
  double h = 0;
  for (double v : p) h -= xlog2(v);
  return h;
}

struct LatentProblem {
  std::vector<std::size_t> cards;     // observed variables (2 or 3)
  std::vector<double> q;              // dense target, row-major
  std::size_t W = 0;                  // atoms
  std::vector<std::size_t> rho;       // class of the LAST variable's rows
  std::size_t n_classes = 0;
  std::vector<std::vector<std::size_t>> sym;  // sym[g][s]

  std::size_t S() const { return q.size(); }

  static LatentProblem make(const std::vector<std::size_t>& cards,
                            std::vector<double> q, std::size_t W,
                            std::vector<std::size_t> rho) {
    LatentProblem P;
    P.cards = cards;
    P.q = std::move(q);
    P.W = W;
    P.rho = std::move(rho);
    P.n_classes = 0;
    for (std::size_t c : P.rho) P.n_classes = std::max(P.n_classes, c + 1);
    const std::size_t S = P.q.size();
    P.sym.assign(cards.size(), std::vector<std::size_t>(S));
    for (std::size_t s = 0; s < S; ++s) {
      std::size_t rem = s;
      for (std::size_t g = cards.size(); g-- > 0;) {
        P.sym[g][s] = rem % cards[g];
        rem /= cards[g];
      }
    }
    return P;
  }
};

struct Stats {
  std::vector<double> pw;                   // atom masses
  std::vector<std::vector<double>> pvar;    // [g][a*W + w]
  std::vector<double> pclass;               // class masses (last var)
  std::vector<double> plast_class;          // [a*n_classes + c]
};

Stats stats_of(const LatentProblem& P, const std::vector<double>& r) {
  const std::size_t S = P.S(), W = P.W, G = P.cards.size();
  Stats st;
  st.pw.assign(W, 0.0);
  st.pvar.assign(G, {});
  for (std::size_t g = 0; g < G; ++g) st.pvar[g].assign(P.cards[g] * W, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const double qs = P.q[s];
    if (qs <= 0) continue;
    for (std::size_t w = 0; w < W; ++w) {
      const double j = qs * r[s * W + w];
      if (j <= 0) continue;
      st.pw[w] += j;
      for (std::size_t g = 0; g < G; ++g) st.pvar[g][P.sym[g][s] * W + w] += j;
    }
  }
  const std::size_t last = G - 1, cl = P.cards[last];
  st.pclass.assign(P.n_classes, 0.0);
  st.plast_class.assign(cl * P.n_classes, 0.0);
  for (std::size_t w = 0; w < W; ++w) {
    st.pclass[P.rho[w]] += st.pw[w];
    for (std::size_t a = 0; a < cl; ++a)
      st.plast_class[a * P.n_classes + P.rho[w]] += st.pvar[last][a * W + w];
  }
  return st;
}

double violation_bits(const LatentProblem& P, const std::vector<double>& r) {
  const std::size_t S = P.S(), W = P.W, G = P.cards.size();
  const Stats st = stats_of(P, r);
  double hj = 0;
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t w = 0; w < W; ++w) hj -= xlog2(P.q[s] * r[s * W + w]);
  const double hw = entropy_of(st.pw);
  double v = -(hj - hw);
  for (std::size_t g = 0; g + 1 < G; ++g) v += entropy_of(st.pvar[g]) - hw;
  v += entropy_of(st.plast_class) - entropy_of(st.pclass);
  return v;
}

struct RateTriple {
  double i_sw = 0, i_xw = 0, i_xv = 0;
};

RateTriple rates_of(const LatentProblem& P, const std::vector<double>& r,
                    const std::vector<std::size_t>& vof) {
  const std::size_t S = P.S(), W = P.W;
  const Stats st = stats_of(P, r);
  double hj = 0;
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t w = 0; w < W; ++w) hj -= xlog2(P.q[s] * r[s * W + w]);
  const double hw = entropy_of(st.pw);
  const double hs = entropy_of(P.q);
  RateTriple out;
  out.i_sw = std::max(0.0, hs + hw - hj);
  const std::size_t cx = P.cards[0];
  std::vector<double> px(cx, 0.0);
  for (std::size_t a = 0; a < cx; ++a)
    for (std::size_t w = 0; w < W; ++w) px[a] += st.pvar[0][a * W + w];
  out.i_xw = std::max(0.0, entropy_of(px) + hw - entropy_of(st.pvar[0]));
  std::size_t nv = 0;
  for (std::size_t c : vof) nv = std::max(nv, c + 1);
  std::vector<double> pxv(cx * nv, 0.0), pv(nv, 0.0);
  for (std::size_t w = 0; w < W; ++w) {
    pv[vof[w]] += st.pw[w];
    for (std::size_t a = 0; a < cx; ++a)
      pxv[a * nv + vof[w]] += st.pvar[0][a * W + w];
  }
  out.i_xv = std::max(0.0, entropy_of(px) + entropy_of(pv) - entropy_of(pxv));
  return out;
}

/// One annealed alternating-minimization pass down the lambda schedule,
/// finishing with the exact feasibility phase (lambda = infinity).
void anneal(const LatentProblem& P, std::vector<double>& r, double w0, double w1,
            double w2, const std::vector<std::size_t>& vof,
            std::span<const double> schedule, unsigned iters_per,
            unsigned em_iters) {
  const std::size_t S = P.S(), W = P.W, G = P.cards.size();
  const std::size_t last = G - 1;
  const double tiny = 1e-300;
  std::vector<double> new_log(W);
  const bool use_b = w1 > 0 && G == 3;
  const bool use_v = w2 > 0 && G == 3;
  const std::size_t cyz = use_b ? P.cards[1] * P.cards[2] : 0;

  for (std::size_t phase = 0; phase <= schedule.size(); ++phase) {
    const bool exact = phase == schedule.size();
    const double lam = exact ? 0 : schedule[phase];
    const unsigned iters = exact ? em_iters : iters_per;
    const double c = w0 + w1 + lam;
    const double ez = exact ? 1.0 : lam / c;
    const double eb = exact ? 0.0 : w1 / c;
    const double ev = exact ? 0.0 : w2 / c;
    for (unsigned it = 0; it < iters; ++it) {
      const Stats st = stats_of(P, r);
      // q tables in log space
      std::vector<std::vector<double>> logq(G);
      for (std::size_t g = 0; g < G; ++g) {
        const std::size_t cg = P.cards[g];
        if (g + 1 < G) {
          logq[g].assign(cg * W, 0.0);
          for (std::size_t a = 0; a < cg; ++a)
            for (std::size_t w = 0; w < W; ++w)
              logq[g][a * W + w] =
                  std::log(std::max(st.pvar[g][a * W + w], tiny) /
                           std::max(st.pw[w], tiny));
        } else {
          logq[g].assign(cg * P.n_classes, 0.0);
          for (std::size_t a = 0; a < cg; ++a)
            for (std::size_t cls = 0; cls < P.n_classes; ++cls)
              logq[g][a * P.n_classes + cls] =
                  std::log(std::max(st.plast_class[a * P.n_classes + cls], tiny) /
                           std::max(st.pclass[cls], tiny));
        }
      }
      std::vector<double> logyzxw;
      if (use_b && !exact) {
        // p(yz | x, w) from the current joint
        logyzxw.assign(P.cards[0] * cyz * W, 0.0);
        std::vector<double> agg(P.cards[0] * cyz * W, 0.0),
            den(P.cards[0] * W, 0.0);
        for (std::size_t s = 0; s < S; ++s) {
          const double qs = P.q[s];
          if (qs <= 0) continue;
          const std::size_t x = P.sym[0][s];
          const std::size_t yz = P.sym[1][s] * P.cards[2] + P.sym[2][s];
          for (std::size_t w = 0; w < W; ++w) {
            const double j = qs * r[s * W + w];
            agg[(x * cyz + yz) * W + w] += j;
            den[x * W + w] += j;
          }
        }
        for (std::size_t x = 0; x < P.cards[0]; ++x)
          for (std::size_t yz = 0; yz < cyz; ++yz)
            for (std::size_t w = 0; w < W; ++w)
              logyzxw[(x * cyz + yz) * W + w] =
                  std::log(std::max(agg[(x * cyz + yz) * W + w], tiny) /
                           std::max(den[x * W + w], tiny));
      }
      std::vector<double> logv;
      std::vector<double> px, pv, pxv;
      std::size_t nv = 0;
      if (use_v && !exact) {
        for (std::size_t cc : vof) nv = std::max(nv, cc + 1);
        px.assign(P.cards[0], 0.0);
        pv.assign(nv, 0.0);
        pxv.assign(P.cards[0] * nv, 0.0);
        for (std::size_t w = 0; w < W; ++w) {
          pv[vof[w]] += st.pw[w];
          for (std::size_t a = 0; a < P.cards[0]; ++a)
            pxv[a * nv + vof[w]] += st.pvar[0][a * W + w];
        }
        for (std::size_t a = 0; a < P.cards[0]; ++a)
          for (std::size_t v = 0; v < nv; ++v) px[a] += pxv[a * nv + v];
      }
      for (std::size_t s = 0; s < S; ++s) {
        if (P.q[s] <= 0) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t w = 0; w < W; ++w) {
          double lg = std::log(std::max(st.pw[w], tiny));
          double mix = 0;
          for (std::size_t g = 0; g + 1 < G; ++g)
            mix += logq[g][P.sym[g][s] * W + w];
          mix += logq[last][P.sym[last][s] * P.n_classes + P.rho[w]];
          lg += ez * mix;
          if (use_b && !exact) {
            const std::size_t yz = P.sym[1][s] * P.cards[2] + P.sym[2][s];
            lg += eb * logyzxw[(P.sym[0][s] * cyz + yz) * W + w];
          }
          if (use_v && !exact) {
            const std::size_t x = P.sym[0][s];
            lg -= ev * (std::log(std::max(pxv[x * nv + vof[w]], tiny)) -
                        std::log(std::max(px[x], tiny)) -
                        std::log(std::max(pv[vof[w]], tiny)));
          }
          new_log[w] = lg;
          best = std::max(best, lg);
        }
        double total = 0;
        for (std::size_t w = 0; w < W; ++w) {
          new_log[w] = std::exp(new_log[w] - best);
          total += new_log[w];
        }
        for (std::size_t w = 0; w < W; ++w) r[s * W + w] = new_log[w] / total;
      }
      if (exact && it % 250 == 249 && violation_bits(P, r) < 1e-13) break;
    }
  }
}

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  RateTriple rates;
  double viol = 0;
  std::vector<double> r;
  bool ok = false;
};

std::vector<double> random_r(const LatentProblem& P, StreamRng& rng,
                             std::uint64_t& ctr, int kind) {
  const std::size_t S = P.S(), W = P.W;
  std::vector<double> r(S * W, 0.0);
  if (kind == 2) {  // hard assignment
    for (std::size_t s = 0; s < S; ++s) {
      const std::size_t w =
          std::min<std::size_t>(W - 1, static_cast<std::size_t>(rng.uniform(ctr++) * W));
      for (std::size_t w2 = 0; w2 < W; ++w2)
        r[s * W + w2] = w2 == w ? 0.95 : 0.05 / static_cast<double>(W);
      double t = 0;
      for (std::size_t w2 = 0; w2 < W; ++w2) t += r[s * W + w2];
      for (std::size_t w2 = 0; w2 < W; ++w2) r[s * W + w2] /= t;
    }
  } else {
    for (std::size_t s = 0; s < S; ++s) {
      double t = 0;
      for (std::size_t w = 0; w < W; ++w) {
        const double u = rng.uniform(ctr++);
        r[s * W + w] = -std::log(1.0 - u);
        t += r[s * W + w];
      }
      for (std::size_t w = 0; w < W; ++w) r[s * W + w] /= t;
    }
  }
  return r;
}

const std::vector<std::vector<double>> kSchedules = {
    {0.25, 0.5, 1, 2, 4, 8, 16, 32, 64, 128, 512, 4096, 65536, 1048576},
    {0.5, 1, 2, 4, 8, 16, 32, 64, 256, 2048, 32768, 1048576},
    {1, 2, 4, 8, 16, 64, 256, 2048, 32768, 1048576},
    {64, 256, 2048, 32768, 1048576},  // feasibility-first, EM-like
};

bool better(const Candidate& a, const Candidate& b) {
  if (!b.ok) return a.ok;
  if (!a.ok) return false;
  if (a.objective != b.objective) return a.objective < b.objective;
  const double la[3] = {a.rates.i_sw, a.rates.i_xw, a.rates.i_xv};
  const double lb[3] = {b.rates.i_sw, b.rates.i_xw, b.rates.i_xv};
  for (int i = 0; i < 3; ++i)
    if (la[i] != lb[i]) return la[i] < lb[i];
  return false;
}

Candidate multi_restart(const LatentProblem& P, double w0, double w1, double w2,
                        const std::vector<std::size_t>& vof,
                        const OptimizerConfig& cfg, std::uint64_t stage,
                        const std::vector<std::vector<double>>& warms) {
  Candidate best;
  double best_viol = std::numeric_limits<double>::infinity();
  const unsigned iters_per = cfg.grid_resolution * 10;
  for (unsigned rs = 0; rs < cfg.restarts + warms.size(); ++rs) {
    std::vector<double> r;
    if (rs < warms.size()) {
      r = warms[rs];
    } else {
      StreamRng rng(cfg.seed, {0xA11, stage, rs});
      std::uint64_t ctr = 0;
      r = random_r(P, rng, ctr, static_cast<int>(rs % 3));
    }
    anneal(P, r, w0, w1, w2, vof, kSchedules[rs % kSchedules.size()], iters_per,
           cfg.max_iterations);
    double v = violation_bits(P, r);
    // slow EM tail: keep polishing while progress continues
    for (int extra = 0; extra < 6 && v > kFeasible && v < 1e-4; ++extra) {
      anneal(P, r, w0, w1, w2, vof, {}, 0, cfg.max_iterations);
      const double v2 = violation_bits(P, r);
      if (v2 > 0.97 * v) {
        v = v2;
        break;
      }
      v = v2;
    }
    best_viol = std::min(best_viol, v);
    if (v > kFeasible) continue;
    Candidate c;
    c.ok = true;
    c.viol = v;
    c.rates = rates_of(P, r, vof);
    c.objective = w0 * c.rates.i_sw + w1 * c.rates.i_xw + w2 * c.rates.i_xv;
    c.r = std::move(r);
    if (better(c, best)) best = std::move(c);
  }
  if (!best.ok) best.viol = best_viol;
  return best;
}

std::vector<double> pad_atoms(const std::vector<double>& r, std::size_t S,
                              std::size_t w_old, std::size_t w_new) {
  std::vector<double> out(S * w_new, 0.0);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t w = 0; w < w_old; ++w) out[s * w_new + w] = r[s * w_old + w];
  return out;
}

/// Merge atoms whose forward behaviors coincide within tol; lossless.
std::vector<double> merge_identical(const LatentProblem& P,
                                    const std::vector<double>& r,
                                    std::size_t* out_atoms, double tol = 1e-7) {
  const std::size_t S = P.S(), W = P.W, G = P.cards.size();
  const Stats st = stats_of(P, r);
  std::vector<std::vector<double>> rows(W);
  for (std::size_t w = 0; w < W; ++w) {
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t a = 0; a < P.cards[g]; ++a)
        rows[w].push_back(st.pw[w] > 1e-12 ? st.pvar[g][a * W + w] / st.pw[w]
                                           : -1.0);
  }
  std::vector<std::size_t> group(W, W);
  std::vector<std::size_t> reps;
  for (std::size_t w = 0; w < W; ++w) {
    if (st.pw[w] <= 1e-12) continue;
    bool placed = false;
    for (std::size_t gi = 0; gi < reps.size() && !placed; ++gi) {
      const std::size_t w0 = reps[gi];
      double d = 0;
      for (std::size_t i = 0; i < rows[w].size(); ++i)
        d = std::max(d, std::abs(rows[w][i] - rows[w0][i]));
      if (d < tol) {
        group[w] = gi;
        placed = true;
      }
    }
    if (!placed) {
      group[w] = reps.size();
      reps.push_back(w);
    }
  }
  const std::size_t newW = std::max<std::size_t>(reps.size(), 1);
  std::vector<double> out(S * newW, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    double t = 0;
    for (std::size_t w = 0; w < W; ++w)
      if (group[w] < newW) {
        out[s * newW + group[w]] += r[s * W + w];
        t += r[s * W + w];
      }
    if (t <= 0) {
      for (std::size_t w = 0; w < newW; ++w) out[s * newW + w] = 1.0 / newW;
    } else {
      for (std::size_t w = 0; w < newW; ++w) out[s * newW + w] /= t;
    }
  }
  *out_atoms = newW;
  return out;
}

/// Reduce an untied candidate to at most `card` atoms and re-polish.
Candidate reduce_to_card(const std::vector<std::size_t>& cards,
                         const std::vector<double>& q, std::vector<double> r,
                         std::size_t from_atoms, std::size_t card, double w0,
                         double w1, double w2, const OptimizerConfig& cfg) {
  std::size_t W = from_atoms;
  auto ident = [](std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
  };
  {
    LatentProblem P = LatentProblem::make(cards, q, W, ident(W));
    std::size_t newW = W;
    r = merge_identical(P, r, &newW);
    W = newW;
  }
  while (W > card) {
    // merge the two most similar atoms, weighted by the smaller mass
    LatentProblem P = LatentProblem::make(cards, q, W, ident(W));
    const Stats st = stats_of(P, r);
    const std::size_t G = cards.size();
    double bestd = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 1;
    for (std::size_t a = 0; a < W; ++a)
      for (std::size_t b = a + 1; b < W; ++b) {
        double d = 0;
        for (std::size_t g = 0; g < G; ++g)
          for (std::size_t c = 0; c < cards[g]; ++c) {
            const double ra = st.pw[a] > 1e-12 ? st.pvar[g][c * W + a] / st.pw[a]
                                               : 1.0 / cards[g];
            const double rb = st.pw[b] > 1e-12 ? st.pvar[g][c * W + b] / st.pw[b]
                                               : 1.0 / cards[g];
            d += std::abs(ra - rb);
          }
        d *= std::min(st.pw[a], st.pw[b]) + 1e-6;
        if (d < bestd) {
          bestd = d;
          ba = a;
          bb = b;
        }
      }
    std::vector<double> r2(P.S() * (W - 1), 0.0);
    for (std::size_t s = 0; s < P.S(); ++s) {
      std::size_t o = 0;
      for (std::size_t w = 0; w < W; ++w) {
        if (w == bb) continue;
        double v = r[s * W + w];
        if (w == ba) v += r[s * W + bb];
        r2[s * (W - 1) + o++] = v;
      }
    }
    r = std::move(r2);
    --W;
  }
  LatentProblem P = LatentProblem::make(cards, q, W, ident(W));
  const std::vector<double> polish_sched = {16, 64, 256, 2048, 32768, 1048576};
  anneal(P, r, w0, w1, w2, ident(W), polish_sched, 50, cfg.max_iterations);
  Candidate c;
  const double v = violation_bits(P, r);
  if (v > kFeasible) return c;
  c.ok = true;
  c.viol = v;
  c.rates = rates_of(P, r, ident(W));
  c.objective = w0 * c.rates.i_sw + w1 * c.rates.i_xw + w2 * c.rates.i_xv;
  c.r = std::move(r);
  return c;
}

/// Cluster the last variable's conditional rows of an untied candidate and
/// re-polish with the tied structure. Returns an invalid candidate when the
/// clustering cannot satisfy the requested shape.
struct RetiedCandidate {
  Candidate cand;
  std::vector<std::size_t> rho;  // class per atom
};

RetiedCandidate retie_candidate(const std::vector<std::size_t>& cards,
                                const std::vector<double>& q,
                                std::vector<double> r, std::size_t atoms,
                                std::size_t max_atoms, std::size_t max_classes,
                                std::size_t max_per_class, double w0, double w1,
                                double w2, const OptimizerConfig& cfg) {
  RetiedCandidate out;
  auto ident = [](std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
  };
  {
    LatentProblem P0 = LatentProblem::make(cards, q, atoms, ident(atoms));
    std::size_t na = atoms;
    r = merge_identical(P0, r, &na);
    atoms = na;
  }
  while (atoms > max_atoms) {
    auto red = reduce_to_card(cards, q, r, atoms, max_atoms, w0, w1, w2, cfg);
    if (!red.ok) return out;
    r = red.r;
    atoms = max_atoms;
  }
  // greedy clustering of the last variable's rows, heaviest atoms first
  LatentProblem P0 = LatentProblem::make(cards, q, atoms, ident(atoms));
  const Stats st = stats_of(P0, r);
  const std::size_t G = cards.size(), cl = cards[G - 1];
  std::vector<std::vector<double>> zrow(atoms, std::vector<double>(cl, 0.0));
  for (std::size_t a = 0; a < atoms; ++a)
    for (std::size_t c = 0; c < cl; ++c)
      zrow[a][c] = st.pw[a] > 1e-12 ? st.pvar[G - 1][c * atoms + a] / st.pw[a]
                                    : 1.0 / cl;
  std::vector<std::size_t> order(atoms);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return st.pw[a] > st.pw[b]; });
  std::vector<std::vector<double>> centers;
  std::vector<double> center_mass;
  std::vector<std::size_t> rho(atoms, 0);
  for (std::size_t a : order) {
    double bestd = 1e18;
    std::size_t bi = centers.size();
    for (std::size_t i = 0; i < centers.size(); ++i) {
      double d = 0;
      for (std::size_t c = 0; c < cl; ++c) d += std::abs(zrow[a][c] - centers[i][c]);
      if (d < bestd) {
        bestd = d;
        bi = i;
      }
    }
    if (bi == centers.size() && (centers.size() < max_classes || bestd > 1e-12)) {
      if (centers.size() < max_classes) {
        centers.push_back(zrow[a]);
        center_mass.push_back(st.pw[a]);
        rho[a] = centers.size() - 1;
        continue;
      }
    }
    if (bi == centers.size()) bi = 0;
    // merge into the nearest center (mass-weighted)
    rho[a] = bi;
    const double mm = center_mass[bi] + st.pw[a];
    if (mm > 0)
      for (std::size_t c = 0; c < cl; ++c)
        centers[bi][c] =
            (centers[bi][c] * center_mass[bi] + zrow[a][c] * st.pw[a]) / mm;
    center_mass[bi] = mm;
  }
  // per-class atom budget
  if (max_per_class > 0) {
    std::vector<std::size_t> count(centers.size(), 0);
    for (std::size_t a = 0; a < atoms; ++a) count[rho[a]]++;
    for (std::size_t c = 0; c < centers.size(); ++c)
      if (count[c] > max_per_class) return out;
  }
  LatentProblem P = LatentProblem::make(cards, q, atoms, rho);
  const std::vector<double> sched = {16, 64, 256, 2048, 32768, 1048576};
  anneal(P, r, w0, w1, w2, rho, sched, 50, cfg.max_iterations);
  const double v = violation_bits(P, r);
  if (v > kFeasible) return out;
  out.cand.ok = true;
  out.cand.viol = v;
  out.cand.rates = rates_of(P, r, rho);
  out.cand.objective = w0 * out.cand.rates.i_sw + w1 * out.cand.rates.i_xw +
                       w2 * out.cand.rates.i_xv;
  out.cand.r = std::move(r);
  out.rho = std::move(rho);
  return out;
}

struct SessionResult {
  Candidate best;
  // structure of the winner, for building the explicit coupling
  std::size_t atoms = 0;
  std::vector<std::size_t> u_of, v_of;  // labels per atom
  double best_infeasible_viol = std::numeric_limits<double>::infinity();
};

std::vector<std::size_t> identity_map(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

/// Untied single-latent ladder with an overparametrized escape pass.
SessionResult solve_single_session(const std::vector<std::size_t>& cards,
                                   const std::vector<double>& q, std::size_t card,
                                   double w0, double w1, double w2,
                                   const OptimizerConfig& cfg) {
  SessionResult out;
  std::vector<double> warm;
  std::size_t warm_atoms = 0;
  std::vector<std::size_t> ladder;
  for (std::size_t k : {std::size_t{2}, std::size_t{3}, std::size_t{4},
                        std::size_t{6}, std::size_t{8}, card})
    if (k >= 2 && k <= card && (ladder.empty() || ladder.back() != k))
      ladder.push_back(k);
  std::uint64_t stage = 0;
  for (std::size_t k : ladder) {
    LatentProblem P = LatentProblem::make(cards, q, k, identity_map(k));
    std::vector<std::vector<double>> warms;
    if (!warm.empty()) warms.push_back(pad_atoms(warm, P.S(), warm_atoms, k));
    auto c = multi_restart(P, w0, w1, w2, identity_map(k), cfg, 0x51 + stage++,
                           warms);
    if (c.ok) {
      warm = c.r;
      warm_atoms = k;
      if (better(c, out.best)) {
        out.best = c;
        out.atoms = k;
      }
    } else {
      out.best_infeasible_viol = std::min(out.best_infeasible_viol, c.viol);
    }
  }
  // escape pass at 2x the cardinality, reduced back
  {
    const std::size_t W2 = 2 * card;
    LatentProblem P = LatentProblem::make(cards, q, W2, identity_map(W2));
    std::vector<std::vector<double>> warms;
    if (!warm.empty()) warms.push_back(pad_atoms(warm, P.S(), warm_atoms, W2));
    auto c = multi_restart(P, w0, w1, w2, identity_map(W2), cfg, 0x52 + stage,
                           warms);
    if (c.ok) {
      auto red = reduce_to_card(cards, q, c.r, W2, card, w0, w1, w2, cfg);
      if (red.ok && better(red, out.best)) {
        out.best = red;
        out.atoms = red.r.size() / q.size();
      }
    }
  }
  if (out.best.ok) {
    out.u_of = identity_map(out.atoms);
    out.v_of = identity_map(out.atoms);
  }
  return out;
}

/// Pair-structured search over (u, v) atoms with Z tied per v-class.
SessionResult solve_pair_session(const std::vector<std::size_t>& cards,
                                 const std::vector<double>& q, std::size_t cu,
                                 std::size_t cv, double w0, double w1, double w2,
                                 const OptimizerConfig& cfg) {
  SessionResult out;
  // faces: the u-degenerate ladder (atoms = v values only)
  SessionResult face = solve_single_session(cards, q, cv, w0, w1, w2, cfg);
  if (face.best.ok) {
    out.best = face.best;
    out.atoms = face.atoms;
    out.u_of.assign(face.atoms, 0);
    out.v_of = identity_map(face.atoms);
  }
  out.best_infeasible_viol = face.best_infeasible_viol;

  // free pair runs
  const std::size_t W = cu * cv;
  std::vector<std::size_t> rho(W);
  for (std::size_t w = 0; w < W; ++w) rho[w] = w % cv;
  LatentProblem P = LatentProblem::make(cards, q, W, rho);
  std::vector<std::vector<double>> warms;
  if (face.best.ok) {
    // embed the face winner on the u = 0 row of the pair grid
    std::vector<double> wf(P.S() * W, 0.0);
    for (std::size_t s = 0; s < P.S(); ++s)
      for (std::size_t v = 0; v < face.atoms && v < cv; ++v)
        wf[s * W + v] = face.best.r[s * face.atoms + v];
    warms.push_back(std::move(wf));
  }
  auto c = multi_restart(P, w0, w1, w2, rho, cfg, 0x61, warms);
  if (c.ok && better(c, out.best)) {
    out.best = c;
    out.atoms = W;
    out.u_of.resize(W);
    out.v_of.resize(W);
    for (std::size_t w = 0; w < W; ++w) {
      out.u_of[w] = w / cv;
      out.v_of[w] = w % cv;
    }
  } else if (!c.ok) {
    out.best_infeasible_viol = std::min(out.best_infeasible_viol, c.viol);
  }
  // untied escape, retied back into the (u, v) grid
  {
    const std::size_t We = std::max<std::size_t>(W, 2 * cv);
    auto ident = [](std::size_t n) {
      std::vector<std::size_t> v(n);
      std::iota(v.begin(), v.end(), std::size_t{0});
      return v;
    };
    LatentProblem Pe = LatentProblem::make(cards, q, We, ident(We));
    auto e = multi_restart(Pe, w0, w1, w2, ident(We), cfg, 0x62, {});
    if (e.ok) {
      auto rt = retie_candidate(cards, q, e.r, We, W, cv, cu, w0, w1, w2, cfg);
      if (rt.cand.ok && better(rt.cand, out.best)) {
        const std::size_t atoms = rt.cand.r.size() / q.size();
        out.best = rt.cand;
        out.atoms = atoms;
        out.u_of.assign(atoms, 0);
        out.v_of.resize(atoms);
        std::vector<std::size_t> next_u(cv, 0);
        for (std::size_t a = 0; a < atoms; ++a) {
          out.v_of[a] = rt.rho[a];
          out.u_of[a] = next_u[rt.rho[a]]++;
        }
      }
    }
  }
  return out;
}

/// Functional search: atoms are u, V = phi(u); phi drawn from a pattern set.
SessionResult solve_dprime_session(const std::vector<std::size_t>& cards,
                                   const std::vector<double>& q, std::size_t cu,
                                   std::size_t cv, double w0, double w1, double w2,
                                   const OptimizerConfig& cfg) {
  // any candidate with atoms <= min(cu, cv) is D'-valid with phi injective
  SessionResult out = solve_single_session(cards, q, std::min(cu, cv), w0, w1, w2,
                                           cfg);
  if (out.best.ok) {
    out.u_of = identity_map(out.atoms);
    out.v_of = identity_map(out.atoms);
  }
  const unsigned patterns = 8;
  StreamRng rng(cfg.seed, {0xD9});
  std::uint64_t ctr = 0;
  for (unsigned pat = 0; pat < patterns; ++pat) {
    std::vector<std::size_t> phi(cu);
    if (pat == 0) {
      for (std::size_t u = 0; u < cu; ++u) phi[u] = u % cv;
    } else if (pat == 1) {
      for (std::size_t u = 0; u < cu; ++u) phi[u] = std::min(u, cv - 1);
    } else {
      for (std::size_t u = 0; u < cu; ++u)
        phi[u] = u < cv ? u
                        : std::min<std::size_t>(
                              cv - 1,
                              static_cast<std::size_t>(rng.uniform(ctr++) * cv));
    }
    LatentProblem P = LatentProblem::make(cards, q, cu, phi);
    auto c = multi_restart(P, w0, w1, w2, phi, cfg, 0x70 + pat, {});
    if (c.ok && better(c, out.best)) {
      out.best = c;
      out.atoms = cu;
      out.u_of = identity_map(cu);
      out.v_of = phi;
    } else if (!c.ok) {
      out.best_infeasible_viol = std::min(out.best_infeasible_viol, c.viol);
    }
  }
  // untied escape retied to at most cv classes
  {
    const std::size_t We = 2 * cu;
    auto ident = identity_map(We);
    LatentProblem Pe = LatentProblem::make(cards, q, We, ident);
    auto e = multi_restart(Pe, w0, w1, w2, ident, cfg, 0x7E, {});
    if (e.ok) {
      auto rt = retie_candidate(cards, q, e.r, We, cu, cv, 0, w0, w1, w2, cfg);
      if (rt.cand.ok && better(rt.cand, out.best)) {
        const std::size_t atoms = rt.cand.r.size() / q.size();
        out.best = rt.cand;
        out.atoms = atoms;
        out.u_of = identity_map(atoms);
        out.v_of = rt.rho;
      }
    }
  }
  // local search over the class map of the incumbent
  if (out.best.ok && out.atoms > 0 && out.v_of.size() == out.atoms) {
    for (int sweep = 0; sweep < 2; ++sweep) {
      bool improved = false;
      for (std::size_t a = 0; a < out.atoms; ++a) {
        for (std::size_t c2 = 0; c2 < cv; ++c2) {
          if (c2 == out.v_of[a]) continue;
          std::vector<std::size_t> phi = out.v_of;
          phi[a] = c2;
          LatentProblem P = LatentProblem::make(cards, q, out.atoms, phi);
          std::vector<double> r = out.best.r;
          const std::vector<double> sched = {64, 256, 2048, 32768, 1048576};
          anneal(P, r, w0, w1, w2, phi, sched, 40, cfg.max_iterations);
          if (violation_bits(P, r) > kFeasible) continue;
          Candidate c;
          c.ok = true;
          c.rates = rates_of(P, r, phi);
          c.objective = w0 * c.rates.i_sw + w1 * c.rates.i_xw + w2 * c.rates.i_xv;
          c.r = std::move(r);
          if (better(c, out.best)) {
            out.best = c;
            out.v_of = phi;
            out.u_of = identity_map(out.atoms);
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
  }
  return out;
}

std::vector<double> canonical_target(const JointDistribution& joint,
                                     const std::vector<std::string>& names,
                                     std::vector<std::size_t>* cards) {
  const auto m = joint.marginal(std::span<const std::string>(names));
  cards->clear();
  for (const auto& v : m.variables()) cards->push_back(v.card);
  std::vector<double> q(m.total_states(), 0.0);
  m.for_each([&](JointDistribution::Index i, double p) { q[i] = p; });
  return q;
}

}  // namespace

double wyner_common_information(const JointDistribution& q_xy, unsigned card_u,
                                const OptimizerConfig& cfg) {
  cfg.validate();
  if (card_u < 1) throw ArgumentError("wyner common information needs card_u >= 1");
  std::vector<std::size_t> cards;
  const auto q = canonical_target(q_xy, {"X", "Y"}, &cards);
  if (card_u == 1) {
    // singleton U: feasible only for product targets; report I-gap directly
    LatentProblem P = LatentProblem::make(cards, q, 1, {0});
    std::vector<double> r(q.size(), 1.0);
    const double v = violation_bits(P, r);
    if (v > cfg.tolerance)
      throw SearchError("no coupling with a singleton auxiliary", v);
    return 0.0;
  }
  auto s = solve_single_session(cards, q, card_u, 1.0, 0.0, 0.0, cfg);
  if (!s.best.ok)
    throw SearchError("no feasible conditional-independence coupling found",
                      s.best_infeasible_viol);
  return s.best.rates.i_sw;
}

double triple_wyner(const JointDistribution& q_xyz, unsigned card_u,
                    const OptimizerConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> cards;
  const auto q = canonical_target(q_xyz, {"X", "Y", "Z"}, &cards);
  auto s = solve_single_session(cards, q, std::max(2u, card_u), 1.0, 0.0, 0.0, cfg);
  if (!s.best.ok)
    throw SearchError("no feasible conditional-independence coupling found",
                      s.best_infeasible_viol);
  return s.best.rates.i_sw;
}

double cascade_common_information(const JointDistribution& q_xyz,
                                  std::pair<unsigned, unsigned> cards_uv,
                                  const OptimizerConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> cards;
  const auto q = canonical_target(q_xyz, {"X", "Y", "Z"}, &cards);
  auto s = solve_pair_session(cards, q, cards_uv.first, cards_uv.second, 1.0, 0.0,
                              0.0, cfg);
  if (!s.best.ok)
    throw SearchError("no feasible two-chain coupling found",
                      s.best_infeasible_viol);
  return s.best.rates.i_sw;
}

double cascade_common_information(const JointDistribution& q_xyz,
                                  const OptimizerConfig& cfg) {
  return cascade_common_information(q_xyz, {2, 10}, cfg);
}

OptimizeResult minimize_rates(const JointDistribution& target,
                              const std::array<double, 3>& weights,
                              std::pair<unsigned, unsigned> cards_uv,
                              bool restrict_to_dprime, const OptimizerConfig& cfg) {
  cfg.validate();
  bool any = false;
  for (double w : weights) {
    if (w < 0) throw ArgumentError("objective weights must be nonnegative");
    if (w > 0) any = true;
  }
  if (!any) throw ArgumentError("objective weights must not all be zero");
  std::vector<std::size_t> cards;
  const auto q = canonical_target(target, {"X", "Y", "Z"}, &cards);
  const std::size_t bound_v = cards[0] * cards[1] * cards[2] + 3;
  if (cards_uv.second > bound_v || cards_uv.first > bound_v * cards_uv.second + 3)
    throw ArgumentError("requested cardinalities exceed the auxiliary bounds");

  SessionResult s = restrict_to_dprime
                        ? solve_dprime_session(cards, q, cards_uv.first,
                                               cards_uv.second, weights[0],
                                               weights[1], weights[2], cfg)
                        : solve_pair_session(cards, q, cards_uv.first,
                                             cards_uv.second, weights[0],
                                             weights[1], weights[2], cfg);
  if (!s.best.ok)
    throw SearchError("no coupling found matching the target within tolerance",
                      s.best_infeasible_viol);

  // build the explicit joint over (X,Y,Z,U,V) from the reverse channel
  std::size_t cu = 0, cv = 0;
  for (std::size_t a = 0; a < s.atoms; ++a) {
    cu = std::max(cu, s.u_of[a] + 1);
    cv = std::max(cv, s.v_of[a] + 1);
  }
  std::vector<Variable> vars = {{"X", cards[0]}, {"Y", cards[1]}, {"Z", cards[2]},
                                {"U", cu},       {"V", cv}};
  std::vector<double> mass(cards[0] * cards[1] * cards[2] * cu * cv, 0.0);
  const std::size_t S = q.size();
  for (std::size_t sidx = 0; sidx < S; ++sidx) {
    if (q[sidx] <= 0) continue;
    for (std::size_t a = 0; a < s.atoms; ++a) {
      const double p = q[sidx] * s.best.r[sidx * s.atoms + a];
      if (p <= 0) continue;
      mass[(sidx * cu + s.u_of[a]) * cv + s.v_of[a]] += p;
    }
  }
  double tot = 0;
  for (double v : mass) tot += v;
  for (double& v : mass) v /= tot;
  auto tgt = target.marginal({"X", "Y", "Z"});
  AuxiliaryCoupling coupling(JointDistribution::dense(std::move(vars), std::move(mass)),
                             tgt, 1e-9, 3);
  OptimizeResult res{coupling, rate_triple(coupling), 0.0,
                     check_membership_D(coupling, cfg.tolerance)};
  res.objective = weights[0] * res.rates.r0 + weights[1] * res.rates.r[0] +
                  weights[2] * res.rates.r[1];
  if (res.membership.chain1_dev > cfg.tolerance ||
      res.membership.chain2_dev > cfg.tolerance)
    throw SearchError("search result misses the chain constraints",
                      std::max(res.membership.chain1_dev, res.membership.chain2_dev));
  return res;
}

}  // namespace sccs
