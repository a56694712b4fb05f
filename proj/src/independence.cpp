#include "sccs/independence.hpp"

#include <cmath>
#include <map>

namespace sccs {

namespace {

// Regularized incomplete gamma via the classic series / continued-fraction
// split at x = a + 1.
double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw ArgumentError("invalid incomplete gamma arguments");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

}  // namespace

double chi_square_sf(double x, double k) {
  if (k <= 0) throw ArgumentError("chi-square needs positive degrees of freedom");
  if (x <= 0) return 1.0;
  return gamma_q(0.5 * k, 0.5 * x);
}

IndependenceTestResult eavesdropper_independence_test(
    const std::vector<CascadeSample>& samples, double significance) {
  if (!(significance > 0.0 && significance < 1.0))
    throw ArgumentError("significance must lie in (0,1)");
  IndependenceTestResult res;
  res.samples = samples.size();
  if (samples.size() < 2) return res;  // inconclusive

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> msg_ids;
  std::map<std::vector<std::uint32_t>, std::size_t> seq_ids;
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  cells.reserve(samples.size());
  for (const auto& s : samples) {
    const auto mid =
        msg_ids.try_emplace({s.ma, s.mb}, msg_ids.size()).first->second;
    std::vector<std::uint32_t> seq;
    seq.reserve(s.xb.size() * 3);
    seq.insert(seq.end(), s.xb.begin(), s.xb.end());
    seq.insert(seq.end(), s.yb.begin(), s.yb.end());
    seq.insert(seq.end(), s.zb.begin(), s.zb.end());
    const auto sid = seq_ids.try_emplace(std::move(seq), seq_ids.size()).first->second;
    cells.push_back({mid, sid});
  }
  res.message_cells = msg_ids.size();
  res.sequence_cells = seq_ids.size();
  if (res.message_cells < 2 || res.sequence_cells < 2) return res;  // inconclusive

  const std::size_t r = res.message_cells, c = res.sequence_cells;
  std::vector<double> counts(r * c, 0.0), row(r, 0.0), col(c, 0.0);
  for (const auto& [i, j] : cells) {
    counts[i * c + j] += 1.0;
    row[i] += 1.0;
    col[j] += 1.0;
  }
  const double total = static_cast<double>(samples.size());
  double g = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double o = counts[i * c + j];
      if (o <= 0.0) continue;
      g += o * std::log(o * total / (row[i] * col[j]));
    }
  res.conclusive = true;
  res.g_statistic = 2.0 * g;
  res.dof = static_cast<double>((r - 1) * (c - 1));
  res.p_value = chi_square_sf(res.g_statistic, res.dof);
  res.reject = res.p_value < significance;
  return res;
}

}  // namespace sccs
