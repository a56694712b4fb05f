#include "sccs/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

namespace sccs {

RatePoint::RatePoint(double r0_, std::vector<double> r_) : r0(r0_), r(std::move(r_)) {
  auto bad = [](double v) { return !(v >= -1e-12); };
  if (bad(r0)) throw ArgumentError("negative rate component");
  for (double& v : r)
    if (bad(v)) throw ArgumentError("negative rate component");
  if (r0 < 0) r0 = 0;
  for (double& v : r)
    if (v < 0) v = 0;
}

std::vector<double> RatePoint::coords() const {
  std::vector<double> c;
  c.reserve(dim());
  c.push_back(r0);
  c.insert(c.end(), r.begin(), r.end());
  return c;
}

namespace detail {

std::vector<Corner> remove_dominated(std::vector<Corner> corners) {
  std::vector<bool> keep(corners.size(), true);
  for (std::size_t i = 0; i < corners.size(); ++i) {
    for (std::size_t j = 0; j < corners.size(); ++j) {
      if (i == j) continue;
      bool le_all = true, lt_one = false;
      for (std::size_t k = 0; k < corners[i].x.size(); ++k) {
        if (corners[j].x[k] > corners[i].x[k] + 1e-12) le_all = false;
        if (corners[j].x[k] < corners[i].x[k] - 1e-12) lt_one = true;
      }
      if ((le_all && lt_one) || (le_all && !lt_one && j < i)) {  // dup: keep first
        keep[i] = false;
        break;
      }
    }
  }
  std::vector<Corner> out;
  for (std::size_t i = 0; i < corners.size(); ++i)
    if (keep[i]) out.push_back(std::move(corners[i]));
  return out;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> cross3(const std::vector<double>& a, const std::vector<double>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

struct Tri {
  std::size_t v[3];
  std::vector<double> n;
  double off = 0;
  bool alive = true;
};

void hull2d(RegionFrontier& f, double tol) {
  // Andrew monotone chain; facets are outward-oriented edges.
  std::vector<std::size_t> idx(f.corners.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (f.corners[a].x[0] != f.corners[b].x[0])
      return f.corners[a].x[0] < f.corners[b].x[0];
    return f.corners[a].x[1] < f.corners[b].x[1];
  });
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    const auto &O = f.corners[o].x, &A = f.corners[a].x, &B = f.corners[b].x;
    return (A[0] - O[0]) * (B[1] - O[1]) - (A[1] - O[1]) * (B[0] - O[0]);
  };
  std::vector<std::size_t> h;
  std::size_t lower_limit = 1;
  for (std::size_t pass = 0; pass < 2; ++pass) {
    lower_limit = h.size() + 1;
    for (std::size_t ii = 0; ii < idx.size(); ++ii) {
      std::size_t i = pass == 0 ? idx[ii] : idx[idx.size() - 1 - ii];
      while (h.size() > lower_limit && cross(h[h.size() - 2], h[h.size() - 1], i) <= tol)
        h.pop_back();
      h.push_back(i);
    }
    h.pop_back();
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    const std::size_t a = h[i], b = h[(i + 1) % h.size()];
    const auto &A = f.corners[a].x, &B = f.corners[b].x;
    std::vector<double> n = {B[1] - A[1], -(B[0] - A[0])};  // right-hand normal of ccw hull
    const double len = std::hypot(n[0], n[1]);
    if (len < tol) continue;
    n[0] /= len;
    n[1] /= len;
    f.facets.push_back({{a, b}, n, dot(n, A)});
  }
}

void hull3d(RegionFrontier& f, std::size_t i0, std::size_t i1, std::size_t i2,
            std::size_t i3, double eps) {
  const auto& pts = f.corners;
  auto at = [&](std::size_t i) -> const std::vector<double>& { return pts[i].x; };
  auto make_tri = [&](std::size_t a, std::size_t b, std::size_t c,
                      const std::vector<double>& inside) {
    Tri t;
    t.v[0] = a;
    t.v[1] = b;
    t.v[2] = c;
    t.n = cross3(sub(at(b), at(a)), sub(at(c), at(a)));
    t.off = dot(t.n, at(a));
    if (dot(t.n, inside) > t.off) {  // orient so the inside satisfies n.x <= off
      std::swap(t.v[1], t.v[2]);
      for (double& v : t.n) v = -v;
      t.off = -t.off;
    }
    return t;
  };
  std::vector<double> centroid(3, 0.0);
  for (std::size_t k : {i0, i1, i2, i3})
    for (int d = 0; d < 3; ++d) centroid[d] += at(k)[d] / 4.0;

  std::vector<Tri> tris;
  tris.push_back(make_tri(i0, i1, i2, centroid));
  tris.push_back(make_tri(i0, i1, i3, centroid));
  tris.push_back(make_tri(i0, i2, i3, centroid));
  tris.push_back(make_tri(i1, i2, i3, centroid));

  for (std::size_t p = 0; p < pts.size(); ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<std::size_t> visible;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!tris[t].alive) continue;
      const double scale = std::max(1.0, std::abs(tris[t].off));
      if (dot(tris[t].n, at(p)) > tris[t].off + eps * scale) visible.push_back(t);
    }
    if (visible.empty()) continue;
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (std::size_t t : visible)
      for (int e = 0; e < 3; ++e)
        edges[{tris[t].v[e], tris[t].v[(e + 1) % 3]}]++;
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    for (const auto& [e, cnt] : edges) {
      (void)cnt;
      if (!edges.count({e.second, e.first})) horizon.push_back(e);
    }
    for (std::size_t t : visible) tris[t].alive = false;
    for (const auto& [a, b] : horizon) tris.push_back(make_tri(a, b, p, centroid));
  }
  for (const auto& t : tris) {
    if (!t.alive) continue;
    const double len = std::sqrt(dot(t.n, t.n));
    if (len <= 0) continue;
    std::vector<double> n = t.n;
    for (double& v : n) v /= len;
    f.facets.push_back({{t.v[0], t.v[1], t.v[2]}, n, t.off / len});
  }
}

}  // namespace

void build_hull(RegionFrontier& f, double collinear_tol) {
  f.facets.clear();
  const std::size_t d = f.axes.size();
  const std::size_t n = f.corners.size();
  if (n == 0) {
    f.hull_dimension = -1;
    return;
  }
  std::vector<std::size_t> basis = {0};
  std::vector<std::vector<double>> dirs;
  double scale = 1.0;
  for (const auto& c : f.corners)
    for (double v : c.x) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 1; i < n && dirs.size() < d; ++i) {
    std::vector<double> v = sub(f.corners[i].x, f.corners[basis[0]].x);
    for (const auto& u : dirs) {
      const double proj = dot(v, u);
      for (std::size_t k = 0; k < d; ++k) v[k] -= proj * u[k];
    }
    const double len = std::sqrt(dot(v, v));
    if (len > collinear_tol * scale) {
      for (double& x : v) x /= len;
      dirs.push_back(v);
      basis.push_back(i);
    }
  }
  f.hull_dimension = static_cast<int>(dirs.size());
  if (f.hull_dimension != static_cast<int>(d)) return;  // degenerate: corners only
  if (d == 2)
    hull2d(f, collinear_tol * scale);
  else if (d == 3)
    hull3d(f, basis[0], basis[1], basis[2], basis[3], collinear_tol);
}

}  // namespace detail

namespace {

/// Phase-1 simplex for { A x = b, x >= 0 }: returns the residual sum of
/// artificials, 0 (within tolerance) iff the system is feasible.
double lp_phase1_residual(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t m = A.size();
  const std::size_t n = m == 0 ? 0 : A[0].size();
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] < 0) {
      b[i] = -b[i];
      for (double& v : A[i]) v = -v;
    }
  std::vector<std::vector<double>> T(m, std::vector<double>(n + m + 1, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1.0;
    T[i][n + m] = b[i];
    basis[i] = n + i;
  }
  std::vector<double> obj(n + m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= n + m; ++j) obj[j] -= T[i][j];
  for (std::size_t i = 0; i < m; ++i) obj[n + i] = 0.0;

  const double eps = 1e-11;
  for (std::size_t iter = 0; iter < 50000; ++iter) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j)
      if (obj[j] < -eps) {
        enter = j;
        break;  // Bland's rule: no cycling
      }
    if (enter == n + m) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] > eps) {
        const double ratio = T[i][n + m] / T[i][enter];
        if (ratio < best - eps ||
            (ratio < best + eps && (leave == m || basis[i] < basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) break;
    const double piv = T[leave][enter];
    for (double& v : T[leave]) v /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double factor = T[i][enter];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j <= n + m; ++j) T[i][j] -= factor * T[leave][j];
    }
    const double factor = obj[enter];
    if (factor != 0.0)
      for (std::size_t j = 0; j <= n + m; ++j) obj[j] -= factor * T[leave][j];
    basis[leave] = enter;
  }
  double residual = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n) residual += T[i][n + m];
  return residual;
}

}  // namespace

RegionFrontier task_region(unsigned m) {
  if (m < 3) throw ArgumentError("task region needs m >= 3");
  RegionFrontier f;
  f.axes = {"R0", "R1", "R2"};
  const double num = static_cast<double>(m) * (m - 1.0) * (m - 2.0);
  for (unsigned a = 2; a <= m - 1; ++a) {
    for (unsigned b = 1; b <= a - 1; ++b) {
      const double den = static_cast<double>(a - b) * b * (m - a);
      Corner c;
      c.generator = "a=" + std::to_string(a) + ";b=" + std::to_string(b);
      c.x = {std::log2(num / den), std::log2(static_cast<double>(m) / (a - b)),
             std::log2(static_cast<double>(m) / a)};
      f.raw.push_back(std::move(c));
    }
  }
  f.raw_corner_count = f.raw.size();
  f.corners = detail::remove_dominated(f.raw);
  detail::build_hull(f);
  return f;
}

ScatterRelayRegion scatter_relay_region(unsigned m) {
  if (m < 2) throw ArgumentError("scatter relay region needs m >= 2");
  ScatterRelayRegion out;
  out.frontier.axes = {"R1", "R2"};
  double r2_at_max_a = 0.0;
  out.min_sum_rate = std::numeric_limits<double>::infinity();
  for (unsigned a = 1; a <= m - 1; ++a) {
    Corner c;
    c.generator = "a=" + std::to_string(a);
    c.x = {std::log2(static_cast<double>(m) / a),
           std::log2(static_cast<double>(m) / (m - a))};
    out.min_sum_rate = std::min(out.min_sum_rate, c.x[0] + c.x[1]);
    if (a == m - 1) r2_at_max_a = c.x[1];
    out.frontier.raw.push_back(std::move(c));
  }
  out.frontier.raw_corner_count = out.frontier.raw.size();
  out.frontier.corners = detail::remove_dominated(out.frontier.raw);
  detail::build_hull(out.frontier);
  out.empirical_rate = std::log2(static_cast<double>(m) / (m - 1));
  out.gap_at_max_a = r2_at_max_a - out.empirical_rate;
  return out;
}

bool point_in_region(const std::vector<double>& p, const RegionFrontier& f, double tol) {
  const std::size_t d = f.axes.size();
  if (p.size() != d) throw ArgumentError("rate point dimension does not match region");
  if (f.corners.empty()) return false;
  // exists lambda >= 0, slack s >= 0: C lambda + s = p, sum lambda = 1
  const std::size_t n = f.corners.size();
  std::vector<std::vector<double>> A(d + 1, std::vector<double>(n + d, 0.0));
  std::vector<double> b(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < n; ++j) A[i][j] = f.corners[j].x[i];
    A[i][n + i] = 1.0;
    b[i] = p[i];
  }
  for (std::size_t j = 0; j < n; ++j) A[d][j] = 1.0;
  b[d] = 1.0;
  return lp_phase1_residual(std::move(A), std::move(b)) <= tol;
}

bool point_in_region(const RatePoint& p, const RegionFrontier& f, double tol) {
  std::vector<double> coords;
  if (!f.axes.empty() && f.axes.front() == "R0") {
    if (p.dim() != f.axes.size())
      throw ArgumentError("rate point dimension does not match region");
    coords = p.coords();
  } else {
    if (p.r.size() != f.axes.size())
      throw ArgumentError("rate point dimension does not match region");
    coords = p.r;
  }
  return point_in_region(coords, f, tol);
}

bool hull_contains(const std::vector<double>& x, const RegionFrontier& f, double tol) {
  const std::size_t d = f.axes.size();
  if (x.size() != d) throw ArgumentError("point dimension does not match region");
  if (f.corners.empty()) return false;
  const std::size_t n = f.corners.size();
  std::vector<std::vector<double>> A(d + 1, std::vector<double>(n, 0.0));
  std::vector<double> b(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < n; ++j) A[i][j] = f.corners[j].x[i];
    b[i] = x[i];
  }
  for (std::size_t j = 0; j < n; ++j) A[d][j] = 1.0;
  b[d] = 1.0;
  return lp_phase1_residual(std::move(A), std::move(b)) <= tol;
}

}  // namespace sccs
