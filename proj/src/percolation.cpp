#include "lab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "lab/rng.hpp"

namespace lab {

std::array<int, 2> GridColoring::cell_of(Point p) const {
  int i = static_cast<int>(std::floor(p.x / delta + 0.5));
  int j = static_cast<int>(std::floor(p.y / delta + 0.5));
  require(in_grid(i, j), "point outside the grid extent");
  return {i, j};
}

GridColoring color_grid(int N, double r, uint64_t seed, double delta) {
  require(N >= 0, "grid size must be nonnegative");
  require(r >= 0.0 && r <= 1.0, "yellow probability must lie in [0,1]");
  require(delta > 0.0, "mesh must be positive");
  GridColoring c;
  c.N = N;
  c.delta = delta;
  c.r = r;
  c.seed = seed;
  c.yellow.assign(static_cast<size_t>(c.side()) * c.side(), 0);
  Rng rng(seed);
  // One uniform per cell in fixed row-major order: colorings with the same
  // seed and different r are monotonically coupled.
  for (size_t k = 0; k < c.yellow.size(); ++k) c.yellow[k] = rng.uniform() < r ? 1 : 0;
  return c;
}

int chemical_distance(const GridColoring& c, std::array<int, 2> x, std::array<int, 2> y) {
  require(c.in_grid(x[0], x[1]) && c.in_grid(y[0], y[1]), "endpoint outside grid");
  size_t cells = c.yellow.size();
  std::vector<int> dist(cells, std::numeric_limits<int>::max());
  std::deque<std::array<int, 2>> dq;
  auto cost = [&](int i, int j) { return c.is_blue(i, j) ? 1 : 0; };
  dist[c.idx(x[0], x[1])] = cost(x[0], x[1]);
  dq.push_back(x);
  static const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  while (!dq.empty()) {
    auto [i, j] = dq.front();
    dq.pop_front();
    int d = dist[c.idx(i, j)];
    for (int k = 0; k < 4; ++k) {
      int ni = i + dx[k], nj = j + dy[k];
      if (!c.in_grid(ni, nj)) continue;
      int w = cost(ni, nj);
      if (d + w < dist[c.idx(ni, nj)]) {
        dist[c.idx(ni, nj)] = d + w;
        if (w == 0) dq.push_front({ni, nj});
        else dq.push_back({ni, nj});
      }
    }
  }
  int visited_blue = dist[c.idx(y[0], y[1])];
  return std::max(0, visited_blue - 1);
}

double continuous_chemical_length(const GridColoring& c, const std::vector<Point>& path) {
  double total = 0.0;
  double d = c.delta;
  for (size_t s = 0; s + 1 < path.size(); ++s) {
    Point a = path[s], b = path[s + 1];
    c.cell_of(a);
    c.cell_of(b);
    double len = dist(a, b);
    if (len == 0.0) continue;
    // Split the segment at cell boundary lines u = (k + 1/2) d.
    std::vector<double> cuts{0.0, 1.0};
    auto add_cuts = [&](double pa, double pb) {
      double lo = std::min(pa, pb), hi = std::max(pa, pb);
      long long k0 = static_cast<long long>(std::ceil(lo / d - 0.5));
      for (long long k = k0; (k + 0.5) * d <= hi; ++k) {
        double t = ((k + 0.5) * d - pa) / (pb - pa);
        if (t > 0.0 && t < 1.0) cuts.push_back(t);
      }
    };
    if (a.x != b.x) add_cuts(a.x, b.x);
    if (a.y != b.y) add_cuts(a.y, b.y);
    std::sort(cuts.begin(), cuts.end());
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
      double t0 = cuts[k], t1 = cuts[k + 1];
      if (t1 <= t0) continue;
      double tm = 0.5 * (t0 + t1);
      Point mid = a + tm * (b - a);
      auto cell = c.cell_of(mid);
      if (c.is_blue(cell[0], cell[1])) total += len * (t1 - t0);
    }
  }
  return total;
}

DeepBlueMask deep_blue(const GridColoring& c, int m) {
  require(m >= 1 && m % 2 == 1, "depth must be an odd positive integer");
  int w = (m - 1) / 2;
  int side = c.side();
  DeepBlueMask mask;
  mask.N = c.N;
  mask.m = m;
  mask.deep.assign(c.yellow.size(), 0);

  // Sliding-window minimum of "blue" along rows, then along columns.
  std::vector<uint8_t> rowmin(c.yellow.size(), 0);
  for (int j = 0; j < side; ++j) {
    std::deque<int> q;  // indices of zeros (yellow) in the window
    for (int i = 0; i < side + w; ++i) {
      if (i < side && c.yellow[static_cast<size_t>(j) * side + i]) q.push_back(i);
      while (!q.empty() && q.front() < i - 2 * w) q.pop_front();
      int center = i - w;
      if (center >= 0 && center < side) {
        bool full = center - w >= 0 && center + w < side;
        rowmin[static_cast<size_t>(j) * side + center] = (full && q.empty()) ? 1 : 0;
      }
    }
  }
  for (int i = 0; i < side; ++i) {
    std::deque<int> q;
    for (int j = 0; j < side + w; ++j) {
      if (j < side && !rowmin[static_cast<size_t>(j) * side + i]) q.push_back(j);
      while (!q.empty() && q.front() < j - 2 * w) q.pop_front();
      int center = j - w;
      if (center >= 0 && center < side) {
        bool full = center - w >= 0 && center + w < side;
        mask.deep[static_cast<size_t>(center) * side + i] = (full && q.empty()) ? 1 : 0;
      }
    }
  }
  return mask;
}

double analytic_union_bound(int N, double r) {
  require(N >= 1, "grid size must be positive");
  double q = 8.0 * std::pow(r, 0.1);
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  double L0 = std::ceil(std::log(static_cast<double>(N)));
  double side = 2.0 * N + 1.0;
  return 2.0 * side * side * std::pow(q, L0) / (1.0 - q);
}

PercolationBoundReport verify_percolation_bound(int N, double r, int trials, double theta,
                                                uint64_t seed, int pairs_per_trial) {
  require(trials > 0 && pairs_per_trial > 0, "need positive trial counts");
  require(theta > 0.0 && theta <= 1.0, "threshold fraction must lie in (0,1]");
  PercolationBoundReport rep;
  rep.trials = trials;
  rep.pairs_per_trial = pairs_per_trial;
  rep.analytic_bound = analytic_union_bound(N, r);
  rep.worst_ratio = std::numeric_limits<double>::infinity();

  int L0 = static_cast<int>(std::ceil(std::log(static_cast<double>(N))));
  int successes = 0;
  for (int t = 0; t < trials; ++t) {
    uint64_t s = derive_seed(seed, static_cast<uint64_t>(t));
    GridColoring c = color_grid(N, r, s);
    Rng rng(derive_seed(s, 0xfa17));
    bool all_ok = true;
    for (int p = 0; p < pairs_per_trial; ++p) {
      std::array<int, 2> x{}, y{};
      int dz = 0;
      do {
        x = {static_cast<int>(rng.below(2 * N + 1)) - N,
             static_cast<int>(rng.below(2 * N + 1)) - N};
        y = {static_cast<int>(rng.below(2 * N + 1)) - N,
             static_cast<int>(rng.below(2 * N + 1)) - N};
        dz = std::abs(x[0] - y[0]) + std::abs(x[1] - y[1]);
      } while (dz < L0);
      int dc = chemical_distance(c, x, y);
      double ratio = static_cast<double>(dc) / dz;
      if (ratio < rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.worst_x = x;
        rep.worst_y = y;
        rep.worst_seed = s;
      }
      if (dc < theta * dz) all_ok = false;
    }
    if (all_ok) ++successes;
  }
  rep.success_fraction = static_cast<double>(successes) / trials;
  return rep;
}

GridColoring m_dependent_coloring(int N, double r, int m, ColorRule rule, uint64_t seed,
                                  double delta) {
  require(m >= 1 && m % 2 == 1, "dependence range must be odd and positive");
  GridColoring base = color_grid(N, r, seed, delta);
  if (rule == ColorRule::identity || m == 1) return base;

  // dilate: yellow iff any underlying yellow within Chebyshev distance w.
  int w = (m - 1) / 2;
  GridColoring out = base;
  for (int j = -N; j <= N; ++j)
    for (int i = -N; i <= N; ++i) {
      uint8_t any = 0;
      for (int dj = -w; dj <= w && !any; ++dj)
        for (int di = -w; di <= w && !any; ++di) {
          int ni = i + di, nj = j + dj;
          if (base.in_grid(ni, nj) && base.is_yellow(ni, nj)) any = 1;
        }
      out.yellow[out.idx(i, j)] = any;
    }
  return out;
}

}  // namespace lab
