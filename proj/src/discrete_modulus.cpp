#include "lab/discrete_modulus.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

#include "lab/core.hpp"

namespace lab {

namespace {

// Min-weight path from side_a to side_b where a path pays the rho-weight of
// every vertex it visits, endpoints included.  Empty result: disconnected.
std::vector<int> min_weight_path(const std::vector<std::vector<int>>& adj,
                                 const std::vector<double>& rho,
                                 const std::vector<int>& side_a,
                                 const std::vector<int>& side_b, double* length) {
  size_t n = adj.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> prev(n, -1);
  using Node = std::pair<double, int>;
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> pq;
  for (int a : side_a)
    if (rho[a] < dist[a]) {
      dist[a] = rho[a];
      pq.push({dist[a], a});
    }
  std::vector<char> in_b(n, 0);
  for (int b : side_b) in_b[b] = 1;
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (int u : adj[v]) {
      double nd = d + rho[u];
      if (nd < dist[u]) {
        dist[u] = nd;
        prev[u] = v;
        pq.push({nd, u});
      }
    }
  }
  int best = -1;
  for (int b : side_b)
    if (dist[b] < std::numeric_limits<double>::infinity() && (best < 0 || dist[b] < dist[best]))
      best = b;
  if (best < 0) return {};
  if (length) *length = dist[best];
  std::vector<int> path;
  for (int v = best; v >= 0; v = prev[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

// Active-set solve of  max 1'y - y'Qy/4  over y >= 0  (dual of the metric
// problem restricted to the stored paths).  Bland-style lowest-index rules.
void solve_dual(const Eigen::MatrixXd& Q, Eigen::VectorXd& y) {
  int m = static_cast<int>(Q.rows());
  std::vector<char> active(m, 0);
  for (int i = 0; i < m; ++i) active[i] = y[i] > 0.0;
  if (m > 0 && std::none_of(active.begin(), active.end(), [](char c) { return c != 0; }))
    active[m - 1] = 1;

  for (int iter = 0; iter < 200 * m + 200; ++iter) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i)
      if (active[i]) act.push_back(i);
    Eigen::MatrixXd Qa(act.size(), act.size());
    for (size_t r = 0; r < act.size(); ++r)
      for (size_t c = 0; c < act.size(); ++c) Qa(r, c) = Q(act[r], act[c]);
    // Tiny ridge keeps repeated/linearly dependent paths solvable.
    for (size_t r = 0; r < act.size(); ++r) Qa(r, r) += 1e-12;
    Eigen::VectorXd ya = Qa.ldlt().solve(Eigen::VectorXd::Constant(act.size(), 2.0));

    int drop = -1;
    for (size_t r = 0; r < act.size(); ++r)
      if (ya[r] <= 0.0) { drop = act[r]; break; }
    if (drop >= 0) {
      active[drop] = 0;
      continue;
    }
    y.setZero();
    for (size_t r = 0; r < act.size(); ++r) y[act[r]] = ya[r];

    Eigen::VectorXd grad = Eigen::VectorXd::Ones(m) - Q * y / 2.0;
    int add = -1;
    for (int i = 0; i < m; ++i)
      if (!active[i] && grad[i] > 1e-10) { add = i; break; }
    if (add < 0) return;
    active[add] = 1;
  }
  throw std::runtime_error("dual active-set solve did not settle");
}

}  // namespace

DiscreteModulusResult discrete_modulus(const std::vector<std::vector<int>>& adjacency,
                                       const std::vector<int>& side_a,
                                       const std::vector<int>& side_b) {
  size_t n = adjacency.size();
  require(!side_a.empty() && !side_b.empty(), "marked sides must be nonempty");
  {
    std::set<int> sa(side_a.begin(), side_a.end());
    for (int b : side_b)
      if (sa.count(b)) {
        // A shared vertex is a one-vertex crossing path; handled below, but
        // the sides are required to be disjoint by contract.
        throw std::runtime_error("marked sides must be disjoint");
      }
  }
  for (int v : side_a) require(v >= 0 && v < static_cast<int>(n), "side vertex out of range");
  for (int v : side_b) require(v >= 0 && v < static_cast<int>(n), "side vertex out of range");

  DiscreteModulusResult res;
  res.rho.assign(n, 0.0);

  // Reachability first: no crossing path means modulus 0.
  {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    for (int a : side_a)
      if (!seen[a]) { seen[a] = 1; q.push(a); }
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int u : adjacency[v])
        if (!seen[u]) { seen[u] = 1; q.push(u); }
    }
    bool connected = false;
    for (int b : side_b) connected = connected || seen[b];
    if (!connected) {
      res.disconnected = true;
      for (size_t v = 0; v < n; ++v)
        if (seen[v]) res.reachable.push_back(static_cast<int>(v));
      res.shortest_length = std::numeric_limits<double>::infinity();
      return res;
    }
  }

  std::vector<std::vector<int>> paths;
  Eigen::MatrixXd Q(0, 0);
  Eigen::VectorXd y(0);

  for (int round = 0; round < 100000; ++round) {
    double len = 0.0;
    std::vector<int> path = min_weight_path(adjacency, res.rho, side_a, side_b, &len);
    require(!path.empty(), "oracle lost connectivity");
    res.shortest_length = len;
    if (len >= 1.0 - 1e-9) break;

    paths.push_back(path);
    int m = static_cast<int>(paths.size());
    Eigen::MatrixXd Q2(m, m);
    Q2.topLeftCorner(m - 1, m - 1) = Q;
    std::vector<char> member(n, 0);
    for (int v : path) member[v] = 1;
    for (int i = 0; i < m; ++i) {
      int common = 0;
      for (int v : paths[i]) common += member[v];
      Q2(i, m - 1) = common;
      Q2(m - 1, i) = common;
    }
    Q = std::move(Q2);
    Eigen::VectorXd y2 = Eigen::VectorXd::Zero(m);
    y2.head(m - 1) = y;
    y2[m - 1] = 0.0;
    y = std::move(y2);

    solve_dual(Q, y);

    std::fill(res.rho.begin(), res.rho.end(), 0.0);
    for (int i = 0; i < m; ++i)
      if (y[i] > 0.0)
        for (int v : paths[i]) res.rho[v] += y[i] / 2.0;
  }

  res.paths_generated = static_cast<int>(paths.size());
  double area = 0.0;
  for (double w : res.rho) area += w * w;
  res.value = area;
  return res;
}

}  // namespace lab
