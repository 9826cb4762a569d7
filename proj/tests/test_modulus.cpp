#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "lab/discrete_modulus.hpp"
#include "lab/modulus.hpp"
#include "lab/packing.hpp"
#include "lab/rng.hpp"
#include "lab/triangulation.hpp"

using namespace lab;

namespace {

Quadrilateral rect_quad(double w, double h, double angle = 0.0, Point shift = {0, 0}) {
  Rect r{{0, 0}, w / 2, h / 2, angle};
  auto c = r.corners();
  Quadrilateral q;
  for (auto& p : c) q.polygon.push_back({p.x + shift.x, p.y + shift.y});
  for (int k = 0; k < 4; ++k) q.marked[k] = q.polygon[k];
  q.marked_pair = 0;
  return q;
}

// --- independent oracle #1: five-point Laplace solver on a union of cells ---
// Dirichlet 0 on label-0 edges, 1 on label-2 edges, insulating elsewhere.
// Returns the Dirichlet energy (= modulus of the family joining those sides).
struct FdProblem {
  std::vector<std::vector<int>> cell;  // 1 if the unit cell (i,j)*h is in the region
  int nx = 0, ny = 0;
  std::function<int(int, int)> node_kind;  // 0 free, 1 potential 0, 2 potential 1
};

double fd_energy(const FdProblem& pb, int sweeps) {
  int nx = pb.nx, ny = pb.ny;
  auto in_cell = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < nx && j < ny && pb.cell[j][i];
  };
  auto node_used = [&](int i, int j) {
    return in_cell(i, j) || in_cell(i - 1, j) || in_cell(i, j - 1) || in_cell(i - 1, j - 1);
  };
  std::vector<std::vector<double>> u(ny + 1, std::vector<double>(nx + 1, 0.0));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (pb.node_kind(i, j) == 2) u[j][i] = 1.0;
  // Gauss-Seidel with SOR; edge (a,b) conducts iff it borders a region cell
  auto edge_ok_h = [&](int i, int j) { return in_cell(i, j) || in_cell(i, j - 1); };
  auto edge_ok_v = [&](int i, int j) { return in_cell(i, j) || in_cell(i - 1, j); };
  double omega = 1.9;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        if (!node_used(i, j) || pb.node_kind(i, j) != 0) continue;
        double s = 0.0;
        int c = 0;
        if (i > 0 && edge_ok_h(i - 1, j)) { s += u[j][i - 1]; ++c; }
        if (i < nx && edge_ok_h(i, j)) { s += u[j][i + 1]; ++c; }
        if (j > 0 && edge_ok_v(i, j - 1)) { s += u[j - 1][i]; ++c; }
        if (j < ny && edge_ok_v(i, j)) { s += u[j + 1][i]; ++c; }
        if (c == 0) continue;
        double target = s / c;
        u[j][i] += omega * (target - u[j][i]);
      }
  }
  double energy = 0.0;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (edge_ok_h(i, j)) {
        double d = u[j][i + 1] - u[j][i];
        energy += d * d;
      }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (edge_ok_v(i, j)) {
        double d = u[j + 1][i] - u[j][i];
        energy += d * d;
      }
  return energy;
}

// --- independent oracle #2: exhaustive path family + dual coordinate ascent ---
// Enumerates vertex-simple paths whose only side-A vertex is the start and
// only side-B vertex is the end; these generate all crossing constraints.
std::vector<std::vector<int>> all_crossing_paths(
    const std::vector<std::vector<int>>& adj, const std::vector<int>& side_a,
    const std::vector<int>& side_b, size_t cap = 2000000) {
  int n = static_cast<int>(adj.size());
  std::vector<char> in_a(n, 0), in_b(n, 0);
  for (int v : side_a) in_a[v] = 1;
  for (int v : side_b) in_b[v] = 1;
  std::vector<std::vector<int>> paths;
  std::vector<int> stack;
  std::vector<char> used(n, 0);
  std::function<void(int)> dfs = [&](int v) {
    REQUIRE(paths.size() < cap);
    stack.push_back(v);
    used[v] = 1;
    if (in_b[v]) {
      paths.push_back(stack);
    } else {
      for (int w : adj[v])
        if (!used[w] && !in_a[w]) dfs(w);
    }
    used[v] = 0;
    stack.pop_back();
  };
  for (int a : side_a)
    if (!in_b[a]) dfs(a);
    else paths.push_back({a});  // a vertex on both sides crosses by itself
  return paths;
}

double oracle_modulus(const std::vector<std::vector<int>>& adj,
                      const std::vector<int>& side_a, const std::vector<int>& side_b,
                      std::vector<double>* rho_out = nullptr) {
  auto paths = all_crossing_paths(adj, side_a, side_b);
  REQUIRE(!paths.empty());
  size_t m = paths.size();
  int n = static_cast<int>(adj.size());
  // dual ascent on g(l) = sum l - (1/4) l^T M M^T l, one coordinate at a time
  std::vector<double> lam(m, 0.0), rho(n, 0.0);
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double change = 0.0;
    for (size_t p = 0; p < m; ++p) {
      double dot = 0.0;
      for (int v : paths[p]) dot += rho[v];
      double step = (1.0 - dot) / (0.5 * static_cast<double>(paths[p].size()));
      double nl = std::max(0.0, lam[p] + step);
      double d = nl - lam[p];
      if (d != 0.0) {
        lam[p] = nl;
        for (int v : paths[p]) rho[v] += 0.5 * d;
        change = std::max(change, std::abs(d));
      }
    }
    if (change < 1e-13) break;
  }
  double energy = 0.0;
  for (double r : rho) energy += r * r;
  if (rho_out) *rho_out = rho;
  return energy;
}

std::vector<std::vector<int>> grid_graph(int w, int h) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(w) * h);
  auto id = [&](int i, int j) { return j * w + i; };
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      if (i + 1 < w) {
        adj[id(i, j)].push_back(id(i + 1, j));
        adj[id(i + 1, j)].push_back(id(i, j));
      }
      if (j + 1 < h) {
        adj[id(i, j)].push_back(id(i, j + 1));
        adj[id(i, j + 1)].push_back(id(i, j));
      }
    }
  return adj;
}

}  // namespace

TEST_CASE("rectangle moduli in closed form") {
  CHECK(modulus_rectangle(2.0, 1.0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(modulus_rectangle(2.0, 1.0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(modulus_rectangle(1.0, 1.0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("finite elements recover rectangle moduli inside the enclosure") {
  for (double aspect : {1.0, 2.0, 3.5}) {
    Quadrilateral q = rect_quad(aspect, 1.0);
    ModulusResult r = modulus_quadrilateral(q, 5);
    double exact = aspect;
    CHECK(r.lo <= exact + 1e-12);
    CHECK(r.hi >= exact - 1e-12);
    CHECK(std::abs(r.value - exact) <= r.error + 1e-12);
    CHECK(std::abs(r.value - exact) <= 2e-3 * exact);
    CHECK(r.mesh_vertices > 0);
    // primal from a conforming subspace overshoots, dual reciprocal undershoots
    CHECK(r.primal_energy >= exact - 1e-12);
    CHECK(1.0 / r.dual_energy <= exact + 1e-12);
  }
}

TEST_CASE("modulus is invariant under rotation and translation") {
  Quadrilateral q0 = rect_quad(2.0, 1.0);
  Quadrilateral q1 = rect_quad(2.0, 1.0, 0.83, {3.7, -1.2});
  ModulusResult a = modulus_quadrilateral(q0, 5);
  ModulusResult b = modulus_quadrilateral(q1, 5);
  CHECK(std::abs(a.value - b.value) <= 2e-3 * a.value);
}

TEST_CASE("conjugate quadrilateral: the product of moduli is one") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    // random star-shaped quadrilateral
    Quadrilateral q;
    double base = rng.uniform(0, 2 * std::numbers::pi);
    for (int k = 0; k < 4; ++k) {
      double ang = base + k * std::numbers::pi / 2 + rng.uniform(-0.3, 0.3);
      double rad = rng.uniform(0.6, 1.4);
      q.polygon.push_back({rad * std::cos(ang), rad * std::sin(ang)});
    }
    for (int k = 0; k < 4; ++k) q.marked[k] = q.polygon[k];
    q.marked_pair = 0;
    Quadrilateral qc = conjugate(q);
    CHECK(qc.marked_pair == 1);
    ModulusResult a = modulus_quadrilateral(q, 5);
    ModulusResult b = modulus_quadrilateral(qc, 5);
    CHECK(std::abs(a.value * b.value - 1.0) <= 5e-3);
  }
}

TEST_CASE("L-shaped region against an independent finite-difference solve") {
  // region [0,2]x[0,1] plus [0,1]x[1,2]; potential 0 on y=0, 1 on the top lid
  Quadrilateral q;
  q.polygon = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  q.marked = {{Point{0, 0}, Point{2, 0}, Point{1, 2}, Point{0, 2}}};
  q.marked_pair = 0;
  ModulusResult fem = modulus_quadrilateral(q, 6);

  auto solve = [&](int scale) {
    FdProblem pb;
    pb.nx = 2 * scale;
    pb.ny = 2 * scale;
    pb.cell.assign(pb.ny, std::vector<int>(pb.nx, 0));
    for (int j = 0; j < pb.ny; ++j)
      for (int i = 0; i < pb.nx; ++i)
        pb.cell[j][i] = (j < scale) || (i < scale);
    pb.node_kind = [scale](int i, int j) {
      if (j == 0) return 1;                    // bottom: 0
      if (j == 2 * scale && i <= scale) return 2;  // lid: 1
      return 0;
    };
    return fd_energy(pb, 4000);
  };
  double E1 = solve(32), E2 = solve(64);
  double extrap = E2 + (E2 - E1) / 3.0;  // second-order Richardson
  CHECK(std::abs(fem.value - extrap) <= 0.01);
  CHECK(fem.error <= 0.01);
}

TEST_CASE("degenerate quadrilaterals are rejected with reasons") {
  Quadrilateral q = rect_quad(1.0, 1.0);
  q.marked[2] = q.marked[1];  // repeated marked point
  CHECK_THROWS(validate_quadrilateral(q));
  Quadrilateral bow;
  bow.polygon = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};  // self-intersecting
  bow.marked = {{bow.polygon[0], bow.polygon[1], bow.polygon[2], bow.polygon[3]}};
  CHECK_THROWS(modulus_quadrilateral(bow, 3));
}

TEST_CASE("vertex modulus of a path is the reciprocal length") {
  for (int m : {2, 3, 7, 19}) {
    std::vector<std::vector<int>> adj(m);
    for (int v = 0; v + 1 < m; ++v) {
      adj[v].push_back(v + 1);
      adj[v + 1].push_back(v);
    }
    DiscreteModulusResult r = discrete_modulus(adj, {0}, {m - 1});
    CHECK(std::abs(r.value - 1.0 / m) <= 1e-9);
    for (double rho : r.rho) CHECK(std::abs(rho - 1.0 / m) <= 1e-6);
    CHECK(r.shortest_length >= 1.0 - 1e-9);
  }
}

TEST_CASE("disjoint parallel strands add their moduli") {
  int k = 3, m = 5;
  std::vector<std::vector<int>> adj(static_cast<size_t>(k) * m);
  std::vector<int> a, b;
  for (int s = 0; s < k; ++s) {
    int base = s * m;
    for (int v = 0; v + 1 < m; ++v) {
      adj[base + v].push_back(base + v + 1);
      adj[base + v + 1].push_back(base + v);
    }
    a.push_back(base);
    b.push_back(base + m - 1);
  }
  DiscreteModulusResult r = discrete_modulus(adj, a, b);
  CHECK(std::abs(r.value - double(k) / m) <= 1e-8);
}

TEST_CASE("constraint generation agrees with the exhaustive-family oracle") {
  struct Case {
    std::vector<std::vector<int>> adj;
    std::vector<int> a, b;
  };
  std::vector<Case> cases;
  // cycle of 8, antipodal sides
  {
    std::vector<std::vector<int>> adj(8);
    for (int v = 0; v < 8; ++v) {
      adj[v].push_back((v + 1) % 8);
      adj[(v + 1) % 8].push_back(v);
    }
    cases.push_back({adj, {0}, {4}});
  }
  // complete graph on 4 vertices
  {
    std::vector<std::vector<int>> adj(4);
    for (int u = 0; u < 4; ++u)
      for (int v = 0; v < 4; ++v)
        if (u != v) adj[u].push_back(v);
    cases.push_back({adj, {0}, {3}});
  }
  // 3 x 3 and 4 x 3 grids, left column to right column
  for (int w : {3, 4}) {
    auto adj = grid_graph(w, 3);
    std::vector<int> a, b;
    for (int j = 0; j < 3; ++j) {
      a.push_back(j * w);
      b.push_back(j * w + w - 1);
    }
    cases.push_back({adj, a, b});
  }
  // random geometric graphs on up to 20 vertices
  Rng rng(33);
  for (int inst = 0; inst < 4; ++inst) {
    int n = 12 + inst * 2;
    std::vector<Point> pos;
    for (int v = 0; v < n; ++v) pos.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
    std::vector<std::vector<int>> adj(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (dist(pos[u], pos[v]) < 0.42) {
          adj[u].push_back(v);
          adj[v].push_back(u);
        }
    std::vector<int> a, b;
    for (int v = 0; v < n; ++v) {
      if (pos[v].x < 0.2) a.push_back(v);
      if (pos[v].x > 0.8) b.push_back(v);
    }
    if (a.empty() || b.empty()) continue;
    bool overlap = false;
    for (int v : a)
      if (pos[v].x > 0.8) overlap = true;
    if (overlap) continue;
    cases.push_back({adj, a, b});
  }

  int compared = 0;
  for (const auto& c : cases) {
    DiscreteModulusResult r = discrete_modulus(c.adj, c.a, c.b);
    if (r.disconnected) continue;  // random instance without a crossing
    double want = oracle_modulus(c.adj, c.a, c.b);
    CHECK(std::abs(r.value - want) <= 1e-6 * std::max(1.0, want));
    CHECK(r.shortest_length >= 1.0 - 1e-9);
    ++compared;
  }
  CHECK(compared >= 4);
}

TEST_CASE("extra edges can only increase the modulus") {
  auto adj = grid_graph(4, 3);
  std::vector<int> a = {0, 4, 8}, b = {3, 7, 11};
  double before = discrete_modulus(adj, a, b).value;
  adj[1].push_back(6);  // diagonal shortcut
  adj[6].push_back(1);
  double after = discrete_modulus(adj, a, b).value;
  CHECK(after >= before - 1e-10);
}

TEST_CASE("severed graphs come back with a cut certificate") {
  std::vector<std::vector<int>> adj(5);
  adj[0].push_back(1);
  adj[1].push_back(0);
  adj[3].push_back(4);
  adj[4].push_back(3);
  DiscreteModulusResult r = discrete_modulus(adj, {0}, {4});
  CHECK(r.disconnected);
  CHECK(r.value == 0.0);
  // certificate holds side a and excludes side b
  CHECK(std::find(r.reachable.begin(), r.reachable.end(), 0) != r.reachable.end());
  CHECK(std::find(r.reachable.begin(), r.reachable.end(), 4) == r.reachable.end());
}

TEST_CASE("vertex metrics transfer to continuous metrics with the degree constant") {
  Triangulation t;
  t.vertices.push_back({0, 0});
  for (int k = 0; k < 6; ++k) {
    double a = std::numbers::pi * k / 3;
    t.vertices.push_back({std::cos(a), std::sin(a)});
  }
  for (int k = 0; k < 6; ++k) t.triangles.push_back({0, 1 + k, 1 + (k + 1) % 6});
  compute_connectivity(t);
  CirclePacking p = max_circle_packing(t);
  std::vector<double> rho(p.size(), 1.0);
  TransferResult tr = transfer_metric(p, rho, 6);
  REQUIRE(tr.metric.atoms.size() == p.size());
  CHECK(tr.eta > 0);
  CHECK(tr.eta <= 0.5 + 1e-12);
  CHECK(tr.constant == doctest::Approx(7.0 * std::pow((1 + tr.eta) / tr.eta, 2)));
  for (size_t v = 0; v < p.size(); ++v) {
    CHECK(tr.metric.atoms[v].radius ==
          doctest::Approx((1 + tr.eta) * p.radii[v]).epsilon(1e-12));
    CHECK(tr.metric.atoms[v].weight ==
          doctest::Approx(rho[v] / (tr.eta * p.radii[v])).epsilon(1e-12));
  }
  // metric evaluation: indicator sums at the packing center
  double at_center = tr.metric.eval({0, 0});
  CHECK(at_center >= tr.metric.atoms[0].weight - 1e-12);
  CHECK(tr.metric.area() > 0);
  // straight segment through the central circle collects at least its crossing
  std::vector<Point> seg = {{-1, 0}, {1, 0}};
  double len = tr.metric.length_along(seg);
  CHECK(len >= tr.metric.atoms[0].weight * 2 * tr.metric.atoms[0].radius - 1e-9);
}

TEST_CASE("quasisymmetry probe on exact affine stretches") {
  auto f = [](Point p) -> Point {
    cpx z{p.x, p.y};
    cpx w = z + 0.5 * std::conj(z);
    return {w.real(), w.imag()};
  };
  // sup |f(z)-f(x)| / inf over the circle |z-x| = 2r is (1+k)/(1-k) = 3
  double ratio = quasisymmetry_ratio(f, {0.3, -0.2}, 0.1, 720);
  CHECK(ratio == doctest::Approx(3.0).epsilon(1e-4));
  auto ident = [](Point p) { return p; };
  CHECK(quasisymmetry_ratio(ident, {0, 0}, 0.2, 360) == doctest::Approx(1.0));
}

TEST_CASE("rough distortion bound: identity near one, affine stretch near two") {
  Domain dom = Domain::disk({0, 0}, 1.0);
  auto ident = [](Point p) { return p; };
  RoughQcResult id = rough_qc_test(ident, dom, 0.3, 40, 11, 4);
  CHECK_FALSE(id.degenerate);
  CHECK(id.K >= 1.0);
  CHECK(id.K <= 1.05);

  auto affine = [](Point p) -> Point {
    cpx z{p.x, p.y};
    cpx w = z + std::conj(z) / 3.0;
    return {w.real(), w.imag()};
  };
  RoughQcResult st = rough_qc_test(affine, dom, 0.3, 60, 12, 4);
  CHECK_FALSE(st.degenerate);
  // conformal distortion of mu = 1/3 is 2; sampled rectangles approach it
  CHECK(st.K >= 1.1);
  CHECK(st.K <= 2.05);
  CHECK(st.samples_used == 60);
}

TEST_CASE("grid squares compactly contained in a domain") {
  Domain disk = Domain::disk({0, 0}, 1.0);
  auto fam = square_family(disk, 0.45);
  CHECK(!fam.empty());
  for (const Rect& r : fam) {
    auto c = r.corners();
    for (const Point& p : c) CHECK(disk.contains(p));
    CHECK(std::abs(r.hw - r.hh) <= 1e-12);  // squares
  }
  // deduplicated
  for (size_t i = 0; i < fam.size(); ++i)
    for (size_t j = i + 1; j < fam.size(); ++j) {
      bool same = std::abs(fam[i].center.x - fam[j].center.x) < 1e-9 &&
                  std::abs(fam[i].center.y - fam[j].center.y) < 1e-9 &&
                  std::abs(fam[i].hw - fam[j].hw) < 1e-9 &&
                  std::abs(std::remainder(fam[i].angle - fam[j].angle,
                                          std::numbers::pi / 2)) < 1e-9;
      CHECK_FALSE(same);
    }
  // shrinking epsilon only enlarges the family
  auto finer = square_family(disk, 0.3);
  CHECK(finer.size() >= fam.size());
}
