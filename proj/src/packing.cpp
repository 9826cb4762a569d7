#include "lab/packing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>

#include <Eigen/Sparse>

namespace lab {

// ---------------------------------------------------------------------------
// Mobius maps.

cpx Mobius::apply(cpx z) const {
  return std::polar(1.0, theta) * (z - a) / (1.0 - std::conj(a) * z);
}

cpx Mobius::inverse(cpx w) const {
  cpx u = std::polar(1.0, -theta) * w;
  return (u + a) / (1.0 + std::conj(a) * u);
}

void Mobius::apply_circle(Point& center, double& radius) const {
  // Circles map to circles; recover the image from three sample points.
  cpx c = center.z();
  cpx p0 = apply(c + radius);
  cpx p1 = apply(c + radius * std::polar(1.0, 2.0 * M_PI / 3.0));
  cpx p2 = apply(c + radius * std::polar(1.0, 4.0 * M_PI / 3.0));
  // Circumcircle of p0 p1 p2.
  double ax = p0.real(), ay = p0.imag();
  double bx = p1.real(), by = p1.imag();
  double cx = p2.real(), cy = p2.imag();
  double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
  require(d != 0.0, "mobius circle image degenerate");
  double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  double ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
  double uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
  center = Point{ux, uy};
  radius = std::hypot(ax - ux, ay - uy);
}

Mobius Mobius::compose(const Mobius& outer, const Mobius& inner) {
  // (outer . inner)(z) is again of the canonical form; the new a is the
  // preimage of 0 and the new theta is the argument of the derivative there.
  Mobius m;
  m.a = inner.inverse(outer.a);
  auto deriv_arg = [](const Mobius& t, cpx z) {
    // t'(z) = e^{i theta} (1 - |a|^2) / (1 - conj(a) z)^2
    cpx den = 1.0 - std::conj(t.a) * z;
    return t.theta - 2.0 * std::arg(den);
  };
  double th = deriv_arg(inner, m.a) + deriv_arg(outer, inner.apply(m.a));
  m.theta = std::remainder(th, 2.0 * M_PI);
  return m;
}

// ---------------------------------------------------------------------------
// Diagnostics.

double CirclePacking::max_tangency_error() const {
  double worst = 0.0;
  for (size_t v = 0; v < adjacency.size(); ++v)
    for (int u : adjacency[v]) {
      if (u < static_cast<int>(v)) continue;
      double want = radii[v] + radii[u];
      double got = dist(centers[v], centers[u]);
      worst = std::max(worst, std::abs(got - want) / want);
    }
  return worst;
}

double CirclePacking::max_horocycle_error() const {
  double worst = 0.0;
  for (size_t v = 0; v < size(); ++v)
    if (is_boundary[v])
      worst = std::max(worst, std::abs(norm(centers[v]) + radii[v] - 1.0));
  return worst;
}

double CirclePacking::hyperbolic_radius(int v) const {
  double c2 = norm2(centers[v]);
  double r = radii[v];
  double num = (1.0 + r) * (1.0 + r) - c2;
  double den = (1.0 - r) * (1.0 - r) - c2;
  require(den > 0.0, "circle not strictly inside unit disk");
  return 0.5 * std::log(num / den);
}

// ---------------------------------------------------------------------------
// Radius solver.  Labels x_v = e^{-2 s_v} with s_v the hyperbolic radius;
// interior labels lie in (0,1), ideal boundary circles have x = 0.

namespace {

// Angle at the x-vertex in a triangle with labels (x, y, z).
inline double tri_angle(double x, double y, double z) {
  double f = x * (1.0 - y) * (1.0 - z) / ((1.0 - x * y) * (1.0 - x * z));
  if (f <= 0.0) return 0.0;
  if (f >= 1.0) return M_PI;
  return 2.0 * std::asin(std::sqrt(f));
}

struct Fan {
  std::vector<std::pair<int, int>> faces;  // other two vertices per incident triangle
};

double angle_sum(const std::vector<Fan>& fans, const std::vector<double>& x, int v) {
  double s = 0.0;
  for (auto [a, b] : fans[v].faces) s += tri_angle(x[v], x[a], x[b]);
  return s;
}

// Solves angle_sum(v) = 2 pi for x[v], neighbors fixed.  The angle sum is
// strictly increasing in the label, so a bracketed Newton always lands.
double local_solve(const std::vector<Fan>& fans, std::vector<double>& x, int v) {
  constexpr double kTwoPi = 2.0 * M_PI;
  double lo = 0.0, hi = 1.0;
  double t = x[v];
  if (!(t > lo && t < hi)) t = 0.5;
  for (int iter = 0; iter < 60; ++iter) {
    double s = 0.0, ds = 0.0;
    for (auto [a, b] : fans[v].faces) {
      double y = x[a], z = x[b];
      double den = (1.0 - t * y) * (1.0 - t * z);
      double f = t * (1.0 - y) * (1.0 - z) / den;
      if (f >= 1.0) { s = std::numeric_limits<double>::infinity(); break; }
      if (f > 0.0) {
        s += 2.0 * std::asin(std::sqrt(f));
        // d alpha / dt = f' / sqrt(f (1-f)),  f'/f = 1/t + y/(1-ty) + z/(1-tz)
        double dlogf = 1.0 / t + y / (1.0 - t * y) + z / (1.0 - t * z);
        ds += f * dlogf / std::sqrt(f * (1.0 - f));
      }
    }
    double g = s - kTwoPi;
    if (std::abs(g) < 1e-14) break;
    if (g > 0.0) hi = t; else lo = t;
    if (hi - lo <= 1e-15 * hi) break;
    double nt = (ds > 0.0 && std::isfinite(g)) ? t - g / ds : t;
    if (!(nt > lo && nt < hi)) nt = 0.5 * (lo + hi);
    if (nt == t) break;
    t = nt;
  }
  x[v] = t;
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Layout.  Euclidean circle (c, r) carries label x through the invariant
//   (1 - r)^2 - |c|^2 = x [ (1 + r)^2 - |c|^2 ],
// equivalently |c|^2 = r^2 - 2 sigma r + 1 with sigma = (1+x)/(1-x); x = 0
// gives the horocycle condition |c| + r = 1.

namespace {

struct Placement {
  Point c;
  double r;
};

// Places v (label x) tangent to placed circles U and W, on the left of the
// directed segment center(U) -> center(W).  Works uniformly for interior and
// horocycle labels.  In the frame centered at U the candidate for a given r
// is pinned by tangency to both circles; the label invariant then determines
// r through a monotone scalar equation solved by bisection.
Placement place_third(const Point& cu, double ru, const Point& cw, double rw, double x) {
  double sigma = (1.0 + x) / (1.0 - x);
  Point d = cw - cu;
  double L = norm(d);
  require(L > 0.0, "coincident tangency anchors");
  Point e{d.x / L, d.y / L};
  Point n{-e.y, e.x};  // left normal
  double ecu = dot(e, cu), ncu = dot(n, cu);

  auto phi = [&](double r, double* xi_out, double* zeta_out) {
    // Tangency to U and W pins the offset delta = c - cu up to the normal
    // sign; the left side takes the + branch.
    double xi = (L * L - (r + rw) * (r + rw) + (r + ru) * (r + ru)) / (2.0 * L);
    double z2 = (r + ru) * (r + ru) - xi * xi;
    double zeta = z2 > 0.0 ? std::sqrt(z2) : 0.0;
    if (xi_out) *xi_out = xi;
    if (zeta_out) *zeta_out = zeta;
    // Proportional to |c|^2 - (r^2 - 2 sigma r + 1).
    double h = (1.0 - ru * ru - norm2(cu) - 2.0 * r * (sigma + ru)) / 2.0;
    return xi * ecu + zeta * ncu - h;
  };

  double lo = 0.0, hi = 1.0;
  require(phi(lo, nullptr, nullptr) < 0.0, "placement bracket failed at r=0");
  if (phi(hi, nullptr, nullptr) <= 0.0) {
    // Can only happen through rounding for a near-degenerate horocycle.
    hi = 1.0 + 1e-9;
    require(phi(hi, nullptr, nullptr) > 0.0, "placement bracket failed at r=1");
  }
  for (int iter = 0; iter < 130 && hi - lo > 1e-16 * hi; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (phi(mid, nullptr, nullptr) < 0.0) lo = mid; else hi = mid;
  }
  double r = 0.5 * (lo + hi);
  double xi, zeta;
  phi(r, &xi, &zeta);
  return {cu + xi * e + zeta * n, r};
}

}  // namespace

// ---------------------------------------------------------------------------

CirclePacking max_circle_packing(const Triangulation& t, const PackOptions& opt) {
  require(!t.triangles.empty(), "packing needs at least one triangle");
  require(is_combinatorial_disk(t), "packing input must be a combinatorial disk");

  size_t n = t.vertices.size();
  CirclePacking p;
  p.triangles = t.triangles;
  p.adjacency = t.adjacency;
  p.is_boundary = t.is_boundary;

  std::vector<Fan> fans(n);
  for (auto& tri : t.triangles)
    for (int k = 0; k < 3; ++k)
      fans[tri[k]].faces.push_back({tri[(k + 1) % 3], tri[(k + 2) % 3]});

  std::vector<int> interior;
  for (size_t v = 0; v < n; ++v)
    if (!t.is_boundary[v]) interior.push_back(static_cast<int>(v));

  // --- solve labels ---
  // Small initial interior labels make the start a subpacking (every angle
  // sum below 2 pi), so plain sweeps raise labels monotonically toward the
  // fixed point and the residual log decreases.
  std::vector<double> x(n, 0.0);
  for (int v : interior) x[v] = 1e-4;

  constexpr double kTwoPi = 2.0 * M_PI;
  auto residual_of = [&](const std::vector<double>& labels) {
    double m = 0.0;
    for (int v : interior)
      m = std::max(m, std::abs(angle_sum(fans, labels, v) - kTwoPi));
    return m;
  };

  // Plain monotone sweeps: the whole solve when acceleration is off, or a
  // short warmup toward the Newton basin otherwise.
  int sweep = 0;
  int plain_cap = opt.accelerate ? std::min(opt.max_sweeps, 15) : opt.max_sweeps;
  for (; sweep < plain_cap; ++sweep) {
    double err = 0.0;
    for (int v : interior) {
      double before = angle_sum(fans, x, v);
      err = std::max(err, std::abs(before - kTwoPi));
      local_solve(fans, x, v);
    }
    p.residual_history.push_back(err);
    if (err <= opt.tolerance) { ++sweep; break; }
  }

  if (opt.accelerate && !interior.empty()) {
    // Newton in u = log x over the interior labels.  The angle sums are
    // smooth in u and the Jacobian is sparse and planar, so a direct solve
    // per step converges in a handful of iterations regardless of size,
    // where sweeping alone needs O(diameter^2) passes.
    const int nu = static_cast<int>(interior.size());
    std::vector<int> uid(n, -1);
    for (int i = 0; i < nu; ++i) uid[interior[i]] = i;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs(nu);
    std::vector<double> x_try(x.size());
    double cur = residual_of(x);
    while (sweep < opt.max_sweeps && cur > opt.tolerance) {
      trip.clear();
      for (int row = 0; row < nu; ++row) {
        int v = interior[row];
        double t = x[v];
        double s = 0.0, dv = 0.0;
        for (auto [a, b] : fans[v].faces) {
          double y = x[a], z = x[b];
          double f = t * (1.0 - y) * (1.0 - z) / ((1.0 - t * y) * (1.0 - t * z));
          if (f <= 0.0) continue;
          if (f >= 1.0) { s += M_PI; continue; }
          s += 2.0 * std::asin(std::sqrt(f));
          double root = std::sqrt(f * (1.0 - f));
          dv += f * (1.0 + t * y / (1.0 - t * y) + t * z / (1.0 - t * z)) / root;
          if (uid[a] >= 0)
            trip.emplace_back(row, uid[a],
                              f * (t * y / (1.0 - t * y) - y / (1.0 - y)) / root);
          if (uid[b] >= 0)
            trip.emplace_back(row, uid[b],
                              f * (t * z / (1.0 - t * z) - z / (1.0 - z)) / root);
        }
        trip.emplace_back(row, row, dv);
        rhs[row] = kTwoPi - s;
      }
      Eigen::SparseMatrix<double> J(nu, nu);
      J.setFromTriplets(trip.begin(), trip.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
      bool stepped = false;
      if (lu.info() == Eigen::Success) {
        Eigen::VectorXd du = lu.solve(rhs);
        if (lu.info() == Eigen::Success) {
          for (double step = 1.0; step >= 1.0 / 1024 && !stepped; step *= 0.5) {
            x_try = x;
            for (int i = 0; i < nu; ++i) {
              double d = std::clamp(step * du[i], -30.0, 30.0);
              x_try[interior[i]] =
                  std::clamp(x[interior[i]] * std::exp(d), 1e-300, 1.0 - 1e-15);
            }
            double res = residual_of(x_try);
            if (res < cur) {
              x.swap(x_try);
              cur = res;
              stepped = true;
            }
          }
        }
      }
      if (!stepped) {
        // rejected step (far from the fixed point): one plain sweep instead
        for (int v : interior) local_solve(fans, x, v);
        cur = residual_of(x);
      }
      p.residual_history.push_back(cur);
      ++sweep;
    }
  }
  p.sweeps = sweep;
  p.max_angle_residual = residual_of(x);
  require(interior.empty() || p.max_angle_residual <= opt.tolerance * 10.0,
          "radius solver failed to converge");

  // --- layout ---
  p.centers.assign(n, Point{0.0, 0.0});
  p.radii.assign(n, 0.0);
  std::vector<char> placed(n, 0);

  // Root triangle: first triangle incident to the combinatorially deepest
  // interior vertex (breadth-first depth from the boundary, lowest index on
  // ties); with no interior vertices, the first triangle, laid out as a
  // symmetric ideal triangle.
  int root_tri = 0;
  if (!interior.empty()) {
    std::vector<int> depth(n, -1);
    std::deque<int> bfs;
    for (size_t v = 0; v < n; ++v)
      if (t.is_boundary[v]) { depth[v] = 0; bfs.push_back(static_cast<int>(v)); }
    while (!bfs.empty()) {
      int v = bfs.front(); bfs.pop_front();
      for (int u : t.adjacency[v])
        if (depth[u] < 0) { depth[u] = depth[v] + 1; bfs.push_back(u); }
    }
    int root = interior.front();
    for (int v : interior)
      if (depth[v] > depth[root]) root = v;
    root_tri = -1;
    for (size_t i = 0; i < t.triangles.size() && root_tri < 0; ++i)
      for (int k = 0; k < 3; ++k)
        if (t.triangles[i][k] == root) { root_tri = static_cast<int>(i); break; }
    // Rotate the seed so the deep root comes first.
    auto tri = t.triangles[root_tri];
    while (tri[0] != root) { std::rotate(tri.begin(), tri.begin() + 1, tri.end()); }

    int v0 = tri[0], v1 = tri[1], v2 = tri[2];
    double sq0 = std::sqrt(x[v0]);
    p.centers[v0] = Point{0.0, 0.0};
    p.radii[v0] = (1.0 - sq0) / (1.0 + sq0);
    // v1 on the positive real axis, tangent to v0: the far endpoint is at
    // e^{-(s0 + 2 s1)} = sqrt(x0) x1 from the boundary in label terms.
    double far = (1.0 - sq0 * x[v1]) / (1.0 + sq0 * x[v1]);
    double near = p.radii[v0];
    p.centers[v1] = Point{0.5 * (near + far), 0.0};
    p.radii[v1] = 0.5 * (far - near);
    placed[v0] = placed[v1] = 1;
    Placement pl = place_third(p.centers[v0], p.radii[v0], p.centers[v1], p.radii[v1], x[v2]);
    p.centers[v2] = pl.c;
    p.radii[v2] = pl.r;
    placed[v2] = 1;
  } else {
    auto tri = t.triangles[0];
    double rho = 2.0 * std::sqrt(3.0) - 3.0;
    double d = 1.0 - rho;
    for (int k = 0; k < 3; ++k) {
      double ang = M_PI / 2.0 + k * 2.0 * M_PI / 3.0;
      p.centers[tri[k]] = Point{d * std::cos(ang), d * std::sin(ang)};
      p.radii[tri[k]] = rho;
      placed[tri[k]] = 1;
    }
  }

  // Breadth-first over triangles through shared edges.
  std::map<std::pair<int, int>, std::vector<int>> tri_at_edge;
  for (size_t i = 0; i < t.triangles.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      int a = t.triangles[i][k], b = t.triangles[i][(k + 1) % 3];
      tri_at_edge[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(i));
    }
  std::vector<char> seen(t.triangles.size(), 0);
  std::queue<int> q;
  q.push(root_tri);
  seen[root_tri] = 1;
  while (!q.empty()) {
    int ti = q.front(); q.pop();
    auto& tri = t.triangles[ti];
    int missing = -1, cnt = 0;
    for (int k = 0; k < 3; ++k)
      if (!placed[tri[k]]) { missing = k; ++cnt; }
    require(cnt <= 1, "layout frontier lost tangency support");
    if (cnt == 1) {
      int v = tri[missing];
      int u = tri[(missing + 1) % 3];  // (v, u, w) is a ccw rotation of tri
      int w = tri[(missing + 2) % 3];
      // v lies left of u -> w since (u, w, v) is ccw.
      Placement pl = place_third(p.centers[u], p.radii[u], p.centers[w], p.radii[w], x[v]);
      p.centers[v] = pl.c;
      p.radii[v] = pl.r;
      placed[v] = 1;
    }
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      for (int other : tri_at_edge[{std::min(a, b), std::max(a, b)}])
        if (!seen[other]) { seen[other] = 1; q.push(other); }
    }
  }
  for (size_t v = 0; v < n; ++v) require(placed[v], "layout missed a vertex");
  return p;
}

CirclePacking normalize_packing(const CirclePacking& p, int v1, int v2) {
  require(v1 >= 0 && v1 < static_cast<int>(p.size()), "normalize: bad vertex");
  require(v2 >= 0 && v2 < static_cast<int>(p.size()) && v2 != v1, "normalize: bad vertex");
  require(!p.is_boundary[v1], "normalize: v1 must be interior");

  // Hyperbolic center of v1's circle: midpoint of the diametral chord.
  Point c = p.centers[v1];
  double r = p.radii[v1];
  double cc = norm(c);
  require(cc + r < 1.0, "normalize: v1 circle not strictly inside disk");
  double m1 = cc - r, m2 = cc + r;
  double h = std::tanh(0.5 * (std::atanh(m1) + std::atanh(m2)));
  Mobius first;
  first.a = cc > 0.0 ? (h / cc) * c.z() : cpx{0.0, 0.0};
  first.theta = 0.0;

  CirclePacking out = p;
  for (size_t v = 0; v < out.size(); ++v)
    first.apply_circle(out.centers[v], out.radii[v]);

  Mobius rot;
  rot.theta = -std::atan2(out.centers[v2].y, out.centers[v2].x);
  for (size_t v = 0; v < out.size(); ++v) {
    cpx z = std::polar(1.0, rot.theta) * out.centers[v].z();
    out.centers[v] = Point{z.real(), z.imag()};
  }
  out.normalization = Mobius::compose(rot, Mobius::compose(first, p.normalization));
  return out;
}

double ring_ratio(const CirclePacking& p, int max_degree) {
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (size_t v = 0; v < p.size(); ++v) {
    if (p.is_boundary[v]) continue;
    if (static_cast<int>(p.adjacency[v].size()) > max_degree) continue;
    found = true;
    for (int u : p.adjacency[v])
      best = std::min(best, p.radii[u] / p.radii[v]);
  }
  require(found, "ring ratio: no interior vertex within the degree bound");
  return best;
}

BoundaryAugmentation augment_boundary_tangencies(const CirclePacking& p) {
  // Recover the boundary cycle from the combinatorics.
  Triangulation t;
  t.vertices.assign(p.size(), Point{0, 0});
  t.triangles = p.triangles;
  compute_connectivity(t);
  std::vector<int> cyc = t.boundary_cycle();

  size_t n = p.size();
  BoundaryAugmentation aug;
  aug.adjacency.assign(n + cyc.size(), {});
  aug.positions.assign(n + cyc.size(), Point{0, 0});
  for (size_t v = 0; v < n; ++v) aug.positions[v] = p.centers[v];
  for (size_t v = 0; v < n; ++v) aug.adjacency[v] = p.adjacency[v];
  for (size_t k = 0; k < cyc.size(); ++k) {
    int v = cyc[k];
    int node = static_cast<int>(n + k);
    aug.tangency_vertex.push_back(v);
    double cc = norm(p.centers[v]);
    require(cc > 0.0, "boundary circle centered at origin");
    aug.positions[node] = Point{p.centers[v].x / cc, p.centers[v].y / cc};
    aug.adjacency[node].push_back(v);
    aug.adjacency[v].push_back(node);
    int next = static_cast<int>(n + (k + 1) % cyc.size());
    aug.adjacency[node].push_back(next);
    aug.adjacency[next].push_back(node);
  }
  return aug;
}

}  // namespace lab
