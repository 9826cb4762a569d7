#include "lab/modulus.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "lab/mesh.hpp"
#include "lab/parallel.hpp"
#include "lab/predicates.hpp"
#include "lab/rng.hpp"

namespace lab {

// ---------------------------------------------------------------------------
// Quadrilateral plumbing.

Quadrilateral conjugate(const Quadrilateral& q) {
  Quadrilateral c = q;
  c.marked_pair = 1 - q.marked_pair;
  return c;
}

namespace {

bool on_closed_segment(Point p, Point a, Point b) {
  if (orient2d(a, b, p) != 0) return false;
  double t = dot(p - a, b - a);
  return t >= 0.0 && t <= norm2(b - a);
}

void require_simple(const std::vector<Point>& poly) {
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    Point a = poly[i], b = poly[(i + 1) % n];
    require(!(a == b), "polygon has a zero-length edge");
    Point c = poly[(i + 2) % n];
    if (orient2d(a, b, c) == 0 && dot(a - b, c - b) > 0.0)
      throw std::runtime_error("polygon has a spike");
    for (size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      Point p = poly[j], q = poly[(j + 1) % n];
      int o1 = orient2d(a, b, p), o2 = orient2d(a, b, q);
      int o3 = orient2d(p, q, a), o4 = orient2d(p, q, b);
      bool crossing = (o1 * o2 < 0 && o3 * o4 < 0) ||
                      (o1 == 0 && on_closed_segment(p, a, b)) ||
                      (o2 == 0 && on_closed_segment(q, a, b)) ||
                      (o3 == 0 && on_closed_segment(a, p, q)) ||
                      (o4 == 0 && on_closed_segment(b, p, q));
      require(!crossing, "polygon is not simple");
    }
  }
}

double polygon_diameter(const std::vector<Point>& poly) {
  Point lo = poly[0], hi = poly[0];
  for (auto& p : poly) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
  }
  return dist(lo, hi);
}

}  // namespace

CanonicalQuad canonicalize(const Quadrilateral& q) {
  size_t n = q.polygon.size();
  require(n >= 3, "quadrilateral polygon needs at least three vertices");
  double area2 = 0.0;
  for (size_t i = 0; i < n; ++i) area2 += cross(q.polygon[i], q.polygon[(i + 1) % n]);
  require(area2 > 0.0, "quadrilateral polygon must be counterclockwise");
  require_simple(q.polygon);

  double tol = 1e-9 * polygon_diameter(q.polygon);

  // Locate each marked point on the boundary: a vertex or an edge interior.
  struct Loc { int edge; double t; int mark; };
  std::vector<Loc> locs;
  for (int k = 0; k < 4; ++k) {
    Point p = q.marked[k];
    int best_edge = -1;
    double best_d = tol, best_t = 0.0;
    for (size_t i = 0; i < n; ++i) {
      Point a = q.polygon[i], b = q.polygon[(i + 1) % n];
      double d = point_segment_dist(p, a, b);
      if (d < best_d) {
        best_d = d;
        best_edge = static_cast<int>(i);
        best_t = std::clamp(dot(p - a, b - a) / norm2(b - a), 0.0, 1.0);
      }
    }
    require(best_edge >= 0, "marked point not on the polygon boundary");
    // Snap to an endpoint when within tolerance.
    Point a = q.polygon[best_edge], b = q.polygon[(best_edge + 1) % n];
    if (dist(q.marked[k], a) <= tol) locs.push_back({best_edge, 0.0, k});
    else if (dist(q.marked[k], b) <= tol)
      locs.push_back({static_cast<int>((best_edge + 1) % n), 0.0, k});
    else locs.push_back({best_edge, best_t, k});
  }

  // Rebuild the polygon with edge-interior marks inserted.
  CanonicalQuad out;
  std::array<int, 4> corner{-1, -1, -1, -1};
  for (size_t i = 0; i < n; ++i) {
    int at = static_cast<int>(out.polygon.size());
    out.polygon.push_back(q.polygon[i]);
    for (auto& l : locs)
      if (l.edge == static_cast<int>(i) && l.t == 0.0) {
        require(corner[l.mark] < 0, "marked point located twice");
        corner[l.mark] = at;
      }
    std::vector<Loc> inner;
    for (auto& l : locs)
      if (l.edge == static_cast<int>(i) && l.t > 0.0) inner.push_back(l);
    std::sort(inner.begin(), inner.end(), [](const Loc& a, const Loc& b) { return a.t < b.t; });
    for (auto& l : inner) {
      corner[l.mark] = static_cast<int>(out.polygon.size());
      out.polygon.push_back(q.marked[l.mark]);
    }
  }
  for (int k = 0; k < 4; ++k) require(corner[k] >= 0, "marked point lost during insertion");
  {
    std::set<int> uniq(corner.begin(), corner.end());
    require(uniq.size() == 4, "marked points must be distinct boundary points");
  }

  // Cyclic order: walking ccw from corner[0] meets 1, 2, 3 in order.
  size_t m = out.polygon.size();
  auto ahead = [&](int from, int to) { return (to - from + static_cast<int>(m)) % static_cast<int>(m); };
  require(ahead(corner[0], corner[1]) < ahead(corner[0], corner[2]) &&
              ahead(corner[0], corner[2]) < ahead(corner[0], corner[3]),
          "marked points out of cyclic order");

  out.edge_label.assign(m, -1);
  for (int k = 0; k < 4; ++k) {
    int from = corner[k], to = corner[(k + 1) % 4];
    for (int i = from; i != to; i = (i + 1) % static_cast<int>(m)) out.edge_label[i] = k;
  }
  out.corner = corner;
  return out;
}

void validate_quadrilateral(const Quadrilateral& q) {
  require(q.marked_pair == 0 || q.marked_pair == 1, "marked pair flag must be 0 or 1");
  canonicalize(q);
}

double modulus_rectangle(double width, double height, int marked_pair) {
  require(width > 0.0 && height > 0.0, "rectangle needs positive side lengths");
  require(marked_pair == 0 || marked_pair == 1, "marked pair flag must be 0 or 1");
  return marked_pair == 0 ? width / height : height / width;
}

// ---------------------------------------------------------------------------
// Finite element modulus.

namespace {

// Dirichlet energy of the harmonic potential with u = 0 on side_zero,
// u = 1 on side_one, natural (insulating) elsewhere.  Equals the modulus of
// the family joining those sides, up to discretization (from above).
double dirichlet_energy(const Mesh& m, int side_zero, int side_one) {
  size_t n = m.vertices.size();
  std::vector<double> val(n, 0.0);
  std::vector<char> fixed(n, 0);
  for (int v : m.side_vertices(side_zero)) fixed[v] = 1;
  for (int v : m.side_vertices(side_one)) {
    require(!fixed[v], "marked sides touch in the mesh");
    fixed[v] = 1;
    val[v] = 1.0;
  }

  std::vector<int> id(n, -1);
  int nf = 0;
  for (size_t v = 0; v < n; ++v)
    if (!fixed[v]) id[v] = nf++;

  auto grad = [&](const std::array<int, 3>& t, Point g[3], double& area) {
    Point p0 = m.vertices[t[0]], p1 = m.vertices[t[1]], p2 = m.vertices[t[2]];
    double a2 = cross(p1 - p0, p2 - p0);
    require(a2 > 0.0, "degenerate mesh triangle");
    area = 0.5 * a2;
    Point e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0;
    g[0] = Point{-e0.y / a2, e0.x / a2};
    g[1] = Point{-e1.y / a2, e1.x / a2};
    g[2] = Point{-e2.y / a2, e2.x / a2};
  };

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(std::max(nf, 1));
  for (auto& t : m.triangles) {
    Point g[3];
    double area;
    grad(t, g, area);
    for (int i = 0; i < 3; ++i) {
      if (fixed[t[i]]) continue;
      for (int j = 0; j < 3; ++j) {
        double w = area * dot(g[i], g[j]);
        if (fixed[t[j]]) rhs[id[t[i]]] -= w * val[t[j]];
        else trip.emplace_back(id[t[i]], id[t[j]], w);
      }
    }
  }

  std::vector<double> u(val);
  if (nf > 0) {
    Eigen::SparseMatrix<double> K(nf, nf);
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(K);
    require(solver.info() == Eigen::Success, "stiffness factorization failed");
    Eigen::VectorXd uf = solver.solve(rhs);
    require(solver.info() == Eigen::Success, "harmonic solve failed");
    for (size_t v = 0; v < n; ++v)
      if (!fixed[v]) u[v] = uf[id[v]];
  }

  double energy = 0.0;
  for (auto& t : m.triangles) {
    Point g[3];
    double area;
    grad(t, g, area);
    Point du{0.0, 0.0};
    for (int i = 0; i < 3; ++i) du = du + u[t[i]] * g[i];
    energy += area * norm2(du);
  }
  return energy;
}

struct LevelValues {
  double primal, dual, midpoint;
  int vertices;
};

LevelValues solve_level(const Mesh& base, const std::array<Point, 4>& corners, double diam,
                        int lvl, int marked_pair) {
  Mesh m = base;
  double h0 = diam / static_cast<double>(1 << lvl);
  refine_to_size(m, [&](Point c) {
    double rmin = std::numeric_limits<double>::infinity();
    for (auto& p : corners) rmin = std::min(rmin, dist(c, p));
    // Grade toward the marked corners: the mixed boundary condition puts a
    // square-root singularity there, and sqrt grading restores second order.
    double g = std::sqrt(std::max(rmin, 1e-300) / diam);
    return h0 * std::clamp(g, 0.05, 1.0);
  });
  make_delaunay(m);
  for (int s = 0; s < 4; ++s) {
    int edges = 0;
    for (auto& [e, side] : m.boundary_side)
      if (side == s) ++edges;
    require(edges >= 2, "mesh too coarse to resolve a marked side");
  }
  int z = marked_pair == 0 ? 0 : 1;
  LevelValues lv;
  lv.primal = dirichlet_energy(m, z, z + 2);
  lv.dual = dirichlet_energy(m, 1 - z, 3 - z);
  lv.midpoint = 0.5 * (lv.primal + 1.0 / lv.dual);
  lv.vertices = static_cast<int>(m.vertices.size());
  return lv;
}

}  // namespace

namespace {

// Boundary polygons often come from sampling a map along straight segments;
// rounding then leaves runs of vertices a hair off a common line, and the
// mesher would build slivers whose double-precision area underflows to zero.
// Dropping any non-corner vertex within tol of its neighbors' chord perturbs
// the domain far below discretization error and keeps triangle areas sane.
void drop_collinear_vertices(CanonicalQuad& cq, double tol) {
  bool changed = true;
  while (changed && cq.polygon.size() > 4) {
    changed = false;
    int n = static_cast<int>(cq.polygon.size());
    for (int i = 0; i < n; ++i) {
      bool is_corner = false;
      for (int k = 0; k < 4; ++k) is_corner = is_corner || cq.corner[k] == i;
      if (is_corner) continue;
      Point u = cq.polygon[(i + n - 1) % n], w = cq.polygon[(i + 1) % n];
      if (point_segment_dist(cq.polygon[i], u, w) > tol) continue;
      cq.polygon.erase(cq.polygon.begin() + i);
      cq.edge_label.erase(cq.edge_label.begin() + i);
      for (int k = 0; k < 4; ++k)
        if (cq.corner[k] > i) --cq.corner[k];
      changed = true;
      break;
    }
  }
}

}  // namespace

ModulusResult modulus_quadrilateral(const Quadrilateral& q, int level) {
  require(level >= 2 && level <= 12, "mesh level out of range");
  CanonicalQuad cq = canonicalize(q);
  drop_collinear_vertices(cq, 1e-9 * polygon_diameter(cq.polygon));
  Mesh base = triangulate_polygon(cq.polygon, cq.edge_label);
  make_delaunay(base);
  double diam = polygon_diameter(cq.polygon);
  std::array<Point, 4> corners;
  for (int k = 0; k < 4; ++k) corners[k] = cq.polygon[cq.corner[k]];

  LevelValues coarse = solve_level(base, corners, diam, level - 1, q.marked_pair);
  LevelValues fine = solve_level(base, corners, diam, level, q.marked_pair);

  ModulusResult r;
  r.primal_energy = fine.primal;
  r.dual_energy = fine.dual;
  r.lo = std::min(1.0 / fine.dual, fine.primal);
  r.hi = fine.primal;
  r.value = 0.5 * (r.lo + r.hi);
  r.error = std::max(0.5 * (r.hi - r.lo), std::abs(fine.midpoint - coarse.midpoint) / 3.0);
  r.mesh_vertices = fine.vertices;
  return r;
}

// ---------------------------------------------------------------------------
// Continuous metrics and the packing transfer.

namespace {

double lens_area(double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  if (d <= std::abs(r1 - r2)) {
    double r = std::min(r1, r2);
    return M_PI * r * r;
  }
  double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
  double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
  double t = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) -
         0.5 * std::sqrt(std::max(0.0, t));
}

}  // namespace

double ContinuousMetric::eval(Point p) const {
  double s = 0.0;
  for (auto& a : atoms)
    if (dist(p, a.center) <= a.radius) s += a.weight;
  return s;
}

double ContinuousMetric::area() const {
  double s = 0.0;
  for (size_t i = 0; i < atoms.size(); ++i) {
    s += atoms[i].weight * atoms[i].weight * M_PI * atoms[i].radius * atoms[i].radius;
    for (size_t j = i + 1; j < atoms.size(); ++j)
      s += 2.0 * atoms[i].weight * atoms[j].weight *
           lens_area(atoms[i].radius, atoms[j].radius, dist(atoms[i].center, atoms[j].center));
  }
  return s;
}

double ContinuousMetric::length_along(const std::vector<Point>& polyline) const {
  double total = 0.0;
  for (size_t k = 0; k + 1 < polyline.size(); ++k) {
    Point a = polyline[k], b = polyline[k + 1];
    double L = dist(a, b);
    if (L == 0.0) continue;
    for (auto& at : atoms) {
      double ts = dot(at.center - a, b - a) / (L * L);
      double d2 = dist2(a + ts * (b - a), at.center);
      double rr = at.radius * at.radius;
      if (d2 >= rr) continue;
      double half = std::sqrt(rr - d2) / L;
      double lo = std::max(0.0, ts - half), hi = std::min(1.0, ts + half);
      if (hi > lo) total += at.weight * L * (hi - lo);
    }
  }
  return total;
}

TransferResult transfer_metric(const CirclePacking& p, const std::vector<double>& rho,
                               int max_degree) {
  require(rho.size() == p.size(), "metric size does not match packing");
  for (size_t v = 0; v < rho.size(); ++v) {
    require(rho[v] >= 0.0, "metric weights must be nonnegative");
    if (rho[v] > 0.0)
      require(static_cast<int>(p.adjacency[v].size()) <= max_degree,
              "metric supported on a vertex above the degree bound");
  }
  TransferResult out;
  out.eta = ring_ratio(p, max_degree) / 2.0;
  double f = (1.0 + out.eta) / out.eta;
  out.constant = (max_degree + 1) * f * f;
  for (size_t v = 0; v < rho.size(); ++v)
    if (rho[v] > 0.0)
      out.metric.atoms.push_back({p.centers[v], (1.0 + out.eta) * p.radii[v],
                                  rho[v] / (out.eta * p.radii[v])});
  return out;
}

// ---------------------------------------------------------------------------
// Rough quasiconformality and quasisymmetry probes.

namespace {

bool rect_inside(const Rect& r, const Domain& dom, bool strict) {
  auto cs = r.corners();
  for (auto& c : cs)
    if (!(strict ? dom.strictly_contains(c) : dom.contains(c))) return false;
  if (dom.kind == Domain::Kind::polygon)
    for (int k = 0; k < 4; ++k)
      if (segment_crosses_polygon(cs[k], cs[(k + 1) % 4], dom.polygon)) return false;
  return true;
}

}  // namespace

RoughQcResult rough_qc_test(const std::function<Point(Point)>& f, const Domain& dom,
                            double epsilon, int samples, uint64_t seed, int mesh_level) {
  require(epsilon > 0.0, "epsilon must be positive");
  require(samples > 0, "need at least one sample");
  Rng rng(seed);
  Point lo, hi;
  dom.bounding_box(lo, hi);

  std::vector<Rect> rects;
  long attempts = 0, cap = 500L * samples + 1000;
  while (static_cast<int>(rects.size()) < samples && attempts++ < cap) {
    Rect r;
    r.center = Point{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    r.hw = 0.5 * epsilon * (1.0 + rng.uniform());
    r.hh = 0.5 * epsilon * (1.0 + rng.uniform());
    r.angle = rng.uniform(0.0, M_PI);
    if (rect_inside(r, dom, true)) rects.push_back(r);
  }
  require(!rects.empty(), "no rectangle with the requested side length fits the domain");

  struct Item {
    double ratio = 1.0;
    bool degenerate = false;
  };
  std::vector<Item> items(rects.size());
  std::vector<Quadrilateral> quads(rects.size());
  std::vector<char> built(rects.size(), 0);

  // Build image polygons sequentially (the map evaluation may cache state);
  // the independent modulus solves run in parallel below.
  for (size_t i = 0; i < rects.size(); ++i) {
    auto cs = rects[i].corners();
    Quadrilateral img;
    int per_side = 16;
    for (int k = 0; k < 4; ++k) {
      Point a = cs[k], b = cs[(k + 1) % 4];
      img.marked[k] = f(a);
      for (int s = 0; s < per_side; ++s) {
        double t = static_cast<double>(s) / per_side;
        img.polygon.push_back(f(a + t * (b - a)));
      }
    }
    img.marked_pair = 0;
    try {
      validate_quadrilateral(img);
      quads[i] = img;
      built[i] = 1;
    } catch (const std::exception&) {
      items[i].degenerate = true;
    }
  }

  parallel_for(rects.size(), [&](size_t i) {
    if (!built[i]) return;
    double mod_src = modulus_rectangle(2.0 * rects[i].hw, 2.0 * rects[i].hh, 0);
    try {
      double mod_img = modulus_quadrilateral(quads[i], mesh_level).value;
      items[i].ratio = std::max(mod_img / mod_src, mod_src / mod_img);
    } catch (const std::exception&) {
      items[i].degenerate = true;
    }
  });

  RoughQcResult out;
  out.samples_used = static_cast<int>(rects.size());
  out.witness = rects[0];
  for (size_t i = 0; i < rects.size(); ++i) {
    if (items[i].degenerate) {
      out.K = std::numeric_limits<double>::infinity();
      out.witness = rects[i];
      out.degenerate = true;
      return out;
    }
    if (items[i].ratio > out.K) {
      out.K = items[i].ratio;
      out.witness = rects[i];
    }
  }
  return out;
}

double quasisymmetry_ratio(const std::function<Point(Point)>& f, Point x, double r,
                           int samples) {
  require(samples >= 3, "need at least three circle samples");
  require(r > 0.0, "radius must be positive");
  Point fx = f(x);
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    double ang = 2.0 * M_PI * k / samples;
    Point z{x.x + 2.0 * r * std::cos(ang), x.y + 2.0 * r * std::sin(ang)};
    double d = dist(f(z), fx);
    mx = std::max(mx, d);
    mn = std::min(mn, d);
  }
  require(mn > 0.0, "map collapses the sampled circle");
  return mx / mn;
}

// ---------------------------------------------------------------------------

std::vector<Rect> square_family(const Domain& dom, double epsilon) {
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  int n = static_cast<int>(std::ceil(1.0 / epsilon));
  Point lo, hi;
  dom.bounding_box(lo, hi);
  double R = std::max({std::abs(lo.x), std::abs(lo.y), std::abs(hi.x), std::abs(hi.y)}) +
             std::hypot(hi.x - lo.x, hi.y - lo.y);

  std::vector<Rect> out;
  std::set<std::array<long long, 4>> seen;
  auto quant = [](double v) { return std::llround(v * 1e9); };
  for (int j = 1; j <= n; ++j) {
    double s = j * epsilon;
    for (int k = 1; k <= n; ++k) {
      double phi = 2.0 * M_PI * k / n;
      // The grid is invariant under quarter turns.
      double canon = std::fmod(std::fmod(phi, M_PI / 2.0) + M_PI / 2.0, M_PI / 2.0);
      if (std::abs(canon - M_PI / 2.0) < 1e-12) canon = 0.0;
      double c = std::cos(phi), sn = std::sin(phi);
      long long span = static_cast<long long>(std::ceil(R / s)) + 1;
      for (long long ix = -span; ix < span; ++ix)
        for (long long iy = -span; iy < span; ++iy) {
          double cx = (ix + 0.5) * s, cy = (iy + 0.5) * s;
          Rect r;
          r.center = Point{c * cx - sn * cy, sn * cx + c * cy};
          r.hw = r.hh = s / 2.0;
          r.angle = phi;
          // Containment is closed: squares may touch the domain boundary.
          if (!rect_inside(r, dom, false)) continue;
          std::array<long long, 4> key{quant(s), quant(canon), quant(r.center.x),
                                       quant(r.center.y)};
          if (seen.insert(key).second) out.push_back(r);
        }
    }
  }
  return out;
}

}  // namespace lab
