#include "lab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "lab/predicates.hpp"

namespace lab {

double Mesh::min_triangle_area() const {
  double best = std::numeric_limits<double>::infinity();
  for (auto& t : triangles) {
    double a = 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
    best = std::min(best, a);
  }
  return best;
}

std::vector<int> Mesh::side_vertices(int label) const {
  std::set<int> out;
  for (auto& [e, s] : boundary_side)
    if (s == label) { out.insert(e.first); out.insert(e.second); }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------

namespace {

bool point_on_open_segment(Point p, Point a, Point b) {
  if (orient2d(a, b, p) != 0) return false;
  double t = dot(p - a, b - a);
  return t > 0.0 && t < norm2(b - a);
}

}  // namespace

Mesh triangulate_polygon(const std::vector<Point>& poly, const std::vector<int>& edge_label) {
  size_t n = poly.size();
  require(n >= 3, "polygon needs at least three vertices");
  require(edge_label.size() == n, "one label per polygon edge");
  double area2 = 0.0;
  for (size_t i = 0; i < n; ++i) area2 += cross(poly[i], poly[(i + 1) % n]);
  require(area2 > 0.0, "polygon must be counterclockwise with positive area");

  Mesh m;
  m.vertices = poly;
  for (size_t i = 0; i < n; ++i) {
    int a = static_cast<int>(i), b = static_cast<int>((i + 1) % n);
    require(!(poly[a] == poly[b]), "repeated consecutive polygon vertex");
    m.boundary_side[{std::min(a, b), std::max(a, b)}] = edge_label[i];
  }

  // Ear clipping on the index ring.  An ear is a strictly convex corner whose
  // triangle holds no other ring vertex strictly inside or on the diagonal.
  std::vector<int> ring(n);
  for (size_t i = 0; i < n; ++i) ring[i] = static_cast<int>(i);
  while (ring.size() > 3) {
    size_t rn = ring.size();
    int found = -1;
    for (size_t i = 0; i < rn && found < 0; ++i) {
      int ip = ring[(i + rn - 1) % rn], iv = ring[i], in = ring[(i + 1) % rn];
      Point a = poly[ip], b = poly[iv], c = poly[in];
      if (orient2d(a, b, c) <= 0) continue;
      bool blocked = false;
      for (size_t j = 0; j < rn && !blocked; ++j) {
        int w = ring[j];
        if (w == ip || w == iv || w == in) continue;
        Point p = poly[w];
        bool inside = orient2d(a, b, p) > 0 && orient2d(b, c, p) > 0 && orient2d(c, a, p) > 0;
        blocked = inside || point_on_open_segment(p, c, a);
      }
      if (!blocked) found = static_cast<int>(i);
    }
    require(found >= 0, "polygon triangulation failed (non-simple or degenerate input)");
    size_t i = static_cast<size_t>(found);
    m.triangles.push_back({ring[(i + rn - 1) % rn], ring[i], ring[(i + 1) % rn]});
    ring.erase(ring.begin() + found);
  }
  require(orient2d(poly[ring[0]], poly[ring[1]], poly[ring[2]]) > 0,
          "polygon triangulation left a degenerate core");
  m.triangles.push_back({ring[0], ring[1], ring[2]});
  return m;
}

// ---------------------------------------------------------------------------

namespace {

using Edge = std::pair<int, int>;

Edge sorted_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

struct EdgeMap {
  std::map<Edge, std::vector<int>> at;

  void add(int tri, const std::array<int, 3>& t) {
    for (int k = 0; k < 3; ++k) at[sorted_edge(t[k], t[(k + 1) % 3])].push_back(tri);
  }
  void remove(int tri, const std::array<int, 3>& t) {
    for (int k = 0; k < 3; ++k) {
      auto& v = at[sorted_edge(t[k], t[(k + 1) % 3])];
      v.erase(std::find(v.begin(), v.end(), tri));
    }
  }
  int other(Edge e, int tri) const {
    auto it = at.find(e);
    if (it == at.end()) return -1;
    for (int x : it->second)
      if (x != tri) return x;
    return -1;
  }
};

// Opposite vertex of edge e in triangle t.
int apex(const std::array<int, 3>& t, Edge e) {
  for (int k = 0; k < 3; ++k)
    if (t[k] != e.first && t[k] != e.second) return t[k];
  return -1;
}

}  // namespace

void make_delaunay(Mesh& m) {
  EdgeMap em;
  for (size_t i = 0; i < m.triangles.size(); ++i) em.add(static_cast<int>(i), m.triangles[i]);

  std::set<Edge> queue;
  for (auto& [e, tris] : em.at)
    if (tris.size() == 2) queue.insert(e);

  int guard = 30 * static_cast<int>(m.triangles.size()) + 1000;
  while (!queue.empty() && guard-- > 0) {
    Edge e = *queue.begin();
    queue.erase(queue.begin());
    if (m.boundary_side.count(e)) continue;
    auto tris = em.at.count(e) ? em.at[e] : std::vector<int>{};
    if (tris.size() != 2) continue;
    int t1 = tris[0], t2 = tris[1];
    int a = apex(m.triangles[t1], e), b = apex(m.triangles[t2], e);
    // Flip when the opposite angles exceed pi (strictly, with slack).
    Point pa = m.vertices[a], pb = m.vertices[b];
    Point pe1 = m.vertices[e.first], pe2 = m.vertices[e.second];
    auto angle_at = [](Point v, Point p, Point q) {
      return std::atan2(std::abs(cross(p - v, q - v)), dot(p - v, q - v));
    };
    if (angle_at(pa, pe1, pe2) + angle_at(pb, pe1, pe2) <= M_PI + 1e-12) continue;
    // Replace (e1,e2,a),(e2,e1,b) by (a,e1,b),(b,e2,a); keep ccw by checking.
    if (cross(pe1 - pa, pb - pa) <= 0 || cross(pe2 - pb, pa - pb) <= 0) continue;
    em.remove(t1, m.triangles[t1]);
    em.remove(t2, m.triangles[t2]);
    m.triangles[t1] = {a, e.first, b};
    m.triangles[t2] = {b, e.second, a};
    em.add(t1, m.triangles[t1]);
    em.add(t2, m.triangles[t2]);
    for (int v : {e.first, e.second})
      for (int w : {a, b}) queue.insert(sorted_edge(v, w));
  }
}

// ---------------------------------------------------------------------------

namespace {

struct Refiner {
  Mesh& m;
  EdgeMap em;

  explicit Refiner(Mesh& mesh) : m(mesh) {
    for (size_t i = 0; i < m.triangles.size(); ++i) em.add(static_cast<int>(i), m.triangles[i]);
  }

  Edge longest_edge(int tri) const {
    auto& t = m.triangles[tri];
    Edge best{};
    double len = -1.0;
    for (int k = 0; k < 3; ++k) {
      Edge e = sorted_edge(t[k], t[(k + 1) % 3]);
      double d = dist2(m.vertices[e.first], m.vertices[e.second]);
      // Exact tie-break by edge id keeps the choice consistent across the
      // two triangles sharing an edge (termination of the recursion).
      if (d > len || (d == len && e < best)) { len = d; best = e; }
    }
    return best;
  }

  // Splits edge e (midpoint) in every incident triangle; e must be the
  // longest edge of each by the time this runs.
  void bisect(Edge e) {
    int mid = static_cast<int>(m.vertices.size());
    m.vertices.push_back(0.5 * (m.vertices[e.first] + m.vertices[e.second]));
    auto side = m.boundary_side.find(e);
    if (side != m.boundary_side.end()) {
      int label = side->second;
      m.boundary_side.erase(side);
      m.boundary_side[sorted_edge(e.first, mid)] = label;
      m.boundary_side[sorted_edge(mid, e.second)] = label;
    }
    std::vector<int> tris = em.at.count(e) ? em.at[e] : std::vector<int>{};
    for (int tri : tris) {
      auto t = m.triangles[tri];
      int c = apex(t, e);
      // Orient: t is some rotation of (x, y, c) with {x,y} = e.
      int x = -1, y = -1;
      for (int k = 0; k < 3; ++k)
        if (t[(k + 2) % 3] == c) { x = t[k]; y = t[(k + 1) % 3]; }
      em.remove(tri, m.triangles[tri]);
      m.triangles[tri] = {x, mid, c};
      em.add(tri, m.triangles[tri]);
      int fresh = static_cast<int>(m.triangles.size());
      m.triangles.push_back({mid, y, c});
      em.add(fresh, m.triangles.back());
    }
  }

  // Rivara: make e the longest edge of both neighbors (recursing), then split.
  void refine_edge(Edge e) {
    std::vector<Edge> stack{e};
    int guard = 1000000;
    while (!stack.empty() && guard-- > 0) {
      Edge cur = stack.back();
      auto it = em.at.find(cur);
      if (it == em.at.end() || it->second.empty()) { stack.pop_back(); continue; }
      bool ready = true;
      for (int tri : it->second) {
        Edge le = longest_edge(tri);
        if (le != cur) { stack.push_back(le); ready = false; break; }
      }
      if (!ready) continue;
      bisect(cur);
      stack.pop_back();
    }
    require(guard > 0, "refinement did not terminate");
  }
};

}  // namespace

void refine_to_size(Mesh& m, const std::function<double(Point)>& target_size) {
  Refiner r(m);
  bool again = true;
  int guard = 200;
  while (again && guard-- > 0) {
    again = false;
    for (size_t i = 0; i < m.triangles.size(); ++i) {
      auto& t = m.triangles[i];
      Point c = (1.0 / 3.0) * (m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]);
      Edge e = r.longest_edge(static_cast<int>(i));
      double len = dist(m.vertices[e.first], m.vertices[e.second]);
      if (len > target_size(c)) {
        r.refine_edge(e);
        again = true;
      }
    }
  }
  require(guard > 0, "refinement loop exceeded its pass budget");
}

}  // namespace lab
