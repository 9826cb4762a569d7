#include "lab/triangulation.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "lab/predicates.hpp"
#include "lab/rng.hpp"

namespace lab {

std::vector<std::pair<int, int>> Triangulation::edges() const {
  std::set<std::pair<int, int>> es;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) {
      int u = t[k], v = t[(k + 1) % 3];
      es.emplace(std::min(u, v), std::max(u, v));
    }
  return {es.begin(), es.end()};
}

void compute_connectivity(Triangulation& t) {
  size_t n = t.vertices.size();
  t.adjacency.assign(n, {});
  t.is_boundary.assign(n, 0);
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : t.triangles)
    for (int k = 0; k < 3; ++k) {
      int u = tri[k], v = tri[(k + 1) % 3];
      ++edge_count[{std::min(u, v), std::max(u, v)}];
    }
  for (const auto& [e, c] : edge_count) {
    t.adjacency[e.first].push_back(e.second);
    t.adjacency[e.second].push_back(e.first);
    if (c == 1) {
      t.is_boundary[e.first] = 1;
      t.is_boundary[e.second] = 1;
    }
  }
  for (auto& nb : t.adjacency) std::sort(nb.begin(), nb.end());
}

std::vector<int> Triangulation::boundary_cycle() const {
  // Boundary directed edges as they appear in their unique triangle keep the
  // complex interior on the left.
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : triangles)
    for (int k = 0; k < 3; ++k) {
      int u = tri[k], v = tri[(k + 1) % 3];
      ++count[{std::min(u, v), std::max(u, v)}];
    }
  std::map<int, int> next;
  size_t boundary_edges = 0;
  for (const auto& tri : triangles)
    for (int k = 0; k < 3; ++k) {
      int u = tri[k], v = tri[(k + 1) % 3];
      if (count[{std::min(u, v), std::max(u, v)}] == 1) {
        require(next.emplace(u, v).second, "boundary is not a simple cycle");
        ++boundary_edges;
      }
    }
  require(!next.empty(), "triangulation has no boundary");
  std::vector<int> cycle;
  int start = next.begin()->first, cur = start;
  do {
    cycle.push_back(cur);
    auto it = next.find(cur);
    require(it != next.end(), "boundary is not closed");
    cur = it->second;
  } while (cur != start && cycle.size() <= boundary_edges);
  require(cur == start && cycle.size() == boundary_edges,
          "boundary is not a single cycle");
  return cycle;
}

// ---------------------------------------------------------------------------
// Delaunay construction.  Bowyer-Watson over the triangulated sphere: the
// convex hull is closed off by ghost triangles sharing one ghost vertex, so
// insertions outside the current hull need no special casing.

namespace {

constexpr int kGhost = -1;

struct BwTri {
  int v[3];    // ghost vertex, if any, sits at v[2]
  int nbr[3];  // nbr[k] is across the edge (v[k+1], v[k+2])
  bool alive = true;
};

struct Builder {
  const std::vector<Point>& pts;
  std::vector<BwTri> tris;
  int last_alive = 0;

  explicit Builder(const std::vector<Point>& p) : pts(p) {}

  bool is_ghost(int t) const { return tris[t].v[2] == kGhost; }

  // True if inserting p (index ip) must delete triangle t.
  bool in_conflict(int t, Point p, int ip) const {
    const BwTri& T = tris[t];
    if (is_ghost(t)) {
      Point a = pts[T.v[0]], b = pts[T.v[1]];
      int o = orient2d(a, b, p);
      if (o != 0) return o > 0;
      // Collinear with the hull edge: conflict only inside the open segment.
      mpq_class d1 = (mpq_class(p.x) - b.x) * (mpq_class(a.x) - b.x) +
                     (mpq_class(p.y) - b.y) * (mpq_class(a.y) - b.y);
      mpq_class d2 = (mpq_class(p.x) - a.x) * (mpq_class(b.x) - a.x) +
                     (mpq_class(p.y) - a.y) * (mpq_class(b.y) - a.y);
      return sgn(d1) > 0 && sgn(d2) > 0;
    }
    return incircle_perturbed(pts[T.v[0]], pts[T.v[1]], pts[T.v[2]], p,
                              static_cast<size_t>(T.v[0]), static_cast<size_t>(T.v[1]),
                              static_cast<size_t>(T.v[2]), static_cast<size_t>(ip)) > 0;
  }

  int edge_index(int t, int from, int to) const {
    for (int k = 0; k < 3; ++k)
      if (tris[t].v[(k + 1) % 3] == from && tris[t].v[(k + 2) % 3] == to) return k;
    throw std::logic_error("edge not found in triangle");
  }

  // Locates some triangle in conflict with p by an orientation walk from a
  // recently created triangle, falling back to a full scan if the walk is
  // inconclusive (degenerate configurations).
  int locate_conflict(Point p, int ip) {
    int t = last_alive;
    if (!tris[t].alive || is_ghost(t)) t = -1;
    if (t >= 0) {
      size_t steps = 0, cap = 4 * tris.size() + 64;
      int prev = -1;
      while (steps++ < cap) {
        const BwTri& T = tris[t];
        int go = -1;
        bool inside = true;
        for (int k = 0; k < 3; ++k) {
          int u = T.v[(k + 1) % 3], v = T.v[(k + 2) % 3];
          if (orient2d(pts[u], pts[v], p) < 0) {
            inside = false;
            if (T.nbr[k] != prev || go < 0) {
              go = k;
              if (T.nbr[k] != prev) break;
            }
          }
        }
        if (inside) {
          for (int k = 0; k < 3; ++k)
            require(!(pts[T.v[k]] == p), "duplicate point in triangulation input");
          return t;
        }
        int nt = T.nbr[go];
        if (is_ghost(nt)) {
          // p is outside (or on) the hull; scan the ghost ring for the
          // conflicting ghost triangle.
          int g = nt;
          size_t guard = 0;
          do {
            if (in_conflict(g, p, ip)) return g;
            int k = edge_index(g, kGhost, tris[g].v[0]);  // edge (ghost, v0)
            g = tris[g].nbr[k];
            require(++guard <= tris.size() + 4, "hull walk did not terminate");
          } while (g != nt);
          break;  // fall through to the full scan
        }
        prev = t;
        t = nt;
      }
    }
    for (size_t i = 0; i < tris.size(); ++i)
      if (tris[i].alive && in_conflict(static_cast<int>(i), p, ip)) return static_cast<int>(i);
    throw std::logic_error("no conflict triangle found (duplicate point?)");
  }

  void insert(int ip) {
    Point p = pts[ip];
    int seed = locate_conflict(p, ip);

    // Grow the conflict cavity.
    std::vector<int> cavity{seed};
    std::unordered_map<int, char> mark;
    mark[seed] = 1;
    std::vector<int> stack{seed};
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        int n = tris[t].nbr[k];
        auto it = mark.find(n);
        if (it != mark.end()) continue;
        if (in_conflict(n, p, ip)) {
          mark[n] = 1;
          cavity.push_back(n);
          stack.push_back(n);
        } else {
          mark[n] = 0;
        }
      }
    }

    // Cavity boundary edges, directed as they appear in their cavity
    // triangle (cavity on the left).
    struct BEdge {
      int from, to, outside;
    };
    std::vector<BEdge> boundary;
    for (int t : cavity)
      for (int k = 0; k < 3; ++k) {
        int n = tris[t].nbr[k];
        if (mark[n] == 1) continue;
        boundary.push_back({tris[t].v[(k + 1) % 3], tris[t].v[(k + 2) % 3], n});
      }
    for (int t : cavity) tris[t].alive = false;

    // Star the cavity from p.  New triangle (p, x, y) per boundary edge
    // x->y; ghost edges keep the ghost vertex in the last slot.
    std::unordered_map<int, int> by_tail, by_head;
    std::vector<int> fresh;
    for (const BEdge& e : boundary) {
      BwTri nt;
      nt.v[0] = ip;
      nt.v[1] = e.from;
      nt.v[2] = e.to;
      if (e.from == kGhost) {
        // rotate (p, g, y) -> (y, p, g)
        nt.v[0] = e.to;
        nt.v[1] = ip;
        nt.v[2] = kGhost;
      }
      int id = static_cast<int>(tris.size());
      tris.push_back(nt);
      fresh.push_back(id);
      by_tail[e.from] = id;
      by_head[e.to] = id;
      // Outside neighbor link both ways.
      int k = edge_index(id, e.from, e.to);
      tris[id].nbr[k] = e.outside;
      int ko = edge_index(e.outside, e.to, e.from);
      tris[e.outside].nbr[ko] = id;
    }
    // Spoke links: across (to, p) sits the triangle whose boundary edge
    // starts at `to`; across (p, from) the one ending at `from`.
    for (const BEdge& e : boundary) {
      int id = by_tail[e.from];
      int k = edge_index(id, e.to, ip);
      tris[id].nbr[k] = by_tail[e.to];
      k = edge_index(id, ip, e.from);
      tris[id].nbr[k] = by_head[e.from];
    }
    for (int id : fresh)
      if (!is_ghost(id)) {
        last_alive = id;
        break;
      }
  }
};

// Interleaved-bit key for spatial insertion order.
std::uint64_t morton_key(Point p, Point lo, Point hi) {
  double w = std::max(hi.x - lo.x, hi.y - lo.y);
  if (w <= 0) w = 1;
  std::uint32_t xi = static_cast<std::uint32_t>(std::min(2097151.0, std::max(0.0, (p.x - lo.x) / w * 2097151.0)));
  std::uint32_t yi = static_cast<std::uint32_t>(std::min(2097151.0, std::max(0.0, (p.y - lo.y) / w * 2097151.0)));
  std::uint64_t key = 0;
  for (int b = 20; b >= 0; --b) {
    key = (key << 1) | ((xi >> b) & 1u);
    key = (key << 1) | ((yi >> b) & 1u);
  }
  return key;
}

}  // namespace

Triangulation delaunay(const PointSet& points) {
  const auto& pts = points.pts;
  require(pts.size() >= 3, "delaunay needs at least 3 points");
  {
    std::vector<std::pair<std::pair<double, double>, int>> sorted;
    sorted.reserve(pts.size());
    for (size_t i = 0; i < pts.size(); ++i)
      sorted.push_back({{pts[i].x, pts[i].y}, static_cast<int>(i)});
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 1; i < sorted.size(); ++i)
      require(sorted[i].first != sorted[i - 1].first, "points must be pairwise distinct");
  }

  // Deterministic seed triangle: vertex 0, vertex 1, and the first vertex not
  // collinear with them.  The symbolic perturbation makes the final
  // triangulation independent of this choice.
  int i0 = 0, i1 = 1, i2 = -1;
  for (size_t i = 2; i < pts.size(); ++i)
    if (orient2d(pts[i0], pts[i1], pts[i]) != 0) {
      i2 = static_cast<int>(i);
      break;
    }
  require(i2 >= 0, "points are all collinear");
  if (orient2d(pts[i0], pts[i1], pts[i2]) < 0) std::swap(i0, i1);

  Builder b(pts);
  // Real seed triangle plus its three ghosts.
  b.tris.push_back({{i0, i1, i2}, {-1, -1, -1}, true});
  b.tris.push_back({{i1, i0, kGhost}, {-1, -1, -1}, true});  // hull edge i0->i1
  b.tris.push_back({{i2, i1, kGhost}, {-1, -1, -1}, true});  // hull edge i1->i2
  b.tris.push_back({{i0, i2, kGhost}, {-1, -1, -1}, true});  // hull edge i2->i0
  auto link = [&](int t, int from, int to, int u) {
    int k = b.edge_index(t, from, to);
    b.tris[t].nbr[k] = u;
    int ku = b.edge_index(u, to, from);
    b.tris[u].nbr[ku] = t;
  };
  link(0, i0, i1, 1);
  link(0, i1, i2, 2);
  link(0, i2, i0, 3);
  link(1, i0, kGhost, 3);  // ghost ring around the hull
  link(2, i1, kGhost, 1);
  link(3, i2, kGhost, 2);
  b.last_alive = 0;

  // Remaining points in Morton order for walk locality.
  Point lo = pts[0], hi = pts[0];
  for (const Point& p : pts) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  std::vector<std::pair<std::uint64_t, int>> order;
  order.reserve(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    if (static_cast<int>(i) == i0 || static_cast<int>(i) == i1 || static_cast<int>(i) == i2) continue;
    order.push_back({morton_key(pts[i], lo, hi), static_cast<int>(i)});
  }
  std::sort(order.begin(), order.end());
  for (const auto& [key, idx] : order) b.insert(idx);

  Triangulation out;
  out.vertices = pts;
  for (const BwTri& t : b.tris) {
    if (!t.alive || t.v[2] == kGhost) continue;
    std::array<int, 3> tri{t.v[0], t.v[1], t.v[2]};
    int m = static_cast<int>(std::min_element(tri.begin(), tri.end()) - tri.begin());
    out.triangles.push_back({tri[m], tri[(m + 1) % 3], tri[(m + 2) % 3]});
  }
  std::sort(out.triangles.begin(), out.triangles.end());
  compute_connectivity(out);
  return out;
}

ClipResult clip_to_domain(const Triangulation& t, const Domain& domain) {
  std::vector<std::array<int, 3>> kept;
  for (const auto& tri : t.triangles) {
    Point a = t.vertices[tri[0]], b = t.vertices[tri[1]], c = t.vertices[tri[2]];
    bool in = domain.contains(a) && domain.contains(b) && domain.contains(c);
    if (in && domain.kind == Domain::Kind::polygon) {
      // Convexity does the rest for disk/rectangle; a polygon needs the edge
      // and spike checks too.
      in = !segment_crosses_polygon(a, b, domain.polygon) &&
           !segment_crosses_polygon(b, c, domain.polygon) &&
           !segment_crosses_polygon(c, a, domain.polygon);
      if (in)
        for (Point q : domain.polygon)
          if (orient2d(a, b, q) > 0 && orient2d(b, c, q) > 0 && orient2d(c, a, q) > 0) {
            in = false;
            break;
          }
    }
    if (in) kept.push_back(tri);
  }
  require(!kept.empty(), "no triangle lies inside the domain");

  std::vector<int> used;
  for (const auto& tri : kept)
    for (int v : tri) used.push_back(v);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::unordered_map<int, int> remap;
  for (size_t i = 0; i < used.size(); ++i) remap[used[i]] = static_cast<int>(i);

  ClipResult res;
  res.orig_index = used;
  res.tri.vertices.reserve(used.size());
  for (int v : used) res.tri.vertices.push_back(t.vertices[v]);
  for (const auto& tri : kept)
    res.tri.triangles.push_back({remap[tri[0]], remap[tri[1]], remap[tri[2]]});
  compute_connectivity(res.tri);
  res.is_disk = is_combinatorial_disk(res.tri);
  return res;
}

int nearest_vertex(const Triangulation& t, Point z) {
  require(!t.vertices.empty(), "nearest_vertex on empty triangulation");
  int best = 0;
  double bd = dist2(t.vertices[0], z);
  for (size_t i = 1; i < t.vertices.size(); ++i) {
    double d = dist2(t.vertices[i], z);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

bool is_combinatorial_disk(const Triangulation& t) {
  if (t.triangles.empty()) return false;
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : t.triangles)
    for (int k = 0; k < 3; ++k) {
      int u = tri[k], v = tri[(k + 1) % 3];
      if (++count[{std::min(u, v), std::max(u, v)}] > 2) return false;
    }
  // Connectivity over shared edges.
  std::map<std::pair<int, int>, std::vector<int>> tris_of_edge;
  for (size_t i = 0; i < t.triangles.size(); ++i) {
    const auto& tri = t.triangles[i];
    for (int k = 0; k < 3; ++k) {
      int u = tri[k], v = tri[(k + 1) % 3];
      tris_of_edge[{std::min(u, v), std::max(u, v)}].push_back(static_cast<int>(i));
    }
  }
  std::vector<char> seen(t.triangles.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  size_t reached = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    const auto& tri = t.triangles[i];
    for (int k = 0; k < 3; ++k) {
      int u = tri[k], v = tri[(k + 1) % 3];
      for (int j : tris_of_edge[{std::min(u, v), std::max(u, v)}])
        if (!seen[j]) {
          seen[j] = 1;
          ++reached;
          stack.push_back(j);
        }
    }
  }
  if (reached != t.triangles.size()) return false;
  // Single boundary cycle.
  try {
    t.boundary_cycle();
  } catch (const std::exception&) {
    return false;
  }
  // Euler characteristic V - E + F = 1; unused vertices would break V.
  std::set<int> verts;
  for (const auto& tri : t.triangles) verts.insert(tri.begin(), tri.end());
  long V = static_cast<long>(verts.size());
  long E = static_cast<long>(count.size());
  long F = static_cast<long>(t.triangles.size());
  if (V - E + F != 1) return false;
  // Vertex links: every vertex's incident triangles form a single fan, i.e.
  // the number of incident edges minus incident triangles is 1 on the
  // boundary and 0 in the interior (no pinch points).
  std::map<int, int> tri_deg, edge_deg;
  for (const auto& tri : t.triangles)
    for (int v : tri) ++tri_deg[v];
  for (const auto& [e, c] : count) {
    (void)c;
    ++edge_deg[e.first];
    ++edge_deg[e.second];
  }
  std::set<int> boundary_verts;
  for (const auto& [e, c] : count)
    if (c == 1) {
      boundary_verts.insert(e.first);
      boundary_verts.insert(e.second);
    }
  for (int v : verts) {
    int expect = boundary_verts.count(v) ? tri_deg[v] + 1 : tri_deg[v];
    if (edge_deg[v] != expect) return false;
  }
  return true;
}

StarReport verify_star_property(const Triangulation& t, size_t samples, std::uint64_t seed) {
  auto es = t.edges();
  require(!es.empty(), "triangulation has no edges");
  Rng rng(seed);
  StarReport rep;
  rep.samples = samples;
  for (size_t s = 0; s < samples; ++s) {
    const auto& e = es[rng.below(es.size())];
    double u = rng.uniform();
    Point a = t.vertices[e.first], b = t.vertices[e.second];
    Point x = a + u * (b - a);
    double de = std::min(dist2(x, a), dist2(x, b));
    int offender = -1;
    double best = de;
    for (size_t i = 0; i < t.vertices.size(); ++i) {
      if (static_cast<int>(i) == e.first || static_cast<int>(i) == e.second) continue;
      double d = dist2(x, t.vertices[i]);
      if (d < best) {
        best = d;
        offender = static_cast<int>(i);
      }
    }
    if (offender >= 0) {
      ++rep.violations;
      if (rep.witnesses.size() < 16) rep.witnesses.push_back({e.first, e.second, x, offender});
    }
  }
  return rep;
}

}  // namespace lab
