#include "lab/voronoi.hpp"

#include <algorithm>
#include <cmath>

namespace lab {

std::vector<Point> VoronoiCell::finite_vertices() const {
  std::vector<Point> out;
  for (size_t i = 0; i < edges.size(); ++i) {
    const VoronoiEdge& e = edges[i];
    if (!e.a_infinite) out.push_back(e.a);
  }
  return out;
}

namespace {

constexpr int kBoxLabel = -2;

struct LabeledPoly {
  std::vector<Point> v;       // vertices, ccw
  std::vector<int> label;     // label[i] belongs to edge v[i] -> v[i+1]
};

// Clip by the half-plane h(z) <= 0 where h is affine; the closing edge along
// h == 0 is labeled with `lab`.  Convexity gives at most one entry and one
// exit crossing.
void clip(LabeledPoly& poly, double hx, double hy, double hc, int lab) {
  size_t n = poly.v.size();
  if (n == 0) return;
  auto h = [&](Point p) { return hx * p.x + hy * p.y + hc; };
  LabeledPoly out;
  for (size_t i = 0; i < n; ++i) {
    Point p = poly.v[i], q = poly.v[(i + 1) % n];
    double hp = h(p), hq = h(q);
    bool pin = hp <= 0, qin = hq <= 0;
    if (pin) {
      out.v.push_back(p);
      out.label.push_back(poly.label[i]);
    }
    if (pin != qin) {
      double t = hp / (hp - hq);
      Point x{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
      if (pin) {
        // exiting: the edge p->x keeps its label (already pushed); the new
        // closing edge starts at x.
        out.v.push_back(x);
        out.label.push_back(lab);
      } else {
        // entering: x continues the original edge toward q.
        out.v.push_back(x);
        out.label.push_back(poly.label[i]);
      }
    }
  }
  poly = std::move(out);
}

}  // namespace

VoronoiCell voronoi_cell(const PointSet& points, int index) {
  const auto& pts = points.pts;
  require(index >= 0 && static_cast<size_t>(index) < pts.size(), "site index out of range");
  require(pts.size() >= 2, "voronoi cell needs at least 2 sites");
  Point x = pts[index];

  double spread = 0;
  for (const Point& p : pts) spread = std::max(spread, dist(p, x));
  double R = 1e4 * (1.0 + spread);

  // Huge box stand-in for the plane; box edges surviving all clips mark the
  // unbounded directions.  Voronoi vertices beyond the box (wildly degenerate
  // circumcenters) would be truncated; at 1e4 times the point spread this is
  // far outside anything the sampled configurations produce.
  LabeledPoly poly;
  poly.v = {{x.x - R, x.y - R}, {x.x + R, x.y - R}, {x.x + R, x.y + R}, {x.x - R, x.y + R}};
  poly.label = {kBoxLabel, kBoxLabel, kBoxLabel, kBoxLabel};

  for (size_t j = 0; j < pts.size(); ++j) {
    if (static_cast<int>(j) == index) continue;
    Point y = pts[j];
    // |z-x|^2 <= |z-y|^2  <=>  2(y-x).z - (|y|^2-|x|^2) <= 0
    double hx = 2 * (y.x - x.x), hy = 2 * (y.y - x.y);
    double hc = -(norm2(y) - norm2(x));
    clip(poly, hx, hy, hc, static_cast<int>(j));
  }
  require(!poly.v.empty(), "voronoi cell degenerated to empty; duplicate sites?");

  VoronoiCell cell;
  cell.site = index;
  cell.bounded = true;
  size_t n = poly.v.size();
  for (size_t i = 0; i < n; ++i) {
    if (poly.label[i] == kBoxLabel) {
      cell.bounded = false;
      continue;
    }
    VoronoiEdge e;
    e.neighbor = poly.label[i];
    e.a = poly.v[i];
    e.b = poly.v[(i + 1) % n];
    size_t prev = (i + n - 1) % n, next = (i + 1) % n;
    e.a_infinite = poly.label[prev] == kBoxLabel;
    e.b_infinite = poly.label[next] == kBoxLabel;
    Point d = e.b - e.a;
    double len = std::hypot(d.x, d.y);
    if (len > 0) d = (1.0 / len) * d;
    // Infinite ends are anchored at the finite data we trust: the ray is
    // { anchor + t*dir : t >= 0 } from the surviving endpoint (or from the
    // site-midpoint for a full-line edge), not at the artificial box corner.
    if (e.a_infinite && e.b_infinite) {
      Point mid = 0.5 * (x + points.pts[e.neighbor]);
      e.a = e.b = mid;
      e.dir_a = {-d.x, -d.y};
      e.dir_b = d;
    } else if (e.a_infinite) {
      e.dir_a = {-d.x, -d.y};
      e.a = e.b;
    } else if (e.b_infinite) {
      e.dir_b = d;
      e.b = e.a;
    }
    cell.edges.push_back(e);
  }
  require(!cell.edges.empty(), "voronoi cell has no bisector edges");
  return cell;
}

}  // namespace lab
