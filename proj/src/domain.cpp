#include "lab/domain.hpp"

#include <algorithm>
#include <cmath>

#include "lab/predicates.hpp"

namespace lab {

Domain Domain::disk(Point c, double r) {
  require(r > 0, "disk radius must be positive");
  Domain d;
  d.kind = Kind::disk;
  d.center = c;
  d.radius = r;
  return d;
}

Domain Domain::rectangle(Point lo, Point hi) {
  require(lo.x < hi.x && lo.y < hi.y, "rectangle corners must be ordered");
  Domain d;
  d.kind = Kind::rectangle;
  d.lo = lo;
  d.hi = hi;
  return d;
}

Domain Domain::simple_polygon(std::vector<Point> verts) {
  require(verts.size() >= 3, "polygon needs at least 3 vertices");
  double twice_area = 0;
  for (size_t i = 0; i < verts.size(); ++i) {
    Point a = verts[i], b = verts[(i + 1) % verts.size()];
    twice_area += cross(a, b);
  }
  require(twice_area > 0, "polygon must be counterclockwise");
  Domain d;
  d.kind = Kind::polygon;
  d.polygon = std::move(verts);
  return d;
}

double Domain::area() const {
  switch (kind) {
    case Kind::disk:
      return M_PI * radius * radius;
    case Kind::rectangle:
      return (hi.x - lo.x) * (hi.y - lo.y);
    case Kind::polygon: {
      double s = 0;
      for (size_t i = 0; i < polygon.size(); ++i)
        s += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
      return 0.5 * s;
    }
  }
  return 0;
}

bool Domain::contains(Point p) const {
  switch (kind) {
    case Kind::disk:
      return dist2(p, center) <= radius * radius;
    case Kind::rectangle:
      return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    case Kind::polygon:
      return point_in_polygon(p, polygon);
  }
  return false;
}

bool Domain::strictly_contains(Point p) const {
  switch (kind) {
    case Kind::disk:
      return dist2(p, center) < radius * radius;
    case Kind::rectangle:
      return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y;
    case Kind::polygon: {
      if (!point_in_polygon(p, polygon)) return false;
      for (size_t i = 0; i < polygon.size(); ++i) {
        Point a = polygon[i], b = polygon[(i + 1) % polygon.size()];
        if (orient2d(a, b, p) == 0 && dot(p - a, b - a) >= 0 && dot(p - b, a - b) >= 0)
          return false;  // on the boundary
      }
      return true;
    }
  }
  return false;
}

void Domain::bounding_box(Point& lo_out, Point& hi_out) const {
  switch (kind) {
    case Kind::disk:
      lo_out = {center.x - radius, center.y - radius};
      hi_out = {center.x + radius, center.y + radius};
      return;
    case Kind::rectangle:
      lo_out = lo;
      hi_out = hi;
      return;
    case Kind::polygon: {
      lo_out = hi_out = polygon[0];
      for (Point p : polygon) {
        lo_out.x = std::min(lo_out.x, p.x);
        lo_out.y = std::min(lo_out.y, p.y);
        hi_out.x = std::max(hi_out.x, p.x);
        hi_out.y = std::max(hi_out.y, p.y);
      }
      return;
    }
  }
}

bool point_in_polygon(Point p, const std::vector<Point>& poly) {
  // Crossing parity; points on the boundary count as inside.
  bool inside = false;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    Point a = poly[j], b = poly[i];
    if (orient2d(a, b, p) == 0 && dot(p - a, b - a) >= 0 && dot(p - b, a - b) >= 0)
      return true;
    if ((b.y > p.y) != (a.y > p.y)) {
      double xint = b.x + (p.y - b.y) / (a.y - b.y) * (a.x - b.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

namespace {

bool segments_intersect_interior(Point a, Point b, Point c, Point d) {
  int o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
  int o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  // Proper crossing through an endpoint or collinear overlap also counts as
  // touching the boundary.
  auto on = [](Point p, Point q, Point r) {
    return orient2d(p, q, r) == 0 && dot(r - p, q - p) > 0 && dot(r - q, p - q) > 0;
  };
  return on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b);
}

}  // namespace

bool segment_crosses_polygon(Point a, Point b, const std::vector<Point>& poly) {
  for (size_t i = 0; i < poly.size(); ++i) {
    Point c = poly[i], d = poly[(i + 1) % poly.size()];
    if (segments_intersect_interior(a, b, c, d)) return true;
  }
  return false;
}

}  // namespace lab
