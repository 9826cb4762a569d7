#pragma once

#include <vector>

#include "lab/core.hpp"

namespace lab {

// Bounded sampling/clipping region: a disk, an axis-aligned rectangle, or a
// simple polygon (counterclockwise, non self-intersecting).
struct Domain {
  enum class Kind { disk, rectangle, polygon };

  Kind kind = Kind::disk;
  Point center;                 // disk
  double radius = 1.0;          // disk
  Point lo, hi;                 // rectangle corners
  std::vector<Point> polygon;   // polygon vertices, ccw

  static Domain disk(Point c, double r);
  static Domain rectangle(Point lo, Point hi);
  static Domain simple_polygon(std::vector<Point> verts);

  double area() const;
  bool contains(Point p) const;         // closed region
  bool strictly_contains(Point p) const;
  void bounding_box(Point& lo_out, Point& hi_out) const;
};

// True if the closed segment [a,b] crosses the polygon boundary (proper
// crossing or touching).  Used for subset tests against polygon domains.
bool segment_crosses_polygon(Point a, Point b, const std::vector<Point>& poly);

bool point_in_polygon(Point p, const std::vector<Point>& poly);

}  // namespace lab
