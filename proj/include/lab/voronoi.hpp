#pragma once

#include <vector>

#include "lab/pointset.hpp"

namespace lab {

// One edge of a Voronoi cell.  Finite endpoints are bisector-bisector
// vertices; an infinite end is reported as a ray direction out of the other
// endpoint.  A full-line edge (half-plane cell) has both ends infinite, with
// `a` a point on the line and the two directions opposite.
struct VoronoiEdge {
  Point a, b;            // endpoints (or anchor points for infinite ends)
  Point dir_a, dir_b;    // outgoing directions, meaningful when the end is infinite
  bool a_infinite = false;
  bool b_infinite = false;
  int neighbor = -1;     // site whose bisector supports this edge
};

struct VoronoiCell {
  int site = -1;
  bool bounded = false;
  std::vector<VoronoiEdge> edges;  // counterclockwise around the cell

  // Finite vertices in ccw order (both-finite edge endpoints).
  std::vector<Point> finite_vertices() const;
};

// Voronoi cell of one site, by half-plane intersection against every other
// site.  Unbounded cells carry ray edges; a two-point configuration yields a
// half-plane bounded by one full-line edge.
VoronoiCell voronoi_cell(const PointSet& points, int index);

}  // namespace lab
