#pragma once

#include <array>
#include <functional>
#include <map>
#include <vector>

#include "lab/core.hpp"

namespace lab {

// Triangle mesh of a polygonal region with labeled boundary edges.  Labels
// survive refinement: splitting a labeled edge labels both halves.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;                // ccw
  std::map<std::pair<int, int>, int> boundary_side;         // sorted edge -> label

  double min_triangle_area() const;
  // Vertices incident to a boundary edge with the given label.
  std::vector<int> side_vertices(int label) const;
};

// Ear-clipping triangulation of a simple ccw polygon; edge_label[i] labels
// polygon edge (i, i+1 mod n).  Throws on degenerate or non-simple input.
Mesh triangulate_polygon(const std::vector<Point>& poly, const std::vector<int>& edge_label);

// Lawson flips on interior edges until locally Delaunay (quality pass).
void make_delaunay(Mesh& m);

// Longest-edge bisection until every triangle's longest edge is at most
// target_size(centroid).  Conforming (recursive neighbor bisection).
void refine_to_size(Mesh& m, const std::function<double(Point)>& target_size);

}  // namespace lab
