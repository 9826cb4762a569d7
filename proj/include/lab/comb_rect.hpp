#pragma once

#include <array>
#include <vector>

#include "lab/triangulation.hpp"

namespace lab {

// Discrete stand-in for a geometric rectangle inside a triangulation: the
// vertices inside the rectangle padded by one combinatorial ring, with four
// marked corner vertices and the boundary split into four side paths.
struct CombinatorialRectangle {
  std::vector<int> vertex_subset;            // source vertex ids, sorted ascending
  std::vector<std::vector<int>> adjacency;   // induced subgraph on local ids
  std::vector<Point> positions;              // local id -> coordinates
  std::vector<int> boundary;                 // boundary cycle of the induced complex, ccw, local ids
  std::array<int, 4> corners{};              // local ids, ccw, corner k nearest rect corner k
  std::array<std::vector<int>, 4> side_paths{};  // side k runs corner k -> corner k+1, endpoints included

  size_t size() const { return vertex_subset.size(); }
};

// Builds the combinatorial rectangle for `rect` inside `t`: subset = vertices
// in the closed rectangle plus their neighbors; corners = nearest vertices to
// the rectangle corners among the boundary cycle of the induced
// sub-triangulation (lowest index on ties); side paths along that cycle.
// Throws if the subset is disconnected, the induced complex has no simple
// boundary cycle, the corners are not four distinct vertices, or the corners
// fail to sit in counterclockwise cyclic position.
CombinatorialRectangle exterior_discrete_approx(const Triangulation& t, const Rect& rect);

}  // namespace lab
