#pragma once

#include <array>
#include <vector>

#include "lab/packing.hpp"
#include "lab/triangulation.hpp"

namespace lab {

// Piecewise linear map between two straight-line complexes with the same
// combinatorics: each source triangle is mapped affinely onto the target
// triangle spanned by the images of its vertices.
struct PLMap {
  std::vector<Point> source;
  std::vector<Point> target;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 3>> neighbor;  // across edge (k, k+1); -1 outside

  mutable int last_hit = 0;  // walk cache

  // Index of a triangle whose closure contains q (small slack), or -1.
  int locate(Point q) const;
  Point eval(Point q) const;  // throws outside the carrier
  // true when every target triangle has positive signed area.
  bool orientation_preserved() const;
  // Signed area ratio target/source for one triangle.
  double area_ratio(int tri) const;
};

// Map sending each triangulation vertex to its circle center.
PLMap packing_map(const Triangulation& t, const CirclePacking& p);

}  // namespace lab
