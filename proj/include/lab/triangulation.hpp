#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lab/domain.hpp"
#include "lab/pointset.hpp"

namespace lab {

// Planar triangulation: positively oriented triangles over a vertex list,
// with symmetric vertex adjacency and per-vertex boundary flags derived from
// the triangle set (an edge is boundary iff it lies in exactly one triangle).
struct Triangulation {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // ccw vertex triples
  std::vector<std::vector<int>> adjacency;    // sorted neighbor lists
  std::vector<char> is_boundary;

  size_t vertex_count() const { return vertices.size(); }
  size_t triangle_count() const { return triangles.size(); }

  // Undirected edge list, each pair sorted, lexicographic order.
  std::vector<std::pair<int, int>> edges() const;

  // Boundary vertices in cyclic order (interior of the complex on the left).
  // Throws if the boundary is not a single simple cycle.
  std::vector<int> boundary_cycle() const;
};

// Fills adjacency and boundary flags from the triangle list.
void compute_connectivity(Triangulation& t);

// Canonical Delaunay triangulation of the full point set (triangulates the
// convex hull).  Incremental insertion with exact predicates; cocircular
// quadruples are resolved by the documented index-order symbolic
// perturbation, so the result does not depend on insertion order.
// Requires >= 3 pairwise distinct points, not all collinear.
Triangulation delaunay(const PointSet& points);

struct ClipResult {
  Triangulation tri;
  std::vector<int> orig_index;  // new vertex id -> vertex id in the input
  bool is_disk = false;         // carrier is a combinatorial closed disk
};

// Keeps exactly the triangles whose closed triangle lies inside the domain,
// re-indexed to the surviving vertices.  Throws if nothing survives.
ClipResult clip_to_domain(const Triangulation& t, const Domain& domain);

// Index of the vertex closest to z; ties go to the lowest index.
int nearest_vertex(const Triangulation& t, Point z);

// Combinatorial closed disk test: connected, every edge in at most two
// triangles, one simple boundary cycle, Euler characteristic 1, and every
// vertex link a single fan.
bool is_combinatorial_disk(const Triangulation& t);

struct StarViolation {
  int edge_u = 0, edge_v = 0;
  Point sample;
  int nearest = 0;
};

struct StarReport {
  size_t samples = 0;
  size_t violations = 0;
  std::vector<StarViolation> witnesses;  // at most 16 kept
  bool pass() const { return violations == 0; }
};

// Samples random points on random Delaunay edges and checks that the nearest
// site is one of the edge's endpoints (strictly nearer third sites count as
// violations; exact ties do not).
StarReport verify_star_property(const Triangulation& t, size_t samples, std::uint64_t seed);

}  // namespace lab
