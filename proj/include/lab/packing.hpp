#pragma once

#include <array>
#include <vector>

#include "lab/triangulation.hpp"

namespace lab {

// Disk automorphism z -> e^{i theta} (z - a) / (1 - conj(a) z).
struct Mobius {
  cpx a{0.0, 0.0};
  double theta = 0.0;

  cpx apply(cpx z) const;
  cpx inverse(cpx w) const;
  // Image of a circle inside the closed disk (circles map to circles).
  void apply_circle(Point& center, double& radius) const;
  static Mobius compose(const Mobius& outer, const Mobius& inner);
};

// Maximal circle packing of a disk triangulation in the unit disk: one circle
// per vertex, circles of adjacent vertices externally tangent, boundary
// circles internally tangent to the unit circle (horocycles).
struct CirclePacking {
  std::vector<std::array<int, 3>> triangles;  // combinatorics, ccw
  std::vector<std::vector<int>> adjacency;
  std::vector<char> is_boundary;
  std::vector<Point> centers;
  std::vector<double> radii;
  Mobius normalization;  // already applied to the stored circles

  // Solver diagnostics.
  double max_angle_residual = 0.0;       // max |angle sum - 2 pi| over interior vertices
  std::vector<double> residual_history;  // per sweep, plain sweeps only
  int sweeps = 0;

  size_t size() const { return centers.size(); }
  double max_tangency_error() const;   // max |dist - (r_u + r_v)| / (r_u + r_v) over edges
  double max_horocycle_error() const;  // max | |c| + r - 1 | over boundary circles
  double hyperbolic_radius(int v) const;  // finite circles only
};

struct PackOptions {
  double tolerance = 1e-12;  // target max angle-sum residual
  bool accelerate = true;    // Newton steps on log-radii after a short warmup
  int max_sweeps = 200000;
};

// Computes the maximal packing for a combinatorial disk: solves the boundary
// value problem for hyperbolic radii (angle sum 2 pi at interior vertices,
// ideal boundary circles), then lays out circles breadth-first from a
// combinatorially deep root.  Complexes with no interior vertex are rooted at
// a symmetric ideal triangle.  Throws if t is not a combinatorial disk.
CirclePacking max_circle_packing(const Triangulation& t, const PackOptions& opt = {});

// Renormalizes so the circle of v1 is centered at the origin and the center
// of v2's circle lies on the positive real axis.  v1 must be interior.
CirclePacking normalize_packing(const CirclePacking& p, int v1, int v2);

// min over interior vertices v with degree <= max_degree, over neighbors u,
// of radius(u) / radius(v).  Throws if no interior vertex qualifies.
double ring_ratio(const CirclePacking& p, int max_degree);

// Boundary augmentation: one extra node per boundary circle, placed at its
// tangency point with the unit circle, joined to its circle's vertex and to
// the neighboring tangency nodes along the boundary cycle.
struct BoundaryAugmentation {
  std::vector<std::vector<int>> adjacency;  // packing vertices first, then tangency nodes
  std::vector<Point> positions;             // same indexing
  std::vector<int> tangency_vertex;         // tangency node k (offset n) -> its boundary vertex
};

BoundaryAugmentation augment_boundary_tangencies(const CirclePacking& p);

}  // namespace lab
