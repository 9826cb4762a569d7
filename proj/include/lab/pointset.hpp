#pragma once

#include <cstdint>
#include <vector>

#include "lab/domain.hpp"

namespace lab {

// Finite planar configuration.  Points are pairwise distinct; indices are
// stable identifiers used everywhere downstream (triangulations, packings).
struct PointSet {
  std::vector<Point> pts;
  std::uint64_t seed = 0;  // provenance of the sample, 0 when constructed by hand

  size_t size() const { return pts.size(); }
  const Point& operator[](size_t i) const { return pts[i]; }
};

PointSet make_pointset(std::vector<Point> pts);

// Homogeneous Poisson point process on the domain: the count is Poisson with
// mean area*intensity (inversion sampling), positions are iid uniform
// (rejection from the bounding box).  Same (domain, intensity, seed) gives
// the identical PointSet.
PointSet sample_poisson(const Domain& domain, double intensity, std::uint64_t seed);

// Fixed number of iid uniform points; same rejection sampler.
PointSet sample_uniform(const Domain& domain, size_t count, std::uint64_t seed);

}  // namespace lab
