#include "lab/pointset.hpp"

#include <set>

#include "lab/rng.hpp"

namespace lab {

PointSet make_pointset(std::vector<Point> pts) {
  std::set<std::pair<double, double>> seen;
  for (const Point& p : pts)
    require(seen.emplace(p.x, p.y).second, "points must be pairwise distinct");
  PointSet ps;
  ps.pts = std::move(pts);
  return ps;
}

namespace {

Point draw_in_domain(const Domain& domain, Rng& rng) {
  Point lo, hi;
  domain.bounding_box(lo, hi);
  for (;;) {
    Point p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    if (domain.contains(p)) return p;
  }
}

PointSet draw_many(const Domain& domain, size_t count, std::uint64_t seed, Rng& rng) {
  PointSet ps;
  ps.seed = seed;
  ps.pts.reserve(count);
  std::set<std::pair<double, double>> seen;  // duplicates have measure zero, but keep the invariant
  while (ps.pts.size() < count) {
    Point p = draw_in_domain(domain, rng);
    if (seen.emplace(p.x, p.y).second) ps.pts.push_back(p);
  }
  return ps;
}

}  // namespace

PointSet sample_poisson(const Domain& domain, double intensity, std::uint64_t seed) {
  require(intensity > 0, "intensity must be positive");
  Rng rng(seed);
  size_t n = static_cast<size_t>(rng.poisson(domain.area() * intensity));
  return draw_many(domain, n, seed, rng);
}

PointSet sample_uniform(const Domain& domain, size_t count, std::uint64_t seed) {
  Rng rng(seed);
  return draw_many(domain, count, seed, rng);
}

}  // namespace lab
