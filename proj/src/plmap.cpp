#include "lab/plmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace lab {

namespace {

// Barycentric coordinates of q in (a, b, c); assumes nondegenerate triangle.
std::array<double, 3> barycentric(Point q, Point a, Point b, Point c) {
  double area = cross(b - a, c - a);
  double wa = cross(b - q, c - q) / area;
  double wb = cross(c - q, a - q) / area;
  return {wa, wb, 1.0 - wa - wb};
}

}  // namespace

int PLMap::locate(Point q) const {
  constexpr double kSlack = -1e-12;
  int cur = last_hit;
  if (cur < 0 || cur >= static_cast<int>(triangles.size())) cur = 0;
  int steps = 2 * static_cast<int>(triangles.size()) + 16;
  for (int s = 0; s < steps; ++s) {
    auto& tr = triangles[cur];
    auto w = barycentric(q, source[tr[0]], source[tr[1]], source[tr[2]]);
    int worst = 0;
    for (int k = 1; k < 3; ++k)
      if (w[k] < w[worst]) worst = k;
    if (w[worst] >= kSlack) { last_hit = cur; return cur; }
    // Step across the edge opposite the most negative corner.
    int nb = neighbor[cur][(worst + 1) % 3];
    if (nb < 0) break;
    cur = nb;
  }
  // Nonconvex carriers can strand the walk; fall back to the best triangle.
  int best = -1;
  double best_w = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < triangles.size(); ++i) {
    auto& tr = triangles[i];
    auto w = barycentric(q, source[tr[0]], source[tr[1]], source[tr[2]]);
    double mn = std::min({w[0], w[1], w[2]});
    if (mn > best_w) { best_w = mn; best = static_cast<int>(i); }
  }
  if (best >= 0 && best_w >= kSlack) { last_hit = best; return best; }
  return -1;
}

Point PLMap::eval(Point q) const {
  int tri = locate(q);
  require(tri >= 0, "point outside the map carrier");
  auto& tr = triangles[tri];
  auto w = barycentric(q, source[tr[0]], source[tr[1]], source[tr[2]]);
  Point out = w[0] * target[tr[0]] + w[1] * target[tr[1]] + w[2] * target[tr[2]];
  return out;
}

bool PLMap::orientation_preserved() const {
  for (auto& tr : triangles)
    if (cross(target[tr[1]] - target[tr[0]], target[tr[2]] - target[tr[0]]) <= 0.0)
      return false;
  return true;
}

double PLMap::area_ratio(int tri) const {
  auto& tr = triangles[tri];
  double s = cross(source[tr[1]] - source[tr[0]], source[tr[2]] - source[tr[0]]);
  double t = cross(target[tr[1]] - target[tr[0]], target[tr[2]] - target[tr[0]]);
  return t / s;
}

PLMap packing_map(const Triangulation& t, const CirclePacking& p) {
  require(t.vertices.size() == p.size(), "carrier map: size mismatch");
  require(t.triangles == p.triangles, "carrier map: combinatorics mismatch");
  PLMap m;
  m.source = t.vertices;
  m.target = p.centers;
  m.triangles = t.triangles;
  m.neighbor.assign(t.triangles.size(), {-1, -1, -1});
  std::map<std::pair<int, int>, std::pair<int, int>> half;  // directed edge -> (tri, slot)
  for (size_t i = 0; i < t.triangles.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      int a = t.triangles[i][k], b = t.triangles[i][(k + 1) % 3];
      half[{a, b}] = {static_cast<int>(i), k};
    }
  for (auto& [edge, slot] : half) {
    auto rev = half.find({edge.second, edge.first});
    if (rev != half.end()) m.neighbor[slot.first][slot.second] = rev->second.first;
  }
  return m;
}

}  // namespace lab
