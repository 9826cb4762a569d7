#include "lab/comb_rect.hpp"

#include <algorithm>
#include <unordered_map>

namespace lab {

CombinatorialRectangle exterior_discrete_approx(const Triangulation& t, const Rect& rect) {
  require(!t.adjacency.empty(), "triangulation needs connectivity data");

  std::vector<char> take(t.vertices.size(), 0);
  for (size_t i = 0; i < t.vertices.size(); ++i)
    if (rect.contains(t.vertices[i])) take[i] = 1;
  std::vector<int> subset;
  for (size_t i = 0; i < t.vertices.size(); ++i)
    if (take[i]) {
      subset.push_back(static_cast<int>(i));
      for (int nb : t.adjacency[i])
        if (!take[nb]) subset.push_back(nb);
    }
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  require(subset.size() >= 4, "rectangle captures fewer than 4 vertices");

  CombinatorialRectangle cr;
  cr.vertex_subset = subset;
  std::unordered_map<int, int> local;
  for (size_t i = 0; i < subset.size(); ++i) local[subset[i]] = static_cast<int>(i);
  cr.positions.reserve(subset.size());
  for (int v : subset) cr.positions.push_back(t.vertices[v]);

  cr.adjacency.assign(subset.size(), {});
  for (size_t i = 0; i < subset.size(); ++i)
    for (int nb : t.adjacency[subset[i]]) {
      auto it = local.find(nb);
      if (it != local.end()) cr.adjacency[i].push_back(it->second);
    }

  // Connectivity of the induced subgraph.
  {
    std::vector<char> seen(subset.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    size_t reached = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int nb : cr.adjacency[v])
        if (!seen[nb]) {
          seen[nb] = 1;
          ++reached;
          stack.push_back(nb);
        }
    }
    require(reached == subset.size(), "combinatorial rectangle subset is disconnected");
  }

  // Induced sub-triangulation and its boundary cycle.
  Triangulation sub;
  sub.vertices = cr.positions;
  for (const auto& tri : t.triangles) {
    auto a = local.find(tri[0]), b = local.find(tri[1]), c = local.find(tri[2]);
    if (a != local.end() && b != local.end() && c != local.end())
      sub.triangles.push_back({a->second, b->second, c->second});
  }
  require(!sub.triangles.empty(), "induced complex has no triangles");
  cr.boundary = sub.boundary_cycle();

  // Corners: nearest boundary vertex to each geometric corner; ties go to the
  // lowest source index.
  auto rect_corners = rect.corners();
  for (int k = 0; k < 4; ++k) {
    int best = -1;
    double bd = 0;
    for (int v : cr.boundary) {
      double d = dist2(cr.positions[v], rect_corners[k]);
      if (best < 0 || d < bd || (d == bd && subset[v] < subset[best])) {
        best = v;
        bd = d;
      }
    }
    cr.corners[k] = best;
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      require(cr.corners[i] != cr.corners[j],
              "combinatorial rectangle corners are not four distinct vertices");

  // Cyclic order along the boundary must match the rectangle's ccw corners.
  std::array<size_t, 4> pos{};
  for (int k = 0; k < 4; ++k) {
    auto it = std::find(cr.boundary.begin(), cr.boundary.end(), cr.corners[k]);
    require(it != cr.boundary.end(), "corner vertex left the boundary cycle");
    pos[k] = static_cast<size_t>(it - cr.boundary.begin());
  }
  size_t n = cr.boundary.size();
  auto ahead = [n](size_t from, size_t to) { return (to + n - from) % n; };
  require(ahead(pos[0], pos[1]) < ahead(pos[0], pos[2]) &&
              ahead(pos[0], pos[2]) < ahead(pos[0], pos[3]),
          "corner vertices out of cyclic position");

  for (int k = 0; k < 4; ++k) {
    size_t from = pos[k], to = pos[(k + 1) % 4];
    std::vector<int>& path = cr.side_paths[k];
    for (size_t i = from;; i = (i + 1) % n) {
      path.push_back(cr.boundary[i]);
      if (i == to) break;
    }
  }
  return cr;
}

}  // namespace lab
