#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

using cpx = std::complex<double>;

struct Point {
  double x = 0.0;
  double y = 0.0;

  Point() = default;
  Point(double px, double py) : x(px), y(py) {}
  explicit Point(cpx z) : x(z.real()), y(z.imag()) {}

  cpx z() const { return cpx(x, y); }
  bool operator==(const Point& o) const { return x == o.x && y == o.y; }
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Point a) { return a.x * a.x + a.y * a.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double dist2(Point a, Point b) {
  double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Axis-aligned or rotated rectangle: center, half-sizes, rotation angle.
// Corners are listed counterclockwise starting from the (-hw,-hh) corner
// of the rectangle's own frame.
struct Rect {
  Point center;
  double hw = 0.0;  // half width  (along the rotated x axis)
  double hh = 0.0;  // half height (along the rotated y axis)
  double angle = 0.0;

  std::array<Point, 4> corners() const {
    double c = std::cos(angle), s = std::sin(angle);
    auto at = [&](double u, double v) {
      return Point{center.x + c * u - s * v, center.y + s * u + c * v};
    };
    return {at(-hw, -hh), at(hw, -hh), at(hw, hh), at(-hw, hh)};
  }

  // Local frame coordinates of p.
  Point to_frame(Point p) const {
    double c = std::cos(angle), s = std::sin(angle);
    double dx = p.x - center.x, dy = p.y - center.y;
    return {c * dx + s * dy, -s * dx + c * dy};
  }

  bool contains(Point p) const {
    Point q = to_frame(p);
    return std::abs(q.x) <= hw && std::abs(q.y) <= hh;
  }
};

// Distance from p to segment [a,b].
inline double point_segment_dist(Point p, Point a, Point b) {
  Point ab = b - a;
  double len2 = norm2(ab);
  if (len2 == 0.0) return dist(p, a);
  double t = dot(p - a, ab) / len2;
  t = std::max(0.0, std::min(1.0, t));
  return dist(p, a + t * ab);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

}  // namespace lab
