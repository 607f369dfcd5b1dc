#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace aniflow::detail {

using Vec2 = Eigen::Vector2d;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

/// True when the closed segments [a,b] and [c,d] come within `slack` of each other.
inline bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double slack) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  return point_segment_distance(c, a, b) <= slack || point_segment_distance(d, a, b) <= slack ||
         point_segment_distance(a, c, d) <= slack || point_segment_distance(b, c, d) <= slack;
}

/// Winding number of a closed polygon around p (p assumed off the boundary).
inline int winding_number(const Vec2& p, const std::vector<Vec2>& poly) {
  int w = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && cross(b - a, p - a) > 0) ++w;
    } else if (b.y() <= p.y() && cross(b - a, p - a) < 0) {
      --w;
    }
  }
  return w;
}

}  // namespace aniflow::detail
