// Union area of two simple polygons from the boundary pieces of each polygon lying outside the other.

#include <algorithm>
#include <cmath>

#include "aniflow/curve.hpp"
#include "aniflow/errors.hpp"
#include "geometry_detail.hpp"

namespace aniflow {

namespace {

using detail::cross;

struct Bounds {
  double x0, x1, y0, y1;
};

Bounds bounds_of(const Vec2& a, const Vec2& b, double pad) {
  return {std::min(a.x(), b.x()) - pad, std::max(a.x(), b.x()) + pad, std::min(a.y(), b.y()) - pad,
          std::max(a.y(), b.y()) + pad};
}

bool overlap(const Bounds& p, const Bounds& q) {
  return p.x0 <= q.x1 && q.x0 <= p.x1 && p.y0 <= q.y1 && q.y0 <= p.y1;
}

double extent(const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
  double m = 1.0;
  for (const auto* poly : {&p, &q})
    for (const Vec2& v : *poly) m = std::max({m, std::abs(v.x()), std::abs(v.y())});
  return m;
}

// Sum of shoelace terms over the sub-edges of `p` outside `q`. Sub-edges lying on the boundary of `q`
// are kept only if `keep_shared` and both boundaries run in the same direction there.
double outside_contribution(const std::vector<Vec2>& p, const std::vector<Vec2>& q, bool keep_shared, double eps) {
  const std::size_t np = p.size(), nq = q.size();
  std::vector<Bounds> qb(nq);
  for (std::size_t j = 0; j < nq; ++j) qb[j] = bounds_of(q[j], q[(j + 1) % nq], eps);

  double total = 0.0;
  std::vector<double> ts;
  for (std::size_t i = 0; i < np; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % np];
    const Vec2 r = b - a;
    const double rlen = r.norm();
    const Bounds pb = bounds_of(a, b, eps);

    ts.assign({0.0, 1.0});
    for (std::size_t j = 0; j < nq; ++j) {
      if (!overlap(pb, qb[j])) continue;
      const Vec2& c = q[j];
      const Vec2 s = q[(j + 1) % nq] - c;
      const double slen = s.norm();
      const double denom = cross(r, s);
      const Vec2 qp = c - a;
      if (std::abs(denom) > 1e-14 * rlen * slen) {
        const double t = cross(qp, s) / denom;
        const double u = cross(qp, r) / denom;
        const double tt = eps / rlen, tu = eps / slen;
        if (t >= -tt && t <= 1.0 + tt && u >= -tu && u <= 1.0 + tu) ts.push_back(std::clamp(t, 0.0, 1.0));
      } else if (std::abs(cross(qp, r)) / rlen <= eps) {
        for (const Vec2& e : {c, Vec2(c + s)}) {
          const double t = (e - a).dot(r) / (rlen * rlen);
          if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
      }
    }
    std::sort(ts.begin(), ts.end());
    std::size_t kept = 1;
    for (std::size_t k = 1; k < ts.size(); ++k)
      if ((ts[k] - ts[kept - 1]) * rlen > eps) ts[kept++] = ts[k];
    ts.resize(kept);
    ts.back() = 1.0;

    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const Vec2 p0 = a + ts[k] * r;
      const Vec2 p1 = k + 2 == ts.size() ? b : Vec2(a + ts[k + 1] * r);
      const Vec2 mid = 0.5 * (p0 + p1);
      bool on_boundary = false;
      bool same_direction = false;
      for (std::size_t j = 0; j < nq; ++j) {
        const Vec2& c = q[j];
        const Vec2& d = q[(j + 1) % nq];
        if (mid.x() < qb[j].x0 || mid.x() > qb[j].x1 || mid.y() < qb[j].y0 || mid.y() > qb[j].y1) continue;
        if (detail::point_segment_distance(mid, c, d) <= eps) {
          on_boundary = true;
          same_direction = r.dot(d - c) > 0.0;
          break;
        }
      }
      const bool include = on_boundary ? (keep_shared && same_direction) : detail::winding_number(mid, q) == 0;
      if (include) total += 0.5 * cross(p0, p1);
    }
  }
  return total;
}

}  // namespace

double union_area(const PolygonalCurve& c1, const PolygonalCurve& c2) {
  if (self_intersection_check(c1)) throw SelfIntersecting("first curve is not simple");
  if (self_intersection_check(c2)) throw SelfIntersecting("second curve is not simple");
  const auto& p = c1.vertices();
  const auto& q = c2.vertices();
  const double eps = 1e-12 * extent(p, q);
  return outside_contribution(p, q, true, eps) + outside_contribution(q, p, false, eps);
}

double manifold_distance(const PolygonalCurve& c1, const PolygonalCurve& c2) {
  // canonical argument order makes the result exactly symmetric
  const auto& v1 = c1.vertices();
  const auto& v2 = c2.vertices();
  const bool swap = std::lexicographical_compare(v2.begin(), v2.end(), v1.begin(), v1.end(),
                                                 [](const Vec2& a, const Vec2& b) {
                                                   return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
                                                 });
  const double u = swap ? union_area(c2, c1) : union_area(c1, c2);
  return std::max(0.0, 2.0 * u - (enclosed_area(c1) + enclosed_area(c2)));
}

}  // namespace aniflow
