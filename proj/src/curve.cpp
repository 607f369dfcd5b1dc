#include "aniflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aniflow/errors.hpp"
#include "geometry_detail.hpp"

namespace aniflow {

PolygonalCurve::PolygonalCurve(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw InvalidArgument("a closed curve needs at least 3 vertices");
  for (std::size_t j = 0; j < vertices_.size(); ++j) {
    const Vec2& a = vertices_[j];
    if (!std::isfinite(a.x()) || !std::isfinite(a.y())) throw InvalidArgument("non-finite vertex");
    if (a == vertices_[(j + 1) % vertices_.size()])
      throw DegenerateEdge("edge " + std::to_string(j) + " has zero length");
  }
}

const Vec2& PolygonalCurve::vertex(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(vertices_.size());
  return vertices_[static_cast<std::size_t>(((i % n) + n) % n)];
}

PolygonalCurve PolygonalCurve::translated(const Vec2& shift) const {
  std::vector<Vec2> v = vertices_;
  for (auto& p : v) p += shift;
  return PolygonalCurve(std::move(v));
}

EdgeGeometry edge_geometry(const PolygonalCurve& curve) {
  const std::size_t n = curve.size();
  EdgeGeometry g;
  g.length.resize(n);
  g.tangent.resize(n);
  g.normal.resize(n);
  g.angle.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 h = curve.edge(static_cast<std::ptrdiff_t>(j));
    const double len = h.norm();
    if (len == 0.0) throw DegenerateEdge("edge " + std::to_string(j) + " has zero length");
    g.length[j] = len;
    g.tangent[j] = h / len;
    g.normal[j] = -perp(h) / len;
    g.angle[j] = std::atan2(h.y(), h.x());
  }
  return g;
}

namespace {

void check_size(const PolygonalCurve& c, std::size_t n) {
  if (n != c.size()) throw SizeMismatch("field size " + std::to_string(n) + " does not match curve size " +
                                        std::to_string(c.size()));
}

}  // namespace

double mass_lumped_inner(const PolygonalCurve& curve, const NodalField& u, const NodalField& v) {
  check_size(curve, u.size());
  check_size(curve, v.size());
  const std::size_t n = curve.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j + 1) % n;
    s += 0.5 * curve.edge(static_cast<std::ptrdiff_t>(j)).norm() * (u[j] * v[j] + u[k] * v[k]);
  }
  return s;
}

double mass_lumped_inner(const PolygonalCurve& curve, const EdgeField& u, const NodalField& v) {
  check_size(curve, u.size());
  check_size(curve, v.size());
  const std::size_t n = curve.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    s += 0.5 * curve.edge(static_cast<std::ptrdiff_t>(j)).norm() * u[j] * (v[j] + v[(j + 1) % n]);
  return s;
}

double mass_lumped_inner(const PolygonalCurve& curve, const NodalField& u, const EdgeField& v) {
  return mass_lumped_inner(curve, v, u);
}

double mass_lumped_inner(const PolygonalCurve& curve, const EdgeField& u, const EdgeField& v) {
  check_size(curve, u.size());
  check_size(curve, v.size());
  double s = 0.0;
  for (std::size_t j = 0; j < curve.size(); ++j) s += curve.edge(static_cast<std::ptrdiff_t>(j)).norm() * u[j] * v[j];
  return s;
}

std::vector<double> lumped_mass(const PolygonalCurve& curve) {
  const std::size_t n = curve.size();
  std::vector<double> m(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double half = 0.5 * curve.edge(static_cast<std::ptrdiff_t>(j)).norm();
    m[j] += half;
    m[(j + 1) % n] += half;
  }
  return m;
}

EdgeField discrete_deriv(const PolygonalCurve& curve, const NodalField& f) {
  check_size(curve, f.size());
  const std::size_t n = curve.size();
  EdgeField d(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    d[j] = (f[(j + 1) % n] - f[j]) / curve.edge(static_cast<std::ptrdiff_t>(j)).norm();
  return d;
}

std::vector<Vec2> discrete_deriv(const PolygonalCurve& curve, const std::vector<Vec2>& f) {
  check_size(curve, f.size());
  const std::size_t n = curve.size();
  std::vector<Vec2> d(n);
  for (std::size_t j = 0; j < n; ++j)
    d[j] = (f[(j + 1) % n] - f[j]) / curve.edge(static_cast<std::ptrdiff_t>(j)).norm();
  return d;
}

double total_length(const PolygonalCurve& curve) {
  double s = 0.0;
  for (std::size_t j = 0; j < curve.size(); ++j) s += curve.edge(static_cast<std::ptrdiff_t>(j)).norm();
  return s;
}

double enclosed_area(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2& a = v[j];
    const Vec2& b = v[(j + 1) % n];
    s += (b.x() - a.x()) * (b.y() + a.y());
  }
  return -0.5 * s;
}

double enclosed_area(const PolygonalCurve& curve) { return enclosed_area(curve.vertices()); }

double interface_energy(const PolygonalCurve& curve, const AnisotropyDensity& density) {
  double w = 0.0;
  for (std::size_t j = 0; j < curve.size(); ++j) {
    const Vec2 h = curve.edge(static_cast<std::ptrdiff_t>(j));
    w += density.gamma(std::atan2(h.y(), h.x())) * h.norm();
  }
  return w;
}

double weighted_mesh_ratio(const PolygonalCurve& curve, const AnisotropyDensity& density) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t j = 0; j < curve.size(); ++j) {
    const Vec2 h = curve.edge(static_cast<std::ptrdiff_t>(j));
    const double w = density.gamma(std::atan2(h.y(), h.x())) * h.norm();
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  return hi / lo;
}

PolygonalCurve interpolate_curves(const PolygonalCurve& c1, const PolygonalCurve& c2, double lambda) {
  if (c1.size() != c2.size()) throw SizeMismatch("interpolated curves must have the same vertex count");
  if (lambda == 0.0) return c1;
  if (lambda == 1.0) return c2;
  std::vector<Vec2> v(c1.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - lambda) * c1.vertices()[i] + lambda * c2.vertices()[i];
  return PolygonalCurve(std::move(v));
}

SelfIntersection self_intersection_check(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  SelfIntersection out;
  if (n < 4) return out;
  constexpr double slack = 1e-12;

  struct Box {
    double x0, x1, y0, y1;
    std::size_t edge;
  };
  std::vector<Box> boxes(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2& a = v[j];
    const Vec2& b = v[(j + 1) % n];
    boxes[j] = {std::min(a.x(), b.x()) - slack, std::max(a.x(), b.x()) + slack, std::min(a.y(), b.y()) - slack,
                std::max(a.y(), b.y()) + slack, j};
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& p, const Box& q) {
    return p.x0 < q.x0 || (p.x0 == q.x0 && p.edge < q.edge);
  });

  bool have = false;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n && boxes[q].x0 <= boxes[p].x1; ++q) {
      if (boxes[q].y0 > boxes[p].y1 || boxes[p].y0 > boxes[q].y1) continue;
      std::size_t i = boxes[p].edge, j = boxes[q].edge;
      if (i > j) std::swap(i, j);
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (!detail::segments_touch(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n], slack)) continue;
      // report the lexicographically first pair so results do not depend on the sweep order
      if (!have || i < out.edge_a || (i == out.edge_a && j < out.edge_b)) {
        out.found = true;
        out.edge_a = i;
        out.edge_b = j;
        have = true;
      }
    }
  }
  return out;
}

SelfIntersection self_intersection_check(const PolygonalCurve& curve) {
  return self_intersection_check(curve.vertices());
}

}  // namespace aniflow
