#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "aniflow/anisotropy.hpp"

namespace aniflow {

/// Closed polygon X_0 .. X_{N-1} with periodic indexing. Edge j joins X_j to X_{j+1}.
class PolygonalCurve {
 public:
  /// Requires N >= 3 and no zero-length edge (throws InvalidArgument / DegenerateEdge).
  explicit PolygonalCurve(std::vector<Vec2> vertices);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& vertex(std::ptrdiff_t i) const;
  /// h_j = X_{j+1} - X_j.
  Vec2 edge(std::ptrdiff_t j) const { return vertex(j + 1) - vertex(j); }

  PolygonalCurve translated(const Vec2& shift) const;

 private:
  std::vector<Vec2> vertices_;
};

struct EdgeGeometry {
  std::vector<double> length;
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;  ///< -h^perp/|h| with (a,b)^perp = (-b,a); outward for CCW curves
  std::vector<double> angle;  ///< in (-pi, pi]
};

/// (a,b)^perp = (-b, a).
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

EdgeGeometry edge_geometry(const PolygonalCurve& curve);

template <class Tag>
struct Field {
  std::vector<double> values;

  Field() = default;
  explicit Field(std::vector<double> v) : values(std::move(v)) {}
  Field(std::size_t n, double fill) : values(n, fill) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

struct NodalTag {};
struct EdgeTag {};
/// Values at vertices, piecewise linear in between.
using NodalField = Field<NodalTag>;
/// One constant per edge.
using EdgeField = Field<EdgeTag>;

/// Mass-lumped inner product; edge fields contribute their edge value as both one-sided limits.
double mass_lumped_inner(const PolygonalCurve& curve, const NodalField& u, const NodalField& v);
double mass_lumped_inner(const PolygonalCurve& curve, const EdgeField& u, const NodalField& v);
double mass_lumped_inner(const PolygonalCurve& curve, const NodalField& u, const EdgeField& v);
double mass_lumped_inner(const PolygonalCurve& curve, const EdgeField& u, const EdgeField& v);

/// Lumped mass per node, (|h_{i-1}| + |h_i|)/2.
std::vector<double> lumped_mass(const PolygonalCurve& curve);

EdgeField discrete_deriv(const PolygonalCurve& curve, const NodalField& f);
std::vector<Vec2> discrete_deriv(const PolygonalCurve& curve, const std::vector<Vec2>& f);

double total_length(const PolygonalCurve& curve);
/// Signed shoelace area, positive for CCW.
double enclosed_area(const PolygonalCurve& curve);
double enclosed_area(const std::vector<Vec2>& vertices);
double interface_energy(const PolygonalCurve& curve, const AnisotropyDensity& density);
double weighted_mesh_ratio(const PolygonalCurve& curve, const AnisotropyDensity& density);

/// |Omega1 symmetric-difference Omega2| = 2|Omega1 u Omega2| - |Omega1| - |Omega2|.
/// Both curves must be simple; throws SelfIntersecting otherwise.
double manifold_distance(const PolygonalCurve& c1, const PolygonalCurve& c2);
/// Area of the union of the regions bounded by two simple CCW polygons.
double union_area(const PolygonalCurve& c1, const PolygonalCurve& c2);

/// Vertex-wise (1 - lambda) X1 + lambda X2.
PolygonalCurve interpolate_curves(const PolygonalCurve& c1, const PolygonalCurve& c2, double lambda);

struct SelfIntersection {
  bool found = false;
  std::size_t edge_a = 0;
  std::size_t edge_b = 0;

  explicit operator bool() const { return found; }
};

/// Checks every non-adjacent edge pair with a segment test of slack 1e-12.
SelfIntersection self_intersection_check(const PolygonalCurve& curve);
SelfIntersection self_intersection_check(const std::vector<Vec2>& vertices);

}  // namespace aniflow
