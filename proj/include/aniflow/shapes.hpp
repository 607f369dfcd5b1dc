#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "aniflow/curve.hpp"

namespace aniflow {

struct GeneratedCurve {
  PolygonalCurve curve;
  /// Set for the generators that produce self-intersecting loops on purpose.
  bool self_intersecting = false;
  /// Resolved generator string with every parameter spelled out.
  std::string description;
  /// Parametrization note for generators whose construction is a modelling choice.
  std::string formula;
};

/// Builds an initial curve from `name:key=value,...`:
///   circle:r=1                      r (cos 2 pi rho, sin 2 pi rho)
///   ellipse:a=4,b=1,axes=full       axes=full uses semi-axes a/2, b/2; axes=semi uses a, b
///   nonconvex | bowtie | flower     parametric curves in rho
///   quadrifolium                    polar rose r = cos 2 phi
///   lemniscate:a=1                  a cos phi / (1 + sin^2 phi), a sin phi cos phi / (1 + sin^2 phi)
///   slit                            2x2 square minus a 0.02 x 1.8 slit, corners exact
///   thin_film:L=5                   2L x 1 rectangle, corners exact
///   rectangle:w=2,h=1               w x h rectangle, corners exact
/// Simple curves are returned counterclockwise.
GeneratedCurve generate_initial(std::string_view shape, std::size_t n);

/// Places n vertices on a closed polyline: every corner is a vertex and the rest are spread by arc length.
std::vector<Vec2> distribute_on_polyline(const std::vector<Vec2>& corners, std::size_t n);

}  // namespace aniflow
