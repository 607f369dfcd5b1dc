#include "aniflow/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>

#include "aniflow/errors.hpp"
#include "spec_string.hpp"

namespace aniflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<Vec2> sample(std::size_t n, const std::function<Vec2(double)>& f) {
  std::vector<Vec2> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = f(static_cast<double>(j) / static_cast<double>(n));
  return v;
}

}  // namespace

std::vector<Vec2> distribute_on_polyline(const std::vector<Vec2>& corners, std::size_t n) {
  const std::size_t k = corners.size();
  if (k < 3) throw InvalidArgument("polyline needs at least 3 corners");
  if (n < k) throw InvalidArgument("need at least " + std::to_string(k) + " vertices to keep every corner");
  std::vector<double> len(k);
  for (std::size_t i = 0; i < k; ++i) len[i] = (corners[(i + 1) % k] - corners[i]).norm();
  const double total = std::accumulate(len.begin(), len.end(), 0.0);

  // one segment per side at least, the remainder by largest fractional share
  std::vector<std::size_t> count(k, 1);
  const std::size_t extra = n - k;
  std::vector<double> frac(k);
  std::size_t used = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double share = std::max(0.0, len[i] / total * static_cast<double>(n) - 1.0);
    const double fl = std::floor(share);
    count[i] += static_cast<std::size_t>(fl);
    used += static_cast<std::size_t>(fl);
    frac[i] = share - fl;
  }
  while (used > extra) {
    // can happen when many sides are shorter than n/total
    const auto it = std::max_element(count.begin(), count.end());
    --*it;
    --used;
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t r = 0; used < extra; r = (r + 1) % k, ++used) ++count[order[r]];

  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < k; ++i) {
    const Vec2& a = corners[i];
    const Vec2& b = corners[(i + 1) % k];
    for (std::size_t s = 0; s < count[i]; ++s) out.push_back(a + (b - a) * (static_cast<double>(s) / count[i]));
  }
  return out;
}

GeneratedCurve generate_initial(std::string_view shape, std::size_t n) {
  const detail::SpecString s = detail::parse_spec_string(shape);
  if (n < 3) throw InvalidArgument("a curve needs at least 3 vertices");
  std::vector<Vec2> v;
  bool crossing = false;
  std::string desc;

  if (s.head == "circle") {
    detail::require_keys(s, {"r"});
    const double r = detail::get_or(s, "r", 1.0);
    if (!(r > 0.0)) throw InvalidArgument("circle radius must be positive");
    v = sample(n, [r](double p) { return Vec2(r * std::cos(2 * kPi * p), r * std::sin(2 * kPi * p)); });
    desc = "circle:r=" + num(r);
  } else if (s.head == "ellipse") {
    detail::require_keys(s, {"a", "b", "axes"});
    const double a = detail::get_or(s, "a", 4.0);
    const double b = detail::get_or(s, "b", 1.0);
    const std::string axes = detail::get_or(s, "axes", std::string("full"));
    if (axes != "full" && axes != "semi") throw InvalidArgument("ellipse axes must be 'full' or 'semi'");
    if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("ellipse axes must be positive");
    const double sa = axes == "full" ? a / 2 : a;
    const double sb = axes == "full" ? b / 2 : b;
    v = sample(n, [sa, sb](double p) { return Vec2(sa * std::cos(2 * kPi * p), sb * std::sin(2 * kPi * p)); });
    desc = "ellipse:a=" + num(a) + ",b=" + num(b) + ",axes=" + axes;
  } else if (s.head == "nonconvex") {
    detail::require_keys(s, {});
    v = sample(n, [](double p) {
      const double t = 2 * kPi * p;
      const double s6 = std::sin(3 * t);
      return Vec2(std::cos(t), 0.5 * std::sin(t) + std::sin(std::cos(t)) + std::sin(t) * (0.2 + std::sin(t) * s6 * s6));
    });
    desc = "nonconvex";
  } else if (s.head == "bowtie") {
    detail::require_keys(s, {});
    v = sample(n, [](double p) {
      const double st = std::sin(2 * kPi * p);
      return Vec2(std::cos(2 * kPi * p), 2 * st - 1.9 * st * st * st);
    });
    desc = "bowtie";
  } else if (s.head == "flower") {
    detail::require_keys(s, {});
    v = sample(n, [](double p) {
      const double r = 2 + std::cos(12 * kPi * p);
      return Vec2(r * std::cos(2 * kPi * p), r * std::sin(2 * kPi * p));
    });
    desc = "flower";
  } else if (s.head == "quadrifolium") {
    detail::require_keys(s, {});
    v = sample(n, [](double p) {
      const double phi = 2 * kPi * p;
      const double r = std::cos(2 * phi);
      return Vec2(r * std::cos(phi), r * std::sin(phi));
    });
    crossing = true;
    desc = "quadrifolium";
  } else if (s.head == "lemniscate") {
    detail::require_keys(s, {"a"});
    const double a = detail::get_or(s, "a", 1.0);
    v = sample(n, [a](double p) {
      const double phi = 2 * kPi * p;
      const double d = 1 + std::sin(phi) * std::sin(phi);
      return Vec2(a * std::cos(phi) / d, a * std::sin(phi) * std::cos(phi) / d);
    });
    crossing = true;
    desc = "lemniscate:a=" + num(a);
  } else if (s.head == "slit") {
    detail::require_keys(s, {});
    const std::vector<Vec2> corners = {{-1, -1},    {-0.01, -1}, {-0.01, 0.8}, {0.01, 0.8},
                                       {0.01, -1}, {1, -1},     {1, 1},       {-1, 1}};
    v = distribute_on_polyline(corners, n);
    desc = "slit";
  } else if (s.head == "thin_film" || s.head == "rectangle") {
    double w, h;
    if (s.head == "thin_film") {
      detail::require_keys(s, {"L"});
      const double L = detail::get_or(s, "L", 5.0);
      if (!(L > 0.0)) throw InvalidArgument("thin film half length must be positive");
      w = 2 * L;
      h = 1.0;
      desc = "thin_film:L=" + num(L);
    } else {
      detail::require_keys(s, {"w", "h"});
      w = detail::get_or(s, "w", 2.0);
      h = detail::get_or(s, "h", 1.0);
      if (!(w > 0.0 && h > 0.0)) throw InvalidArgument("rectangle sides must be positive");
      desc = "rectangle:w=" + num(w) + ",h=" + num(h);
    }
    v = distribute_on_polyline({{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}}, n);
  } else {
    throw InvalidArgument("unknown shape generator '" + s.head + "'");
  }

  if (!crossing && enclosed_area(v) < 0.0) std::reverse(v.begin() + 1, v.end());
  std::string formula;
  if (s.head == "quadrifolium") formula = "polar rose r = cos(2 phi), phi = 2 pi rho";
  if (s.head == "lemniscate") formula = "(a cos phi, a sin phi cos phi) / (1 + sin^2 phi), phi = 2 pi rho";
  if (s.head == "slit" || s.head == "thin_film" || s.head == "rectangle")
    formula = "exact corner vertices, remaining vertices spread by arc length";
  return GeneratedCurve{PolygonalCurve(std::move(v)), crossing, desc, formula};
}

}  // namespace aniflow
