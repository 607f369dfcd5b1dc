#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aniflow/anisotropy.hpp"
#include "aniflow/curve.hpp"
#include "aniflow/solver.hpp"

namespace testing {

using aniflow::Vec2;
constexpr double kPi = std::numbers::pi;

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(engine); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(engine); }
};

/// Star-shaped CCW polygon: r(phi) = r0 (1 + amp * smooth noise), angles jittered but sorted.
inline aniflow::PolygonalCurve random_star_curve(Rng& rng, std::size_t n, double r0 = 1.0, double amp = 0.2) {
  const int modes = 3;
  double a[modes], p[modes];
  for (int k = 0; k < modes; ++k) {
    a[k] = rng.uniform(-amp, amp) / (k + 1);
    p[k] = rng.uniform(0.0, 2 * kPi);
  }
  std::vector<Vec2> v;
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = 2 * kPi * (j + rng.uniform(-0.3, 0.3)) / n;
    double r = 1.0;
    for (int k = 0; k < modes; ++k) r += a[k] * std::cos((k + 2) * phi + p[k]);
    v.emplace_back(r0 * r * std::cos(phi), r0 * r * std::sin(phi));
  }
  return aniflow::PolygonalCurve(std::move(v));
}

/// Convex CCW polygon inscribed in a circle at sorted random angles.
inline std::vector<Vec2> random_convex_polygon(Rng& rng, std::size_t n, Vec2 center, double radius) {
  std::vector<double> ang(n);
  for (auto& x : ang) x = rng.uniform(0.0, 2 * kPi);
  std::sort(ang.begin(), ang.end());
  std::vector<Vec2> v;
  for (double t : ang) v.push_back(center + radius * Vec2(std::cos(t), std::sin(t)));
  return v;
}

/// Densities with 3 gamma(theta) >= gamma(theta - pi) everywhere.
inline aniflow::AnisotropyDensity random_density(Rng& rng) {
  switch (rng.integer(0, 3)) {
    case 0: return aniflow::isotropic_density();
    case 1: {
      const int m = rng.integer(2, 6);
      const double bmax = 1.0 / (m * m - 1.0);
      return aniflow::mfold_density(m, rng.uniform(-bmax, bmax), rng.uniform(-1.0, 1.0));
    }
    case 2: return aniflow::l4_density();
    default: return aniflow::case2_density();
  }
}

/// gamma = 1 + a cos(theta) + b cos(2 theta) with a = sqrt(1/2), b = 1/2: 3 gamma - gamma(. - pi) has a
/// double zero at 3 pi / 4 where gamma' = 1/2.
inline aniflow::AnisotropyDensity critical_density() {
  const double a = std::sqrt(0.5), b = 0.5;
  return aniflow::AnisotropyDensity("critical", [a, b](double t) {
    return aniflow::DensityValue{1 + a * std::cos(t) + b * std::cos(2 * t), -a * std::sin(t) - 2 * b * std::sin(2 * t),
                                 -a * std::cos(t) - 4 * b * std::cos(2 * t)};
  });
}

// ---------------------------------------------------------------------------
// Oracles

/// Brute-force k0 in long double: sup of (Q^2 - 4 g P_0) / (4 g sin^2) over `samples` offsets, with the
/// endpoint limits at phi = 0 and pi taken by polynomial extrapolation. Returns +inf when the ratio blows up at pi.
inline long double brute_k0(const std::function<long double(long double)>& g,
                            const std::function<long double(long double)>& dg, long double theta, long double alpha,
                            long samples = 1000000) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double g0 = g(theta), g1 = dg(theta);
  auto ratio = [&](long double phi) {
    const long double s = std::sin(phi), c = std::cos(phi);
    const long double q = g(theta - phi) + g0 * c + alpha * g1 * s;
    const long double p0 = g0 + 0.5L * (alpha - 1) * g1 * std::sin(2 * phi);
    return (q * q - 4 * g0 * p0) / (4 * g0 * s * s);
  };
  long double best = 0.0L;
  for (long i = 0; i < samples; ++i) {
    const long double phi = -pi + 2 * pi * (i + 0.5L) / samples;
    if (std::fabs(std::sin(phi)) < 1e-3L) continue;
    best = std::max(best, ratio(phi));
  }
  // Endpoint limits: quadratic extrapolation from three points on each side.
  const long double q_pi = g(theta - pi) - g0;
  const bool pi_blows_up = q_pi * q_pi - 4 * g0 * g0 > 1e-12L * g0 * g0;
  if (pi_blows_up) return std::numeric_limits<long double>::infinity();
  for (long double base : {0.0L, pi}) {
    for (long double side : {-1.0L, 1.0L}) {
      const long double d = 1e-3L;
      const long double r1 = ratio(base + side * d), r2 = ratio(base + side * 2 * d), r3 = ratio(base + side * 3 * d);
      const long double limit = 3 * r1 - 3 * r2 + r3;
      if (std::fabs(limit) > 1e8L) return std::numeric_limits<long double>::infinity();
      best = std::max(best, limit);
    }
  }
  return best;
}

inline double signed_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

/// Sutherland-Hodgman clip of `subject` by the convex CCW polygon `clip`.
inline std::vector<Vec2> clip_convex(std::vector<Vec2> subject, const std::vector<Vec2>& clip) {
  auto side = [](const Vec2& a, const Vec2& b, const Vec2& p) {
    return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
  };
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % clip.size()];
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Vec2& p = subject[i];
      const Vec2& q = subject[(i + 1) % subject.size()];
      const double sp = side(a, b, p), sq = side(a, b, q);
      if (sp >= 0) out.push_back(p);
      if ((sp >= 0) != (sq >= 0)) out.push_back(p + (q - p) * (sp / (sp - sq)));
    }
    subject = std::move(out);
  }
  return subject;
}

/// |A| + |B| - 2 |A n B| for convex CCW polygons.
inline double convex_symmetric_difference(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  const auto inter = clip_convex(a, b);
  const double ai = inter.size() >= 3 ? signed_area(inter) : 0.0;
  return signed_area(a) + signed_area(b) - 2 * ai;
}

/// Dense solve of (1/xi) K eta + (1/nu) M eta = M f with lumped M and the edge stiffness K.
inline std::vector<double> dense_helmholtz(const aniflow::PolygonalCurve& c, const std::vector<double>& f, double xi,
                                           double nu) {
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int e = 0; e < n; ++e) {
    const int a = e, b = (e + 1) % n;
    const double len = c.edge(e).norm();
    const double k = 1.0 / (xi * len);
    A(a, a) += k;
    A(b, b) += k;
    A(a, b) -= k;
    A(b, a) -= k;
    A(a, a) += len / (2 * nu);
    A(b, b) += len / (2 * nu);
    rhs[a] += len / 2 * f[a];
    rhs[b] += len / 2 * f[b];
  }
  const Eigen::VectorXd x = A.fullPivLu().solve(rhs);
  return {x.data(), x.data() + n};
}

/// Isotropic curvature flow residual written node by node: for node i with neighbours i-1, i+1,
///   velocity:  sum over both edges of (|h|/2) n_half . (Y_i - X_i) / tau + m_i mu_i
///   curvature: mu_i sum (|h|/2) n_half - (Y_i - Y_{i-1}) / |h_{i-1}| + (Y_{i+1} - Y_i) / |h_i|
inline Eigen::VectorXd isotropic_residual(const aniflow::PolygonalCurve& old, const std::vector<Vec2>& Y,
                                          const std::vector<double>& mu, double tau) {
  const std::size_t n = old.size();
  Eigen::VectorXd r(3 * n);
  auto at = [n](std::size_t i, int off) { return (i + n + off) % n; };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = at(i, -1), ip = at(i, 1);
    const Vec2 hl = old.vertex(i) - old.vertex(im), hr = old.vertex(ip) - old.vertex(i);
    const double ll = hl.norm(), lr = hr.norm();
    const Vec2 ml = Y[i] - Y[im], mr = Y[ip] - Y[i];
    const Vec2 nl = -aniflow::perp(hl + ml) / (2 * ll);
    const Vec2 nr = -aniflow::perp(hr + mr) / (2 * lr);
    const Vec2 wn = 0.5 * ll * nl + 0.5 * lr * nr;
    r[3 * i] = wn.dot(Y[i] - old.vertex(i)) / tau + 0.5 * (ll + lr) * mu[i];
    const Vec2 cr = mu[i] * wn - ml / ll + mr / lr;
    r[3 * i + 1] = cr.x();
    r[3 * i + 2] = cr.y();
  }
  return r;
}

/// Central-difference Jacobian.
inline Eigen::MatrixXd fd_jacobian(const aniflow::StepAssembler& asmb, const Eigen::VectorXd& u, double step = 1e-6) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd up = u, um = u;
    up[j] += step;
    um[j] -= step;
    J.col(j) = (asmb.residual(up) - asmb.residual(um)) / (2 * step);
  }
  return J;
}

/// Random trial point near the old curve.
inline aniflow::TrialPoint random_trial(Rng& rng, const aniflow::PolygonalCurve& c, const aniflow::FlowSpec& f,
                                        double size = 0.05) {
  aniflow::TrialPoint t;
  for (const Vec2& p : c.vertices()) t.X.push_back(p + size * Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1)));
  t.mu = aniflow::NodalField(c.size(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) t.mu[i] = rng.uniform(-2, 2);
  if (f.has_eta()) {
    t.eta = aniflow::NodalField(c.size(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) (*t.eta)[i] = rng.uniform(-2, 2);
  }
  return t;
}

inline std::vector<Vec2> regular_polygon(std::size_t n, double r, double phase = 0.0) {
  std::vector<Vec2> v;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = phase + 2 * kPi * j / n;
    v.emplace_back(r * std::cos(t), r * std::sin(t));
  }
  return v;
}

}  // namespace testing
