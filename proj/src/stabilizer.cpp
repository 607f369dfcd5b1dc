#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "aniflow/anisotropy.hpp"
#include "aniflow/errors.hpp"
#include "spec_string.hpp"

namespace aniflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Guard band for the local refinement; the endpoint limits are handled analytically.
constexpr double kRefineGuard = 1e-3;

struct RatioContext {
  double g, g1;
  double alpha;
  const AnisotropyDensity* density;
  double theta;

  // (Q^2 - 4 gamma P_0) / (4 gamma sin^2 phi)
  double operator()(double phi) const {
    const double s = std::sin(phi);
    const double q = density->gamma(theta - phi) + g * std::cos(phi) + alpha * g1 * s;
    const double p0 = g + 0.5 * (alpha - 1.0) * g1 * std::sin(2.0 * phi);
    return (q * q - 4.0 * g * p0) / (4.0 * g * s * s);
  }
};

template <class F>
double golden_max(const F& f, double a, double b, double& arg) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  if (fc > fd) {
    arg = c;
    return fc;
  }
  arg = d;
  return fd;
}

}  // namespace

K0Result k0_search(const AnisotropyDensity& density, double theta, double alpha, const K0Options& options) {
  const DensityValue gv = density(theta);
  const DensityValue gp = density(theta - kPi);
  const double g = gv.value;
  const double scale = 4.0 * g * g;

  K0Result result;

  // phi -> pi: Q(pi)^2 <= 4 gamma^2 is required, and equality needs the first-order term to vanish.
  const double q0 = gp.value - g;
  const double n_pi = q0 * q0 - scale;
  double best = -std::numeric_limits<double>::infinity();
  double best_phi = 0.0;
  if (n_pi > options.endpoint_tol * scale) {
    result.value = kInfiniteK0;
    result.argmax_phi = kPi;
    result.failed_condition = "3*gamma(theta) >= gamma(theta-pi) violated";
    return result;
  }
  if (std::abs(n_pi) <= options.endpoint_tol * scale) {
    const double lin = -2.0 * q0 * (gp.d1 + alpha * gv.d1) - 4.0 * g * (alpha - 1.0) * gv.d1;
    if (std::abs(lin) > options.endpoint_tol * scale) {
      result.value = kInfiniteK0;
      result.argmax_phi = kPi;
      result.failed_condition = "critical angle with 3*gamma(theta) = gamma(theta-pi) and nonvanishing first-order term";
      return result;
    }
    const double t = gp.d1 + alpha * gv.d1;
    best = (t * t + q0 * (gp.d2 + g)) / (4.0 * g);
    best_phi = kPi;
  }

  // phi -> 0: always finite.
  const double r0 = (alpha - 1.0) * (alpha - 1.0) * gv.d1 * gv.d1 / (4.0 * g) + 0.5 * (gv.d2 - g);
  if (r0 > best) {
    best = r0;
    best_phi = 0.0;
  }

  const RatioContext ratio{g, gv.d1, alpha, &density, theta};
  const int n = options.grid;
  const double h = 2.0 * kPi / n;
  int best_i = -1;
  double grid_best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i) {
    const double phi = i * h;
    if (std::abs(std::sin(phi)) < options.sin_cutoff) continue;
    const double v = ratio(phi);
    if (v > grid_best) {
      grid_best = v;
      best_i = i;
    }
  }
  if (best_i > 0) {
    double a = (best_i - 1) * h, b = (best_i + 1) * h;
    // keep the bracket inside one of (0, pi), (pi, 2 pi) and away from the removable points
    const double lo = best_i * h < kPi ? kRefineGuard : kPi + kRefineGuard;
    const double hi = best_i * h < kPi ? kPi - kRefineGuard : 2.0 * kPi - kRefineGuard;
    a = std::max(a, lo);
    b = std::min(b, hi);
    double arg = best_i * h;
    double refined = grid_best;
    if (b > a) {
      const double v = golden_max(ratio, a, b, arg);
      if (v > refined) refined = v;
      else arg = best_i * h;
    }
    if (refined > best) {
      best = refined;
      best_phi = arg;
    }
  }

  result.value = std::max(0.0, best);
  result.argmax_phi = best_phi;
  return result;
}

double k0_at(const AnisotropyDensity& density, double theta, double alpha, const K0Options& options) {
  return k0_search(density, theta, alpha, options).value;
}

StabilizerTable k_min_table(const AnisotropyDensity& density, double alpha, const K0Options& options) {
  std::array<double, StabilizerTable::kNodes> values{};
  for (int j = 0; j < StabilizerTable::kNodes - 1; ++j) {
    const double th = StabilizerTable::node(j);
    const K0Result r = k0_search(density, th, alpha, options);
    if (!r.finite()) throw NonexistentStabilizer(th, r.failed_condition);
    values[j] = r.value - (alpha - 1.0) * density.gamma(th);
  }
  values.back() = values.front();
  return StabilizerTable(values);
}

double sup_abs_d2(const AnisotropyDensity& density, int grid_n) {
  double s = 0.0;
  for (int i = 0; i < grid_n; ++i) s = std::max(s, std::abs(density.d2gamma(-kPi + 2.0 * kPi * i / grid_n)));
  return s;
}

double k0_upper_bound(const AnisotropyDensity& density, double theta, double alpha, double c) {
  if (!(c > 0.0)) throw InvalidArgument("k0 upper bound requires a positive stability margin");
  const DensityValue g = density(theta);
  const double d1 = std::abs(g.d1);
  const double b = (2.0 / c) * (alpha + 1.0) * (alpha + 1.0) * d1 * d1;
  const double c_alpha = std::max(5.0, (4.0 / (kPi * kPi)) * (2.0 * std::abs(alpha) + 1.0) * (2.0 * std::abs(alpha) + 1.0));
  const double a = (kPi * kPi / 8.0) * (c_alpha * sup_abs_d2(density) + (3.0 * std::abs(alpha) + 2.0) * d1 + g.value + b);
  return (a * a + 4.0 * g.value * a + (alpha - 1.0) * (alpha - 1.0) * d1 * d1) / (4.0 * g.value);
}

void StabilizerTable::write_csv(std::ostream& out) const {
  char buf[96];
  for (int j = 0; j < kNodes; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", node(j), values_[j]);
    out << buf;
  }
}

StabilizerTable StabilizerTable::read_csv(std::istream& in) {
  std::array<double, kNodes> values{};
  int count = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == "theta,value") continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) throw InvalidArgument("stabilizer table line " + std::to_string(lineno) + ": expected theta,value");
    if (count >= kNodes) throw InvalidArgument("stabilizer table has more than 21 rows");
    const double th = detail::parse_real(t.substr(0, comma), "theta");
    const double v = detail::parse_real(t.substr(comma + 1), "value");
    if (std::abs(th - node(count)) > 1e-9)
      throw InvalidArgument("stabilizer table line " + std::to_string(lineno) + ": theta does not match node " +
                            std::to_string(count));
    values[count++] = v;
  }
  if (count != kNodes) throw InvalidArgument("stabilizer table needs 21 rows, got " + std::to_string(count));
  return StabilizerTable(values);
}

}  // namespace aniflow
