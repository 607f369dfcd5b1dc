#include "aniflow/anisotropy.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>

#include "aniflow/errors.hpp"
#include "spec_string.hpp"

namespace aniflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

AnisotropyDensity::AnisotropyDensity(std::string name, Evaluator evaluator, Smoothness smoothness,
                                     std::vector<double> discontinuities)
    : name_(std::move(name)),
      evaluator_(std::move(evaluator)),
      smoothness_(smoothness),
      discontinuities_(std::move(discontinuities)) {
  if (!evaluator_) throw InvalidArgument("density evaluator is empty");
}

double wrap_angle(double theta) {
  double r = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

AnisotropyDensity isotropic_density() {
  return AnisotropyDensity("iso", [](double) { return DensityValue{1.0, 0.0, 0.0}; });
}

AnisotropyDensity mfold_density(int m, double beta, double phase) {
  if (!(std::abs(beta) < 1.0)) throw InvalidArgument("m-fold density requires |beta| < 1");
  if (m < 0) throw InvalidArgument("m-fold density requires m >= 0");
  const double md = m;
  std::string name = "mfold:m=" + std::to_string(m) + ",beta=" + fmt17(beta) + ",phase=" + fmt17(phase);
  return AnisotropyDensity(std::move(name), [md, beta, phase](double theta) {
    const double arg = md * (theta + phase);
    const double c = std::cos(arg);
    const double s = std::sin(arg);
    return DensityValue{1.0 + beta * c, -beta * md * s, -beta * md * md * c};
  });
}

AnisotropyDensity case2_density() {
  auto eval = [](double theta) {
    const double t = wrap_angle(theta);
    if (t > 0.0) return DensityValue{1.0, 0.0, 0.0};
    // n1 = -sin(theta) >= 0 here: gamma^2 = 4 n1^2 + n2^2 = 5/2 - 3/2 cos(2 theta)
    const double g = std::sqrt(2.5 - 1.5 * std::cos(2.0 * t));
    const double g1 = 1.5 * std::sin(2.0 * t) / g;
    const double g2 = (3.0 * std::cos(2.0 * t) - g1 * g1) / g;
    return DensityValue{g, g1, g2};
  };
  return AnisotropyDensity("case2", eval, Smoothness::PiecewiseC2, {0.0, kPi});
}

AnisotropyDensity l4_density() {
  auto eval = [](double theta) {
    const double s = (3.0 + std::cos(4.0 * theta)) / 4.0;
    const double s1 = -std::sin(4.0 * theta);
    const double s2 = -4.0 * std::cos(4.0 * theta);
    const double g = std::pow(s, 0.25);
    const double g1 = 0.25 * std::pow(s, -0.75) * s1;
    const double g2 = 0.25 * (-0.75 * std::pow(s, -1.75) * s1 * s1 + std::pow(s, -0.75) * s2);
    return DensityValue{g, g1, g2};
  };
  return AnisotropyDensity("l4", eval);
}

AnisotropyDensity builtin_density(std::string_view family, std::span<const double> params) {
  auto expect = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      throw InvalidArgument("wrong parameter count for density family '" + std::string(family) + "'");
  };
  if (family == "isotropic") {
    expect(0, 0);
    return isotropic_density();
  }
  if (family == "mfold") {
    expect(2, 3);
    const double m = params[1];
    if (m != std::floor(m)) throw InvalidArgument("m-fold symmetry order must be an integer");
    return mfold_density(static_cast<int>(m), params[0], params.size() == 3 ? params[2] : 0.0);
  }
  if (family == "caseII") {
    expect(0, 0);
    return case2_density();
  }
  if (family == "l4norm") {
    expect(0, 0);
    return l4_density();
  }
  throw InvalidArgument("unknown density family '" + std::string(family) + "'");
}

AnisotropyDensity parse_density(std::string_view spec) {
  const detail::SpecString parsed = detail::parse_spec_string(spec);
  auto no_params = [&] {
    if (!parsed.params.empty()) throw InvalidArgument("density '" + parsed.head + "' takes no parameters");
  };
  if (parsed.head == "iso") {
    no_params();
    return isotropic_density();
  }
  if (parsed.head == "case2") {
    no_params();
    return case2_density();
  }
  if (parsed.head == "l4") {
    no_params();
    return l4_density();
  }
  if (parsed.head == "mfold") {
    detail::require_keys(parsed, {"m", "beta", "phase"});
    for (const char* key : {"m", "beta"})
      if (!parsed.params.count(key)) throw InvalidArgument(std::string("mfold: missing ") + key);
    const double m = detail::get_or(parsed, "m", 3.0);
    if (m != std::floor(m)) throw InvalidArgument("mfold: m must be an integer");
    return mfold_density(static_cast<int>(m), detail::get_or(parsed, "beta", 0.0),
                         detail::get_or(parsed, "phase", 0.0));
  }
  throw InvalidArgument("unknown density spec '" + std::string(spec) + "'");
}

Vec2 xi_vector(const AnisotropyDensity& density, double theta) {
  const DensityValue g = density(theta);
  return g.value * normal_of(theta) - g.d1 * tangent_of(theta);
}

// ---------------------------------------------------------------------------

StabilizerTable::StabilizerTable(const std::array<double, kNodes>& values) : values_(values) {
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("stabilizer table values must be finite");
  if (values_.front() != values_.back())
    throw InvalidArgument("stabilizer table is not periodic (value_0 != value_20)");
}

double StabilizerTable::node(int j) { return -kPi + j * kPi / 10.0; }

double StabilizerTable::operator()(double theta) const {
  const double u = (wrap_angle(theta) + kPi) / (kPi / 10.0);
  int j = static_cast<int>(std::floor(u));
  if (j < 0) j = 0;
  if (j > kNodes - 2) j = kNodes - 2;
  const double w = u - j;
  return (1.0 - w) * values_[j] + w * values_[j + 1];
}

double Stabilizer::operator()(double theta) const {
  if (const auto* t = std::get_if<StabilizerTable>(&impl_)) return (*t)(theta);
  return std::get<Function>(impl_)(theta);
}

double stabilizer_deficit(const EnergyMatrixParams& params, const StabilizerTable& k_min) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < StabilizerTable::kNodes; ++j) {
    const double th = StabilizerTable::node(j);
    worst = std::max(worst, k_min.values()[j] - params.k(th));
  }
  return worst;
}

void require_stabilized(const EnergyMatrixParams& params, const StabilizerTable& k_min, double tol) {
  const double d = stabilizer_deficit(params, k_min);
  if (d > tol) throw InvalidArgument("stabilizer falls below k_min by " + fmt17(d));
}

Mat2 energy_matrix(const AnisotropyDensity& density, double theta, const EnergyMatrixParams& params) {
  const double g = density.gamma(theta);
  const Vec2 n = normal_of(theta);
  const Vec2 xi = xi_vector(density, theta);
  return g * Mat2::Identity() - n * xi.transpose() + params.alpha * xi * n.transpose() +
         params.k(theta) * n * n.transpose();
}

Mat2 energy_matrix_expanded(const AnisotropyDensity& density, double theta,
                            const EnergyMatrixParams& params) {
  const DensityValue g = density(theta);
  const Vec2 n = normal_of(theta);
  const Vec2 t = tangent_of(theta);
  return g.value * Mat2::Identity() + g.d1 * (n * t.transpose() - params.alpha * t * n.transpose()) +
         (params.k(theta) + (params.alpha - 1.0) * g.value) * n * n.transpose();
}

double aux_P(const AnisotropyDensity& density, double phi, double theta, double alpha, double a) {
  const DensityValue g = density(theta);
  const double s = std::sin(phi);
  return g.value + 0.5 * (alpha - 1.0) * g.d1 * std::sin(2.0 * phi) + a * s * s;
}

double aux_Q(const AnisotropyDensity& density, double phi, double theta, double alpha) {
  const DensityValue g = density(theta);
  return density.gamma(theta - phi) + g.value * std::cos(phi) + alpha * g.d1 * std::sin(phi);
}

double stability_margin(const AnisotropyDensity& density, int grid_n) {
  if (grid_n < 360) throw InvalidArgument("stability_margin grid must have at least 360 points");
  auto f = [&](double th) { return 3.0 * density.gamma(th) - density.gamma(th - kPi); };
  const double h = 2.0 * kPi / grid_n;
  int best = 0;
  double best_v = f(-kPi);
  for (int i = 1; i < grid_n; ++i) {
    const double v = f(-kPi + i * h);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = -kPi + (best - 1) * h;
  double b = -kPi + (best + 1) * h;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
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
  return std::min({best_v, fc, fd});
}

}  // namespace aniflow
