#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace aniflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// gamma(theta) together with its first two derivatives.
struct DensityValue {
  double value = 1.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

enum class Smoothness { C2, PiecewiseC2 };

/// A positive, 2*pi-periodic surface energy density gamma(theta), where theta
/// is the inclination angle of the unit tangent (cos theta, sin theta).
class AnisotropyDensity {
 public:
  using Evaluator = std::function<DensityValue(double)>;

  AnisotropyDensity(std::string name, Evaluator evaluator, Smoothness smoothness = Smoothness::C2,
                    std::vector<double> discontinuities = {});

  DensityValue operator()(double theta) const { return evaluator_(theta); }
  double gamma(double theta) const { return evaluator_(theta).value; }
  double dgamma(double theta) const { return evaluator_(theta).d1; }
  double d2gamma(double theta) const { return evaluator_(theta).d2; }

  /// For built-in families this is the canonical spec string accepted by parse_density.
  const std::string& name() const { return name_; }
  Smoothness smoothness() const { return smoothness_; }
  /// Angles where gamma'' jumps (piecewise-C2 families only).
  const std::vector<double>& discontinuities() const { return discontinuities_; }

 private:
  std::string name_;
  Evaluator evaluator_;
  Smoothness smoothness_;
  std::vector<double> discontinuities_;
};

AnisotropyDensity isotropic_density();
/// gamma = 1 + beta cos(m (theta + phase)), |beta| < 1.
AnisotropyDensity mfold_density(int m, double beta, double phase = 0.0);
/// gamma = sqrt((5/2 + 3/2 sgn n1) n1^2 + n2^2) with n = (-sin, cos). Piecewise C2 with
/// jumps of gamma'' at theta in {0, pi}; at a jump the left-sided (theta -> theta-) branch is used.
AnisotropyDensity case2_density();
/// gamma = (n1^4 + n2^4)^(1/4).
AnisotropyDensity l4_density();

/// Family lookup by identifier: "isotropic" (no params), "mfold" (beta, m, phase),
/// "caseII" (no params), "l4norm" (no params).
AnisotropyDensity builtin_density(std::string_view family, std::span<const double> params);

/// Parses `iso`, `mfold:m=<int>,beta=<real>,phase=<real>`, `case2` or `l4`.
AnisotropyDensity parse_density(std::string_view spec);

/// Reduces an angle to (-pi, pi].
double wrap_angle(double theta);

inline Vec2 tangent_of(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline Vec2 normal_of(double theta) { return {-std::sin(theta), std::cos(theta)}; }

/// Cahn-Hoffman vector gamma n - gamma' tau.
Vec2 xi_vector(const AnisotropyDensity& density, double theta);

// ---------------------------------------------------------------------------
// Stabilizing functions

/// k sampled at theta_j = -pi + j pi/10, j = 0..20, periodic linear interpolation in between.
class StabilizerTable {
 public:
  static constexpr int kNodes = 21;

  StabilizerTable() = default;
  /// values[0] and values[20] must agree.
  explicit StabilizerTable(const std::array<double, kNodes>& values);

  static double node(int j);
  double operator()(double theta) const;
  const std::array<double, kNodes>& values() const { return values_; }

  /// 21 rows `theta,value`.
  void write_csv(std::ostream& out) const;
  static StabilizerTable read_csv(std::istream& in);

 private:
  std::array<double, kNodes> values_{};
};

/// Either a sampled table or a closed-form k(theta).
class Stabilizer {
 public:
  using Function = std::function<double(double)>;

  Stabilizer() : impl_(Function([](double) { return 0.0; })) {}
  Stabilizer(StabilizerTable table) : impl_(std::move(table)) {}
  Stabilizer(Function function) : impl_(std::move(function)) {}

  static Stabilizer constant(double k) {
    return Stabilizer(Function([k](double) { return k; }));
  }

  double operator()(double theta) const;
  const StabilizerTable* table() const { return std::get_if<StabilizerTable>(&impl_); }

 private:
  std::variant<StabilizerTable, Function> impl_;
};

struct EnergyMatrixParams {
  double alpha = 0.0;
  Stabilizer k;
};

/// Largest amount by which k falls below k_min at the table nodes (<= 0 means k >= k_min).
double stabilizer_deficit(const EnergyMatrixParams& params, const StabilizerTable& k_min);

/// Validates k >= k_min - tol at every node; throws InvalidArgument otherwise.
void require_stabilized(const EnergyMatrixParams& params, const StabilizerTable& k_min,
                        double tol = 1e-10);

/// gamma I - n xi^T + alpha xi n^T + k n n^T.
Mat2 energy_matrix(const AnisotropyDensity& density, double theta, const EnergyMatrixParams& params);
/// Same matrix written as gamma I + gamma'(n tau^T - alpha tau n^T) + (k + (alpha-1) gamma) n n^T.
Mat2 energy_matrix_expanded(const AnisotropyDensity& density, double theta,
                            const EnergyMatrixParams& params);

double aux_P(const AnisotropyDensity& density, double phi, double theta, double alpha, double a);
double aux_Q(const AnisotropyDensity& density, double phi, double theta, double alpha);

/// inf over theta of 3 gamma(theta) - gamma(theta - pi): grid minimum refined by golden section.
double stability_margin(const AnisotropyDensity& density, int grid_n = 3600);

inline constexpr double kInfiniteK0 = std::numeric_limits<double>::infinity();

struct K0Options {
  int grid = 8192;
  /// Points with |sin phi| below this are replaced by the analytic endpoint checks.
  double sin_cutoff = 1e-6;
  /// Relative tolerance for the phi = pi endpoint checks.
  double endpoint_tol = 1e-10;
};

struct K0Result {
  double value = 0.0;  ///< kInfiniteK0 when no finite a exists
  double argmax_phi = 0.0;
  std::string failed_condition;  ///< empty when finite

  bool finite() const { return value < kInfiniteK0; }
};

/// Smallest a >= 0 with 4 gamma P_{alpha,a} >= Q_alpha^2 for all phi.
K0Result k0_search(const AnisotropyDensity& density, double theta, double alpha,
                   const K0Options& options = {});
double k0_at(const AnisotropyDensity& density, double theta, double alpha,
             const K0Options& options = {});

/// k_min(theta_j) = k0(theta_j) - (alpha - 1) gamma(theta_j) on the 21 nodes.
/// Throws NonexistentStabilizer if k0 is infinite at a node.
StabilizerTable k_min_table(const AnisotropyDensity& density, double alpha,
                            const K0Options& options = {});

/// sup |gamma''| over a uniform grid.
double sup_abs_d2(const AnisotropyDensity& density, int grid_n = 4096);

/// Closed-form upper bound of k0 valid for c > 0.
double k0_upper_bound(const AnisotropyDensity& density, double theta, double alpha, double c);

}  // namespace aniflow
