#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aniflow/anisotropy.hpp"
#include "aniflow/curve.hpp"
#include "aniflow/solver.hpp"

namespace aniflow {

/// Stabilizer choice shared by runs and studies: `minimal`, `constant:<c>` or `file:<path>`.
struct StabilizerMode {
  enum class Kind { Minimal, Constant, File } kind = Kind::Minimal;
  double constant = 0.0;
  std::string path;

  static StabilizerMode parse(const std::string& text);
  std::string str() const;
};

/// Resolves a stabilizer mode into matrix parameters. For Minimal the k_min table is also returned.
EnergyMatrixParams resolve_stabilizer(const AnisotropyDensity& density, double alpha, const StabilizerMode& mode,
                                      std::optional<StabilizerTable>* k_min_out = nullptr);

struct ConvergenceStudy {
  FlowSpec flow = FlowSpec::curvature();
  std::string density = "iso";
  std::vector<double> alphas = {0.0};
  StabilizerMode stabilizer;
  std::string shape = "ellipse:a=4,b=1";
  /// Level l uses N = n0 * 2^l vertices, h = 1/N and tau = tau_factor * h^2.
  std::size_t n0 = 16;
  int levels = 3;
  double tau_factor = 1.0;
  std::vector<double> times = {0.1, 0.2, 0.3};
  /// Fine-mesh reference with N_ref vertices and tau = tau_factor / N_ref^2.
  std::size_t reference_n = 128;
  /// Replace the fine-mesh reference by the exact shrinking circle R(t) = sqrt(R0^2 - 2t).
  bool exact_circle_reference = false;
  double circle_r0 = 1.0;
  std::size_t exact_circle_vertices = 4096;
  SolverOptions solver;
  unsigned workers = 1;
};

struct ErrorRecord {
  double alpha = 0.0;
  int level = 0;
  std::size_t n = 0;
  double h = 0.0;
  double tau = 0.0;
  double t = 0.0;
  double error = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();  ///< against the previous level
  std::string note;  ///< empty unless the cell failed or the order is undefined
};

struct AreaDecayAudit {
  std::vector<double> identity_residuals;
  std::vector<double> normalized_area_loss;  ///< (A^m - A^0) / A^0
  double max_identity_residual = 0.0;
  double identity_tolerance = 0.0;
  double max_normalized_area_loss = 0.0;
  double max_energy_increase = 0.0;  ///< max (W^{m+1} - W^m) / W^0
  bool area_ok = true;
  bool energy_ok = true;
  bool passed() const { return area_ok && energy_ok; }
  std::string summary;
};

/// Curves at the requested times, interpolated between the bracketing time levels.
/// `times` must be sorted and lie in [t_0, T]; the run goes to the last time.
std::vector<PolygonalCurve> capture_at_times(const PolygonalCurve& initial, const FlowSpec& flow,
                                             const AnisotropyDensity& density, const EnergyMatrixParams& params,
                                             double tau, const std::vector<double>& times,
                                             const SolverOptions& solver = {}, std::optional<EvolutionResult>* series = nullptr);

/// Regular polygon sampling of the circle of radius sqrt(r0^2 - 2t).
PolygonalCurve exact_circle(double r0, double t, std::size_t vertices);

/// Structure audit and decay-rate fit of one study run (level -1 is the reference).
struct CellSummary {
  double alpha = 0.0;
  int level = 0;
  std::size_t n = 0;
  AreaDecayAudit audit;
  double decay_rate = std::numeric_limits<double>::quiet_NaN();
  double mean_newton_iterations = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct ConvergenceReport {
  std::vector<ErrorRecord> errors;
  std::vector<CellSummary> cells;
};

ConvergenceReport run_convergence_report(const ConvergenceStudy& study);
std::vector<ErrorRecord> run_convergence(const ConvergenceStudy& study);

/// Per-step identity and energy checks; never throws.
/// Curvature: |(A^{m+1} - A^m)/tau + (mu^{m+1},1)^h| <= 1e-11 max(1, |A^0|/tau).
/// Other flows: |A^{m+1} - A^m| <= 1e-12 |A^0|. All flows: W^{m+1} <= W^m + 1e-12 W^0.
AreaDecayAudit audit_structure(const EvolutionResult& series, const FlowSpec& flow);

/// Least-squares slope of A(t) over the trailing half of the rows. Needs at least 4 rows.
double decay_rate_estimate(const std::vector<DiagnosticsRow>& rows);
inline double decay_rate_estimate(const EvolutionResult& series) { return decay_rate_estimate(series.diagnostics); }

/// Runs jobs 0..count-1 on at most `workers` threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job);

}  // namespace aniflow
