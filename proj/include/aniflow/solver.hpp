#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Sparse>

#include "aniflow/anisotropy.hpp"
#include "aniflow/curve.hpp"

namespace aniflow {

enum class FlowKind { Curvature, AreaConserved, SurfaceDiffusion, Intermediate };

struct FlowSpec {
  FlowKind kind = FlowKind::Curvature;
  double xi = 1.0;  ///< Intermediate only
  double nu = 1.0;  ///< Intermediate only

  static FlowSpec curvature() { return {FlowKind::Curvature}; }
  static FlowSpec area_conserved() { return {FlowKind::AreaConserved}; }
  static FlowSpec surface_diffusion() { return {FlowKind::SurfaceDiffusion}; }
  static FlowSpec intermediate(double xi, double nu) { return {FlowKind::Intermediate, xi, nu}; }

  bool has_eta() const { return kind == FlowKind::Intermediate; }
  /// True for the flows whose exact identity is A^{m+1} = A^m.
  bool conserves_area() const { return kind != FlowKind::Curvature; }
  int stride() const { return has_eta() ? 4 : 3; }
  void validate() const;
  /// Canonical text form accepted by parse_flow.
  std::string name() const;
};

/// `curvature`, `area_conserved`, `surface_diffusion` or `intermediate:xi=<real>,nu=<real>`.
FlowSpec parse_flow(std::string_view spec);

struct FlowState {
  PolygonalCurve curve;
  NodalField mu;
  double t = 0.0;
  long step = 0;
};

/// Unknowns of one time step.
struct TrialPoint {
  std::vector<Vec2> X;
  NodalField mu;
  std::optional<NodalField> eta;
};

struct StepReport {
  int newton_iterations = 0;
  double final_residual_norm = 0.0;
  /// Curvature: |(A^{m+1} - A^m)/tau + (mu^{m+1}, 1)^h|. Other flows: |A^{m+1} - A^m|.
  double area_decay_residual = 0.0;
  double energy_delta = 0.0;  ///< W^{m+1} - W^m
  double area = 0.0;          ///< A^{m+1}
  double energy = 0.0;        ///< W^{m+1}
};

struct SolverOptions {
  double newton_tol = 1e-11;
  int max_newton_iters = 50;
};

/// Edge-wise -(h^m + h^{m+1})^perp / (2 |h^m|).
std::vector<Vec2> half_step_normal(const PolygonalCurve& old_curve, const std::vector<Vec2>& new_vertices);

/// System of one step, with every old-curve quantity computed once.
///
/// Unknowns are interleaved per node as [x, y, mu] (plus eta for the intermediate flow); residual rows
/// follow the same layout as [velocity, curvature_x, curvature_y (, helmholtz)].
class StepAssembler {
 public:
  StepAssembler(const PolygonalCurve& old_curve, const FlowSpec& flow, const AnisotropyDensity& density,
                const EnergyMatrixParams& params, double tau);

  std::size_t nodes() const { return n_; }
  std::size_t unknowns() const { return n_ * static_cast<std::size_t>(flow_.stride()); }

  Eigen::VectorXd pack(const TrialPoint& trial) const;
  TrialPoint unpack(const Eigen::VectorXd& u) const;

  Eigen::VectorXd residual(const Eigen::VectorXd& u) const;
  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& u) const;

  const PolygonalCurve& old_curve() const { return old_; }
  const FlowSpec& flow() const { return flow_; }
  const std::vector<double>& mass() const { return mass_; }
  /// Per-edge matrix G evaluated on the old curve.
  const std::vector<Mat2>& energy_matrices() const { return g_; }

 private:
  PolygonalCurve old_;
  FlowSpec flow_;
  double tau_;
  std::size_t n_;
  std::vector<Vec2> h_;
  std::vector<double> len_;
  std::vector<Mat2> g_;
  std::vector<double> mass_;
  double length_ = 0.0;
};

Eigen::VectorXd assemble_residual(const FlowState& state, const TrialPoint& trial, const FlowSpec& flow,
                                  const AnisotropyDensity& density, const EnergyMatrixParams& params, double tau);
Eigen::SparseMatrix<double> assemble_jacobian(const FlowState& state, const TrialPoint& trial, const FlowSpec& flow,
                                              const AnisotropyDensity& density, const EnergyMatrixParams& params,
                                              double tau);

/// (mu, 1)^h / |Gamma|.
double lagrange_multiplier(const PolygonalCurve& curve, const NodalField& mu_new);

/// Solves (1/xi)(d_s eta, d_s psi)^h + (1/nu)(eta, psi)^h = (f, psi)^h.
NodalField helmholtz_solve(const PolygonalCurve& curve, const NodalField& f, double xi, double nu);

/// Least-squares solution of the curvature rows with the old normal, node by node.
NodalField initial_mu(const PolygonalCurve& curve, const AnisotropyDensity& density, const EnergyMatrixParams& params);

/// State at t = 0 with mu from initial_mu.
FlowState initial_state(const PolygonalCurve& curve, const AnisotropyDensity& density,
                        const EnergyMatrixParams& params);

struct StepResult {
  FlowState state;
  StepReport report;
};

/// One Newton solve. Throws NewtonDiverged or DegenerateCurve.
StepResult solve_time_step(const FlowState& state, const FlowSpec& flow, const AnisotropyDensity& density,
                           const EnergyMatrixParams& params, double tau, const SolverOptions& opts = {});

struct DiagnosticsRow {
  long step = 0;
  double t = 0.0;
  double area = 0.0;
  double energy = 0.0;
  double mesh_ratio = 0.0;
  int newton_iters = 0;
  double area_residual = 0.0;
  double energy_delta = 0.0;
};

enum class StopReason { Completed, PinchOff, NewtonDiverged, Degenerate };

struct EvolutionOptions {
  double T = 1.0;
  SolverOptions solver;
  /// Snapshot every this many steps (0: only the initial and final states).
  long snapshot_every = 0;
  bool stop_on_pinch_off = false;
  /// When set, a warning is written to std::clog if the stabilizer falls below this table.
  std::optional<StabilizerTable> k_min;
  std::function<void(const FlowState& prev, const FlowState& next, const StepReport&)> on_step;
  std::function<void(const FlowState&)> on_snapshot;
  /// Keep snapshot states in EvolutionResult::snapshots.
  bool keep_snapshots = true;
};

struct EvolutionResult {
  std::vector<DiagnosticsRow> diagnostics;  ///< row 0 is the initial state
  std::vector<FlowState> snapshots;
  FlowState final_state;
  StopReason stop = StopReason::Completed;
  std::string message;
};

/// Steps t_m = m tau until t >= T or a stop condition fires; failures end the run and keep partial results.
EvolutionResult run_evolution(const PolygonalCurve& initial, const FlowSpec& flow, const AnisotropyDensity& density,
                              const EnergyMatrixParams& params, double tau, const EvolutionOptions& options);
/// As above, starting from a given state.
EvolutionResult run_evolution(const FlowState& initial, const FlowSpec& flow, const AnisotropyDensity& density,
                              const EnergyMatrixParams& params, double tau, const EvolutionOptions& options);

std::string_view stop_reason_name(StopReason reason);

}  // namespace aniflow
