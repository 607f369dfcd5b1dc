#include "aniflow/solver.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include <Eigen/SparseLU>

#include "aniflow/errors.hpp"
#include "spec_string.hpp"

namespace aniflow {

void FlowSpec::validate() const {
  if (kind == FlowKind::Intermediate && !(xi > 0.0 && nu > 0.0))
    throw InvalidArgument("intermediate flow requires xi > 0 and nu > 0");
}

std::string FlowSpec::name() const {
  switch (kind) {
    case FlowKind::Curvature:
      return "curvature";
    case FlowKind::AreaConserved:
      return "area_conserved";
    case FlowKind::SurfaceDiffusion:
      return "surface_diffusion";
    case FlowKind::Intermediate: {
      char buf[96];
      std::snprintf(buf, sizeof buf, "intermediate:xi=%.17g,nu=%.17g", xi, nu);
      return buf;
    }
  }
  return {};
}

FlowSpec parse_flow(std::string_view spec) {
  const detail::SpecString s = detail::parse_spec_string(spec);
  FlowSpec f;
  if (s.head == "intermediate") {
    detail::require_keys(s, {"xi", "nu"});
    f = FlowSpec::intermediate(detail::get_or(s, "xi", 1.0), detail::get_or(s, "nu", 1.0));
    f.validate();
    return f;
  }
  if (!s.params.empty()) throw InvalidArgument("flow '" + s.head + "' takes no parameters");
  if (s.head == "curvature") return FlowSpec::curvature();
  if (s.head == "area_conserved") return FlowSpec::area_conserved();
  if (s.head == "surface_diffusion") return FlowSpec::surface_diffusion();
  throw InvalidArgument("unknown flow '" + std::string(spec) + "'");
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::Completed:
      return "completed";
    case StopReason::PinchOff:
      return "pinch_off";
    case StopReason::NewtonDiverged:
      return "newton_diverged";
    case StopReason::Degenerate:
      return "degenerate";
  }
  return "unknown";
}

StepResult solve_time_step(const FlowState& state, const FlowSpec& flow, const AnisotropyDensity& density,
                           const EnergyMatrixParams& params, double tau, const SolverOptions& opts) {
  if (!(opts.newton_tol > 0.0)) throw InvalidArgument("Newton tolerance must be positive");
  if (state.mu.size() != state.curve.size()) throw SizeMismatch("mu does not match the curve");
  const StepAssembler sys(state.curve, flow, density, params, tau);

  TrialPoint guess{state.curve.vertices(), state.mu, std::nullopt};
  if (flow.has_eta()) guess.eta = helmholtz_solve(state.curve, state.mu, flow.xi, flow.nu);
  Eigen::VectorXd u = sys.pack(guess);
  Eigen::VectorXd r = sys.residual(u);
  double norm = r.lpNorm<Eigen::Infinity>();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  int iters = 0;
  while (!(norm <= opts.newton_tol)) {
    if (iters >= opts.max_newton_iters || !std::isfinite(norm)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "Newton failed at step %ld after %d iterations (residual %.3e)", state.step + 1,
                    iters, norm);
      throw NewtonDiverged(buf);
    }
    const Eigen::SparseMatrix<double> J = sys.jacobian(u);
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw NewtonDiverged("singular Newton matrix at step " + std::to_string(state.step + 1));
    u -= lu.solve(r);
    ++iters;
    r = sys.residual(u);
    norm = r.lpNorm<Eigen::Infinity>();
  }

  TrialPoint sol = sys.unpack(u);
  const std::size_t n = sol.X.size();
  double mean = 0.0, shortest = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < n; ++e) {
    const double len = (sol.X[(e + 1) % n] - sol.X[e]).norm();
    mean += len;
    shortest = std::min(shortest, len);
  }
  mean /= static_cast<double>(n);
  if (!(shortest >= 1e-14 * mean))
    throw DegenerateCurve("edge length collapsed at step " + std::to_string(state.step + 1));

  StepResult out{FlowState{PolygonalCurve(std::move(sol.X)), std::move(sol.mu), state.t + tau, state.step + 1}, {}};
  StepReport& rep = out.report;
  rep.newton_iterations = iters;
  rep.final_residual_norm = norm;
  const double a0 = enclosed_area(state.curve);
  rep.area = enclosed_area(out.state.curve);
  if (flow.conserves_area()) {
    rep.area_decay_residual = std::abs(rep.area - a0);
  } else {
    double mu_int = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu_int += sys.mass()[i] * out.state.mu[i];
    rep.area_decay_residual = std::abs((rep.area - a0) / tau + mu_int);
  }
  rep.energy = interface_energy(out.state.curve, density);
  rep.energy_delta = rep.energy - interface_energy(state.curve, density);
  return out;
}

EvolutionResult run_evolution(const PolygonalCurve& initial, const FlowSpec& flow, const AnisotropyDensity& density,
                              const EnergyMatrixParams& params, double tau, const EvolutionOptions& options) {
  return run_evolution(initial_state(initial, density, params), flow, density, params, tau, options);
}

EvolutionResult run_evolution(const FlowState& initial, const FlowSpec& flow, const AnisotropyDensity& density,
                              const EnergyMatrixParams& params, double tau, const EvolutionOptions& options) {
  if (!(tau > 0.0)) throw InvalidArgument("time step must be positive");
  if (!(options.T > 0.0)) throw InvalidArgument("final time must be positive");
  flow.validate();
  if (options.k_min) {
    const double deficit = stabilizer_deficit(params, *options.k_min);
    if (deficit > 1e-10)
      std::clog << "warning: stabilizer is below k_min by " << deficit << "; energy decay is not guaranteed\n";
  }

  EvolutionResult res{{}, {}, initial, StopReason::Completed, {}};
  FlowState cur = initial;
  res.diagnostics.push_back({cur.step, cur.t, enclosed_area(cur.curve), interface_energy(cur.curve, density),
                             weighted_mesh_ratio(cur.curve, density), 0, 0.0, 0.0});
  auto snapshot = [&](const FlowState& s) {
    if (options.on_snapshot) options.on_snapshot(s);
    if (options.keep_snapshots) res.snapshots.push_back(s);
  };
  snapshot(cur);
  bool last_snapshotted = true;

  const bool watch_pinch = options.stop_on_pinch_off && !self_intersection_check(cur.curve);
  const double t0 = cur.t;
  const long m0 = cur.step;
  const long steps = static_cast<long>(std::ceil((options.T - t0) / tau - 1e-9));

  for (long k = 1; k <= steps; ++k) {
    std::optional<StepResult> step;
    try {
      step = solve_time_step(cur, flow, density, params, tau, options.solver);
    } catch (const NewtonDiverged& e) {
      res.stop = StopReason::NewtonDiverged;
      res.message = e.what();
      break;
    } catch (const DegenerateCurve& e) {
      res.stop = StopReason::Degenerate;
      res.message = e.what();
      break;
    } catch (const DegenerateEdge& e) {
      res.stop = StopReason::Degenerate;
      res.message = e.what();
      break;
    }
    StepResult& next = *step;
    next.state.t = t0 + static_cast<double>(k) * tau;
    next.state.step = m0 + k;
    if (options.on_step) options.on_step(cur, next.state, next.report);
    res.diagnostics.push_back({next.state.step, next.state.t, next.report.area, next.report.energy,
                               weighted_mesh_ratio(next.state.curve, density), next.report.newton_iterations,
                               next.report.area_decay_residual, next.report.energy_delta});
    cur = std::move(next.state);
    last_snapshotted = false;
    if (watch_pinch && self_intersection_check(cur.curve)) {
      res.stop = StopReason::PinchOff;
      char buf[96];
      std::snprintf(buf, sizeof buf, "self-intersection at step %ld, t=%.9g", cur.step, cur.t);
      res.message = buf;
      break;
    }
    if (options.snapshot_every > 0 && k % options.snapshot_every == 0) {
      snapshot(cur);
      last_snapshotted = true;
    }
  }
  if (!last_snapshotted) snapshot(cur);
  res.final_state = cur;
  return res;
}

}  // namespace aniflow
