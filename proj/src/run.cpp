#include "aniflow/run.hpp"

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "aniflow/errors.hpp"
#include "aniflow/harness.hpp"
#include "aniflow/io.hpp"
#include "aniflow/shapes.hpp"

#ifndef ANIFLOW_VERSION
#define ANIFLOW_VERSION "unknown"
#endif

namespace aniflow {

namespace fs = std::filesystem;

int exit_code_for(StopReason reason) {
  switch (reason) {
    case StopReason::Completed: return kExitOk;
    case StopReason::PinchOff: return kExitPinchOff;
    case StopReason::NewtonDiverged: return kExitNewton;
    case StopReason::Degenerate: return kExitDegenerate;
  }
  return kExitConfig;
}

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

std::string yaml_quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + "\"";
}

std::string manifest_text(const RunConfig& c, const GeneratedCurve& shape, double margin,
                          const std::optional<StabilizerTable>& k_min, const RunOutcome* outcome) {
  std::ostringstream o;
  o << format_run_config(c);
  o << "manifest:\n";
  o << "  version: " << yaml_quote(ANIFLOW_VERSION) << "\n";
  o << "  eigen: \"" << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << "\"\n";
  o << "  shape: " << yaml_quote(shape.description) << "\n";
  if (!shape.formula.empty()) o << "  shape_formula: " << yaml_quote(shape.formula) << "\n";
  o << "  self_intersecting: " << (shape.self_intersecting ? "true" : "false") << "\n";
  o << "  stability_margin: " << format_real(margin) << "\n";
  if (outcome) {
    o << "  stop: " << stop_reason_name(outcome->stop) << "\n";
    o << "  steps: " << outcome->steps << "\n";
    o << "  final_time: " << format_real(outcome->final_time) << "\n";
    o << "  exit_code: " << outcome->exit_code << "\n";
    if (!outcome->message.empty()) o << "  message: " << yaml_quote(outcome->message) << "\n";
  }
  if (k_min) {
    o << "kmin_table:\n";
    for (int j = 0; j < StabilizerTable::kNodes; ++j) {
      char key[16];
      std::snprintf(key, sizeof key, "node_%02d", j);
      o << "  " << key << ": \"" << format_real(StabilizerTable::node(j)) << ", " << format_real(k_min->values()[j])
        << "\"\n";
    }
  }
  return o.str();
}

}  // namespace

RunOutcome run_from_config(const RunConfig& config, std::ostream& log) {
  config.validate();
  const AnisotropyDensity density = parse_density(config.density);
  const GeneratedCurve shape = generate_initial(config.shape, config.n);
  if (shape.self_intersecting && !config.allow_self_intersecting)
    throw ConfigError("shape '" + shape.description +
                      "' is self-intersecting; set solver.allow_self_intersecting to run it");

  std::optional<StabilizerTable> k_min;
  const EnergyMatrixParams params = resolve_stabilizer(density, config.alpha, config.stabilizer, &k_min);
  const double margin = stability_margin(density);
  if (!(margin > 0.0))
    log << "warning: 3 gamma(theta) >= gamma(theta - pi) fails (margin " << format_real(margin)
        << "); energy stability is not guaranteed\n";

  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
  {
    auto out = open_out(dir / "manifest.yaml");
    out << manifest_text(config, shape, margin, k_min, nullptr);
  }

  EvolutionOptions opts;
  opts.T = config.T;
  opts.solver = config.solver;
  opts.snapshot_every = config.snapshot_every;
  opts.stop_on_pinch_off = config.stop_on_pinch_off;
  if (config.stabilizer.kind != StabilizerMode::Kind::Minimal) {
    try {
      opts.k_min = k_min_table(density, config.alpha);
    } catch (const NonexistentStabilizer& e) {
      log << "warning: " << e.what() << "\n";
    }
  }
  opts.keep_snapshots = false;
  opts.on_snapshot = [&](const FlowState& s) {
    write_curve_csv((dir / ("snap_" + std::to_string(s.step) + ".csv")).string(), s.curve);
  };

  const EvolutionResult result = run_evolution(shape.curve, config.flow, density, params, config.tau, opts);

  {
    auto out = open_out(dir / "diagnostics.csv");
    write_diagnostics_header(out);
    for (const auto& row : result.diagnostics) write_diagnostics_row(out, row);
    if (!out) throw Error("write failed for diagnostics.csv");
  }

  RunOutcome outcome;
  outcome.stop = result.stop;
  outcome.exit_code = exit_code_for(result.stop);
  outcome.message = result.message;
  outcome.steps = result.final_state.step;
  outcome.final_time = result.final_state.t;
  {
    auto out = open_out(dir / "manifest.yaml");
    out << manifest_text(config, shape, margin, k_min, &outcome);
  }
  log << stop_reason_name(result.stop) << " after " << outcome.steps << " steps at t = " << format_real(outcome.final_time);
  if (!result.message.empty()) log << ": " << result.message;
  log << "\n";
  return outcome;
}

int run_sweep(const StudyConfig& sc, std::ostream& log) {
  const ConvergenceReport report = run_convergence_report(sc.study);
  const fs::path dir(sc.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
  {
    auto out = open_out(dir / "errors.csv");
    write_errors_csv(out, report.errors);
  }
  {
    auto out = open_out(dir / "audit.csv");
    write_audit_csv(out, report.cells);
  }
  {
    auto out = open_out(dir / "decay.csv");
    write_decay_csv(out, report.cells);
  }
  std::size_t failed = 0;
  for (const auto& c : report.cells)
    if (!c.note.empty() || !c.audit.passed()) ++failed;
  log << report.errors.size() << " error records, " << report.cells.size() << " cells, " << failed
      << " with failures or audit violations\n";
  return kExitOk;
}

}  // namespace aniflow
