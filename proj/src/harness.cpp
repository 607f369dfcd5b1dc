#include "aniflow/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "aniflow/errors.hpp"
#include "aniflow/shapes.hpp"
#include "spec_string.hpp"

namespace aniflow {

StabilizerMode StabilizerMode::parse(const std::string& text) {
  const std::string t = detail::trim(text);
  StabilizerMode m;
  if (t == "minimal") return m;
  if (t.rfind("constant:", 0) == 0) {
    m.kind = Kind::Constant;
    m.constant = detail::parse_real(t.substr(9), "stabilizer constant");
    return m;
  }
  if (t.rfind("file:", 0) == 0) {
    m.kind = Kind::File;
    m.path = detail::trim(t.substr(5));
    if (m.path.empty()) throw InvalidArgument("stabilizer file path is empty");
    return m;
  }
  throw InvalidArgument("stabilizer must be 'minimal', 'constant:<c>' or 'file:<path>', got '" + t + "'");
}

std::string StabilizerMode::str() const {
  switch (kind) {
    case Kind::Minimal:
      return "minimal";
    case Kind::Constant: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "constant:%.17g", constant);
      return buf;
    }
    case Kind::File:
      return "file:" + path;
  }
  return {};
}

EnergyMatrixParams resolve_stabilizer(const AnisotropyDensity& density, double alpha, const StabilizerMode& mode,
                                      std::optional<StabilizerTable>* k_min_out) {
  switch (mode.kind) {
    case StabilizerMode::Kind::Minimal: {
      StabilizerTable table = k_min_table(density, alpha);
      if (k_min_out) *k_min_out = table;
      return {alpha, Stabilizer(std::move(table))};
    }
    case StabilizerMode::Kind::Constant:
      return {alpha, Stabilizer::constant(mode.constant)};
    case StabilizerMode::Kind::File: {
      std::ifstream in(mode.path);
      if (!in) throw Error("cannot open stabilizer file '" + mode.path + "'");
      return {alpha, Stabilizer(StabilizerTable::read_csv(in))};
    }
  }
  throw InvalidArgument("bad stabilizer mode");
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<PolygonalCurve> capture_at_times(const PolygonalCurve& initial, const FlowSpec& flow,
                                             const AnisotropyDensity& density, const EnergyMatrixParams& params,
                                             double tau, const std::vector<double>& times, const SolverOptions& solver,
                                             std::optional<EvolutionResult>* series) {
  if (times.empty()) return {};
  if (!std::is_sorted(times.begin(), times.end())) throw InvalidArgument("capture times must be sorted");
  if (times.front() < 0.0) throw InvalidArgument("capture times must be nonnegative");

  std::vector<std::optional<PolygonalCurve>> got(times.size());
  std::size_t idx = 0;
  while (idx < times.size() && times[idx] <= 0.0) got[idx++] = initial;

  EvolutionOptions opts;
  opts.T = times.back();
  opts.solver = solver;
  opts.keep_snapshots = false;
  opts.on_step = [&](const FlowState& prev, const FlowState& next, const StepReport&) {
    const double slack = 1e-12 * tau;
    while (idx < times.size() && times[idx] <= next.t + slack) {
      const double lambda = std::clamp((times[idx] - prev.t) / (next.t - prev.t), 0.0, 1.0);
      got[idx++] = interpolate_curves(prev.curve, next.curve, lambda);
    }
  };
  if (idx < times.size()) {
    EvolutionResult res = run_evolution(initial, flow, density, params, tau, opts);
    if (series) *series = res;
    if (idx < times.size())
      throw Error("evolution stopped (" + std::string(stop_reason_name(res.stop)) + ") before t=" +
                  std::to_string(times[idx]) + ": " + res.message);
  }
  std::vector<PolygonalCurve> out;
  out.reserve(got.size());
  for (auto& c : got) out.push_back(std::move(*c));
  return out;
}

PolygonalCurve exact_circle(double r0, double t, std::size_t vertices) {
  const double r2 = r0 * r0 - 2.0 * t;
  if (!(r2 > 0.0)) throw InvalidArgument("the exact circle has vanished by t=" + std::to_string(t));
  const double r = std::sqrt(r2);
  std::vector<Vec2> v(vertices);
  for (std::size_t j = 0; j < vertices; ++j) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(vertices);
    v[j] = Vec2(r * std::cos(phi), r * std::sin(phi));
  }
  return PolygonalCurve(std::move(v));
}

std::vector<ErrorRecord> run_convergence(const ConvergenceStudy& study) { return run_convergence_report(study).errors; }

ConvergenceReport run_convergence_report(const ConvergenceStudy& study) {
  if (study.levels < 1) throw InvalidArgument("a study needs at least one level");
  if (study.times.empty()) throw InvalidArgument("a study needs at least one evaluation time");
  const std::size_t finest = study.n0 << (study.levels - 1);
  if (!study.exact_circle_reference && study.reference_n <= finest)
    throw InvalidArgument("reference mesh must be strictly finer than every level");
  const AnisotropyDensity density = parse_density(study.density);
  std::vector<double> times = study.times;
  std::sort(times.begin(), times.end());

  struct Job {
    std::size_t alpha_index;
    int level;  // -1: reference
    std::size_t n;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < study.alphas.size(); ++a) {
    if (!study.exact_circle_reference) jobs.push_back({a, -1, study.reference_n});
    for (int l = 0; l < study.levels; ++l) jobs.push_back({a, l, study.n0 << l});
  }

  std::vector<std::vector<PolygonalCurve>> curves(jobs.size());
  std::vector<std::string> failures(jobs.size());
  std::vector<CellSummary> cells(jobs.size());
  std::vector<std::optional<EnergyMatrixParams>> params(study.alphas.size());
  std::vector<std::string> param_failure(study.alphas.size());
  for (std::size_t a = 0; a < study.alphas.size(); ++a) {
    try {
      params[a] = resolve_stabilizer(density, study.alphas[a], study.stabilizer);
    } catch (const std::exception& e) {
      param_failure[a] = e.what();
    }
  }

  parallel_for(jobs.size(), study.workers, [&](std::size_t j) {
    const Job& job = jobs[j];
    CellSummary& cell = cells[j];
    cell.alpha = study.alphas[job.alpha_index];
    cell.level = job.level;
    cell.n = job.n;
    if (!params[job.alpha_index]) {
      failures[j] = cell.note = param_failure[job.alpha_index];
      return;
    }
    std::optional<EvolutionResult> series;
    try {
      const double h = 1.0 / static_cast<double>(job.n);
      const PolygonalCurve init = generate_initial(study.shape, job.n).curve;
      curves[j] = capture_at_times(init, study.flow, density, *params[job.alpha_index], study.tau_factor * h * h,
                                   times, study.solver, &series);
    } catch (const std::exception& e) {
      failures[j] = cell.note = e.what();
    }
    if (series && series->diagnostics.size() >= 2) {
      cell.audit = audit_structure(*series, study.flow);
      double iters = 0.0;
      for (const auto& row : series->diagnostics) iters += row.newton_iters;
      cell.mean_newton_iterations = iters / static_cast<double>(series->diagnostics.size() - 1);
      if (series->diagnostics.size() >= 4) cell.decay_rate = decay_rate_estimate(*series);
    }
  });

  ConvergenceReport report;
  report.cells = std::move(cells);
  std::vector<ErrorRecord>& out = report.errors;
  std::size_t j = 0;
  for (std::size_t a = 0; a < study.alphas.size(); ++a) {
    std::size_t ref_job = 0;
    if (!study.exact_circle_reference) ref_job = j++;
    std::vector<std::vector<double>> errs(study.levels, std::vector<double>(times.size()));
    for (int l = 0; l < study.levels; ++l, ++j) {
      for (std::size_t k = 0; k < times.size(); ++k) {
        ErrorRecord rec;
        rec.alpha = study.alphas[a];
        rec.level = l;
        rec.n = jobs[j].n;
        rec.h = 1.0 / static_cast<double>(rec.n);
        rec.tau = study.tau_factor * rec.h * rec.h;
        rec.t = times[k];
        rec.error = std::numeric_limits<double>::quiet_NaN();
        try {
          if (!failures[j].empty()) throw Error(failures[j]);
          if (!study.exact_circle_reference && !failures[ref_job].empty())
            throw Error("reference: " + failures[ref_job]);
          const PolygonalCurve ref = study.exact_circle_reference
                                         ? exact_circle(study.circle_r0, times[k], study.exact_circle_vertices)
                                         : curves[ref_job][k];
          rec.error = manifold_distance(curves[j][k], ref);
        } catch (const std::exception& e) {
          rec.note = e.what();
        }
        errs[l][k] = rec.error;
        if (l > 0) {
          const double prev = errs[l - 1][k];
          if (prev > 0.0 && rec.error > 0.0 && std::isfinite(prev) && std::isfinite(rec.error))
            rec.order = std::log2(prev / rec.error) / std::log2(static_cast<double>(rec.n) / jobs[j - 1].n);
          else if (rec.note.empty())
            rec.note = "order undefined";
        }
        out.push_back(std::move(rec));
      }
    }
  }
  return report;
}

AreaDecayAudit audit_structure(const EvolutionResult& series, const FlowSpec& flow) {
  AreaDecayAudit audit;
  const auto& rows = series.diagnostics;
  if (rows.size() < 2) {
    audit.summary = "no steps";
    return audit;
  }
  const double a0 = rows.front().area;
  const double w0 = rows.front().energy;
  const double tau = rows[1].t - rows[0].t;
  audit.identity_tolerance =
      flow.conserves_area() ? 1e-12 * std::abs(a0) : 1e-11 * std::max(1.0, std::abs(a0) / tau);
  for (std::size_t m = 1; m < rows.size(); ++m) {
    audit.identity_residuals.push_back(rows[m].area_residual);
    audit.max_identity_residual = std::max(audit.max_identity_residual, rows[m].area_residual);
    const double loss = a0 != 0.0 ? (rows[m].area - a0) / a0 : rows[m].area - a0;
    audit.normalized_area_loss.push_back(loss);
    audit.max_normalized_area_loss = std::max(audit.max_normalized_area_loss, std::abs(loss));
    audit.max_energy_increase = std::max(audit.max_energy_increase, rows[m].energy_delta / w0);
  }
  audit.area_ok = audit.max_identity_residual <= audit.identity_tolerance;
  audit.energy_ok = audit.max_energy_increase <= 1e-12;
  char buf[256];
  std::snprintf(buf, sizeof buf, "steps=%zu identity=%.3e (tol %.3e) area_loss=%.3e energy_increase=%.3e %s",
                rows.size() - 1, audit.max_identity_residual, audit.identity_tolerance,
                audit.max_normalized_area_loss, audit.max_energy_increase, audit.passed() ? "PASS" : "FAIL");
  audit.summary = buf;
  return audit;
}

double decay_rate_estimate(const std::vector<DiagnosticsRow>& rows) {
  if (rows.size() < 4) throw InvalidArgument("decay rate fit needs at least 4 rows");
  const std::size_t start = rows.size() / 2;
  const double n = static_cast<double>(rows.size() - start);
  double st = 0.0, sa = 0.0;
  for (std::size_t i = start; i < rows.size(); ++i) {
    st += rows[i].t;
    sa += rows[i].area;
  }
  const double mt = st / n, ma = sa / n;
  double stt = 0.0, sta = 0.0;
  for (std::size_t i = start; i < rows.size(); ++i) {
    stt += (rows[i].t - mt) * (rows[i].t - mt);
    sta += (rows[i].t - mt) * (rows[i].area - ma);
  }
  return sta / stt;
}

}  // namespace aniflow
