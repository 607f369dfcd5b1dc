#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aniflow/curve.hpp"
#include "aniflow/harness.hpp"
#include "aniflow/solver.hpp"

namespace aniflow {

/// Curve CSV: header `x,y`, one vertex per row, closure implied.
PolygonalCurve read_curve_csv(std::istream& in);
PolygonalCurve read_curve_csv(const std::string& path);
void write_curve_csv(std::ostream& out, const PolygonalCurve& curve);
void write_curve_csv(const std::string& path, const PolygonalCurve& curve);

/// Header `step,t,area,energy,mesh_ratio,newton_iters,area_residual,energy_delta`.
void write_diagnostics_header(std::ostream& out);
void write_diagnostics_row(std::ostream& out, const DiagnosticsRow& row);

/// `alpha,level,h,tau,t,error,order,note`.
void write_errors_csv(std::ostream& out, const std::vector<ErrorRecord>& records);
/// `alpha,level,N,steps,max_identity_residual,identity_tolerance,max_area_loss,max_energy_increase,mean_newton_iters,passed,note`.
void write_audit_csv(std::ostream& out, const std::vector<CellSummary>& cells);
/// `alpha,level,N,decay_rate`.
void write_decay_csv(std::ostream& out, const std::vector<CellSummary>& cells);

/// `%.17g`.
std::string format_real(double v);

}  // namespace aniflow
