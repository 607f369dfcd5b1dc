#include "aniflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "aniflow/errors.hpp"
#include "spec_string.hpp"

namespace aniflow {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PolygonalCurve read_curve_csv(std::istream& in) {
  std::vector<Vec2> v;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (t == "x,y") continue;
    }
    const auto comma = t.find(',');
    if (comma == std::string::npos) throw Error("curve CSV line " + std::to_string(lineno) + ": expected x,y");
    try {
      v.emplace_back(detail::parse_real(t.substr(0, comma), "x"), detail::parse_real(t.substr(comma + 1), "y"));
    } catch (const InvalidArgument& e) {
      throw Error("curve CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return PolygonalCurve(std::move(v));
}

PolygonalCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open curve file '" + path + "'");
  return read_curve_csv(in);
}

void write_curve_csv(std::ostream& out, const PolygonalCurve& curve) {
  out << "x,y\n";
  for (const Vec2& p : curve.vertices()) out << format_real(p.x()) << ',' << format_real(p.y()) << '\n';
}

void write_curve_csv(const std::string& path, const PolygonalCurve& curve) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_curve_csv(out, curve);
  if (!out) throw Error("write failed for '" + path + "'");
}

void write_diagnostics_header(std::ostream& out) {
  out << "step,t,area,energy,mesh_ratio,newton_iters,area_residual,energy_delta\n";
}

void write_diagnostics_row(std::ostream& out, const DiagnosticsRow& r) {
  out << r.step << ',' << format_real(r.t) << ',' << format_real(r.area) << ',' << format_real(r.energy) << ','
      << format_real(r.mesh_ratio) << ',' << r.newton_iters << ',' << format_real(r.area_residual) << ','
      << format_real(r.energy_delta) << '\n';
}

namespace {

std::string quoted(const std::string& s) {
  if (s.empty()) return {};
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

void write_errors_csv(std::ostream& out, const std::vector<ErrorRecord>& records) {
  out << "alpha,level,h,tau,t,error,order,note\n";
  for (const auto& r : records)
    out << format_real(r.alpha) << ',' << r.level << ',' << format_real(r.h) << ',' << format_real(r.tau) << ','
        << format_real(r.t) << ',' << format_real(r.error) << ',' << format_real(r.order) << ',' << quoted(r.note)
        << '\n';
}

void write_audit_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "alpha,level,N,steps,max_identity_residual,identity_tolerance,max_area_loss,max_energy_increase,"
         "mean_newton_iters,passed,note\n";
  for (const auto& c : cells)
    out << format_real(c.alpha) << ',' << c.level << ',' << c.n << ',' << c.audit.identity_residuals.size() << ','
        << format_real(c.audit.max_identity_residual) << ',' << format_real(c.audit.identity_tolerance) << ','
        << format_real(c.audit.max_normalized_area_loss) << ',' << format_real(c.audit.max_energy_increase) << ','
        << format_real(c.mean_newton_iterations) << ',' << (c.note.empty() && c.audit.passed() ? "true" : "false")
        << ',' << quoted(c.note) << '\n';
}

void write_decay_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "alpha,level,N,decay_rate\n";
  for (const auto& c : cells)
    out << format_real(c.alpha) << ',' << c.level << ',' << c.n << ',' << format_real(c.decay_rate) << '\n';
}

}  // namespace aniflow
