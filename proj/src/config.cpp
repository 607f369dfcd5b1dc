#include "aniflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "aniflow/errors.hpp"
#include "aniflow/shapes.hpp"
#include "spec_string.hpp"

namespace aniflow {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

double parse_config_real(const std::string& text) {
  const std::string t = detail::trim(text);
  const auto caret = t.find('^');
  if (caret == std::string::npos) return detail::parse_real(t, "value");
  const double base = detail::parse_real(t.substr(0, caret), "base");
  const double expo = detail::parse_real(t.substr(caret + 1), "exponent");
  return std::pow(base, expo);
}

ConfigFile ConfigFile::parse(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1);
  }
  ConfigFile cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) throw ConfigError("expected a mapping of sections", root.Mark().line + 1);
  for (const auto& sec : root) {
    const std::string name = sec.first.as<std::string>();
    const int sec_line = sec.first.Mark().line + 1;
    if (cfg.section_lines_.count(name)) throw ConfigError("duplicate section '" + name + "'", sec_line);
    cfg.section_lines_[name] = sec_line;
    auto& entries = cfg.sections_[name];
    if (sec.second.IsNull()) continue;
    if (!sec.second.IsMap()) throw ConfigError("section '" + name + "' must be a mapping", sec_line);
    for (const auto& kv : sec.second) {
      const std::string key = kv.first.as<std::string>();
      const int line = kv.first.Mark().line + 1;
      if (entries.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
      std::string value;
      if (kv.second.IsScalar()) {
        value = kv.second.Scalar();
      } else if (kv.second.IsSequence()) {
        for (const auto& item : kv.second) {
          if (!item.IsScalar()) throw ConfigError("list '" + key + "' must hold scalars", line);
          value += (value.empty() ? "" : ",") + item.Scalar();
        }
      } else if (!kv.second.IsNull()) {
        throw ConfigError("value of '" + key + "' must be a scalar or a list", line);
      }
      entries[key] = Entry{detail::trim(value), line};
    }
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) { return parse(read_file(path)); }

const ConfigFile::Entry* ConfigFile::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const { return find(section, key); }

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

std::string ConfigFile::require_string(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key '" + key + "' in [" + section + "]");
  return e->value;
}

double ConfigFile::get_real(const std::string& section, const std::string& key, double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  try {
    return parse_config_real(e->value);
  } catch (const InvalidArgument& ex) {
    throw ConfigError(key + ": " + ex.what(), e->line);
  }
}

double ConfigFile::require_real(const std::string& section, const std::string& key) const {
  if (!find(section, key)) throw ConfigError("missing required key '" + key + "' in [" + section + "]");
  return get_real(section, key, 0.0);
}

long ConfigFile::get_int(const std::string& section, const std::string& key, long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  const double v = get_real(section, key, 0.0);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(key + ": expected an integer", e->line);
  return static_cast<long>(v);
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "yes" || e->value == "on" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "off" || e->value == "0") return false;
  throw ConfigError(key + ": expected true or false", e->line);
}

std::vector<double> ConfigFile::get_real_list(const std::string& section, const std::string& key,
                                              const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (detail::trim(item).empty()) continue;
    try {
      out.push_back(parse_config_real(item));
    } catch (const InvalidArgument& ex) {
      throw ConfigError(key + ": " + ex.what(), e->line);
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty list", e->line);
  return out;
}

void ConfigFile::check_known(const std::map<std::string, std::vector<std::string>>& known,
                             const std::vector<std::string>& ignored) const {
  for (const auto& [section, keys] : sections_) {
    if (std::find(ignored.begin(), ignored.end(), section) != ignored.end()) continue;
    const auto k = known.find(section);
    if (k == known.end()) {
      const auto l = section_lines_.find(section);
      throw ConfigError("unknown section [" + section + "]", l == section_lines_.end() ? 0 : l->second);
    }
    for (const auto& [key, entry] : keys)
      if (std::find(k->second.begin(), k->second.end(), key) == k->second.end())
        throw ConfigError("unknown key '" + key + "' in [" + section + "]", entry.line);
  }
}

// ---------------------------------------------------------------------------

void RunConfig::validate() const {
  flow.validate();
  if (n < 3) throw ConfigError("N must be at least 3");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (snapshot_every < 0) throw ConfigError("snapshot_every must be nonnegative");
  if (!(solver.newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
  if (solver.max_newton_iters < 1) throw ConfigError("max_newton_iters must be at least 1");
}

namespace {

const std::map<std::string, std::vector<std::string>> kRunKeys = {
    {"flow", {"kind", "xi", "nu"}},
    {"anisotropy", {"density", "alpha", "stabilizer"}},
    {"curve", {"shape", "N"}},
    {"time", {"tau", "T"}},
    {"solver", {"newton_tol", "max_newton_iters", "stop_on_pinch_off", "allow_self_intersecting"}},
    {"output", {"dir", "snapshot_every"}},
    {"run", {"seed"}},
};

template <class F>
auto with_line(const ConfigFile& file, const std::string& section, const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    const ConfigFile::Entry* entry = file.find(section, key);
    throw ConfigError(key + ": " + e.what(), entry ? entry->line : 0);
  }
}

}  // namespace

RunConfig parse_run_config(const ConfigFile& file) {
  file.check_known(kRunKeys, {"manifest", "kmin_table"});
  RunConfig c;
  const std::string kind = file.get_string("flow", "kind", "curvature");
  with_line(file, "flow", "kind", [&] {
    c.flow = parse_flow(kind);
    if (c.flow.kind == FlowKind::Intermediate) {
      c.flow.xi = file.get_real("flow", "xi", c.flow.xi);
      c.flow.nu = file.get_real("flow", "nu", c.flow.nu);
    }
    c.flow.validate();
    return 0;
  });
  c.density = file.get_string("anisotropy", "density", c.density);
  with_line(file, "anisotropy", "density", [&] { return parse_density(c.density).name(); });
  c.alpha = file.get_real("anisotropy", "alpha", c.alpha);
  c.stabilizer = with_line(file, "anisotropy", "stabilizer", [&] {
    return StabilizerMode::parse(file.get_string("anisotropy", "stabilizer", "minimal"));
  });
  c.shape = file.get_string("curve", "shape", c.shape);
  const long n = file.get_int("curve", "N", static_cast<long>(c.n));
  if (n < 3) throw ConfigError("N must be at least 3", file.find("curve", "N") ? file.find("curve", "N")->line : 0);
  c.n = static_cast<std::size_t>(n);
  with_line(file, "curve", "shape", [&] { return generate_initial(c.shape, c.n).description; });
  c.tau = file.get_real("time", "tau", c.tau);
  c.T = file.get_real("time", "T", c.T);
  c.solver.newton_tol = file.get_real("solver", "newton_tol", c.solver.newton_tol);
  c.solver.max_newton_iters = static_cast<int>(file.get_int("solver", "max_newton_iters", c.solver.max_newton_iters));
  c.stop_on_pinch_off = file.get_bool("solver", "stop_on_pinch_off", c.flow.kind == FlowKind::SurfaceDiffusion);
  c.allow_self_intersecting = file.get_bool("solver", "allow_self_intersecting", false);
  c.output_dir = file.get_string("output", "dir", c.output_dir);
  c.snapshot_every = file.get_int("output", "snapshot_every", c.snapshot_every);
  const long seed = file.get_int("run", "seed", 0);
  if (seed < 0) throw ConfigError("seed must be nonnegative", file.find("run", "seed")->line);
  c.seed = static_cast<std::uint64_t>(seed);

  auto line_of = [&](const char* s, const char* k) {
    const ConfigFile::Entry* e = file.find(s, k);
    return e ? e->line : 0;
  };
  if (!(c.tau > 0.0)) throw ConfigError("tau must be positive", line_of("time", "tau"));
  if (!(c.T > 0.0)) throw ConfigError("T must be positive", line_of("time", "T"));
  if (c.snapshot_every < 0) throw ConfigError("snapshot_every must be nonnegative", line_of("output", "snapshot_every"));
  if (!(c.solver.newton_tol > 0.0)) throw ConfigError("newton_tol must be positive", line_of("solver", "newton_tol"));
  if (c.solver.max_newton_iters < 1)
    throw ConfigError("max_newton_iters must be at least 1", line_of("solver", "max_newton_iters"));
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(ConfigFile::load(path)); }

std::string format_run_config(const RunConfig& c) {
  std::ostringstream o;
  const std::string kind = c.flow.kind == FlowKind::Intermediate ? "intermediate" : c.flow.name();
  o << "flow:\n  kind: " << kind << "\n";
  if (c.flow.kind == FlowKind::Intermediate) o << "  xi: " << num(c.flow.xi) << "\n  nu: " << num(c.flow.nu) << "\n";
  o << "anisotropy:\n  density: \"" << c.density << "\"\n  alpha: " << num(c.alpha) << "\n  stabilizer: \""
    << c.stabilizer.str() << "\"\n";
  o << "curve:\n  shape: \"" << c.shape << "\"\n  N: " << c.n << "\n";
  o << "time:\n  tau: " << num(c.tau) << "\n  T: " << num(c.T) << "\n";
  o << "solver:\n  newton_tol: " << num(c.solver.newton_tol) << "\n  max_newton_iters: " << c.solver.max_newton_iters
    << "\n  stop_on_pinch_off: " << (c.stop_on_pinch_off ? "true" : "false")
    << "\n  allow_self_intersecting: " << (c.allow_self_intersecting ? "true" : "false") << "\n";
  o << "output:\n  dir: \"" << c.output_dir << "\"\n  snapshot_every: " << c.snapshot_every << "\n";
  o << "run:\n  seed: " << c.seed << "\n";
  return o.str();
}

// ---------------------------------------------------------------------------

namespace {

const std::map<std::string, std::vector<std::string>> kStudyKeys = {
    {"study",
     {"flow", "xi", "nu", "density", "alphas", "stabilizer", "shape", "n0", "levels", "tau_factor", "times",
      "reference", "reference_n", "circle_r0", "exact_circle_vertices", "workers"}},
    {"solver", {"newton_tol", "max_newton_iters"}},
    {"output", {"dir"}},
};

}  // namespace

StudyConfig parse_study_config(const ConfigFile& file) {
  file.check_known(kStudyKeys);
  StudyConfig sc;
  ConvergenceStudy& s = sc.study;
  with_line(file, "study", "flow", [&] {
    s.flow = parse_flow(file.get_string("study", "flow", "curvature"));
    if (s.flow.kind == FlowKind::Intermediate) {
      s.flow.xi = file.get_real("study", "xi", s.flow.xi);
      s.flow.nu = file.get_real("study", "nu", s.flow.nu);
    }
    s.flow.validate();
    return 0;
  });
  s.density = file.get_string("study", "density", s.density);
  with_line(file, "study", "density", [&] { return parse_density(s.density).name(); });
  s.alphas = file.get_real_list("study", "alphas", s.alphas);
  s.stabilizer = with_line(file, "study", "stabilizer", [&] {
    return StabilizerMode::parse(file.get_string("study", "stabilizer", "minimal"));
  });
  s.shape = file.get_string("study", "shape", s.shape);
  with_line(file, "study", "shape", [&] { return generate_initial(s.shape, 16).description; });
  auto line_of = [&](const char* k) {
    const ConfigFile::Entry* e = file.find("study", k);
    return e ? e->line : 0;
  };
  const long n0 = file.get_int("study", "n0", static_cast<long>(s.n0));
  if (n0 < 3) throw ConfigError("n0 must be at least 3", line_of("n0"));
  s.n0 = static_cast<std::size_t>(n0);
  s.levels = static_cast<int>(file.get_int("study", "levels", s.levels));
  if (s.levels < 1 || s.levels > 12) throw ConfigError("levels must be in 1..12", line_of("levels"));
  s.tau_factor = file.get_real("study", "tau_factor", s.tau_factor);
  if (!(s.tau_factor > 0.0)) throw ConfigError("tau_factor must be positive", line_of("tau_factor"));
  s.times = file.get_real_list("study", "times", s.times);
  for (double t : s.times)
    if (!(t >= 0.0)) throw ConfigError("times must be nonnegative", line_of("times"));
  const std::string ref = file.get_string("study", "reference", "fine");
  if (ref == "exact_circle") {
    s.exact_circle_reference = true;
  } else if (ref != "fine") {
    throw ConfigError("reference must be 'fine' or 'exact_circle'", line_of("reference"));
  }
  const long rn = file.get_int("study", "reference_n", static_cast<long>(s.reference_n));
  if (rn < 3) throw ConfigError("reference_n must be at least 3", line_of("reference_n"));
  s.reference_n = static_cast<std::size_t>(rn);
  if (!s.exact_circle_reference && s.reference_n <= (s.n0 << (s.levels - 1)))
    throw ConfigError("reference_n must exceed the finest level", line_of("reference_n"));
  s.circle_r0 = file.get_real("study", "circle_r0", s.circle_r0);
  const long ev = file.get_int("study", "exact_circle_vertices", static_cast<long>(s.exact_circle_vertices));
  if (ev < 3) throw ConfigError("exact_circle_vertices must be at least 3", line_of("exact_circle_vertices"));
  s.exact_circle_vertices = static_cast<std::size_t>(ev);
  const long w = file.get_int("study", "workers", 1);
  if (w < 1) throw ConfigError("workers must be at least 1", line_of("workers"));
  s.workers = static_cast<unsigned>(w);
  s.solver.newton_tol = file.get_real("solver", "newton_tol", s.solver.newton_tol);
  s.solver.max_newton_iters = static_cast<int>(file.get_int("solver", "max_newton_iters", s.solver.max_newton_iters));
  sc.output_dir = file.get_string("output", "dir", sc.output_dir);
  return sc;
}

StudyConfig load_study_config(const std::string& path) { return parse_study_config(ConfigFile::load(path)); }

}  // namespace aniflow
