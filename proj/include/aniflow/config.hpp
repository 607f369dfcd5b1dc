#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "aniflow/harness.hpp"
#include "aniflow/solver.hpp"

namespace aniflow {

/// YAML document of sections, each a mapping of scalars or scalar lists.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const Entry* find(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& section, const std::string& key) const;
  double get_real(const std::string& section, const std::string& key, double fallback) const;
  double require_real(const std::string& section, const std::string& key) const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_real_list(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const;

  /// Throws ConfigError at the first key not listed; `ignored` sections are skipped entirely.
  void check_known(const std::map<std::string, std::vector<std::string>>& known,
                   const std::vector<std::string>& ignored = {}) const;

  const std::map<std::string, std::map<std::string, Entry>>& sections() const { return sections_; }

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

/// Parses a real number, also accepting `base^exponent` (e.g. `4^-7`).
double parse_config_real(const std::string& text);

struct RunConfig {
  FlowSpec flow = FlowSpec::curvature();
  std::string density = "iso";
  double alpha = 0.0;
  StabilizerMode stabilizer;
  std::string shape = "circle:r=1";
  std::size_t n = 64;
  double tau = 1.0 / 4096.0;
  double T = 0.1;
  long snapshot_every = 0;
  std::string output_dir = "out";
  bool stop_on_pinch_off = false;
  bool allow_self_intersecting = false;
  std::uint64_t seed = 0;
  SolverOptions solver;

  void validate() const;
};

RunConfig parse_run_config(const ConfigFile& file);
RunConfig load_run_config(const std::string& path);
/// Config text that parses back to an identical RunConfig (reals printed with 17 digits).
std::string format_run_config(const RunConfig& config);

struct StudyConfig {
  ConvergenceStudy study;
  std::string output_dir = "study";
};

StudyConfig parse_study_config(const ConfigFile& file);
StudyConfig load_study_config(const std::string& path);

}  // namespace aniflow
