#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "aniflow/anisotropy.hpp"
#include "aniflow/config.hpp"
#include "aniflow/curve.hpp"
#include "aniflow/errors.hpp"
#include "aniflow/io.hpp"
#include "aniflow/run.hpp"

using namespace aniflow;

int main(int argc, char** argv) {
  CLI::App app{"Parametric finite element flows for anisotropic closed curves"};
  app.require_subcommand(1);

  std::string config_path, output_override;
  auto* run = app.add_subcommand("run", "Evolve one curve from a config file");
  run->add_option("config", config_path, "Run config (YAML)")->required();
  run->add_option("-o,--output", output_override, "Override output.dir");

  std::string study_path;
  unsigned workers = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a convergence study");
  sweep->add_option("study", study_path, "Study config (YAML)")->required();
  sweep->add_option("-o,--output", output_override, "Override output.dir");
  sweep->add_option("-j,--workers", workers, "Override study.workers")->check(CLI::PositiveNumber);

  std::string density_spec;
  double alpha = 0.0;
  auto* kmin = app.add_subcommand("kmin", "Print the minimal stabilizer table as theta,value rows");
  kmin->add_option("density", density_spec, "Density spec, e.g. mfold:m=4,beta=0.0625")->required();
  kmin->add_option("--alpha", alpha, "Alpha parameter")->required();

  std::string curve_a, curve_b;
  auto* distance = app.add_subcommand("distance", "Manifold distance between two curve CSV files");
  distance->add_option("a", curve_a)->required();
  distance->add_option("b", curve_b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      RunConfig cfg = load_run_config(config_path);
      if (!output_override.empty()) cfg.output_dir = output_override;
      return run_from_config(cfg, std::cerr).exit_code;
    }
    if (*sweep) {
      StudyConfig sc = load_study_config(study_path);
      if (!output_override.empty()) sc.output_dir = output_override;
      if (workers > 0) sc.study.workers = workers;
      return run_sweep(sc, std::cerr);
    }
    if (*kmin) {
      k_min_table(parse_density(density_spec), alpha).write_csv(std::cout);
      return kExitOk;
    }
    if (*distance) {
      const double d = manifold_distance(read_curve_csv(curve_a), read_curve_csv(curve_b));
      std::cout << format_real(d) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << config_path << study_path << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const DegenerateEdge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
