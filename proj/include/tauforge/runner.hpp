#pragma once

#include <map>
#include <ostream>
#include <string>

namespace tauforge {

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

// "min:max:count"; throws ConfigError.
GridAxis parse_grid_axis(const std::string& spec);

// Flat experiment description. Axis 1 is x (kdv) or r (ernst), axis 2 is t or z.
struct ExperimentConfig {
  std::string pipeline;  // kdv, ernst, birkhoff, selftest
  std::string preset;
  std::string seed_file;
  int N = 0;
  int M = 0;
  GridAxis axis1, axis2;
  std::map<std::string, double> tol;
  std::string out_dir = "out";
  int threads = 1;
};

// Pipeline defaults; throws ConfigError for an unknown pipeline.
ExperimentConfig default_config(const std::string& pipeline);

// Keys: preset, seed_file, trunc, samples, grid (both axes), grid_x, grid_t,
// grid_r, grid_z, out, threads, tol_<name>. Throws ConfigError.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// key=value lines, '#' starts a comment; `pipeline` may appear and must
// match cfg.pipeline when both are set.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

// M >= 4N + 2, counts >= 7 for grid pipelines, tolerances > 0, threads >= 1.
void validate(const ExperimentConfig& cfg);

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 2, kExitConfig = 3, kExitBigCell = 4 };

// Runs the pipeline, writes CSV/JSON artifacts plus manifest.json into
// out_dir and returns the exit code. Progress and failures go to `log`.
int run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace tauforge
