#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tauforge/errors.hpp"
#include "tauforge/runner.hpp"

namespace {

using tauforge::ExperimentConfig;

struct Pipeline {
  std::string name;
  CLI::App* cmd = nullptr;
  std::optional<std::string> config;
  // setting key -> value given on the command line
  std::map<std::string, std::optional<std::string>> settings;
};

void add_setting(Pipeline& p, const std::string& flag, const std::string& key, const std::string& help) {
  p.cmd->add_option(flag, p.settings[key], help)->allow_extra_args(false);
}

void declare(Pipeline& p, CLI::App& app, const std::string& help) {
  p.cmd = app.add_subcommand(p.name, help);
  const ExperimentConfig d = tauforge::default_config(p.name);
  p.cmd->add_option("--config", p.config, "flat key=value file, overridden by flags");
  add_setting(p, "--threads", "threads", "worker threads (default TAUFORGE_THREADS or 1)");
  add_setting(p, "--out", "out", "output directory");
  if (p.name == "selftest") return;
  add_setting(p, "--preset", "preset", "preset name with optional :key=value,... parameters");
  add_setting(p, "--seed-file", "seed_file", "loop JSON file used instead of a preset");
  add_setting(p, "--trunc", "trunc", "truncation order N (default " + std::to_string(d.N) + ")");
  add_setting(p, "--samples", "samples", "circle sample count M (default " + std::to_string(d.M) + ")");
  if (p.name == "kdv" || p.name == "ernst") {
    const std::string a1 = p.name == "kdv" ? "x" : "r", a2 = p.name == "kdv" ? "t" : "z";
    add_setting(p, "--grid", "grid", "min:max:count for both axes");
    add_setting(p, "--grid-" + a1, "grid_" + a1, "min:max:count for " + a1);
    add_setting(p, "--grid-" + a2, "grid_" + a2, "min:max:count for " + a2);
  }
  for (const auto& [k, v] : d.tol) {
    std::string flag = "--tol-" + k;
    for (char& c : flag)
      if (c == '_') c = '-';
    std::ostringstream def;
    def << v;
    add_setting(p, flag, "tol_" + k, "tolerance (default " + def.str() + ")");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tau-forge: tau functions from loop-group factorizations"};
  app.require_subcommand(1);
  std::vector<Pipeline> pipelines{{"selftest"}, {"kdv"}, {"ernst"}, {"birkhoff"}};
  declare(pipelines[0], app, "run the property suite of every module");
  declare(pipelines[1], app, "KdV pipeline: log tau, q and u on an (x, t) grid");
  declare(pipelines[2], app, "Ernst pipeline: log tau on an (r, z) grid for a Weyl potential");
  declare(pipelines[3], app, "factorize one loop gamma = g_minus g_plus^-1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return tauforge::kExitConfig;
  }

  for (Pipeline& p : pipelines) {
    if (!p.cmd->parsed()) continue;
    ExperimentConfig cfg;
    try {
      cfg = tauforge::default_config(p.name);
      if (p.config) tauforge::apply_config_file(cfg, *p.config);
      for (const auto& [key, value] : p.settings)
        if (value) tauforge::apply_setting(cfg, key, *value);
    } catch (const tauforge::ConfigError& e) {
      std::cerr << "error: configuration: " << e.what() << "\n";
      return tauforge::kExitConfig;
    }
    return tauforge::run(cfg, std::cout);
  }
  return tauforge::kExitConfig;
}
