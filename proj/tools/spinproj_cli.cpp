#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spinproj/config.hpp"
#include "spinproj/pipeline.hpp"

using namespace spinproj;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> stages;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, Options& o, bool config_required) {
  auto* c = cmd->add_option("-c,--config", o.config_path, "experiment config file");
  if (config_required) c->required();
  c->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", o.out, "output directory (overrides out_dir)");
  cmd->add_option("--seed", o.seed, "RNG seed (overrides seed)");
  cmd->add_option("--stages", o.stages, "comma-separated stages (overrides stages)");
}

int report(const std::vector<ConfigIssue>& issues) {
  for (const auto& i : issues) std::cerr << "config error: " << format_issue(i) << "\n";
  return kExitConfig;
}

// Loads the config and applies command-line overrides. Returns nullopt and
// prints issues when anything is wrong.
std::optional<ExperimentConfig> load(const Options& o) {
  ExperimentConfig config;
  if (!o.config_path.empty()) {
    ParsedConfig parsed = load_config(o.config_path);
    if (!parsed.issues.empty()) {
      report(parsed.issues);
      return std::nullopt;
    }
    config = parsed.config;
  }
  if (o.out) config.out_dir = *o.out;
  if (o.seed) config.seed = *o.seed;
  if (o.stages) {
    try {
      config.stages = parse_stage_list(*o.stages);
    } catch (const std::exception& e) {
      report({{"stages", e.what(), 0}});
      return std::nullopt;
    }
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry-projected VQE on a statevector simulator"};
  app.set_version_flag("--version", software_version());
  app.require_subcommand(1);

  Options opts;
  auto* run = app.add_subcommand("run", "run the configured pipeline once");
  add_common(run, opts, true);
  auto* sweep = app.add_subcommand("sweep", "run the pipeline for every seed in sweep_seeds");
  add_common(sweep, opts, true);
  sweep->add_option("-j,--workers", opts.workers, "parallel runs (default: $SPINPROJ_WORKERS or #cores)");
  auto* census = app.add_subcommand("census", "symmetry-sector census of the Heisenberg lattice");
  add_common(census, opts, false);
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  add_common(validate, opts, true);

  CLI11_PARSE(app, argc, argv);

  const auto config = load(opts);
  if (!config) return kExitConfig;

  try {
    if (*validate) {
      const auto issues = validate_config(*config);
      if (!issues.empty()) return report(issues);
      std::cout << to_text(config->resolved());
      return 0;
    }
    if (*census) {
      const auto j = run_census(*config, config->out_dir);
      std::cout << j["sectors"].dump(2) << "\n";
      return 0;
    }
    if (*run) {
      const RunManifest m = run_pipeline(*config, config->out_dir);
      for (const auto& r : m.stages) {
        std::cout << to_string(r.stage) << " E=" << r.energy;
        if (r.fidelity) std::cout << " F=" << *r.fidelity;
        std::cout << "\n";
      }
      std::cout << "wrote " << (m.directory / "manifest.json").string() << "\n";
      return 0;
    }
    if (*sweep) {
      const std::size_t workers = opts.workers.value_or(sweep_workers_from_env());
      const auto j = run_sweep(*config, config->out_dir, workers);
      int failures = 0;
      for (const auto& r : j["runs"])
        if (r.contains("error")) {
          std::cerr << "seed " << r["seed"] << ": " << r["error"].get<std::string>() << "\n";
          ++failures;
        }
      std::cout << "wrote " << config->out_dir << "/sweep.json\n";
      return failures ? kExitRuntime : 0;
    }
  } catch (const ConfigError& e) {
    return report(e.issues());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
