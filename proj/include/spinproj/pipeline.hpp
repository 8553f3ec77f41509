#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spinproj/config.hpp"

namespace spinproj {

inline constexpr const char* kSoftwareName = "spinproj";
std::string software_version();

/// Failure inside one stage; what() is prefixed with the stage name.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(Stage stage, const std::string& message);
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

struct StageRecord {
  Stage stage = Stage::kInitial;
  double energy = 0.0;
  std::optional<double> fidelity;  ///< ground-level fidelity, when the oracle ran
  double probability = 1.0;        ///< post-selection probability of this stage
  double j_squared = 0.0;
  double wall_time_seconds = 0.0;
};

struct RunManifest {
  nlohmann::json json;
  std::vector<StageRecord> stages;
  std::optional<double> reference_energy;
  std::filesystem::path directory;

  const StageRecord* find(Stage s) const;
};

/// Runs the configured stages and writes manifest.json plus the CSV
/// artifacts into `out_dir`. Throws ConfigError for an invalid config.
RunManifest run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Writes census.json; the config must describe a Heisenberg lattice.
nlohmann::json run_census(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// One pipeline per seed in `config.sweep_seeds`, each in out_dir/seed_<s>,
/// executed by `workers` threads. Writes sweep.json.
nlohmann::json run_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         std::size_t workers);

/// Name of the environment variable read by sweep_workers_from_env().
inline constexpr const char* kWorkersEnv = "SPINPROJ_WORKERS";
/// Worker count from SPINPROJ_WORKERS, else the hardware concurrency (at least 1).
std::size_t sweep_workers_from_env();

}  // namespace spinproj
