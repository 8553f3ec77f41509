#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinproj/ansatz.hpp"
#include "spinproj/vqe.hpp"

namespace spinproj {

enum class ModelKind { kHeisenberg, kNeutrino };

std::string_view to_string(ModelKind m);
ModelKind parse_model(std::string_view name);

/// Pipeline stages in execution order.
enum class Stage { kInitial, kProjection, kVqe, kSymmetrize, kOracle };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view name);
/// Comma-separated stage names; result is sorted into execution order.
std::vector<Stage> parse_stage_list(std::string_view list);

/// One experiment. Fields left at their defaults pick model-specific values
/// through resolved().
struct ExperimentConfig {
  ModelKind model = ModelKind::kHeisenberg;
  std::size_t nx = 4;
  std::size_t ny = 3;
  std::size_t n = 12;  ///< particle count for the neutrino model
  std::optional<std::uint64_t> seed;
  std::size_t projection_iterations = 11;
  std::optional<AnsatzStrategy> strategy;
  std::optional<std::size_t> layers;
  std::optional<std::size_t> n_gates;
  OptimizerSettings optimizer;
  std::optional<bool> symmetrize;
  std::vector<Stage> stages{Stage::kInitial, Stage::kProjection, Stage::kVqe, Stage::kSymmetrize,
                            Stage::kOracle};
  std::vector<std::uint64_t> sweep_seeds{1, 2, 3, 4};
  std::string out_dir = "out";
  bool emit_trace = true;
  bool emit_fidelity_spectrum = true;
  bool emit_census = false;

  std::size_t num_qubits() const { return model == ModelKind::kHeisenberg ? nx * ny : n; }
  /// Copy with every optional filled by its model default.
  ExperimentConfig resolved() const;
  bool has_stage(Stage s) const;
};

/// Defaults used by resolved().
inline constexpr std::size_t kDefaultTiedLayers = 10;

struct ConfigIssue {
  std::string field;
  std::string message;
  std::size_t line = 0;  ///< 0 when not tied to a source line
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct ParsedConfig {
  ExperimentConfig config;
  std::vector<ConfigIssue> issues;  ///< parse problems, with line numbers
};

/// `key = value` per line; `#` starts a comment; blank lines ignored.
ParsedConfig parse_config(std::string_view text);
ParsedConfig load_config(const std::string& path);

/// Every violated invariant; empty when the config is runnable.
std::vector<ConfigIssue> validate_config(const ExperimentConfig& config);

/// Canonical text form; parse_config(to_text(c)).config reproduces c.
std::string to_text(const ExperimentConfig& config);

std::string format_issue(const ConfigIssue& issue);

}  // namespace spinproj
