#include "spinproj/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "spinproj/oracle.hpp"

namespace spinproj {

std::string_view to_string(ModelKind m) {
  return m == ModelKind::kHeisenberg ? "heisenberg" : "neutrino";
}

ModelKind parse_model(std::string_view name) {
  if (name == "heisenberg") return ModelKind::kHeisenberg;
  if (name == "neutrino") return ModelKind::kNeutrino;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kInitial: return "initial";
    case Stage::kProjection: return "projection";
    case Stage::kVqe: return "vqe";
    case Stage::kSymmetrize: return "symmetrize";
    case Stage::kOracle: return "oracle";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::kInitial, Stage::kProjection, Stage::kVqe, Stage::kSymmetrize, Stage::kOracle})
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown stage '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view list) {
  std::vector<std::string_view> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = trim(list.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_unsigned(std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

double parse_double(std::string_view v) {
  const std::string s(v);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw std::invalid_argument("expected a number, got '" + s + "'");
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw std::invalid_argument("expected true/false, got '" + std::string(v) + "'");
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"model", [](ExperimentConfig& c, std::string_view v) { c.model = parse_model(v); }},
      {"nx", [](ExperimentConfig& c, std::string_view v) { c.nx = parse_unsigned<std::size_t>(v); }},
      {"ny", [](ExperimentConfig& c, std::string_view v) { c.ny = parse_unsigned<std::size_t>(v); }},
      {"n", [](ExperimentConfig& c, std::string_view v) { c.n = parse_unsigned<std::size_t>(v); }},
      {"seed", [](ExperimentConfig& c, std::string_view v) { c.seed = parse_unsigned<std::uint64_t>(v); }},
      {"projection_iterations",
       [](ExperimentConfig& c, std::string_view v) { c.projection_iterations = parse_unsigned<std::size_t>(v); }},
      {"strategy", [](ExperimentConfig& c, std::string_view v) { c.strategy = parse_strategy(v); }},
      {"layers", [](ExperimentConfig& c, std::string_view v) { c.layers = parse_unsigned<std::size_t>(v); }},
      {"n_gates", [](ExperimentConfig& c, std::string_view v) { c.n_gates = parse_unsigned<std::size_t>(v); }},
      {"gradient",
       [](ExperimentConfig& c, std::string_view v) { c.optimizer.gradient = parse_gradient_method(v); }},
      {"energy_tolerance",
       [](ExperimentConfig& c, std::string_view v) { c.optimizer.energy_tolerance = parse_double(v); }},
      {"patience",
       [](ExperimentConfig& c, std::string_view v) { c.optimizer.patience = parse_unsigned<std::size_t>(v); }},
      {"gradient_tolerance",
       [](ExperimentConfig& c, std::string_view v) { c.optimizer.gradient_tolerance = parse_double(v); }},
      {"max_iterations",
       [](ExperimentConfig& c, std::string_view v) { c.optimizer.max_iterations = parse_unsigned<std::size_t>(v); }},
      {"finite_difference_step",
       [](ExperimentConfig& c, std::string_view v) { c.optimizer.finite_difference_step = parse_double(v); }},
      {"symmetrize", [](ExperimentConfig& c, std::string_view v) { c.symmetrize = parse_bool(v); }},
      {"stages", [](ExperimentConfig& c, std::string_view v) { c.stages = parse_stage_list(v); }},
      {"sweep_seeds",
       [](ExperimentConfig& c, std::string_view v) {
         c.sweep_seeds.clear();
         for (auto item : split_list(v)) c.sweep_seeds.push_back(parse_unsigned<std::uint64_t>(item));
       }},
      {"out_dir", [](ExperimentConfig& c, std::string_view v) { c.out_dir = std::string(v); }},
      {"emit_trace", [](ExperimentConfig& c, std::string_view v) { c.emit_trace = parse_bool(v); }},
      {"emit_fidelity_spectrum",
       [](ExperimentConfig& c, std::string_view v) { c.emit_fidelity_spectrum = parse_bool(v); }},
      {"emit_census", [](ExperimentConfig& c, std::string_view v) { c.emit_census = parse_bool(v); }},
  };
  return table;
}

}  // namespace

std::vector<Stage> parse_stage_list(std::string_view list) {
  std::set<Stage> stages;
  for (auto item : split_list(list)) stages.insert(parse_stage(item));
  if (stages.empty()) throw std::invalid_argument("empty stage list");
  return {stages.begin(), stages.end()};
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  if (!c.strategy)
    c.strategy = (c.model == ModelKind::kHeisenberg) ? AnsatzStrategy::kSymmetryTied : AnsatzStrategy::kAllToAll;
  if (!c.layers) c.layers = (*c.strategy == AnsatzStrategy::kSymmetryTied) ? kDefaultTiedLayers : 1;
  if (!c.n_gates) {
    const std::size_t q = c.num_qubits();
    c.n_gates = q * (q - 1) / 2;
  }
  if (!c.symmetrize) c.symmetrize = (c.model == ModelKind::kHeisenberg);
  if (!*c.symmetrize || c.model != ModelKind::kHeisenberg)
    c.stages.erase(std::remove(c.stages.begin(), c.stages.end(), Stage::kSymmetrize), c.stages.end());
  return c;
}

bool ExperimentConfig::has_stage(Stage s) const {
  return std::find(stages.begin(), stages.end(), s) != stages.end();
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& i : issues) msg += "\n  " + format_issue(i);
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::string format_issue(const ConfigIssue& issue) {
  std::string out;
  if (issue.line) out += "line " + std::to_string(issue.line) + ": ";
  out += issue.field + ": " + issue.message;
  return out;
}

ParsedConfig parse_config(std::string_view text) {
  ParsedConfig result;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = (nl == std::string_view::npos) ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      result.issues.push_back({std::string(line), "expected 'key = value'", line_no});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      result.issues.push_back({key, "unknown key", line_no});
      continue;
    }
    if (!seen.insert(key).second) {
      result.issues.push_back({key, "duplicate key", line_no});
      continue;
    }
    try {
      it->second(result.config, value);
    } catch (const std::exception& e) {
      result.issues.push_back({key, e.what(), line_no});
    }
  }
  return result;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParsedConfig r;
    r.issues.push_back({"config", "cannot read '" + path + "'", 0});
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<ConfigIssue> validate_config(const ExperimentConfig& raw) {
  std::vector<ConfigIssue> issues;
  auto add = [&](std::string field, std::string message) { issues.push_back({std::move(field), std::move(message), 0}); };
  const ExperimentConfig c = raw.resolved();
  const AnsatzStrategy strategy = *c.strategy;

  if (c.model == ModelKind::kHeisenberg) {
    if (c.nx < 2) add("nx", "must be at least 2");
    if (c.ny < 2) add("ny", "must be at least 2");
    if ((c.nx * c.ny) % 2 != 0) add("nx", "nx * ny must be even for a J_z = 0 Neel state");
  } else {
    if (c.n < 2) add("n", "must be at least 2");
    if (c.n % 2 != 0) add("n", "must be even for spin-zero projection");
    if (strategy == AnsatzStrategy::kSymmetryTied)
      add("strategy", "symmetry-tied needs a lattice; the neutrino model has none");
    if (strategy == AnsatzStrategy::kNearestNeighbor)
      add("strategy", "nearest-neighbor needs a lattice; the neutrino model has none");
    if (raw.symmetrize.value_or(false)) add("symmetrize", "translation/mirror symmetrization needs a lattice");
  }
  const std::size_t q = c.num_qubits();
  if (q > kMaxQubits) add(c.model == ModelKind::kHeisenberg ? "nx" : "n", "too many qubits");
  if (c.has_stage(Stage::kOracle) && q > kMaxOracleQubits)
    add("stages", "oracle stage needs at most " + std::to_string(kMaxOracleQubits) + " qubits");
  if (c.emit_census && c.model != ModelKind::kHeisenberg) add("emit_census", "census needs the heisenberg model");

  const bool stochastic = c.model == ModelKind::kNeutrino || strategy != AnsatzStrategy::kSymmetryTied;
  if (stochastic && !c.seed) add("seed", "required: this configuration makes random choices");
  if (*c.layers == 0) add("layers", "must be at least 1");
  if (strategy == AnsatzStrategy::kAllToAll && *c.n_gates == 0 && c.has_stage(Stage::kVqe))
    add("n_gates", "must be positive when the vqe stage runs");

  const auto& o = c.optimizer;
  if (!(o.energy_tolerance > 0.0) || !std::isfinite(o.energy_tolerance)) add("energy_tolerance", "must be positive");
  if (!(o.gradient_tolerance > 0.0) || !std::isfinite(o.gradient_tolerance))
    add("gradient_tolerance", "must be positive");
  if (!(o.finite_difference_step > 0.0) || !std::isfinite(o.finite_difference_step))
    add("finite_difference_step", "must be positive");
  if (o.patience == 0) add("patience", "must be at least 1");
  if (c.sweep_seeds.empty()) add("sweep_seeds", "must list at least one seed");
  if (c.out_dir.empty()) add("out_dir", "must not be empty");
  if (c.stages.empty()) add("stages", "must list at least one stage");
  return issues;
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "model = " << to_string(c.model) << "\n";
  if (c.model == ModelKind::kHeisenberg) {
    os << "nx = " << c.nx << "\n" << "ny = " << c.ny << "\n";
  } else {
    os << "n = " << c.n << "\n";
  }
  if (c.seed) os << "seed = " << *c.seed << "\n";
  os << "projection_iterations = " << c.projection_iterations << "\n";
  if (c.strategy) os << "strategy = " << to_string(*c.strategy) << "\n";
  if (c.layers) os << "layers = " << *c.layers << "\n";
  if (c.n_gates) os << "n_gates = " << *c.n_gates << "\n";
  os << "gradient = " << to_string(c.optimizer.gradient) << "\n";
  os << "energy_tolerance = " << format_double(c.optimizer.energy_tolerance) << "\n";
  os << "patience = " << c.optimizer.patience << "\n";
  os << "gradient_tolerance = " << format_double(c.optimizer.gradient_tolerance) << "\n";
  os << "max_iterations = " << c.optimizer.max_iterations << "\n";
  os << "finite_difference_step = " << format_double(c.optimizer.finite_difference_step) << "\n";
  if (c.symmetrize) os << "symmetrize = " << (*c.symmetrize ? "true" : "false") << "\n";
  os << "stages = ";
  for (std::size_t k = 0; k < c.stages.size(); ++k) os << (k ? "," : "") << to_string(c.stages[k]);
  os << "\n";
  os << "sweep_seeds = ";
  for (std::size_t k = 0; k < c.sweep_seeds.size(); ++k) os << (k ? "," : "") << c.sweep_seeds[k];
  os << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  os << "emit_trace = " << (c.emit_trace ? "true" : "false") << "\n";
  os << "emit_fidelity_spectrum = " << (c.emit_fidelity_spectrum ? "true" : "false") << "\n";
  os << "emit_census = " << (c.emit_census ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace spinproj
