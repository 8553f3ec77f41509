#include "spinproj/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "spinproj/ansatz.hpp"
#include "spinproj/models.hpp"
#include "spinproj/oracle.hpp"
#include "spinproj/symmetry.hpp"
#include "spinproj/vqe.hpp"

#ifndef SPINPROJ_VERSION
#define SPINPROJ_VERSION "0.0.0"
#endif

namespace spinproj {

namespace fs = std::filesystem;
using nlohmann::json;

std::string software_version() { return SPINPROJ_VERSION; }

PipelineError::PipelineError(Stage stage, const std::string& message)
    : std::runtime_error(std::string(to_string(stage)) + " stage: " + message), stage_(stage) {}

const StageRecord* RunManifest::find(Stage s) const {
  for (const auto& r : stages)
    if (r.stage == s) return &r;
  return nullptr;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::mutex log_mutex;

void log_line(const std::string& msg) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::clog << "[spinproj] " << msg << std::endl;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <typename F>
auto in_stage(Stage stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(stage, e.what());
  }
}

struct Model {
  SpinHamiltonian hamiltonian;
  Statevector initial{1};
  std::optional<Lattice2D> lattice;
  std::optional<MomentumSet> momenta;
};

Model build_model(const ExperimentConfig& c) {
  Model m;
  if (c.model == ModelKind::kHeisenberg) {
    m.lattice.emplace(c.nx, c.ny, true);
    m.hamiltonian = heisenberg_hamiltonian(*m.lattice);
    m.initial = neel_state(*m.lattice);
  } else {
    m.momenta = sample_momenta(c.n, *c.seed);
    m.hamiltonian = neutrino_hamiltonian(*m.momenta);
    m.initial = coherent_product_state(*m.momenta);
  }
  return m;
}

AnsatzProgram build_program(const ExperimentConfig& c, const Model& m) {
  switch (*c.strategy) {
    case AnsatzStrategy::kSymmetryTied: return build_symmetry_tied_ansatz(*m.lattice, *c.layers);
    case AnsatzStrategy::kNearestNeighbor: return build_nearest_neighbor_ansatz(*m.lattice, *c.seed, *c.layers);
    case AnsatzStrategy::kAllToAll: return build_all_to_all_ansatz(c.num_qubits(), c.seed.value_or(0), *c.n_gates);
  }
  throw std::logic_error("unhandled strategy");
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["text"] = to_text(c);
  j["model"] = to_string(c.model);
  if (c.model == ModelKind::kHeisenberg) {
    j["nx"] = c.nx;
    j["ny"] = c.ny;
  } else {
    j["n"] = c.n;
  }
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["projection_iterations"] = c.projection_iterations;
  j["strategy"] = to_string(*c.strategy);
  j["layers"] = *c.layers;
  j["n_gates"] = *c.n_gates;
  j["symmetrize"] = *c.symmetrize;
  json stages = json::array();
  for (Stage s : c.stages) stages.push_back(to_string(s));
  j["stages"] = stages;
  j["optimizer"] = {{"gradient", to_string(c.optimizer.gradient)},
                    {"energy_tolerance", c.optimizer.energy_tolerance},
                    {"patience", c.optimizer.patience},
                    {"gradient_tolerance", c.optimizer.gradient_tolerance},
                    {"max_iterations", c.optimizer.max_iterations},
                    {"finite_difference_step", c.optimizer.finite_difference_step}};
  return j;
}

json stage_json(const StageRecord& r) {
  return {{"name", to_string(r.stage)},
          {"energy", r.energy},
          {"fidelity", r.fidelity ? json(*r.fidelity) : json(nullptr)},
          {"probability", r.probability},
          {"J2", r.j_squared},
          {"wall_time_seconds", r.wall_time_seconds}};
}

json census_json(const SectorCensus& census) {
  json sectors = json::array();
  for (const auto& s : census.sectors) {
    sectors.push_back({{"name", s.name},
                       {"dimension", s.dimension},
                       {"lowest", s.lowest},
                       {"first_excited", std::isnan(s.first_excited) ? json(nullptr) : json(s.first_excited)},
                       {"gap", std::isnan(s.first_excited) ? json(nullptr) : json(s.gap())}});
  }
  return sectors;
}

void require_valid(const ExperimentConfig& config) {
  auto issues = validate_config(config);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace

RunManifest run_pipeline(const ExperimentConfig& raw, const fs::path& out_dir) {
  require_valid(raw);
  const ExperimentConfig c = raw.resolved();
  const auto t_run = Clock::now();
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.directory = out_dir;
  json artifacts = json::object();
  json& j = manifest.json;
  j["software"] = {{"name", kSoftwareName}, {"version", software_version()}};
  j["rng"] = {{"algorithm", kRngAlgorithm}, {"seed", c.seed ? json(*c.seed) : json(nullptr)}};
  j["config"] = config_json(c);

  const auto t_setup = Clock::now();
  const Model model = in_stage(Stage::kInitial, [&] { return build_model(c); });
  const SpinHamiltonian& h = model.hamiltonian;
  j["hamiltonian"] = {{"label", h.label}, {"n_qubits", h.n_qubits}, {"terms", h.terms.size()}};
  if (model.momenta) {
    json dirs = json::array();
    for (const auto& p : model.momenta->directions) dirs.push_back({p[0], p[1], p[2]});
    j["momenta"] = dirs;
  }

  std::vector<Statevector> stage_states;
  auto record = [&](StageRecord r, const Statevector& s) {
    r.j_squared = j_squared_expectation(s);
    log_line(std::string(to_string(r.stage)) + ": E = " + std::to_string(r.energy));
    manifest.stages.push_back(r);
    stage_states.push_back(s);
  };

  Statevector current = model.initial;
  if (c.has_stage(Stage::kInitial)) {
    StageRecord r;
    r.stage = Stage::kInitial;
    r.energy = expectation(current, h);
    r.wall_time_seconds = seconds_since(t_setup);
    record(r, current);
  }

  if (c.has_stage(Stage::kProjection)) {
    const auto t0 = Clock::now();
    SpinProjectionOptions opts;
    opts.iterations = c.projection_iterations;
    ProjectionResult pr = in_stage(Stage::kProjection, [&] { return project_spin_zero(current, opts, &h); });
    std::ostringstream csv;
    pr.report.write_csv(csv);
    write_file(out_dir / "projection.csv", csv.str());
    artifacts["projection"] = "projection.csv";
    j["projection"] = {{"iterations", pr.report.iterations},
                       {"cumulative_probability", pr.report.cumulative_probability()},
                       {"J2", pr.report.records.back().j_squared},
                       {"J2_tolerance", opts.j_squared_tolerance},
                       {"converged", pr.report.converged}};
    current = std::move(pr.state);
    StageRecord r;
    r.stage = Stage::kProjection;
    r.energy = expectation(current, h);
    r.probability = pr.report.cumulative_probability();
    r.wall_time_seconds = seconds_since(t0);
    record(r, current);
  }

  if (c.has_stage(Stage::kVqe)) {
    const auto t0 = Clock::now();
    VqeResult vr = in_stage(Stage::kVqe, [&] {
      const AnsatzProgram program = build_program(c, model);
      OptimizerSettings settings = c.optimizer;
      settings.seed = c.seed.value_or(0);
      VqeResult out = minimize(current, program, h, settings);
      j["ansatz"] = program.to_json();
      return out;
    });
    if (c.emit_trace) {
      std::ostringstream csv;
      vr.trace.write_csv(csv);
      write_file(out_dir / "trace.csv", csv.str());
      artifacts["trace"] = "trace.csv";
    }
    j["vqe"] = {{"num_parameters", vr.params.size()},
                {"params", vr.params},
                {"iterations", vr.trace.records.empty() ? 0 : vr.trace.records.back().iteration},
                {"converged", vr.trace.converged},
                {"termination_reason", vr.trace.termination_reason},
                {"energy_evaluations", vr.trace.energy_evaluations},
                {"gradient_evaluations", vr.trace.gradient_evaluations}};
    current = std::move(vr.state);
    StageRecord r;
    r.stage = Stage::kVqe;
    r.energy = vr.energy;
    r.wall_time_seconds = seconds_since(t0);
    record(r, current);
  }

  if (c.has_stage(Stage::kSymmetrize)) {
    const auto t0 = Clock::now();
    SymmetrizeResult sr = in_stage(Stage::kSymmetrize, [&] {
      const SymmetryGroupSpec spec(*model.lattice);
      return symmetrize_translations_mirrors(current, spec);
    });
    current = std::move(sr.state);
    StageRecord r;
    r.stage = Stage::kSymmetrize;
    r.energy = expectation(current, h);
    r.probability = sr.probability;
    r.wall_time_seconds = seconds_since(t0);
    record(r, current);
  }

  if (c.has_stage(Stage::kOracle)) {
    const auto t0 = Clock::now();
    in_stage(Stage::kOracle, [&] {
      const SpectrumAnalysis spectrum = full_spectrum(h);
      manifest.reference_energy = spectrum.ground_energy();
      const auto ground = spectrum.ground_level();
      j["reference"] = {{"ground_energy", spectrum.ground_energy()},
                        {"ground_degeneracy", ground.size()},
                        {"ground_spin", spectrum.states()[ground.front()].spin},
                        {"ambiguous_levels", spectrum.ambiguous_levels().size()}};
      for (std::size_t k = 0; k < manifest.stages.size(); ++k)
        manifest.stages[k].fidelity = ground_state_fidelity(stage_states[k], spectrum);
      if (c.emit_fidelity_spectrum) {
        std::ostringstream csv;
        write_fidelity_csv(csv, fidelity_spectrum(current, spectrum));
        write_file(out_dir / "fidelity_spectrum.csv", csv.str());
        artifacts["fidelity_spectrum"] = "fidelity_spectrum.csv";
      }
      j["odd_spin_weight"] = odd_spin_weight(current, spectrum);
      return 0;
    });
    StageRecord r;
    r.stage = Stage::kOracle;
    r.energy = *manifest.reference_energy;
    r.fidelity = 1.0;
    r.wall_time_seconds = seconds_since(t0);
    r.j_squared = 0.0;
    manifest.stages.push_back(r);
    log_line("oracle: E0 = " + std::to_string(r.energy));
  }

  if (c.emit_census) {
    run_census(c, out_dir);
    artifacts["census"] = "census.json";
  }

  json stages = json::array();
  for (const auto& r : manifest.stages) stages.push_back(stage_json(r));
  j["stages"] = stages;
  artifacts["manifest"] = "manifest.json";
  j["artifacts"] = artifacts;
  j["wall_time_seconds"] = seconds_since(t_run);
  write_file(out_dir / "manifest.json", j.dump(2) + "\n");
  return manifest;
}

json run_census(const ExperimentConfig& raw, const fs::path& out_dir) {
  const ExperimentConfig c = raw.resolved();
  if (c.model != ModelKind::kHeisenberg)
    throw ConfigError({{"model", "census needs the heisenberg model", 0}});
  if (c.nx < 2 || c.ny < 2 || (c.nx * c.ny) % 2 != 0 || c.nx * c.ny > kMaxOracleQubits)
    throw ConfigError({{"nx", "census needs an even lattice with 4 to 14 sites", 0}});
  const auto t0 = Clock::now();
  const SectorCensus census = sector_census(Lattice2D(c.nx, c.ny, true));
  json j = {{"software", {{"name", kSoftwareName}, {"version", software_version()}}},
            {"lattice", {{"nx", c.nx}, {"ny", c.ny}, {"periodic", true}}},
            {"sectors", census_json(census)},
            {"wall_time_seconds", seconds_since(t0)}};
  fs::create_directories(out_dir);
  write_file(out_dir / "census.json", j.dump(2) + "\n");
  log_line("census: " + std::to_string(census.symmetric().dimension) + " fully symmetric states");
  return j;
}

json run_sweep(const ExperimentConfig& raw, const fs::path& out_dir, std::size_t workers) {
  ExperimentConfig base = raw;
  if (!base.seed && !base.sweep_seeds.empty()) base.seed = base.sweep_seeds.front();
  require_valid(base);
  const auto& seeds = base.sweep_seeds;
  std::vector<json> results(seeds.size());
  std::vector<std::string> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < seeds.size(); k = next++) {
      ExperimentConfig c = base;
      c.seed = seeds[k];
      const fs::path dir = out_dir / ("seed_" + std::to_string(seeds[k]));
      try {
        const RunManifest m = run_pipeline(c, dir);
        json stages = json::array();
        for (const auto& r : m.stages) stages.push_back(stage_json(r));
        results[k] = {{"seed", seeds[k]},
                      {"directory", dir.filename().string()},
                      {"reference_energy", m.reference_energy ? json(*m.reference_energy) : json(nullptr)},
                      {"stages", stages}};
      } catch (const std::exception& e) {
        errors[k] = e.what();
        results[k] = {{"seed", seeds[k]}, {"error", e.what()}};
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, seeds.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json j = {{"software", {{"name", kSoftwareName}, {"version", software_version()}}},
            {"rng", {{"algorithm", kRngAlgorithm}}},
            {"workers", workers},
            {"runs", results}};
  fs::create_directories(out_dir);
  write_file(out_dir / "sweep.json", j.dump(2) + "\n");
  return j;
}

std::size_t sweep_workers_from_env() {
  if (const char* v = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(v, &end, 10);
    if (end != v && *end == '\0' && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace spinproj
