// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spinproj/ansatz.hpp"
#include "spinproj/models.hpp"
#include "spinproj/oracle.hpp"
#include "spinproj/pipeline.hpp"
#include "spinproj/symmetry.hpp"
#include "spinproj/vqe.hpp"
#include "test_support.hpp"

using namespace spinproj;
using namespace spinproj::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4};

// First `count` gates; classes renumbered in order of first use.
AnsatzProgram truncate_program(const AnsatzProgram& p, std::size_t count) {
  AnsatzProgram out;
  out.n_qubits = p.n_qubits;
  out.strategy = p.strategy;
  std::vector<long> remap(p.classes.size(), -1);
  for (std::size_t g = 0; g < count && g < p.gates.size(); ++g) {
    SwapGateSpec gate = p.gates[g];
    if (remap[gate.parameter_class] < 0) {
      remap[gate.parameter_class] = static_cast<long>(out.classes.size());
      out.classes.push_back(p.classes[gate.parameter_class]);
    }
    gate.parameter_class = static_cast<std::size_t>(remap[gate.parameter_class]);
    out.gates.push_back(gate);
  }
  out.validate();
  return out;
}

std::vector<double> random_params(std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  std::vector<double> p(k);
  for (auto& x : p) x = u(rng);
  return p;
}

double relative_gradient_error(const VqeObjective& obj, std::span<const double> params, GradientMethod m) {
  const auto ref = obj.gradient(params, GradientMethod::kFiniteDifference, 1e-6);
  const auto got = obj.gradient(params, m);
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    diff = std::max(diff, std::abs(got[k] - ref[k]));
    scale = std::max(scale, std::abs(ref[k]));
  }
  return diff / scale;
}

}  // namespace

int main() {
  const Lattice2D lattice(4, 3);
  const SpinHamiltonian heis = heisenberg_hamiltonian(lattice);
  const Statevector neel = neel_state(lattice);
  const fs::path out = fs::temp_directory_path() / "spinproj_acceptance";
  fs::remove_all(out);

  // 1. Exact spectrum and sector minima.
  auto t0 = Clock::now();
  const SpectrumAnalysis spectrum = full_spectrum(heis);
  const SectorCensus census = sector_census(lattice);
  const double t_spectrum = seconds(t0);
  {
    const double e0 = spectrum.ground_energy();
    const double a = census.jz_zero().first_excited, b = census.spin_zero().first_excited,
                 c = census.symmetric().first_excited;
    const bool ok = within(e0, -58.95, 0.01) && within(a, -51.81, 0.02) && within(b, -46.72, 0.02) &&
                    within(c, -30.86, 0.02) && t_spectrum < 60.0;
    verdict(1, ok,
            fmt("E0 = %.4f; first excited Jz=0 %.4f, J=0 %.4f, symmetric %.4f", e0, a, b, c) +
                fmt("; %.1f s", t_spectrum));
  }

  // 2. Sector census.
  {
    const std::vector<std::size_t> dims{census.full().dimension, census.jz_zero().dimension,
                                        census.spin_zero().dimension, census.symmetric().dimension};
    const bool ok = dims == std::vector<std::size_t>{4096, 924, 132, 9};
    verdict(2, ok, fmt("dimensions (%.0f, %.0f, %.0f, %.0f)", dims[0], dims[1], dims[2], dims[3]));
  }

  // 3. Neel state.
  {
    const double e = expectation(neel, heis);
    const double f = ground_state_fidelity(neel, spectrum);
    verdict(3, std::abs(e + 32.0) < 1e-12 && within(f, 0.085, 0.003), fmt("E = %.15f, F = %.4f", e, f));
  }

  // 4. Spin-zero projection of the Neel state.
  const ProjectionResult projected = project_spin_zero(neel, {}, &heis);
  {
    const double e = expectation(projected.state, heis);
    const double f = ground_state_fidelity(projected.state, spectrum);
    bool monotone = true;
    const auto& rec = projected.report.records;
    for (std::size_t k = 1; k < rec.size(); ++k) monotone = monotone && rec[k].energy <= rec[k - 1].energy + 1e-12;
    verdict(4, within(e, -45.33, 0.03) && within(f, 0.296, 0.01) && monotone,
            fmt("E = %.4f, F = %.4f, energy trajectory ", e, f) + (monotone ? "monotone" : "NOT monotone"));
  }

  // 5. Projection exactness.
  std::vector<MomentumSet> momenta;
  std::vector<SpinHamiltonian> nu_h;
  std::vector<SpectrumAnalysis> nu_spectra;
  for (auto s : kSeeds) {
    momenta.push_back(sample_momenta(12, s));
    nu_h.push_back(neutrino_hamiltonian(momenta.back()));
    nu_spectra.push_back(full_spectrum(nu_h.back()));
  }
  {
    std::vector<Statevector> inputs{neel};
    for (const auto& m : momenta) inputs.push_back(coherent_product_state(m));
    double jz2 = 0.0, j2 = 0.0, odd = 0.0, j2_neel = 0.0;
    SpinProjectionOptions one;
    one.iterations = 2;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      jz2 = std::max(jz2, jz_squared_expectation(project_jz_zero(inputs[k], JzSchedule::exact_for(12)).state));
      const double j2k = j_squared_expectation(project_spin_zero(inputs[k]).state);
      if (k == 0)
        j2_neel = j2k;
      else
        j2 = std::max(j2, j2k);
      const SpectrumAnalysis& s = k == 0 ? spectrum : nu_spectra[k - 1];
      odd = std::max(odd, odd_spin_weight(project_spin_zero(inputs[k], one).state, s));
    }
    verdict(5, jz2 < 1e-20 && j2 < 1e-6 && j2_neel < 1e-6 && odd < 1e-20,
            fmt("max <Jz^2> = %.2e (< 1e-20); <J^2> after 11 iterations: Neel %.2e, neutrino max %.2e (< 1e-6); ",
                jz2, j2_neel, j2) +
                fmt("max odd-S weight = %.2e (< 1e-20)", odd));
  }

  // 6. Ansatz correctness.
  {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    double worst_matrix = 0.0;
    for (int t = 0; t < 100; ++t) {
      const double theta = u(rng);
      const Matrix4 a = sequence_matrix(swap_exponential_decomposed(theta, 0, 1), 0, 1);
      const Matrix4 b = swap_exponential_matrix(theta);
      for (std::size_t k = 0; k < 16; ++k) worst_matrix = std::max(worst_matrix, std::abs(a[k] - b[k]));
    }
    const std::vector<AnsatzProgram> programs{build_nearest_neighbor_ansatz(lattice, 1, 2),
                                              build_all_to_all_ansatz(12, 1, 66),
                                              build_symmetry_tied_ansatz(lattice, 2)};
    double worst_spin = 0.0;
    for (const auto& p : programs)
      for (std::size_t unpaired : {0, 2, 4}) {
        const Statevector psi = random_spin_eigenstate(12, unpaired, rng);
        Statevector phi = psi;
        apply_ansatz(phi, p, random_params(p.num_parameters(), rng));
        worst_spin = std::max(worst_spin, std::abs(j_squared_expectation(phi) - j_squared_expectation(psi)));
        worst_spin = std::max(worst_spin, std::abs(jz_expectation(phi) - jz_expectation(psi)));
      }
    verdict(6, worst_matrix < 1e-12 && worst_spin < 1e-10,
            fmt("decomposition error %.2e over 100 angles; spin drift %.2e", worst_matrix, worst_spin));
  }

  // 7. Heisenberg pipeline, symmetry-tied ansatz.
  double tied_energy = 0.0;
  std::size_t tied_params = 0;
  {
    t0 = Clock::now();
    const RunManifest m = run_pipeline(ExperimentConfig{}, out / "heisenberg");
    const double t = seconds(t0);
    const auto* v = m.find(Stage::kVqe);
    const auto* s = m.find(Stage::kSymmetrize);
    tied_energy = v->energy;
    tied_params = m.json["vqe"]["num_parameters"].get<std::size_t>();
    const bool ok = v->energy <= -56.0 && *v->fidelity >= 0.85 && s->energy <= -58.4 && *s->fidelity >= 0.98 &&
                    t < 300.0;
    verdict(7, ok,
            fmt("VQE E = %.4f F = %.4f; symmetrized E = %.4f F = %.4f", v->energy, *v->fidelity, s->energy,
                *s->fidelity) +
                fmt("; pipeline %.1f s", t));
  }

  // 8. Neutrino sweep.
  {
    ExperimentConfig c;
    c.model = ModelKind::kNeutrino;
    c.n = 12;
    c.sweep_seeds = kSeeds;
    const auto sweep = run_sweep(c, out / "neutrino", sweep_workers_from_env());
    int vqe_ok = 0, proj_ok = 0;
    std::string detail;
    for (const auto& run : sweep["runs"]) {
      const double e0 = run["reference_energy"];
      double fp = 0, ev = 0, fv = 0;
      for (const auto& s : run["stages"]) {
        if (s["name"] == "projection") fp = s["fidelity"];
        if (s["name"] == "vqe") fv = s["fidelity"], ev = s["energy"];
      }
      const double rel = std::abs(ev - e0) / std::abs(e0);
      vqe_ok += (fv >= 0.95 && rel <= 0.01) ? 1 : 0;
      proj_ok += fp > 0.40 ? 1 : 0;
      detail += fmt("seed %.0f: E0 %.3f, projection F %.3f, VQE F %.3f", run["seed"].get<double>(), e0, fp, fv) +
                fmt(" err %.2f%%; ", 100 * rel);
    }
    verdict(8, vqe_ok >= 3 && proj_ok >= 3,
            detail + fmt("VQE %.0f/4, projection %.0f/4 (need 3)", vqe_ok, proj_ok));
  }

  // 9. Strategy comparison at equal parameter count.
  {
    const OptimizerSettings settings;
    const AnsatzProgram nn = truncate_program(build_nearest_neighbor_ansatz(lattice, 1, 2), tied_params);
    const AnsatzProgram a2a = build_all_to_all_ansatz(12, 1, tied_params);
    const double e_nn = minimize(projected.state, nn, heis, settings).energy;
    const double e_a2a = minimize(projected.state, a2a, heis, settings).energy;
    verdict(9, tied_energy < e_nn && tied_energy < e_a2a,
            fmt("%.0f parameters each: tied %.4f, nearest-neighbor %.4f, all-to-all %.4f",
                static_cast<double>(tied_params), tied_energy, e_nn, e_a2a));
  }

  // 10. Oracle self-consistency.
  {
    double residual = 0.0;
    for (std::size_t k = 0; k < spectrum.dimension(); ++k) residual = std::max(residual, spectrum.residual(heis, k));
    for (std::size_t s = 0; s < nu_spectra.size(); ++s)
      for (std::size_t k = 0; k < nu_spectra[s].dimension(); k += 3)
        residual = std::max(residual, nu_spectra[s].residual(nu_h[s], k));
    std::mt19937_64 rng(10);
    double sum_error = 0.0;
    for (const Statevector& v : {neel, projected.state, random_state(12, rng)}) {
      double sum = 0.0;
      for (const auto& e : fidelity_spectrum(v, spectrum)) sum += e.fidelity;
      sum_error = std::max(sum_error, std::abs(sum - 1.0));
    }
    const VqeObjective tied(projected.state, build_symmetry_tied_ansatz(lattice, 3), heis);
    const VqeObjective a2a(coherent_product_state(momenta[1]), build_all_to_all_ansatz(12, 2, 20), nu_h[1]);
    double grad = 0.0;
    for (const VqeObjective* obj : {&tied, &a2a}) {
      const auto p = random_params(obj->program().num_parameters(), rng);
      grad = std::max(grad, relative_gradient_error(*obj, p, GradientMethod::kAdjoint));
      grad = std::max(grad, relative_gradient_error(*obj, p, GradientMethod::kParameterShift));
    }
    verdict(10, residual < 1e-8 && sum_error < 1e-10 && grad < 1e-5,
            fmt("max residual %.2e, fidelity sum error %.2e, gradient relative error %.2e", residual, sum_error,
                grad));
  }

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
