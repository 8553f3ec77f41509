#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spinproj/ansatz.hpp"
#include "spinproj/hamiltonian.hpp"
#include "spinproj/qstate.hpp"

namespace spinproj {

enum class GradientMethod {
  kAdjoint,           ///< reverse sweep using d/dtheta exp(i theta rho) = i rho exp(i theta rho)
  kParameterShift,    ///< per-gate E(theta + pi/4) - E(theta - pi/4)
  kFiniteDifference,  ///< central differences on the tied parameters
};

std::string_view to_string(GradientMethod m);
GradientMethod parse_gradient_method(std::string_view name);

struct OptimizerSettings {
  GradientMethod gradient = GradientMethod::kAdjoint;
  /// Converged once |Delta E| stays below this for `patience` accepted steps.
  double energy_tolerance = 1e-8;
  std::size_t patience = 5;
  /// Also converged when the gradient max-norm drops below this.
  double gradient_tolerance = 1e-9;
  /// 0 is allowed and returns the reference state untouched.
  std::size_t max_iterations = 2000;
  double finite_difference_step = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TraceRecord {
  std::size_t iteration = 0;
  std::vector<double> params;
  double energy = 0.0;
  double gradient_norm = 0.0;
};

struct OptimizationTrace {
  std::vector<TraceRecord> records;
  bool converged = false;
  std::string termination_reason;
  std::size_t energy_evaluations = 0;
  std::size_t gradient_evaluations = 0;
  double wall_time_seconds = 0.0;

  /// Columns: iteration, energy, gradient_norm. Wall time is left out so the
  /// file is reproducible byte for byte.
  void write_csv(std::ostream& os) const;
};

/// E(theta) = <ref| U(theta)^dagger H U(theta) |ref>.
class VqeObjective {
 public:
  VqeObjective(Statevector reference, AnsatzProgram program, SpinHamiltonian hamiltonian);

  const Statevector& reference() const { return reference_; }
  const AnsatzProgram& program() const { return program_; }
  const SpinHamiltonian& hamiltonian() const { return hamiltonian_; }

  Statevector prepare(std::span<const double> params) const;
  double energy(std::span<const double> params) const;
  std::vector<double> gradient(std::span<const double> params, GradientMethod method,
                               double fd_step = 1e-6) const;

 private:
  std::vector<double> adjoint_gradient(std::span<const double> params) const;
  std::vector<double> shift_gradient(std::span<const double> params) const;
  std::vector<double> finite_difference_gradient(std::span<const double> params,
                                                 double step) const;

  Statevector reference_;
  AnsatzProgram program_;
  SpinHamiltonian hamiltonian_;
};

double energy_objective(const Statevector& reference, const AnsatzProgram& program,
                        const SpinHamiltonian& h, std::span<const double> params);

struct VqeResult {
  std::vector<double> params;
  Statevector state;
  double energy = 0.0;
  OptimizationTrace trace;
};

/// BFGS with Armijo backtracking, started from program.initial_parameters().
/// Deterministic for fixed inputs; non-convergence is reported in the trace.
VqeResult minimize(const Statevector& reference, const AnsatzProgram& program,
                   const SpinHamiltonian& h, const OptimizerSettings& settings);

}  // namespace spinproj
