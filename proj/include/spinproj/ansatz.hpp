#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "spinproj/models.hpp"
#include "spinproj/qstate.hpp"

namespace spinproj {

enum class AnsatzStrategy { kNearestNeighbor, kAllToAll, kSymmetryTied };

std::string_view to_string(AnsatzStrategy s);
/// Accepts "nearest-neighbor", "all-to-all", "symmetry-tied".
AnsatzStrategy parse_strategy(std::string_view name);

/// exp(i theta rho_ij) on one pair; gates sharing `parameter_class` share theta.
struct SwapGateSpec {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t parameter_class = 0;
};

struct ParameterClass {
  std::string name;
  double initial_value = 0.0;
};

struct AnsatzProgram {
  std::size_t n_qubits = 0;
  AnsatzStrategy strategy = AnsatzStrategy::kAllToAll;
  std::vector<SwapGateSpec> gates;
  std::vector<ParameterClass> classes;

  std::size_t num_parameters() const { return classes.size(); }
  std::vector<double> initial_parameters() const;
  /// Throws std::invalid_argument on i == j, out-of-range sites or unknown classes.
  void validate() const;

  nlohmann::json to_json() const;
  static AnsatzProgram from_json(const nlohmann::json& j);
};

/// The 4x4 matrix of exp(i theta rho): e^{i theta} on |00>, |11>; the
/// {|01>, |10>} block is [[cos, i sin], [i sin, cos]].
Matrix4 swap_exponential_matrix(double theta);
TwoQubitUnitary swap_exponential_gate(double theta, std::size_t i, std::size_t j);

enum class PrimitiveKind { kH, kS, kZ, kCnot, kRz };

/// One hardware primitive. For kCnot `qubit` is the control and `target` the
/// target; kRz uses R_z(angle) = exp(-i angle Z / 2).
struct PrimitiveGate {
  PrimitiveKind kind = PrimitiveKind::kH;
  std::size_t qubit = 0;
  std::size_t target = 0;
  double angle = 0.0;
};

/// Primitives in application order plus an explicit global phase factor.
struct GateSequence {
  std::vector<PrimitiveGate> gates;
  Complex global_phase{1.0, 0.0};
};

enum class PauliAxis { kX, kY, kZ };

/// exp(i phi sigma^a_i sigma^a_j) as CNOT ladders around R_z(-2 phi) on the
/// target, with H (X) or H^Y = S H Z S (Y) basis changes.
GateSequence pauli_exponential_decomposed(PauliAxis axis, double phi, std::size_t i,
                                          std::size_t j);

/// e^{i theta/2} exp(i theta/2 XX) exp(i theta/2 YY) exp(i theta/2 ZZ).
GateSequence swap_exponential_decomposed(double theta, std::size_t i, std::size_t j);

void apply_sequence(Statevector& state, const GateSequence& seq);

/// 4x4 matrix of a sequence acting on (first, second), in TwoQubitUnitary's
/// local ordering. Only qubits first/second may appear in the sequence.
Matrix4 sequence_matrix(const GateSequence& seq, std::size_t first, std::size_t second);

/// `layers` passes over all nearest-neighbour bonds, each pass in a
/// seed-shuffled order; one parameter per gate.
AnsatzProgram build_nearest_neighbor_ansatz(const Lattice2D& lattice, std::uint64_t seed,
                                            std::size_t layers = 1,
                                            double initial_value = 0.01);

/// n_gates gates drawn from successive seed-shuffled sweeps over all n(n-1)/2
/// pairs, so one full sweep visits every pair exactly once.
AnsatzProgram build_all_to_all_ansatz(std::size_t n, std::uint64_t seed, std::size_t n_gates,
                                      double initial_value = 0.01);

/// Displacement-tied swaps on a periodic lattice: nearest neighbours (0.01),
/// diagonals (0.15), distance-2 along an axis (0.01). Gates are ordered class
/// by class, then row-major by anchor site. Each repeated layer gets fresh
/// classes; empty classes are dropped.
AnsatzProgram build_symmetry_tied_ansatz(const Lattice2D& lattice, std::size_t layers = 1);

/// Gates applied in program order, each with its class parameter.
void apply_ansatz(Statevector& state, const AnsatzProgram& program,
                  std::span<const double> params);

}  // namespace spinproj
