#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "spinproj/hamiltonian.hpp"
#include "spinproj/models.hpp"
#include "spinproj/qstate.hpp"

namespace spinproj {

/// J_z eigenvalue of every computational basis state, (n_up - n_down) / 2.
DiagonalObservable jz_eigenvalues(std::size_t n_qubits);

/// Ancilla evolution times t_i = pi / 2^i, i = 1..k.
class JzSchedule {
 public:
  /// Smallest schedule that zeroes every m with 0 < |m| <= n/2:
  /// k = floor(log2(n/2)) + 1.
  static JzSchedule exact_for(std::size_t n_qubits);
  /// Throws std::invalid_argument if k is too short to be exact for n.
  JzSchedule(std::size_t steps, std::size_t n_qubits);

  static std::size_t required_steps(std::size_t n_qubits);

  const std::vector<double>& times() const { return times_; }
  std::size_t steps() const { return times_.size(); }

 private:
  std::vector<double> times_;
};

struct ProjectionRecord {
  std::size_t iteration = 0;
  double probability = 1.0;             ///< survival probability of this iteration
  double cumulative_probability = 1.0;  ///< product over iterations so far
  double energy = 0.0;                  ///< NaN when no Hamiltonian was supplied
  double j_squared = 0.0;
  double jz_squared = 0.0;
};

struct ProjectionReport {
  std::vector<ProjectionRecord> records;
  std::size_t iterations = 0;
  /// Whether the final <J^2> met the tolerance the caller asked for.
  bool converged = true;

  double cumulative_probability() const {
    return records.empty() ? 1.0 : records.back().cumulative_probability;
  }
  /// Columns: iteration, probability, cumulative_probability, energy, J2, Jz2.
  void write_csv(std::ostream& os) const;
};

struct ProjectionResult {
  Statevector state;
  ProjectionReport report;
};

/// Post-selects the ancilla on |0> after exp(-i t J_z (x) Y_a) for each t in
/// the schedule, i.e. multiplies by cos(m t). One record per schedule time.
/// Throws AnnihilatedStateError if the input has no J_z = 0 support.
ProjectionResult project_jz_zero(const Statevector& state, const JzSchedule& schedule,
                                 const SpinHamiltonian* hamiltonian = nullptr);

struct SpinProjectionOptions {
  std::size_t iterations = 11;
  /// Rotation about x between J_z projections; skipped after the last one.
  double rotation_angle = 1.5707963267948966;
  double j_squared_tolerance = 1e-6;
};

/// Repeats [J_z = 0 projection, global R_x] and drops the final rotation.
/// Record 0 is the unprojected input; records 1..iterations follow each
/// projection. iterations == 0 returns the input untouched.
ProjectionResult project_spin_zero(const Statevector& state,
                                   const SpinProjectionOptions& options = {},
                                   const SpinHamiltonian* hamiltonian = nullptr);

/// <J^2> = 1/4 sum_a <(sum_i sigma_i^a)^2>.
double j_squared_expectation(const Statevector& state);
/// <J_z^2>
double jz_squared_expectation(const Statevector& state);
/// <J_z>
double jz_expectation(const Statevector& state);

using SitePermutation = std::vector<std::size_t>;

/// (x, y) -> ((x + dx) mod nx, (y + dy) mod ny). Requires a periodic lattice.
SitePermutation translation_permutation(const Lattice2D& lattice, long dx, long dy);
/// x -> nx - 1 - x and/or y -> ny - 1 - y.
SitePermutation mirror_permutation(const Lattice2D& lattice, bool flip_x, bool flip_y);

/// Translations composed with the four mirror combinations; the target
/// sector is k = (0, 0) and even under both mirrors.
class SymmetryGroupSpec {
 public:
  explicit SymmetryGroupSpec(const Lattice2D& lattice);

  const Lattice2D& lattice() const { return lattice_; }
  /// All nx * ny * 4 elements, as site permutations.
  const std::vector<SitePermutation>& elements() const { return elements_; }

 private:
  Lattice2D lattice_;
  std::vector<SitePermutation> elements_;
};

/// Basis-index image of every basis state under a site permutation.
std::vector<std::uint64_t> basis_permutation(const SitePermutation& perm);

struct SymmetrizeResult {
  Statevector state;
  double probability = 1.0;  ///< ||P psi||^2
};

/// Group average P = (1/|G|) sum_g U_g, then renormalize.
SymmetrizeResult symmetrize_translations_mirrors(const Statevector& state,
                                                 const SymmetryGroupSpec& spec);

}  // namespace spinproj
