#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinproj/hamiltonian.hpp"
#include "spinproj/models.hpp"
#include "spinproj/qstate.hpp"

namespace spinproj {

/// Dense diagonalization bound.
inline constexpr std::size_t kMaxOracleQubits = 14;
/// Eigenvalues closer than this are treated as one degenerate level.
inline constexpr double kDegeneracyTolerance = 1e-8;

/// Fixed-magnetization block: the basis states with a given number of down spins.
struct MagnetizationBlock {
  std::size_t down_spins = 0;
  std::vector<std::uint64_t> basis;  ///< ascending basis indices
  Eigen::VectorXd values;            ///< ascending
  Eigen::MatrixXd vectors;           ///< columns are eigenvectors in `basis` order
};

struct EigenLabel {
  double energy = 0.0;
  std::size_t block = 0;
  std::size_t column = 0;
  double jz = 0.0;
  double j_squared = 0.0;  ///< <J^2> of the (cluster-resolved) eigenvector
  double spin = 0.0;       ///< S with S(S+1) closest to j_squared
  std::size_t level = 0;   ///< index of the degenerate energy level (global)
};

/// Complete eigen-decomposition of an SU(2)-invariant Hamiltonian, built block
/// by block in J_z. Degenerate clusters inside a block are rotated so every
/// eigenvector is also a J^2 eigenvector. Immutable once built.
class SpectrumAnalysis {
 public:
  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return labels_.size(); }

  /// Sorted ascending.
  const std::vector<EigenLabel>& states() const { return labels_; }
  double eigenvalue(std::size_t k) const { return labels_[k].energy; }
  const std::vector<MagnetizationBlock>& blocks() const { return blocks_; }

  Statevector eigenvector(std::size_t k) const;
  /// ||H v - lambda v|| for eigenpair k.
  double residual(const SpinHamiltonian& h, std::size_t k) const;
  /// Largest |<v_a|v_b> - delta_ab| over all pairs (blocks are orthogonal by construction).
  double orthonormality_error() const;

  /// Indices of states in the lowest degenerate level.
  std::vector<std::size_t> ground_level() const;
  double ground_energy() const { return labels_.front().energy; }
  /// Clusters whose J^2 values did not resolve to S(S+1) within 1e-6.
  const std::vector<std::size_t>& ambiguous_levels() const { return ambiguous_; }

  /// Amplitudes of `state` projected on every eigenvector, |<v_k|psi>|^2.
  std::vector<double> overlaps(const Statevector& state) const;

 private:
  friend SpectrumAnalysis full_spectrum(const SpinHamiltonian& h);
  std::size_t n_qubits_ = 0;
  std::vector<MagnetizationBlock> blocks_;
  std::vector<EigenLabel> labels_;
  std::vector<std::size_t> ambiguous_;
};

/// Throws SizeExceededError for n_qubits > kMaxOracleQubits.
SpectrumAnalysis full_spectrum(const SpinHamiltonian& h);

struct FidelityEntry {
  std::size_t index = 0;
  double eigenvalue = 0.0;
  double fidelity = 0.0;          ///< per returned eigenvector
  double level_fidelity = 0.0;    ///< summed over the degenerate level (basis independent)
  double spin = 0.0;
};

/// One entry per eigenstate; fidelities sum to 1 for a normalized input.
std::vector<FidelityEntry> fidelity_spectrum(const Statevector& state,
                                             const SpectrumAnalysis& spectrum);
/// Summed fidelity over the ground level.
double ground_state_fidelity(const Statevector& state, const SpectrumAnalysis& spectrum);
/// Summed fidelity over eigenstates with odd total spin.
double odd_spin_weight(const Statevector& state, const SpectrumAnalysis& spectrum);

/// Columns: index, eigenvalue, fidelity, S.
void write_fidelity_csv(std::ostream& os, const std::vector<FidelityEntry>& entries);

/// Total spin S of every eigenstate, in SpectrumAnalysis order.
std::vector<double> spin_labels(const SpectrumAnalysis& spectrum);

struct SectorLevel {
  std::string name;
  std::size_t dimension = 0;
  double lowest = 0.0;
  double first_excited = 0.0;  ///< next distinct level; NaN if the sector has one level

  double gap() const { return first_excited - lowest; }
};

/// Nested sectors: full space, J_z = 0, J = 0, and J = 0 with k = 0 and
/// even under both mirrors.
struct SectorCensus {
  std::vector<SectorLevel> sectors;

  const SectorLevel& full() const { return sectors.at(0); }
  const SectorLevel& jz_zero() const { return sectors.at(1); }
  const SectorLevel& spin_zero() const { return sectors.at(2); }
  const SectorLevel& symmetric() const { return sectors.at(3); }
};

/// Dimensions come from the ranks of the nested projectors; energies from H
/// restricted to each image. Needs an even, periodic lattice with n <= 14.
SectorCensus sector_census(const Lattice2D& lattice);

}  // namespace spinproj
