#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinproj/hamiltonian.hpp"

namespace spinproj {

using Complex = std::complex<double>;

/// Row-major 2x2 matrix, element (r, c) at index 2 * r + c.
using Matrix2 = std::array<Complex, 4>;
/// Row-major 4x4 matrix, element (r, c) at index 4 * r + c.
using Matrix4 = std::array<Complex, 16>;

/// Largest register the dense kernels accept (2^26 amplitudes, 1 GiB).
inline constexpr std::size_t kMaxQubits = 26;
/// Below this squared norm a post-selected state counts as annihilated.
inline constexpr double kNormFloor = 1e-14;
inline constexpr double kUnitaryTolerance = 1e-12;

class SizeExceededError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Raised when a Kraus factor leaves (numerically) nothing of the input.
class AnnihilatedStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace gates {
Matrix2 identity();
Matrix2 pauli_x();
Matrix2 pauli_y();
Matrix2 pauli_z();
Matrix2 hadamard();
Matrix2 phase_s();
Matrix2 phase_s_dagger();
/// exp(-i angle X / 2)
Matrix2 rx(double angle);
/// exp(-i angle Y / 2)
Matrix2 ry(double angle);
/// exp(-i angle Z / 2)
Matrix2 rz(double angle);

Matrix2 multiply(const Matrix2& a, const Matrix2& b);
Matrix2 adjoint(const Matrix2& a);
bool is_unitary(const Matrix2& u, double tol = kUnitaryTolerance);
Matrix4 multiply(const Matrix4& a, const Matrix4& b);
Matrix4 adjoint(const Matrix4& a);
bool is_unitary(const Matrix4& u, double tol = kUnitaryTolerance);
}  // namespace gates

/// A 4x4 unitary addressed to an ordered qubit pair (first, second).
///
/// Local basis index is 2 * bit(first) + bit(second), so for a CNOT-like
/// matrix `first` plays the role of the control.
class TwoQubitUnitary {
 public:
  TwoQubitUnitary(const Matrix4& matrix, std::size_t first, std::size_t second);

  const Matrix4& matrix() const { return matrix_; }
  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }

 private:
  Matrix4 matrix_;
  std::size_t first_;
  std::size_t second_;
};

/// Real diagonal operator in the computational basis.
struct DiagonalObservable {
  std::vector<double> values;
};

/// Dense 2^n amplitude vector. Qubit q is bit q of the basis index
/// (qubit 0 is the least-significant bit); bit value 0 is spin up.
///
/// Operations mutate in place. A Statevector has a single writer; const
/// member functions may run concurrently.
class Statevector {
 public:
  /// |0...0>; throws SizeExceededError beyond kMaxQubits.
  explicit Statevector(std::size_t n_qubits);

  static Statevector basis_state(std::size_t n_qubits, std::uint64_t index);
  /// Takes ownership of an amplitude vector whose length is a power of two.
  /// The vector is not renormalized.
  static Statevector from_amplitudes(std::vector<Complex> amplitudes);

  std::size_t num_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }

  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> mutable_amplitudes() { return amplitudes_; }
  const Complex& operator[](std::size_t index) const { return amplitudes_[index]; }

  double norm() const;
  double squared_norm() const;
  /// Rescales to unit norm and returns the squared norm it had before.
  double normalize();
  void scale(Complex factor);

  void apply_single_qubit(std::size_t qubit, const Matrix2& u);
  void apply_cnot(std::size_t control, std::size_t target);
  void apply_two_qubit(const TwoQubitUnitary& gate);
  /// Exchanges the two qubits (the swap operator rho_ij).
  void apply_swap(std::size_t i, std::size_t j);
  /// exp(i theta rho_ij) = cos(theta) + i sin(theta) rho_ij, without forming a 4x4.
  void apply_swap_exponential(std::size_t i, std::size_t j, double theta);
  /// R_x(angle) on every qubit.
  void global_rotation_x(double angle);

  /// Multiplies amplitude b by f(obs.values[b]) and renormalizes. Returns the
  /// squared norm before renormalization (the post-selection probability).
  /// Throws AnnihilatedStateError below kNormFloor, leaving the state untouched.
  double post_select_diagonal(const DiagonalObservable& obs,
                              const std::function<double(double)>& f);

  /// Same contract with the Kraus weights already evaluated per basis index.
  double post_select_weights(std::span<const double> weights);

  /// Applies a qubit relabelling: the bit at site s moves to site perm[s].
  void permute_qubits(std::span<const std::size_t> perm);

 private:
  Statevector(std::size_t n_qubits, std::vector<Complex> amplitudes);
  void check_qubit(std::size_t qubit) const;

  std::size_t n_qubits_;
  std::vector<Complex> amplitudes_;
};

/// <a|b>
Complex inner_product(const Statevector& a, const Statevector& b);
/// |<a|b>|^2
double fidelity(const Statevector& a, const Statevector& b);

/// H|psi>, unnormalized.
std::vector<Complex> apply_hamiltonian(const SpinHamiltonian& h,
                                       std::span<const Complex> psi);
/// <psi|H|psi>. Throws std::logic_error if the imaginary residue exceeds 1e-10.
double expectation(const Statevector& state, const SpinHamiltonian& h);
/// Dense 2^n x 2^n matrix of H, column-major; only meant for n <= 8 checks.
std::vector<Complex> dense_matrix(const SpinHamiltonian& h);

}  // namespace spinproj
