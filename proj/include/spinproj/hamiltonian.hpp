#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace spinproj {

/// One isotropic exchange term: coefficient * (X_i X_j + Y_i Y_j + Z_i Z_j).
struct SpinTerm {
  std::size_t i = 0;
  std::size_t j = 0;
  double coefficient = 0.0;
};

/// Weighted sum of sigma_i . sigma_j couplings. Real coefficients make it
/// Hermitian and SU(2) invariant by construction.
struct SpinHamiltonian {
  std::size_t n_qubits = 0;
  std::vector<SpinTerm> terms;
  std::string label;

  /// Throws std::invalid_argument on self-couplings, out-of-range sites or
  /// non-finite coefficients.
  void validate() const;
};

}  // namespace spinproj
