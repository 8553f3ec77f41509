#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spinproj/hamiltonian.hpp"
#include "spinproj/qstate.hpp"

namespace spinproj {

using Vec3 = std::array<double, 3>;

/// Rectangular lattice; site (x, y) is qubit y * nx + x.
class Lattice2D {
 public:
  Lattice2D(std::size_t nx, std::size_t ny, bool periodic = true);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  bool periodic() const { return periodic_; }
  std::size_t num_sites() const { return nx_ * ny_; }

  std::size_t site_index(std::size_t x, std::size_t y) const { return y * nx_ + x; }
  std::pair<std::size_t, std::size_t> coordinates(std::size_t site) const {
    return {site % nx_, site / nx_};
  }

  /// Unordered nearest-neighbour pairs (i < j), horizontal and vertical,
  /// wrapping when periodic. Duplicate pairs on width-2 wraps collapse.
  std::vector<std::pair<std::size_t, std::size_t>> nearest_neighbor_bonds() const;

  /// Site reached from (x, y) by displacement (dx, dy) with periodic wrap.
  std::size_t shifted(std::size_t site, long dx, long dy) const;

 private:
  std::size_t nx_;
  std::size_t ny_;
  bool periodic_;
};

/// Unit momentum directions for the all-to-all model.
struct MomentumSet {
  std::vector<Vec3> directions;
  std::vector<double> polar;    ///< theta_i in [0, pi]
  std::vector<double> azimuth;  ///< phi_i in [0, 2 pi)
  std::uint64_t seed = 0;
  std::string rng_algorithm;

  std::size_t size() const { return directions.size(); }
};

/// Name of the generator behind sample_momenta, echoed into run artifacts.
inline constexpr const char* kRngAlgorithm = "std::mt19937_64";

/// Heisenberg couplings with coefficient 2 per unordered nearest-neighbour bond.
SpinHamiltonian heisenberg_hamiltonian(const Lattice2D& lattice);

/// One term (1 - p_i . p_j) per pair i < j.
SpinHamiltonian neutrino_hamiltonian(const MomentumSet& momenta);

/// Uniform directions on the sphere: phi uniform in [0, 2 pi), cos(theta)
/// uniform in [-1, 1]. Deterministic in the seed.
MomentumSet sample_momenta(std::size_t n, std::uint64_t seed);

/// Builds a MomentumSet from explicit directions (normalized, angles derived).
MomentumSet momenta_from_directions(std::vector<Vec3> directions);

/// (|A> + |B>)/sqrt(2) over the two checkerboard configurations.
Statevector neel_state(const Lattice2D& lattice);

struct EulerAngles {
  double alpha = 0.0;  ///< outer R_z
  double beta = 0.0;   ///< R_y
  double gamma = 0.0;  ///< inner R_z
};

/// Angles with R_z(alpha) R_y(beta) R_z(gamma)|0> pointing along p, using
/// R_a(phi) = exp(-i phi sigma_a / 2). Convention: gamma = 0, beta = polar
/// angle, alpha = azimuth. Throws std::invalid_argument unless |p| = 1 +- 1e-9.
EulerAngles euler_angles_for_direction(const Vec3& p);

/// Product state with the Bloch vector of qubit i along momenta.directions[i].
Statevector coherent_product_state(const MomentumSet& momenta);

/// <sigma_x>, <sigma_y>, <sigma_z> of one qubit.
Vec3 bloch_vector(const Statevector& state, std::size_t qubit);

}  // namespace spinproj
