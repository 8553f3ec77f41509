#include "spinproj/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

namespace spinproj {

Lattice2D::Lattice2D(std::size_t nx, std::size_t ny, bool periodic)
    : nx_(nx), ny_(ny), periodic_(periodic) {
  if (nx == 0 || ny == 0) throw std::invalid_argument("Lattice2D: dimensions must be positive");
  if (nx * ny > kMaxQubits) throw SizeExceededError("Lattice2D: too many sites");
}

std::size_t Lattice2D::shifted(std::size_t site, long dx, long dy) const {
  const auto [x, y] = coordinates(site);
  const long nx = static_cast<long>(nx_), ny = static_cast<long>(ny_);
  const long xs = ((static_cast<long>(x) + dx) % nx + nx) % nx;
  const long ys = ((static_cast<long>(y) + dy) % ny + ny) % ny;
  return site_index(static_cast<std::size_t>(xs), static_cast<std::size_t>(ys));
}

std::vector<std::pair<std::size_t, std::size_t>> Lattice2D::nearest_neighbor_bonds() const {
  std::vector<std::pair<std::size_t, std::size_t>> bonds;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    const auto key = std::minmax(a, b);
    if (seen.insert(key).second) bonds.emplace_back(key.first, key.second);
  };
  for (std::size_t y = 0; y < ny_; ++y) {
    for (std::size_t x = 0; x < nx_; ++x) {
      const std::size_t s = site_index(x, y);
      if (x + 1 < nx_ || periodic_) add(s, shifted(s, 1, 0));
      if (y + 1 < ny_ || periodic_) add(s, shifted(s, 0, 1));
    }
  }
  return bonds;
}

SpinHamiltonian heisenberg_hamiltonian(const Lattice2D& lattice) {
  if (lattice.nx() < 2 || lattice.ny() < 2)
    throw std::invalid_argument("heisenberg_hamiltonian: degenerate lattice (need nx, ny >= 2)");
  SpinHamiltonian h;
  h.n_qubits = lattice.num_sites();
  h.label = "heisenberg";
  // Ordered-pair sum: each unordered bond appears twice.
  for (const auto& [i, j] : lattice.nearest_neighbor_bonds()) h.terms.push_back({i, j, 2.0});
  return h;
}

SpinHamiltonian neutrino_hamiltonian(const MomentumSet& momenta) {
  const std::size_t n = momenta.size();
  if (n < 2) throw std::invalid_argument("neutrino_hamiltonian: need at least two particles");
  SpinHamiltonian h;
  h.n_qubits = n;
  h.label = "neutrino";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = momenta.directions[i];
      const auto& b = momenta.directions[j];
      const double cos_ij = std::clamp(a[0] * b[0] + a[1] * b[1] + a[2] * b[2], -1.0, 1.0);
      h.terms.push_back({i, j, 1.0 - cos_ij});
    }
  }
  return h;
}

namespace {

Vec3 direction_from_angles(double polar, double azimuth) {
  const double st = std::sin(polar);
  return {st * std::cos(azimuth), st * std::sin(azimuth), std::cos(polar)};
}

}  // namespace

MomentumSet sample_momenta(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_momenta: n must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MomentumSet m;
  m.seed = seed;
  m.rng_algorithm = kRngAlgorithm;
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double cos_theta = std::clamp(2.0 * unit(rng) - 1.0, -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    m.polar.push_back(theta);
    m.azimuth.push_back(phi);
    m.directions.push_back(direction_from_angles(theta, phi));
  }
  return m;
}

MomentumSet momenta_from_directions(std::vector<Vec3> directions) {
  MomentumSet m;
  m.rng_algorithm = "explicit";
  for (auto& d : directions) {
    const double r = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    if (!(r > 0.0)) throw std::invalid_argument("momenta_from_directions: zero vector");
    const Vec3 u{d[0] / r, d[1] / r, d[2] / r};
    const double theta = std::acos(std::clamp(u[2], -1.0, 1.0));
    double phi = std::atan2(u[1], u[0]);
    if (phi < 0) phi += 2.0 * std::numbers::pi;
    m.polar.push_back(theta);
    m.azimuth.push_back(phi);
    m.directions.push_back(u);
  }
  return m;
}

Statevector neel_state(const Lattice2D& lattice) {
  const std::size_t n = lattice.num_sites();
  if (n % 2 != 0) throw std::invalid_argument("neel_state: odd number of sites");
  std::uint64_t config = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const auto [x, y] = lattice.coordinates(s);
    if ((x + y) % 2 == 1) config |= std::uint64_t{1} << s;
  }
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  Statevector state = Statevector::basis_state(n, config);
  auto amps = state.mutable_amplitudes();
  amps[config] = (1.0 / std::numbers::sqrt2);
  amps[config ^ all] = (1.0 / std::numbers::sqrt2);
  return state;
}

EulerAngles euler_angles_for_direction(const Vec3& p) {
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  if (std::abs(r - 1.0) > 1e-9)
    throw std::invalid_argument("euler_angles_for_direction: direction is not a unit vector");
  EulerAngles e;
  e.beta = std::acos(std::clamp(p[2], -1.0, 1.0));
  // Azimuth is irrelevant on the poles; pin it to zero there.
  e.alpha = (std::hypot(p[0], p[1]) < 1e-15) ? 0.0 : std::atan2(p[1], p[0]);
  e.gamma = 0.0;
  return e;
}

Statevector coherent_product_state(const MomentumSet& momenta) {
  const std::size_t n = momenta.size();
  Statevector state(n);
  for (std::size_t q = 0; q < n; ++q) {
    const EulerAngles e = euler_angles_for_direction(momenta.directions[q]);
    state.apply_single_qubit(q, gates::rz(e.gamma));
    state.apply_single_qubit(q, gates::ry(e.beta));
    state.apply_single_qubit(q, gates::rz(e.alpha));
  }
  return state;
}

Vec3 bloch_vector(const Statevector& state, std::size_t qubit) {
  if (qubit >= state.num_qubits()) throw std::out_of_range("bloch_vector: qubit out of range");
  const std::uint64_t mask = std::uint64_t{1} << qubit;
  const auto a = state.amplitudes();
  Complex off = 0.0;  // sum over pairs of conj(a0) a1
  double z = 0.0;
  for (std::uint64_t b = 0; b < a.size(); ++b) {
    if (b & mask) {
      z -= std::norm(a[b]);
    } else {
      z += std::norm(a[b]);
      off += std::conj(a[b]) * a[b | mask];
    }
  }
  return {2.0 * off.real(), 2.0 * off.imag(), z};
}

}  // namespace spinproj
