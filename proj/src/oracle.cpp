#include "spinproj/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "spinproj/symmetry.hpp"

namespace spinproj {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSpinResolution = 1e-6;

std::vector<std::uint64_t> magnetization_basis(std::size_t n, std::size_t down) {
  std::vector<std::uint64_t> basis;
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t b = 0; b < dim; ++b)
    if (static_cast<std::size_t>(std::popcount(b)) == down) basis.push_back(b);
  return basis;
}

// Position of every basis index inside its own magnetization block.
std::vector<std::size_t> block_positions(std::size_t n) {
  std::vector<std::size_t> pos(std::size_t{1} << n);
  std::vector<std::size_t> count(n + 1, 0);
  for (std::uint64_t b = 0; b < pos.size(); ++b) pos[b] = count[std::popcount(b)]++;
  return pos;
}

inline std::uint64_t swap_bits(std::uint64_t b, std::size_t i, std::size_t j) {
  const bool bi = (b >> i) & 1U, bj = (b >> j) & 1U;
  return bi == bj ? b : b ^ ((std::uint64_t{1} << i) | (std::uint64_t{1} << j));
}

// sigma.sigma = 2 SWAP - 1 restricted to one block.
MatrixXd hamiltonian_block(const SpinHamiltonian& h, const std::vector<std::uint64_t>& basis,
                           const std::vector<std::size_t>& pos) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  MatrixXd m = MatrixXd::Zero(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const std::uint64_t b = basis[c];
    for (const auto& t : h.terms) {
      m(c, c) -= t.coefficient;
      const auto r = static_cast<Eigen::Index>(pos[swap_bits(b, t.i, t.j)]);
      m(r, c) += 2.0 * t.coefficient;
    }
  }
  return m;
}

// J^2 = 3n/4 - n(n-1)/4 + sum_{i<j} SWAP_ij restricted to one block.
MatrixXd j_squared_block(std::size_t n, const std::vector<std::uint64_t>& basis,
                         const std::vector<std::size_t>& pos) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  const double nn = static_cast<double>(n);
  MatrixXd m = MatrixXd::Identity(d, d) * (0.75 * nn - 0.25 * nn * (nn - 1.0));
  for (Eigen::Index c = 0; c < d; ++c) {
    const std::uint64_t b = basis[c];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        m(static_cast<Eigen::Index>(pos[swap_bits(b, i, j)]), c) += 1.0;
  }
  return m;
}

double spin_from_j_squared(double j2, std::size_t n) {
  const double s = 0.5 * (-1.0 + std::sqrt(std::max(0.0, 1.0 + 4.0 * j2)));
  double twice = std::round(2.0 * s);
  // Parity of 2S must match the number of spin-1/2 constituents.
  if (static_cast<long>(twice) % 2 != static_cast<long>(n % 2)) {
    twice += (2.0 * s > twice) ? 1.0 : -1.0;
  }
  return std::max(0.0, twice / 2.0);
}

// Lowest value and the next value separated by more than the degeneracy tolerance.
std::pair<double, double> lowest_two_levels(const VectorXd& sorted) {
  const double lo = sorted.size() ? sorted(0) : std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index k = 1; k < sorted.size(); ++k)
    if (sorted(k) > lo + kDegeneracyTolerance) return {lo, sorted(k)};
  return {lo, std::numeric_limits<double>::quiet_NaN()};
}

}  // namespace

SpectrumAnalysis full_spectrum(const SpinHamiltonian& h) {
  const std::size_t n = h.n_qubits;
  if (n == 0) throw std::invalid_argument("full_spectrum: empty Hamiltonian");
  if (n > kMaxOracleQubits) throw SizeExceededError("full_spectrum: n exceeds the dense bound");
  h.validate();

  SpectrumAnalysis out;
  out.n_qubits_ = n;
  const auto pos = block_positions(n);
  std::vector<EigenLabel> labels;
  std::vector<bool> ambiguous_state;

  for (std::size_t down = 0; down <= n; ++down) {
    MagnetizationBlock block;
    block.down_spins = down;
    block.basis = magnetization_basis(n, down);
    const MatrixXd hb = hamiltonian_block(h, block.basis, pos);
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(hb);
    if (solver.info() != Eigen::Success) throw std::runtime_error("full_spectrum: eigensolver failed");
    block.values = solver.eigenvalues();
    block.vectors = solver.eigenvectors();

    const MatrixXd j2 = j_squared_block(n, block.basis, pos);
    const auto d = block.values.size();
    std::vector<double> j2_values(static_cast<std::size_t>(d), 0.0);
    Eigen::Index start = 0;
    while (start < d) {
      Eigen::Index stop = start + 1;
      while (stop < d && block.values(stop) - block.values(stop - 1) < kDegeneracyTolerance) ++stop;
      const Eigen::Index width = stop - start;
      auto cluster = block.vectors.middleCols(start, width);
      MatrixXd c = cluster.transpose() * j2 * cluster;
      if (width > 1) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> rot(0.5 * (c + c.transpose()));
        const MatrixXd rotated = cluster * rot.eigenvectors();
        block.vectors.middleCols(start, width) = rotated;
        for (Eigen::Index k = 0; k < width; ++k) j2_values[start + k] = rot.eigenvalues()(k);
      } else {
        j2_values[start] = c(0, 0);
      }
      start = stop;
    }

    const std::size_t block_index = out.blocks_.size();
    const double jz = (static_cast<double>(n) - 2.0 * static_cast<double>(down)) / 2.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      EigenLabel l;
      l.energy = block.values(k);
      l.block = block_index;
      l.column = static_cast<std::size_t>(k);
      l.jz = jz;
      l.j_squared = j2_values[k];
      l.spin = spin_from_j_squared(l.j_squared, n);
      labels.push_back(l);
      ambiguous_state.push_back(std::abs(l.spin * (l.spin + 1.0) - l.j_squared) > kSpinResolution);
    }
    out.blocks_.push_back(std::move(block));
  }

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return labels[a].energy < labels[b].energy;
  });
  std::size_t level = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    EigenLabel l = labels[order[k]];
    if (k > 0 && l.energy - out.labels_.back().energy >= kDegeneracyTolerance) ++level;
    l.level = level;
    if (ambiguous_state[order[k]] &&
        (out.ambiguous_.empty() || out.ambiguous_.back() != level))
      out.ambiguous_.push_back(level);
    out.labels_.push_back(l);
  }
  return out;
}

Statevector SpectrumAnalysis::eigenvector(std::size_t k) const {
  const EigenLabel& l = labels_.at(k);
  const auto& block = blocks_[l.block];
  std::vector<Complex> amps(std::size_t{1} << n_qubits_, Complex{0.0, 0.0});
  for (std::size_t r = 0; r < block.basis.size(); ++r)
    amps[block.basis[r]] = block.vectors(static_cast<Eigen::Index>(r),
                                         static_cast<Eigen::Index>(l.column));
  return Statevector::from_amplitudes(std::move(amps));
}

double SpectrumAnalysis::residual(const SpinHamiltonian& h, std::size_t k) const {
  const Statevector v = eigenvector(k);
  const auto hv = apply_hamiltonian(h, v.amplitudes());
  const double lambda = labels_.at(k).energy;
  double acc = 0.0;
  for (std::size_t b = 0; b < hv.size(); ++b) acc += std::norm(hv[b] - lambda * v[b]);
  return std::sqrt(acc);
}

double SpectrumAnalysis::orthonormality_error() const {
  double worst = 0.0;
  for (const auto& block : blocks_) {
    const MatrixXd g = block.vectors.transpose() * block.vectors;
    worst = std::max(worst, (g - MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<std::size_t> SpectrumAnalysis::ground_level() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < labels_.size() && labels_[k].level == 0; ++k) out.push_back(k);
  return out;
}

std::vector<double> SpectrumAnalysis::overlaps(const Statevector& state) const {
  if (state.num_qubits() != n_qubits_)
    throw std::invalid_argument("overlaps: dimension mismatch");
  std::vector<std::vector<double>> per_block;
  for (const auto& block : blocks_) {
    const auto d = static_cast<Eigen::Index>(block.basis.size());
    Eigen::VectorXcd psi(d);
    for (Eigen::Index r = 0; r < d; ++r) psi(r) = state[block.basis[r]];
    const Eigen::VectorXcd amps = block.vectors.transpose().cast<Complex>() * psi;
    std::vector<double> f(static_cast<std::size_t>(d));
    for (Eigen::Index r = 0; r < d; ++r) f[r] = std::norm(amps(r));
    per_block.push_back(std::move(f));
  }
  std::vector<double> out;
  out.reserve(labels_.size());
  for (const auto& l : labels_) out.push_back(per_block[l.block][l.column]);
  return out;
}

std::vector<FidelityEntry> fidelity_spectrum(const Statevector& state,
                                             const SpectrumAnalysis& spectrum) {
  const std::vector<double> f = spectrum.overlaps(state);
  const auto& states = spectrum.states();
  std::vector<double> level_sum(states.empty() ? 0 : states.back().level + 1, 0.0);
  for (std::size_t k = 0; k < f.size(); ++k) level_sum[states[k].level] += f[k];
  std::vector<FidelityEntry> out;
  out.reserve(f.size());
  for (std::size_t k = 0; k < f.size(); ++k)
    out.push_back({k, states[k].energy, f[k], level_sum[states[k].level], states[k].spin});
  return out;
}

double ground_state_fidelity(const Statevector& state, const SpectrumAnalysis& spectrum) {
  const std::vector<double> f = spectrum.overlaps(state);
  double acc = 0.0;
  for (std::size_t k : spectrum.ground_level()) acc += f[k];
  return acc;
}

double odd_spin_weight(const Statevector& state, const SpectrumAnalysis& spectrum) {
  const std::vector<double> f = spectrum.overlaps(state);
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto s = static_cast<long>(std::lround(spectrum.states()[k].spin));
    if (s % 2 == 1) acc += f[k];
  }
  return acc;
}

void write_fidelity_csv(std::ostream& os, const std::vector<FidelityEntry>& entries) {
  os << "index,eigenvalue,fidelity,S\n";
  const auto old = os.precision(12);
  for (const auto& e : entries)
    os << e.index << ',' << e.eigenvalue << ',' << e.fidelity << ',' << e.spin << '\n';
  os.precision(old);
}

std::vector<double> spin_labels(const SpectrumAnalysis& spectrum) {
  std::vector<double> out;
  out.reserve(spectrum.dimension());
  for (const auto& l : spectrum.states()) out.push_back(l.spin);
  return out;
}

SectorCensus sector_census(const Lattice2D& lattice) {
  const std::size_t n = lattice.num_sites();
  if (n > kMaxOracleQubits) throw SizeExceededError("sector_census: lattice too large");
  if (n % 2 != 0) throw std::invalid_argument("sector_census: needs an even number of sites");
  const SpinHamiltonian h = heisenberg_hamiltonian(lattice);
  const SymmetryGroupSpec group(lattice);
  SectorCensus census;

  {
    const SpectrumAnalysis spectrum = full_spectrum(h);
    VectorXd all(static_cast<Eigen::Index>(spectrum.dimension()));
    for (std::size_t k = 0; k < spectrum.dimension(); ++k) all(k) = spectrum.eigenvalue(k);
    const auto [lo, hi] = lowest_two_levels(all);
    census.sectors.push_back({"full", spectrum.dimension(), lo, hi});
  }

  const auto pos = block_positions(n);
  const auto basis = magnetization_basis(n, n / 2);
  const auto d = static_cast<Eigen::Index>(basis.size());
  const MatrixXd hb = hamiltonian_block(h, basis, pos);

  // P_{J_z=0} is diagonal with one unit entry per basis state in the block.
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> s(hb, Eigen::EigenvaluesOnly);
    const auto [lo, hi] = lowest_two_levels(s.eigenvalues());
    census.sectors.push_back({"Jz=0", basis.size(), lo, hi});
  }

  Eigen::SelfAdjointEigenSolver<MatrixXd> j2(j_squared_block(n, basis, pos));
  std::vector<Eigen::Index> singlet_cols;
  for (Eigen::Index k = 0; k < d; ++k)
    if (j2.eigenvalues()(k) < 0.5) singlet_cols.push_back(k);
  MatrixXd v0(d, static_cast<Eigen::Index>(singlet_cols.size()));
  for (std::size_t k = 0; k < singlet_cols.size(); ++k)
    v0.col(static_cast<Eigen::Index>(k)) = j2.eigenvectors().col(singlet_cols[k]);
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> s(v0.transpose() * hb * v0, Eigen::EigenvaluesOnly);
    const auto [lo, hi] = lowest_two_levels(s.eigenvalues());
    census.sectors.push_back({"J=0", singlet_cols.size(), lo, hi});
  }

  MatrixXd pg = MatrixXd::Zero(d, d);
  const double weight = 1.0 / static_cast<double>(group.elements().size());
  for (const auto& g : group.elements()) {
    for (Eigen::Index c = 0; c < d; ++c) {
      std::uint64_t image = 0;
      for (std::size_t s = 0; s < n; ++s) image |= ((basis[c] >> s) & 1U) << g[s];
      pg(static_cast<Eigen::Index>(pos[image]), c) += weight;
    }
  }
  const MatrixXd m = v0.transpose() * pg * v0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> proj(0.5 * (m + m.transpose()));
  std::vector<Eigen::Index> sym_cols;
  for (Eigen::Index k = 0; k < proj.eigenvalues().size(); ++k)
    if (proj.eigenvalues()(k) > 0.5) sym_cols.push_back(k);
  MatrixXd w(v0.cols(), static_cast<Eigen::Index>(sym_cols.size()));
  for (std::size_t k = 0; k < sym_cols.size(); ++k)
    w.col(static_cast<Eigen::Index>(k)) = proj.eigenvectors().col(sym_cols[k]);
  const MatrixXd v1 = v0 * w;
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> s(v1.transpose() * hb * v1, Eigen::EigenvaluesOnly);
    const auto [lo, hi] = lowest_two_levels(s.eigenvalues());
    census.sectors.push_back({"J=0,k=0,mirror-even", sym_cols.size(), lo, hi});
  }
  return census;
}

}  // namespace spinproj
