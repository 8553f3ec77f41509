#include "spinproj/symmetry.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace spinproj {

DiagonalObservable jz_eigenvalues(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > kMaxQubits)
    throw std::invalid_argument("jz_eigenvalues: bad qubit count");
  const std::size_t dim = std::size_t{1} << n_qubits;
  DiagonalObservable obs;
  obs.values.resize(dim);
  const double n = static_cast<double>(n_qubits);
  for (std::size_t b = 0; b < dim; ++b) {
    const double down = std::popcount(static_cast<std::uint64_t>(b));
    obs.values[b] = (n - 2.0 * down) / 2.0;
  }
  return obs;
}

std::size_t JzSchedule::required_steps(std::size_t n_qubits) {
  if (n_qubits < 2) return 1;
  return static_cast<std::size_t>(std::bit_width(n_qubits / 2));
}

JzSchedule JzSchedule::exact_for(std::size_t n_qubits) {
  return JzSchedule(required_steps(n_qubits), n_qubits);
}

JzSchedule::JzSchedule(std::size_t steps, std::size_t n_qubits) {
  if (steps < required_steps(n_qubits))
    throw std::invalid_argument("JzSchedule: too few steps for an exact J_z = 0 projection");
  double t = std::numbers::pi;
  for (std::size_t i = 1; i <= steps; ++i) {
    t /= 2.0;
    times_.push_back(t);
  }
}

void ProjectionReport::write_csv(std::ostream& os) const {
  os << "iteration,probability,cumulative_probability,energy,J2,Jz2\n";
  const auto old = os.precision(12);
  for (const auto& r : records) {
    os << r.iteration << ',' << r.probability << ',' << r.cumulative_probability << ','
       << r.energy << ',' << r.j_squared << ',' << r.jz_squared << '\n';
  }
  os.precision(old);
}

namespace {

void require_even(const Statevector& s, const char* what) {
  if (s.num_qubits() % 2 != 0)
    throw std::invalid_argument(std::string(what) + ": requires an even number of qubits");
}

ProjectionRecord make_record(const Statevector& s, std::size_t iteration, double prob,
                             double cumulative, const SpinHamiltonian* h) {
  ProjectionRecord r;
  r.iteration = iteration;
  r.probability = prob;
  r.cumulative_probability = cumulative;
  r.energy = h ? expectation(s, *h) : std::numeric_limits<double>::quiet_NaN();
  r.j_squared = j_squared_expectation(s);
  r.jz_squared = jz_squared_expectation(s);
  return r;
}

// Product of cos(m t_i) over the schedule for every basis state.
std::vector<std::vector<double>> kraus_weights(std::size_t n, const JzSchedule& schedule) {
  const DiagonalObservable m = jz_eigenvalues(n);
  std::vector<std::vector<double>> out;
  for (const double t : schedule.times()) {
    std::vector<double> w(m.values.size());
    for (std::size_t b = 0; b < w.size(); ++b) {
      const double c = std::cos(m.values[b] * t);
      // cos(integer * pi/2^i) at a zero is ~1e-16; snap so the J_z projection is exact.
      w[b] = (std::abs(c) < 1e-12) ? 0.0 : c;
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

ProjectionResult project_jz_zero(const Statevector& state, const JzSchedule& schedule,
                                 const SpinHamiltonian* hamiltonian) {
  require_even(state, "project_jz_zero");
  Statevector s = state;
  ProjectionReport report;
  double cumulative = 1.0;
  std::size_t step = 0;
  for (const auto& w : kraus_weights(s.num_qubits(), schedule)) {
    const double p = s.post_select_weights(w);
    cumulative *= p;
    report.records.push_back(make_record(s, ++step, p, cumulative, hamiltonian));
  }
  report.iterations = step;
  return {std::move(s), std::move(report)};
}

ProjectionResult project_spin_zero(const Statevector& state,
                                   const SpinProjectionOptions& options,
                                   const SpinHamiltonian* hamiltonian) {
  require_even(state, "project_spin_zero");
  Statevector s = state;
  ProjectionReport report;
  report.records.push_back(make_record(s, 0, 1.0, 1.0, hamiltonian));
  const auto weights = kraus_weights(s.num_qubits(), JzSchedule::exact_for(s.num_qubits()));
  double cumulative = 1.0;
  for (std::size_t it = 1; it <= options.iterations; ++it) {
    double p = 1.0;
    for (const auto& w : weights) p *= s.post_select_weights(w);
    cumulative *= p;
    report.records.push_back(make_record(s, it, p, cumulative, hamiltonian));
    if (it < options.iterations) s.global_rotation_x(options.rotation_angle);
  }
  report.iterations = options.iterations;
  report.converged = report.records.back().j_squared <= options.j_squared_tolerance;
  return {std::move(s), std::move(report)};
}

double j_squared_expectation(const Statevector& state) {
  const std::size_t n = state.num_qubits();
  const auto a = state.amplitudes();
  double xx = 0.0, yy = 0.0, zz = 0.0;
  for (std::uint64_t b = 0; b < a.size(); ++b) {
    Complex sx = 0.0, sy = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      const std::uint64_t mask = std::uint64_t{1} << q;
      const Complex v = a[b ^ mask];
      sx += v;
      // (sigma^y psi)[b] = +i psi[b^mask] if bit q of b is 1, else -i psi[b^mask].
      sy += (b & mask) ? Complex{-v.imag(), v.real()} : Complex{v.imag(), -v.real()};
    }
    const double m2 = static_cast<double>(n) - 2.0 * std::popcount(b);
    xx += std::norm(sx);
    yy += std::norm(sy);
    zz += m2 * m2 * std::norm(a[b]);
  }
  return 0.25 * (xx + yy + zz);
}

double jz_squared_expectation(const Statevector& state) {
  const auto a = state.amplitudes();
  const double n = static_cast<double>(state.num_qubits());
  double acc = 0.0;
  for (std::uint64_t b = 0; b < a.size(); ++b) {
    const double m = (n - 2.0 * std::popcount(b)) / 2.0;
    acc += m * m * std::norm(a[b]);
  }
  return acc;
}

double jz_expectation(const Statevector& state) {
  const auto a = state.amplitudes();
  const double n = static_cast<double>(state.num_qubits());
  double acc = 0.0;
  for (std::uint64_t b = 0; b < a.size(); ++b)
    acc += (n - 2.0 * std::popcount(b)) / 2.0 * std::norm(a[b]);
  return acc;
}

SitePermutation translation_permutation(const Lattice2D& lattice, long dx, long dy) {
  if (!lattice.periodic())
    throw std::invalid_argument("translation_permutation: lattice is not periodic");
  SitePermutation perm(lattice.num_sites());
  for (std::size_t s = 0; s < perm.size(); ++s) perm[s] = lattice.shifted(s, dx, dy);
  return perm;
}

SitePermutation mirror_permutation(const Lattice2D& lattice, bool flip_x, bool flip_y) {
  SitePermutation perm(lattice.num_sites());
  for (std::size_t s = 0; s < perm.size(); ++s) {
    auto [x, y] = lattice.coordinates(s);
    if (flip_x) x = lattice.nx() - 1 - x;
    if (flip_y) y = lattice.ny() - 1 - y;
    perm[s] = lattice.site_index(x, y);
  }
  return perm;
}

SymmetryGroupSpec::SymmetryGroupSpec(const Lattice2D& lattice) : lattice_(lattice) {
  if (!lattice.periodic())
    throw std::invalid_argument("SymmetryGroupSpec: translations need a periodic lattice");
  for (long dy = 0; dy < static_cast<long>(lattice.ny()); ++dy) {
    for (long dx = 0; dx < static_cast<long>(lattice.nx()); ++dx) {
      const SitePermutation t = translation_permutation(lattice, dx, dy);
      for (int mirror = 0; mirror < 4; ++mirror) {
        const SitePermutation m = mirror_permutation(lattice, mirror & 1, mirror & 2);
        SitePermutation g(t.size());
        for (std::size_t s = 0; s < g.size(); ++s) g[s] = t[m[s]];
        elements_.push_back(std::move(g));
      }
    }
  }
}

std::vector<std::uint64_t> basis_permutation(const SitePermutation& perm) {
  const std::size_t n = perm.size();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::uint64_t> image(dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    std::uint64_t out = 0;
    for (std::size_t s = 0; s < n; ++s) out |= ((b >> s) & 1U) << perm[s];
    image[b] = out;
  }
  return image;
}

SymmetrizeResult symmetrize_translations_mirrors(const Statevector& state,
                                                 const SymmetryGroupSpec& spec) {
  if (state.num_qubits() != spec.lattice().num_sites())
    throw std::invalid_argument("symmetrize_translations_mirrors: lattice/state size mismatch");
  const auto a = state.amplitudes();
  std::vector<Complex> avg(a.size(), Complex{0.0, 0.0});
  for (const auto& g : spec.elements()) {
    const auto image = basis_permutation(g);
    for (std::uint64_t b = 0; b < a.size(); ++b) avg[image[b]] += a[b];
  }
  const double inv = 1.0 / static_cast<double>(spec.elements().size());
  for (auto& v : avg) v *= inv;
  Statevector out = Statevector::from_amplitudes(std::move(avg));
  const double sq = out.squared_norm();
  if (sq < kNormFloor)
    throw AnnihilatedStateError("symmetrize_translations_mirrors: no weight in the symmetric sector");
  out.normalize();
  return {std::move(out), sq};
}

}  // namespace spinproj
