#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "spinproj/models.hpp"
#include "spinproj/oracle.hpp"
#include "spinproj/symmetry.hpp"
#include "test_support.hpp"

using namespace spinproj;
using namespace spinproj::testing;

namespace {

const double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Exact projector onto total spin S, as a polynomial in the dense J^2 matrix.
std::vector<Complex> apply_spin_projector(std::size_t n, double spin, std::span<const Complex> v) {
  static std::map<std::size_t, std::vector<Complex>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, dense_total_spin_squared(n)).first;
  const auto& j2 = it->second;
  std::vector<Complex> out(v.begin(), v.end());
  const double target = spin * (spin + 1);
  for (double s = (n % 2 == 0) ? 0.0 : 0.5; s <= n / 2.0 + 1e-9; s += 1.0) {
    if (s == spin) continue;
    const double other = s * (s + 1);
    auto jv = matvec(j2, out);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (jv[k] - other * out[k]) / (target - other);
  }
  return out;
}

double weight(std::span<const Complex> v) {
  double w = 0.0;
  for (const auto& a : v) w += std::norm(a);
  return w;
}

double odd_spin_probability(const Statevector& s) {
  double w = 0.0;
  for (double spin = 1.0; spin <= s.num_qubits() / 2.0; spin += 2.0)
    w += weight(apply_spin_projector(s.num_qubits(), spin, s.amplitudes()));
  return w;
}

Statevector apply_permutation(const Statevector& s, const SitePermutation& perm) {
  const auto img = basis_permutation(perm);
  std::vector<Complex> out(s.dimension());
  for (std::size_t b = 0; b < s.dimension(); ++b) out[img[b]] = s[b];
  return Statevector::from_amplitudes(std::move(out));
}

}  // namespace

TEST(JzEigenvalues, Examples) {
  const auto two = jz_eigenvalues(2);
  EXPECT_EQ(two.values, (std::vector<double>{1.0, 0.0, 0.0, -1.0}));
  const auto twelve = jz_eigenvalues(12);
  EXPECT_EQ(twelve.values[0], 6.0);
  double sum = 0.0;
  for (double v : twelve.values) sum += v;
  EXPECT_EQ(sum, 0.0);
}

TEST(JzSchedule, ExactLength) {
  EXPECT_EQ(JzSchedule::required_steps(2), 1u);
  EXPECT_EQ(JzSchedule::required_steps(4), 2u);
  EXPECT_EQ(JzSchedule::required_steps(12), 3u);
  EXPECT_EQ(JzSchedule::required_steps(16), 4u);
  const JzSchedule s = JzSchedule::exact_for(12);
  ASSERT_EQ(s.steps(), 3u);
  EXPECT_DOUBLE_EQ(s.times()[0], kPi / 2);
  EXPECT_DOUBLE_EQ(s.times()[2], kPi / 8);
  EXPECT_THROW(JzSchedule(2, 12), std::invalid_argument);
  for (std::size_t n = 2; n <= 20; n += 2) {
    const JzSchedule sched = JzSchedule::exact_for(n);
    for (int m = 1; m <= static_cast<int>(n / 2); ++m) {
      double product = 1.0;
      for (double t : sched.times()) product *= std::cos(m * t);
      EXPECT_LT(std::abs(product), 1e-12) << "n=" << n << " m=" << m;
    }
  }
}

TEST(ProjectJz, UniformPair) {
  const Statevector s = Statevector::from_amplitudes({0.5, 0.5, 0.5, 0.5});
  const auto r = project_jz_zero(s, JzSchedule::exact_for(2));
  EXPECT_NEAR(r.report.cumulative_probability(), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(r.state[0b01] - kInvSqrt2), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r.state[0b10] - kInvSqrt2), 0.0, 1e-12);
  EXPECT_LT(std::abs(r.state[0]), 1e-12);
}

TEST(ProjectJz, NeelIsUnchanged) {
  const Lattice2D lattice(4, 3);
  const Statevector neel = neel_state(lattice);
  const auto h = heisenberg_hamiltonian(lattice);
  const auto r = project_jz_zero(neel, JzSchedule::exact_for(12), &h);
  EXPECT_NEAR(r.report.cumulative_probability(), 1.0, 1e-12);
  EXPECT_LT(max_abs_diff(r.state, neel), 1e-12);
  ASSERT_EQ(r.report.records.size(), 3u);
  EXPECT_NEAR(r.report.records.back().energy, -32.0, 1e-10);
  const auto no_h = project_jz_zero(neel, JzSchedule::exact_for(12));
  EXPECT_TRUE(std::isnan(no_h.report.records.back().energy));
}

TEST(ProjectJz, CoherentAlongX) {
  const Statevector s = coherent_product_state(momenta_from_directions({{1, 0, 0}, {1, 0, 0}}));
  const auto r = project_jz_zero(s, JzSchedule::exact_for(2));
  EXPECT_NEAR(r.report.cumulative_probability(), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(r.state[0b01]), kInvSqrt2, 1e-12);
  EXPECT_NEAR(std::abs(r.state[0b01] - r.state[0b10]), 0.0, 1e-12);
}

TEST(ProjectJz, AnnihilatedInput) {
  EXPECT_THROW(project_jz_zero(Statevector(4), JzSchedule::exact_for(4)), AnnihilatedStateError);
}

TEST(ProjectJz, ExactAndAccountedOnRandomStates) {
  std::mt19937_64 rng(12);
  for (std::size_t n : {2u, 4u, 6u, 10u}) {
    const Statevector psi = random_state(n, rng);
    const auto jz = jz_eigenvalues(n);
    double w0 = 0.0;
    for (std::size_t b = 0; b < psi.dimension(); ++b)
      if (jz.values[b] == 0.0) w0 += std::norm(psi[b]);
    const auto r = project_jz_zero(psi, JzSchedule::exact_for(n));
    EXPECT_LT(jz_squared_expectation(r.state), 1e-20);
    for (std::size_t b = 0; b < psi.dimension(); ++b)
      if (jz.values[b] != 0.0) EXPECT_LT(std::abs(r.state[b]), 1e-12);
    EXPECT_NEAR(r.report.cumulative_probability(), w0, 1e-10);
  }
}

TEST(ProjectSpinZero, SingletUnchanged) {
  const Statevector singlet = Statevector::from_amplitudes({0.0, kInvSqrt2, -kInvSqrt2, 0.0});
  const auto r = project_spin_zero(singlet);
  EXPECT_NEAR(r.report.cumulative_probability(), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(r.state, singlet), 1.0, 1e-12);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.records.size(), 12u);
  EXPECT_EQ(r.report.iterations, 11u);
}

TEST(ProjectSpinZero, TripletAnnihilated) {
  const Statevector triplet = Statevector::from_amplitudes({0.0, kInvSqrt2, kInvSqrt2, 0.0});
  EXPECT_THROW(project_spin_zero(triplet), AnnihilatedStateError);
  EXPECT_THROW(project_spin_zero(Statevector(3)), std::invalid_argument);
}

TEST(ProjectSpinZero, ZeroIterationsIsIdentity) {
  std::mt19937_64 rng(4);
  const Statevector psi = random_state(4, rng);
  SpinProjectionOptions opts;
  opts.iterations = 0;
  const auto r = project_spin_zero(psi, opts);
  EXPECT_EQ(max_abs_diff(r.state, psi), 0.0);
  EXPECT_EQ(r.report.records.size(), 1u);
}

TEST(ProjectSpinZero, ReportInvariantsAndCsv) {
  const Lattice2D lattice(4, 3);
  const auto h = heisenberg_hamiltonian(lattice);
  const auto r = project_spin_zero(neel_state(lattice), {}, &h);
  double previous = 1.0;
  for (const auto& rec : r.report.records) {
    EXPECT_LE(rec.cumulative_probability, previous + 1e-15);
    EXPECT_GT(rec.cumulative_probability, 0.0);
    EXPECT_GE(rec.j_squared, 0.0);
    previous = rec.cumulative_probability;
  }
  EXPECT_NEAR(r.report.records.front().energy, -32.0, 1e-10);
  std::ostringstream os;
  r.report.write_csv(os);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,probability,cumulative_probability,energy,J2,Jz2");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}

TEST(ProjectSpinZeroProperty, OddSpinRemovedAfterOneRotation) {
  std::mt19937_64 rng(21);
  for (std::size_t n : {2u, 4u, 6u}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Statevector psi = random_state(n, rng);
      SpinProjectionOptions opts;
      opts.iterations = 2;
      const auto r = project_spin_zero(psi, opts);
      EXPECT_LT(odd_spin_probability(r.state), 1e-20) << "n=" << n;
    }
  }
}

TEST(ProjectSpinZeroProperty, CumulativeProbabilityMatchesExactProjector) {
  std::mt19937_64 rng(22);
  SpinProjectionOptions opts;
  opts.iterations = 40;
  for (std::size_t n : {2u, 4u, 6u}) {
    const Statevector psi = random_state(n, rng);
    const double exact = weight(apply_spin_projector(n, 0.0, psi.amplitudes()));
    const auto r = project_spin_zero(psi, opts);
    EXPECT_NEAR(r.report.cumulative_probability(), exact, 1e-8) << "n=" << n;
    EXPECT_LT(j_squared_expectation(r.state), 1e-10);
  }
}

TEST(ProjectSpinZeroProperty, Idempotent) {
  std::mt19937_64 rng(23);
  SpinProjectionOptions opts;
  opts.iterations = 40;
  const Statevector psi = random_state(6, rng);
  const auto once = project_spin_zero(psi, opts);
  const auto twice = project_spin_zero(once.state, opts);
  EXPECT_GT(twice.report.cumulative_probability(), 1.0 - 1e-10);
  EXPECT_NEAR(fidelity(once.state, twice.state), 1.0, 1e-10);
}

TEST(JSquared, Examples) {
  const Statevector singlet = Statevector::from_amplitudes({0.0, kInvSqrt2, -kInvSqrt2, 0.0});
  EXPECT_NEAR(j_squared_expectation(singlet), 0.0, 1e-12);
  EXPECT_NEAR(j_squared_expectation(Statevector(2)), 2.0, 1e-12);
  for (std::size_t n : {1u, 5u, 12u}) {
    const double j = n / 2.0;
    EXPECT_NEAR(j_squared_expectation(Statevector(n)), j * (j + 1), 1e-10);
  }
}

TEST(JSquared, MatchesDenseOperator) {
  std::mt19937_64 rng(24);
  for (std::size_t n : {3u, 5u}) {
    const Statevector psi = random_state(n, rng);
    const auto j2v = matvec(dense_total_spin_squared(n), psi.amplitudes());
    Complex e{0.0, 0.0};
    for (std::size_t k = 0; k < j2v.size(); ++k) e += std::conj(psi[k]) * j2v[k];
    EXPECT_NEAR(j_squared_expectation(psi), e.real(), 1e-10);
  }
}

TEST(Translations, GroupOrder) {
  const Lattice2D lattice(4, 3);
  const auto id = translation_permutation(lattice, 4, 0);
  for (std::size_t s = 0; s < 12; ++s) EXPECT_EQ(id[s], s);
  const auto t = translation_permutation(lattice, 1, 0);
  SitePermutation power(12);
  for (std::size_t s = 0; s < 12; ++s) power[s] = s;
  for (int k = 0; k < 4; ++k)
    for (auto& p : power) p = t[p];
  for (std::size_t s = 0; s < 12; ++s) EXPECT_EQ(power[s], s);
  const auto ty = translation_permutation(lattice, 0, 1);
  for (std::size_t s = 0; s < 12; ++s) EXPECT_EQ(ty[ty[ty[s]]], s);
  EXPECT_THROW(translation_permutation(Lattice2D(4, 3, false), 1, 0), std::invalid_argument);
  const auto m = mirror_permutation(lattice, true, true);
  for (std::size_t s = 0; s < 12; ++s) EXPECT_EQ(m[m[s]], s);
}

TEST(Translations, CommuteWithHeisenberg) {
  const Lattice2D lattice(2, 2);
  const auto h = dense_matrix(heisenberg_hamiltonian(lattice));
  const std::size_t dim = 16;
  const SymmetryGroupSpec spec(lattice);
  for (const auto& perm : spec.elements()) {
    const auto img = basis_permutation(perm);
    std::vector<Complex> u(dim * dim, Complex{0.0, 0.0});
    for (std::size_t b = 0; b < dim; ++b) u[b * dim + img[b]] = 1.0;
    EXPECT_LT(max_abs(commutator(h, u, dim)), 1e-12);
  }
}

TEST(Symmetrize, GroupHasFortyEightElements) {
  EXPECT_EQ(SymmetryGroupSpec(Lattice2D(4, 3)).elements().size(), 48u);
}

TEST(Symmetrize, SingleFlipOrbit) {
  const Lattice2D lattice(4, 3);
  const auto r = symmetrize_translations_mirrors(Statevector::basis_state(12, 1), SymmetryGroupSpec(lattice));
  EXPECT_NEAR(r.probability, 1.0 / 12.0, 1e-12);
  for (std::size_t s = 0; s < 12; ++s)
    EXPECT_NEAR(std::abs(r.state[std::size_t{1} << s] - 1.0 / std::sqrt(12.0)), 0.0, 1e-12);
  EXPECT_NEAR(r.state.norm(), 1.0, 1e-12);
}

TEST(Symmetrize, GroundStateUnchanged) {
  const Lattice2D lattice(4, 3);
  const auto spectrum = full_spectrum(heisenberg_hamiltonian(lattice));
  ASSERT_EQ(spectrum.ground_level().size(), 1u);
  const Statevector g = spectrum.eigenvector(0);
  const auto r = symmetrize_translations_mirrors(g, SymmetryGroupSpec(lattice));
  EXPECT_NEAR(r.probability, 1.0, 1e-10);
  EXPECT_NEAR(fidelity(r.state, g), 1.0, 1e-10);
}

TEST(Symmetrize, AnnihilatedInput) {
  // Antisymmetric under the x mirror of a 2x2 plaquette.
  const Lattice2D lattice(2, 2);
  std::vector<Complex> a(16, 0.0);
  a[0b0001] = kInvSqrt2;
  a[0b0010] = -kInvSqrt2;
  EXPECT_THROW(symmetrize_translations_mirrors(Statevector::from_amplitudes(a), SymmetryGroupSpec(lattice)),
               AnnihilatedStateError);
}

// Sparse form of P on every basis column of the 4x3 lattice.
TEST(SymmetrizeProperty, ProjectorIsHermitianAndIdempotent) {
  const Lattice2D lattice(4, 3);
  const SymmetryGroupSpec spec(lattice);
  const std::size_t dim = 4096;
  std::vector<std::vector<std::uint64_t>> images;
  for (const auto& g : spec.elements()) images.push_back(basis_permutation(g));
  const double w = 1.0 / images.size();
  auto column = [&](std::size_t c) {
    std::map<std::size_t, double> col;
    for (const auto& img : images) col[img[c]] += w;
    return col;
  };
  std::vector<std::map<std::size_t, double>> cols(dim);
  for (std::size_t c = 0; c < dim; ++c) cols[c] = column(c);
  double herm = 0.0, idem = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    std::map<std::size_t, double> sq;
    for (const auto& [k, v] : cols[c])
      for (const auto& [r, u] : cols[k]) sq[r] += u * v;
    for (const auto& [r, v] : cols[c]) {
      const auto it = cols[r].find(c);
      herm = std::max(herm, std::abs(v - (it == cols[r].end() ? 0.0 : it->second)));
    }
    std::map<std::size_t, double> diff = sq;
    for (const auto& [r, v] : cols[c]) diff[r] -= v;
    for (const auto& [r, v] : diff) idem = std::max(idem, std::abs(v));
  }
  EXPECT_LT(herm, 1e-10);
  EXPECT_LT(idem, 1e-10);

  // The statevector routine realizes the same P.
  std::mt19937_64 rng(25);
  const Statevector psi = random_state(12, rng);
  std::vector<Complex> ppsi(dim, 0.0);
  for (std::size_t c = 0; c < dim; ++c)
    for (const auto& [r, v] : cols[c]) ppsi[r] += v * psi[c];
  const auto res = symmetrize_translations_mirrors(psi, spec);
  const double scale = std::sqrt(res.probability);
  double worst = 0.0;
  for (std::size_t k = 0; k < dim; ++k) worst = std::max(worst, std::abs(res.state[k] * scale - ppsi[k]));
  EXPECT_LT(worst, 1e-12);
  EXPECT_NEAR(res.probability, weight(ppsi), 1e-12);
}

TEST(SymmetrizeProperty, EnergyInvariantUnderGroup) {
  const Lattice2D lattice(4, 3);
  const auto h = heisenberg_hamiltonian(lattice);
  std::mt19937_64 rng(26);
  const Statevector psi = random_state(12, rng);
  const double e = expectation(psi, h);
  const SymmetryGroupSpec spec(lattice);
  for (const auto& g : spec.elements())
    EXPECT_NEAR(expectation(apply_permutation(psi, g), h), e, 1e-10);
}
