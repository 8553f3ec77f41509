#include <cmath>
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

const SpectrumAnalysis& heisenberg_4x3() {
  static const SpectrumAnalysis s = full_spectrum(heisenberg_hamiltonian(Lattice2D(4, 3)));
  return s;
}

}  // namespace

TEST(FullSpectrum, PairCoupling) {
  const SpectrumAnalysis s = full_spectrum(SpinHamiltonian{2, {{0, 1, 2.0}}, "pair"});
  ASSERT_EQ(s.dimension(), 4u);
  EXPECT_NEAR(s.eigenvalue(0), -6.0, 1e-12);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(s.eigenvalue(k), 2.0, 1e-12);
  EXPECT_EQ(s.states()[0].spin, 0.0);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_EQ(s.states()[k].spin, 1.0);
  EXPECT_EQ(spin_labels(s), (std::vector<double>{0.0, 1.0, 1.0, 1.0}));
  EXPECT_EQ(s.ground_level().size(), 1u);
}

TEST(FullSpectrum, SizeBound) {
  SpinHamiltonian h;
  h.n_qubits = kMaxOracleQubits + 1;
  h.terms = {{0, 1, 1.0}};
  EXPECT_THROW(full_spectrum(h), SizeExceededError);
}

TEST(FullSpectrum, HeisenbergGroundEnergy) {
  const auto& s = heisenberg_4x3();
  EXPECT_EQ(s.dimension(), 4096u);
  EXPECT_NEAR(s.ground_energy(), -58.95, 0.01);
  EXPECT_EQ(s.states()[0].spin, 0.0);
  EXPECT_TRUE(s.ambiguous_levels().empty());
}

TEST(FullSpectrum, ResidualsAndOrthonormality) {
  const auto& s = heisenberg_4x3();
  const auto h = heisenberg_hamiltonian(Lattice2D(4, 3));
  double worst = 0.0;
  for (std::size_t k = 0; k < s.dimension(); k += 7) worst = std::max(worst, s.residual(h, k));
  EXPECT_LT(worst, 1e-8);
  EXPECT_LT(s.orthonormality_error(), 1e-8);
  for (std::size_t k = 1; k < s.dimension(); ++k) EXPECT_LE(s.eigenvalue(k - 1), s.eigenvalue(k));
}

TEST(FullSpectrum, SpinLabelsMatchJSquared) {
  const auto& s = heisenberg_4x3();
  for (std::size_t k = 0; k < s.dimension(); k += 13) {
    const auto& l = s.states()[k];
    EXPECT_NEAR(l.j_squared, l.spin * (l.spin + 1), 1e-6);
    EXPECT_NEAR(j_squared_expectation(s.eigenvector(k)), l.j_squared, 1e-8);
  }
  // The all-up state is the unique J_z = 6 state; its spin is maximal.
  bool found = false;
  for (const auto& l : s.states())
    if (l.jz == 6.0) {
      EXPECT_EQ(l.spin, 6.0);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(FullSpectrum, NeutrinoAgainstDenseEigenvalues) {
  const auto h = neutrino_hamiltonian(sample_momenta(6, 8));
  const SpectrumAnalysis s = full_spectrum(h);
  for (std::size_t k = 0; k < s.dimension(); ++k) EXPECT_LT(s.residual(h, k), 1e-8);
  // Trace and trace of H^2 versus the dense matrix.
  const auto m = dense_matrix(h);
  const std::size_t dim = 64;
  double trace = 0.0, trace2 = 0.0, sum = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < dim; ++k) trace += m[k * dim + k].real();
  for (const auto& v : m) trace2 += std::norm(v);
  for (const auto& l : s.states()) {
    sum += l.energy;
    sum2 += l.energy * l.energy;
  }
  EXPECT_NEAR(sum, trace, 1e-9);
  EXPECT_NEAR(sum2, trace2, 1e-8);
  // Lieb-type window: bounded by the coupling sum.
  double csum = 0.0;
  for (const auto& t : h.terms) csum += t.coefficient;
  EXPECT_GE(s.ground_energy(), -3.0 * csum - 1e-9);
  EXPECT_LE(s.ground_energy(), csum + 1e-9);
}

TEST(FidelitySpectrum, Completeness) {
  const auto& s = heisenberg_4x3();
  std::mt19937_64 rng(1);
  const Statevector psi = random_state(12, rng);
  const auto entries = fidelity_spectrum(psi, s);
  ASSERT_EQ(entries.size(), 4096u);
  double sum = 0.0;
  for (const auto& e : entries) sum += e.fidelity;
  EXPECT_NEAR(sum, 1.0, 1e-10);
  EXPECT_THROW(fidelity_spectrum(Statevector(4), s), std::invalid_argument);
}

TEST(FidelitySpectrum, EigenstateInput) {
  const auto& s = heisenberg_4x3();
  const std::size_t k = 100;
  const auto entries = fidelity_spectrum(s.eigenvector(k), s);
  for (const auto& e : entries) {
    if (e.index == k)
      EXPECT_NEAR(e.fidelity, 1.0, 1e-10);
    else
      EXPECT_LT(e.fidelity, 1e-10);
  }
  EXPECT_NEAR(entries[k].level_fidelity, 1.0, 1e-10);
}

TEST(FidelitySpectrum, NeelOverlaps) {
  const auto& s = heisenberg_4x3();
  const Statevector neel = neel_state(Lattice2D(4, 3));
  EXPECT_NEAR(ground_state_fidelity(neel, s), 0.085, 0.003);
  // The first excited J = 0 level carries about 14% of the weight.
  double excited = 0.0;
  for (const auto& e : fidelity_spectrum(neel, s))
    if (std::abs(e.eigenvalue + 46.72) < 0.02) excited += e.fidelity;
  EXPECT_NEAR(excited, 0.140, 0.005);
  std::ostringstream os;
  write_fidelity_csv(os, fidelity_spectrum(neel, s));
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,eigenvalue,fidelity,S");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4097);
}

TEST(FidelitySpectrum, OddSpinWeightOfProjectedNeutrinoState) {
  const MomentumSet m = sample_momenta(8, 3);
  const auto h = neutrino_hamiltonian(m);
  const SpectrumAnalysis s = full_spectrum(h);
  const Statevector c = coherent_product_state(m);
  EXPECT_GT(odd_spin_weight(c, s), 1e-3);
  SpinProjectionOptions opts;
  opts.iterations = 2;
  EXPECT_LT(odd_spin_weight(project_spin_zero(c, opts).state, s), 1e-20);
}

TEST(SectorCensus, FourByThree) {
  const SectorCensus c = sector_census(Lattice2D(4, 3));
  ASSERT_EQ(c.sectors.size(), 4u);
  EXPECT_EQ(c.full().dimension, 4096u);
  EXPECT_EQ(c.jz_zero().dimension, 924u);
  EXPECT_EQ(c.spin_zero().dimension, 132u);
  EXPECT_EQ(c.symmetric().dimension, 9u);
  EXPECT_NEAR(c.full().lowest, -58.95, 0.01);
  EXPECT_NEAR(c.jz_zero().first_excited, -51.81, 0.02);
  EXPECT_NEAR(c.spin_zero().first_excited, -46.72, 0.02);
  EXPECT_NEAR(c.symmetric().first_excited, -30.86, 0.02);
  EXPECT_NEAR(c.symmetric().gap(), 28.1, 0.05);
  EXPECT_NEAR(c.jz_zero().gap(), 7.1, 0.05);
  EXPECT_GT(c.symmetric().gap(), c.jz_zero().gap());
  for (std::size_t k = 1; k < 4; ++k) EXPECT_LT(c.sectors[k].dimension, c.sectors[k - 1].dimension);
  EXPECT_EQ(c.symmetric().name, "J=0,k=0,mirror-even");
}

TEST(SectorCensus, TwoByTwo) {
  const SectorCensus c = sector_census(Lattice2D(2, 2));
  EXPECT_EQ(c.full().dimension, 16u);
  EXPECT_EQ(c.jz_zero().dimension, 6u);
  EXPECT_EQ(c.spin_zero().dimension, 2u);
  EXPECT_LE(c.symmetric().dimension, 2u);
  EXPECT_THROW(sector_census(Lattice2D(3, 3)), std::invalid_argument);
  EXPECT_THROW(sector_census(Lattice2D(4, 3, false)), std::invalid_argument);
}

// Counts J = 0 eigenvectors that the group average leaves invariant.
TEST(SectorCensus, RankMatchesSymmetricEigenstateCount) {
  const auto& s = heisenberg_4x3();
  const SymmetryGroupSpec group(Lattice2D(4, 3));
  std::size_t count = 0;
  for (std::size_t k = 0; k < s.dimension(); ++k) {
    const auto& l = s.states()[k];
    if (l.spin != 0.0) continue;
    const Statevector v = s.eigenvector(k);
    try {
      const auto r = symmetrize_translations_mirrors(v, group);
      count += (r.probability > 0.5) ? 1 : 0;
    } catch (const AnnihilatedStateError&) {
    }
  }
  EXPECT_EQ(count, sector_census(Lattice2D(4, 3)).symmetric().dimension);
}
