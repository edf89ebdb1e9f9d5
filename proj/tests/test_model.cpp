#include "bpdrive/model.hpp"
#include "bpdrive/state.hpp"

#include <gtest/gtest.h>

#include <bit>

using namespace bpdrive;

namespace {

// Full 2^N XXZ chain in the spin basis, -J sum (SxSx + SySy + Delta SzSz) shifted
// by the all-up energy, bit n-1 set = site n flipped.
RMatrix spin_chain(int N, double J, double Delta, Boundary bc) {
  const int dim = 1 << N;
  RMatrix H = RMatrix::Zero(dim, dim);
  std::vector<std::pair<int, int>> bonds;
  for (int n = 0; n + 1 < N; ++n) bonds.emplace_back(n, n + 1);
  if (bc == Boundary::periodic && N > 2) bonds.emplace_back(N - 1, 0);
  const double e0 = -J * Delta * 0.25 * static_cast<double>(bonds.size());
  for (int s = 0; s < dim; ++s) {
    for (auto [a, b] : bonds) {
      const bool sa = (s >> a) & 1, sb = (s >> b) & 1;
      H(s, s) += -J * Delta * (sa == sb ? 0.25 : -0.25);
      if (sa != sb) H(s ^ (1 << a) ^ (1 << b), s) += -0.5 * J;
    }
    H(s, s) -= e0;
  }
  return H;
}

int bits_of(const Configuration& c) {
  int s = 1 << (c.first - 1);
  if (c.second) s |= 1 << (c.second - 1);
  return s;
}

RMatrix hopping_1d(int N, double J, Boundary bc) {
  RMatrix h = RMatrix::Zero(N, N);
  for (auto [a, b] : chain_bonds(N, bc)) {
    h(a - 1, b - 1) = -0.5 * J;
    h(b - 1, a - 1) = -0.5 * J;
  }
  return h;
}

}  // namespace

TEST(SectorBasis, Dimensions) {
  EXPECT_EQ(SectorBasis(20, 1, ModelKind::xxz).dimension(), 20u);
  EXPECT_EQ(SectorBasis(20, 2, ModelKind::xxz).dimension(), 190u);
  EXPECT_EQ(SectorBasis(100, 2, ModelKind::xxz).dimension(), 4950u);
  EXPECT_EQ(SectorBasis(10, 2, ModelKind::hubbard2).dimension(), 100u);
  EXPECT_EQ(SectorBasis(10, 1, ModelKind::hubbard2).dimension(), 10u);
  EXPECT_THROW(SectorBasis(1, 1, ModelKind::xxz), ModelError);
  EXPECT_THROW(SectorBasis(5, 3, ModelKind::xxz), ModelError);
}

TEST(SectorBasis, IndexRoundTrip) {
  for (auto kind : {ModelKind::xxz, ModelKind::hubbard2}) {
    SectorBasis b(9, 2, kind);
    for (std::size_t i = 0; i < b.dimension(); ++i) EXPECT_EQ(b.index_of(b.sites_of(i)), i);
  }
  SectorBasis b(6, 2, ModelKind::xxz);
  EXPECT_FALSE(b.find({3, 3}));
  EXPECT_FALSE(b.find({4, 2}));
  EXPECT_FALSE(b.find({0, 2}));
  EXPECT_FALSE(b.find({2, 7}));
  EXPECT_THROW(b.index_of({5, 5}), ModelError);
}

TEST(SectorBasis, PairSubspace) {
  SectorBasis b(6, 2, ModelKind::xxz);
  EXPECT_TRUE(b.is_pair(b.index_of({2, 3}), Boundary::open));
  EXPECT_FALSE(b.is_pair(b.index_of({2, 4}), Boundary::open));
  EXPECT_FALSE(b.is_pair(b.index_of({1, 6}), Boundary::open));
  EXPECT_TRUE(b.is_pair(b.index_of({1, 6}), Boundary::periodic));
  SectorBasis h(6, 2, ModelKind::hubbard2);
  EXPECT_TRUE(h.is_pair(h.index_of({4, 4}), Boundary::open));
  EXPECT_FALSE(h.is_pair(h.index_of({4, 5}), Boundary::open));
}

TEST(ModelParams, Violations) {
  auto p = ModelParams::scaled(1.0, 1.0, 0.0, 1);
  auto v = p.violations();
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("N >= 2"), std::string::npos);
  EXPECT_THROW(p.validate(), ModelError);
  p.N = 4;
  p.omega = 0.0;
  p.Delta = -1.0;
  EXPECT_EQ(p.violations().size(), 2u);
  EXPECT_NO_THROW(ModelParams::scaled(1, 0, 0, 2).validate());
}

TEST(ModelParams, ScaledUnits) {
  ModelParams p;
  p.J = 3.0;
  p.B = 6.0;
  p.omega = 2.0;
  EXPECT_DOUBLE_EQ(p.J_scaled(), 1.5);
  EXPECT_DOUBLE_EQ(p.B_scaled(), 3.0);
}

TEST(ChainBonds, RingOfTwoHasOneBond) {
  EXPECT_EQ(chain_bonds(2, Boundary::periodic).size(), 1u);
  EXPECT_EQ(chain_bonds(5, Boundary::periodic).size(), 5u);
  EXPECT_EQ(chain_bonds(5, Boundary::open).size(), 4u);
}

class SpinOracle : public ::testing::TestWithParam<std::tuple<int, double, Boundary>> {};

TEST_P(SpinOracle, SectorBlocksMatchFullChain) {
  const auto [N, Delta, bc] = GetParam();
  const double J = 0.7;
  const RMatrix full = spin_chain(N, J, Delta, bc);
  for (int exc : {1, 2}) {
    const auto p = ModelParams::scaled(J, Delta, 0.0, N, bc);
    const SectorBasis b(N, exc, ModelKind::xxz);
    const CMatrix h = static_hamiltonian(p, b).dense();
    for (std::size_t i = 0; i < b.dimension(); ++i)
      for (std::size_t j = 0; j < b.dimension(); ++j) {
        const double ref = full(bits_of(b.sites_of(i)), bits_of(b.sites_of(j)));
        EXPECT_NEAR(h(i, j).real(), ref, 1e-14);
        EXPECT_EQ(h(i, j).imag(), 0.0);
      }
    // the sector is closed under the full Hamiltonian
    for (std::size_t j = 0; j < b.dimension(); ++j) {
      const int s = bits_of(b.sites_of(j));
      for (int r = 0; r < (1 << N); ++r)
        if (full(r, s) != 0.0) EXPECT_EQ(std::popcount(static_cast<unsigned>(r)), exc);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Chains, SpinOracle,
                         ::testing::Values(std::make_tuple(6, 8.0, Boundary::open),
                                           std::make_tuple(7, 2.0, Boundary::periodic),
                                           std::make_tuple(5, 0.0, Boundary::periodic),
                                           std::make_tuple(3, 1.5, Boundary::periodic)));

TEST(StaticHamiltonian, HermitianWithStoredDiagonal) {
  const auto p = ModelParams::scaled(1.0, 0.0, 0.0, 8);
  const SectorBasis b(8, 2, ModelKind::xxz);
  const auto h = static_hamiltonian(p, b);
  EXPECT_EQ(h.hermiticity_defect(), 0.0);
  for (Eigen::Index i = 0; i < h.matrix.rows(); ++i) {
    bool found = false;
    for (SparseC::InnerIterator it(h.matrix, i); it; ++it) found |= it.col() == i;
    EXPECT_TRUE(found);
  }
}

TEST(StaticHamiltonian, HubbardIsTwoHoppersPlusU) {
  const int N = 5;
  for (auto bc : {Boundary::open, Boundary::periodic}) {
    auto p = ModelParams::scaled(1.3, 0.0, 0.0, N, bc, ModelKind::hubbard2);
    p.U = -2.5;
    const SectorBasis b(N, 2, ModelKind::hubbard2);
    const CMatrix h = static_hamiltonian(p, b).dense();
    const RMatrix h1 = hopping_1d(N, 1.3, bc);
    for (std::size_t i = 0; i < b.dimension(); ++i)
      for (std::size_t j = 0; j < b.dimension(); ++j) {
        const auto a = b.sites_of(i), c = b.sites_of(j);
        double ref = 0.0;
        if (a.second == c.second) ref += h1(a.first - 1, c.first - 1);
        if (a.first == c.first) ref += h1(a.second - 1, c.second - 1);
        if (i == j && a.first == a.second) ref += -2.5;
        EXPECT_NEAR(h(i, j).real(), ref, 1e-15);
      }
  }
}

TEST(Drive, DiagonalSigns) {
  const auto p = ModelParams::scaled(1.0, 1.0, 1.0, 6);
  const SectorBasis b(6, 2, ModelKind::xxz);
  const RVector d = drive_diagonal(p, b);
  EXPECT_EQ(d[b.index_of({2, 5})], -7.0);
  auto ph = ModelParams::scaled(1.0, 0.0, 1.0, 6, Boundary::open, ModelKind::hubbard2);
  const SectorBasis bh(6, 2, ModelKind::hubbard2);
  EXPECT_EQ(drive_diagonal(ph, bh)[bh.index_of({3, 3})], 6.0);
}

TEST(Drive, HamiltonianAtAddsDriveOnDiagonal) {
  const auto p = ModelParams::scaled(1.0, 2.0, 0.8, 6);
  const SectorBasis b(6, 1, ModelKind::xxz);
  const double t = 0.9;
  const CMatrix h = hamiltonian_at(p, b, t).dense();
  const CMatrix h0 = static_hamiltonian(p, b).dense();
  for (int n = 1; n <= 6; ++n) {
    const auto i = static_cast<Eigen::Index>(b.index_of({n, 0}));
    EXPECT_NEAR((h - h0)(i, i).real(), -0.8 * n * std::sin(t), 1e-14);
  }
}

TEST(Consistency, MismatchedBasisRejected) {
  const auto p = ModelParams::scaled(1.0, 1.0, 0.0, 6);
  EXPECT_THROW(static_hamiltonian(p, SectorBasis(7, 1, ModelKind::xxz)), ModelError);
  EXPECT_THROW(static_hamiltonian(p, SectorBasis(6, 1, ModelKind::hubbard2)), ModelError);
}

TEST(StateVector, ConfigurationState) {
  const SectorBasis b(20, 2, ModelKind::xxz);
  const auto s = configuration_state(b, {5, 15});
  EXPECT_DOUBLE_EQ(s.norm(), 1.0);
  EXPECT_EQ(s.amplitude({5, 15}), cplx(1.0));
  EXPECT_EQ(s.amplitude({5, 14}), cplx(0.0));
}
