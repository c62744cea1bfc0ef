#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rgd/hamiltonian.hpp"

using namespace rgd;

namespace {

// Ising energies by enumeration of spin configurations, ascending.
std::vector<double> ising_enumeration(const Graph& g) {
  const int n = g.n_vertices();
  std::vector<double> out;
  for (std::uint64_t b = 0; b < (1u << n); ++b) {
    double e = 0.0;
    for (const auto& edge : g.edges()) {
      const int si = (b >> edge.i) & 1 ? -1 : 1;
      const int sj = (b >> edge.j) & 1 ? -1 : 1;
      e += edge.weight * si * sj;
    }
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Graph, ChainAndComplete) {
  EXPECT_EQ(chain_graph(2).edges().size(), 1u);
  EXPECT_EQ(chain_graph(5).edges().size(), 4u);
  const auto c3 = chain_graph(3);
  EXPECT_EQ(c3.edges()[0].i, 0);
  EXPECT_EQ(c3.edges()[0].j, 1);
  EXPECT_EQ(c3.edges()[1].i, 1);
  EXPECT_EQ(c3.edges()[1].j, 2);
  EXPECT_EQ(complete_graph(3).edges().size(), 3u);
  EXPECT_EQ(complete_graph(6).edges().size(), 15u);
  const auto k2 = complete_graph(2);
  ASSERT_EQ(k2.edges().size(), 1u);
  EXPECT_EQ(k2.edges()[0].i, 0);
  EXPECT_EQ(k2.edges()[0].j, 1);
  EXPECT_THROW(chain_graph(1), InvalidArgument);
  EXPECT_THROW(complete_graph(1), InvalidArgument);
}

TEST(Graph, Validation) {
  EXPECT_THROW(Graph(3, {{0, 0, 1.0}}), InvalidArgument);
  EXPECT_THROW(Graph(3, {{0, 1, 1.0}, {1, 0, 2.0}}), InvalidArgument);
  EXPECT_THROW(Graph(3, {{0, 3, 1.0}}), InvalidArgument);
  EXPECT_THROW(Graph(3, {{0, 1, NAN}}), InvalidArgument);
}

TEST(Ising, Terms) {
  const auto h2 = ising_from_graph(chain_graph(2));
  ASSERT_EQ(h2.terms().size(), 1u);
  EXPECT_EQ(h2.terms()[0].pauli.text(), "ZZ");
  EXPECT_EQ(h2.terms()[0].coeff, 1.0);
  const auto h3 = ising_from_graph(chain_graph(3));
  ASSERT_EQ(h3.terms().size(), 2u);
  EXPECT_EQ(h3.terms()[0].pauli.text(), "ZZI");
  EXPECT_EQ(h3.terms()[1].pauli.text(), "IZZ");
  const auto k3 = ising_from_graph(complete_graph(3));
  EXPECT_EQ(k3.terms().size(), 3u);
  for (const auto& t : k3.terms()) {
    EXPECT_EQ(t.pauli.x_mask(), 0u);
    EXPECT_EQ(t.pauli.weight(), 2);
  }
  EXPECT_TRUE(k3.is_diagonal());
}

TEST(Ising, SpectrumEqualsEnumeration) {
  for (int n = 2; n <= 10; ++n) {
    for (const auto& g : {chain_graph(n), complete_graph(n)}) {
      const auto sd = exact_spectrum(ising_from_graph(g));
      const auto want = ising_enumeration(g);
      ASSERT_EQ(sd.eigenvalues.size(), want.size());
      for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(sd.eigenvalues[i], want[i], 1e-12);
    }
  }
}

TEST(Hamiltonian, MergesDuplicates) {
  const Hamiltonian h(2, {{0.5, PauliString::from_text("XZ")},
                          {1.0, PauliString::from_text("ZZ")},
                          {0.25, PauliString::from_text("XZ")}});
  ASSERT_EQ(h.terms().size(), 2u);
  EXPECT_EQ(h.terms()[0].pauli.text(), "XZ");
  EXPECT_DOUBLE_EQ(h.terms()[0].coeff, 0.75);
  EXPECT_THROW(Hamiltonian(2, {{NAN, PauliString::from_text("XZ")}}), InvalidArgument);
  EXPECT_THROW(Hamiltonian(2, {{1.0, PauliString::from_text("XZI")}}), DimensionMismatch);
}

TEST(Grover, SingleQubitExpansion) {
  const auto h = grover_hamiltonian("0");
  const auto dense = oracle::hamiltonian_dense(h);
  oracle::Mat want(2, 2);
  want << 0, 0, 0, 1;  // (1 - Z)/2
  EXPECT_LT((dense - want).norm(), 1e-15);
  for (const auto& t : h.expanded_terms()) EXPECT_DOUBLE_EQ(std::abs(t.coeff), 0.5);
}

TEST(Grover, SpectrumAndAction) {
  for (int n = 1; n <= 8; ++n) {
    std::string omega;
    for (int j = 0; j < n; ++j) omega += (j * 7 + n) % 3 == 0 ? '1' : '0';
    const auto h = grover_hamiltonian(omega);
    const auto sd = exact_spectrum(h);
    EXPECT_DOUBLE_EQ(sd.ground_energy, 0.0);
    EXPECT_EQ(sd.ground_degeneracy, 1);
    EXPECT_NEAR(sd.spectral_gap, 1.0, 1e-12);
    EXPECT_NEAR(sd.spectral_norm, 1.0, 1e-12);
    EXPECT_EQ(std::count_if(sd.eigenvalues.begin(), sd.eigenvalues.end(),
                            [](double v) { return std::abs(v - 1.0) < 1e-12; }),
              (1 << n) - 1);
    const auto w = StateVector::basis(omega);
    EXPECT_NEAR(StateVector::l2_norm(apply_hamiltonian(h, w)), 0.0, 1e-12);
    if (n <= 6) {
      EXPECT_EQ(h.expanded_terms().size(), std::size_t(1) << n);
      for (const auto& t : h.expanded_terms()) {
        if (!t.pauli.is_identity()) EXPECT_NEAR(std::abs(t.coeff), 1.0 / (1 << n), 1e-15);
      }
      std::uint64_t idx = 0;
      for (int j = 0; j < n; ++j) idx |= std::uint64_t(omega[std::size_t(j)] == '1') << j;
      for (std::uint64_t b = 0; b < (1u << n); ++b) {
        if (b == idx) continue;
        const auto e = StateVector::basis(n, b);
        const auto he = apply_hamiltonian(h, e);
        for (std::size_t i = 0; i < he.size(); ++i) EXPECT_NEAR(std::abs(he[i] - e[i]), 0.0, 1e-12);
      }
    } else {
      EXPECT_TRUE(h.is_diagonal_only());
    }
  }
}

TEST(ApplyHamiltonian, SpecExamples) {
  const Hamiltonian z(1, {{1.0, PauliString::from_text("Z")}});
  const auto out = apply_hamiltonian(z, StateVector::basis("1"));
  EXPECT_EQ(out[0], oracle::cplx(0.0));
  EXPECT_EQ(out[1], oracle::cplx(-1.0));
  const auto chain = ising_from_graph(chain_graph(3));
  const auto psi = StateVector::basis("010");
  const auto hp = apply_hamiltonian(chain, psi);
  for (std::size_t b = 0; b < hp.size(); ++b) EXPECT_NEAR(std::abs(hp[b] - (-2.0) * psi[b]), 0.0, 1e-15);
}

TEST(ApplyHamiltonian, MatchesDense) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 4;
    const auto h = oracle::random_hamiltonian(n, 1 + t % 7, rng);
    const auto psi = oracle::random_state(n, rng);
    const auto got = oracle::to_eigen(std::span<const oracle::cplx>(apply_hamiltonian(h, psi)));
    EXPECT_LT((got - oracle::hamiltonian_dense(h) * oracle::to_eigen(psi)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ExactSpectrum, ChainThree) {
  const auto sd = exact_spectrum(ising_from_graph(chain_graph(3)));
  EXPECT_DOUBLE_EQ(sd.ground_energy, -2.0);
  EXPECT_DOUBLE_EQ(sd.spectral_norm, 2.0);
  EXPECT_DOUBLE_EQ(sd.spectral_gap, 2.0);
  // Open antiferromagnetic chain: only the two Neel strings reach -2.
  EXPECT_EQ(sd.ground_degeneracy, 2);
}

TEST(ExactSpectrum, ZeroHamiltonianFlagsZeroGap) {
  EXPECT_THROW(exact_spectrum(ising_from_graph(Graph(3, {}))), ZeroGap);
}

TEST(ExactSpectrum, SizeCaps) {
  EXPECT_THROW(exact_spectrum(ising_from_graph(chain_graph(15))), SizeCapExceeded);
  std::mt19937_64 rng(1);
  const auto dense13 = Hamiltonian(13, {{1.0, PauliString::from_text("XIIIIIIIIIIII")}});
  EXPECT_THROW(exact_spectrum(dense13), SizeCapExceeded);
}

TEST(ExactSpectrum, DenseMatchesEigenOracle) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 10; ++t) {
    const int n = 2 + t % 3;
    const auto h = oracle::random_hamiltonian(n, 6, rng);
    const auto sd = exact_spectrum(h);
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::hamiltonian_dense(h));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      EXPECT_NEAR(sd.eigenvalues[std::size_t(i)], es.eigenvalues()(i), 1e-10);
    }
    const auto g = oracle::to_eigen(sd.ground_state);
    EXPECT_LT((oracle::hamiltonian_dense(h) * g - sd.ground_energy * g).norm(), 1e-9);
  }
}

TEST(SpectralNorm, ExactAndBound) {
  for (int n = 2; n <= 10; ++n) {
    EXPECT_DOUBLE_EQ(spectral_norm_bound(ising_from_graph(chain_graph(n))).value, n - 1);
    EXPECT_DOUBLE_EQ(spectral_norm_bound(ising_from_graph(complete_graph(n))).value, n * (n - 1) / 2.0);
  }
  const Hamiltonian single(2, {{0.7, PauliString::from_text("XZ")}});
  const auto exact = spectral_norm_bound(single);
  EXPECT_TRUE(exact.exact);
  EXPECT_NEAR(exact.value, 0.7, 1e-12);
  EXPECT_NEAR(single.coefficient_l1(), 0.7, 1e-15);
  const auto triangle = spectral_norm_bound(single, SpectralCaps{14, 1});
  EXPECT_FALSE(triangle.exact);
  EXPECT_NEAR(triangle.value, 0.7, 1e-15);

  std::mt19937_64 rng(47);
  for (int t = 0; t < 10; ++t) {
    const auto h = oracle::random_hamiltonian(3, 5, rng);
    const auto sd = exact_spectrum(h);
    EXPECT_NEAR(spectral_norm_bound(h).value, sd.spectral_norm, 1e-10);
    EXPECT_GE(h.coefficient_l1() + 1e-12, sd.spectral_norm);
  }
}

TEST(GroundOverlap, SpecExamples) {
  for (int n = 1; n <= 6; ++n) {
    const auto h = grover_hamiltonian(std::string(std::size_t(n), '1'));
    EXPECT_NEAR(ground_overlap(h, StateVector::plus(n)), 1.0 / std::sqrt(double(1 << n)), 1e-12);
  }
  const auto chain = ising_from_graph(chain_graph(3));
  const auto sd = exact_spectrum(chain);
  EXPECT_NEAR(ground_overlap(sd, sd.ground_state), 1.0, 1e-12);
  // sqrt(2/8): projection onto span{|010>, |101>}
  EXPECT_NEAR(ground_overlap(chain, StateVector::plus(3)), 0.5, 1e-12);
}

TEST(Hamiltonian, DiagonalOnlyExpansionRoundTrips) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> g;
  std::vector<double> d(16);
  for (auto& v : d) v = g(rng);
  const auto h = Hamiltonian::from_diagonal(d);
  const Hamiltonian rebuilt(4, h.expanded_terms());
  for (std::size_t b = 0; b < d.size(); ++b) EXPECT_NEAR(rebuilt.diagonal()[b], d[b], 1e-12);
}
