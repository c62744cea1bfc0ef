#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "oracles.hpp"
#include "rgd/pauli.hpp"

using namespace rgd;
using oracle::cplx;

namespace {

const cplx kI{0.0, 1.0};

void expect_state_near(const StateVector& s, const Amplitudes& want, double tol = 1e-12) {
  ASSERT_EQ(s.dim(), want.size());
  for (std::size_t b = 0; b < want.size(); ++b) EXPECT_LT(std::abs(s[b] - want[b]), tol) << b;
}

}  // namespace

TEST(PauliString, TextRoundTripAndMasks) {
  const auto p = PauliString::from_text("XYZI");
  EXPECT_EQ(p.text(), "XYZI");
  EXPECT_EQ(p.x_mask(), 0b0011u);
  EXPECT_EQ(p.z_mask(), 0b0110u);
  EXPECT_EQ(p.weight(), 3);
  EXPECT_EQ(p.y_count(), 1);
  EXPECT_FALSE(p.is_diagonal());
  EXPECT_TRUE(PauliString::identity(3).is_identity());
  EXPECT_EQ(PauliString::single(3, 2, 'Z').text(), "IIZ");
}

TEST(PauliString, RejectsBadInput) {
  EXPECT_THROW(PauliString::from_text("XQ"), InvalidArgument);
  EXPECT_THROW(PauliString::from_text(""), InvalidArgument);
  EXPECT_THROW(PauliString(2, 0b100, 0), InvalidArgument);
  EXPECT_THROW(PauliString(0, 0, 0), InvalidArgument);
}

TEST(PauliString, CommutationMatchesDense) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto a = oracle::random_pauli_text(3, rng, true);
    const auto b = oracle::random_pauli_text(3, rng, true);
    const auto ma = oracle::pauli_dense(a);
    const auto mb = oracle::pauli_dense(b);
    const bool dense_commute = (ma * mb - mb * ma).norm() < 1e-12;
    EXPECT_EQ(PauliString::from_text(a).commutes_with(PauliString::from_text(b)), dense_commute);
  }
}

TEST(ApplyPauli, SpecExamples) {
  expect_state_near(apply_pauli(PauliString::from_text("Z"), StateVector::basis("0")), {1.0, 0.0});
  expect_state_near(apply_pauli(PauliString::from_text("XX"), StateVector::basis("00")),
                    {0.0, 0.0, 0.0, 1.0});
  expect_state_near(apply_pauli(PauliString::from_text("Y"), StateVector::basis("0")), {0.0, kI});
}

TEST(ApplyPauli, MatchesKroneckerOnAllStringsUpTo3Qubits) {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 3; ++n) {
    const auto psi = oracle::random_state(n, rng);
    const auto v = oracle::to_eigen(psi);
    for (std::uint64_t x = 0; x < (1u << n); ++x) {
      for (std::uint64_t z = 0; z < (1u << n); ++z) {
        const PauliString p(n, x, z);
        const auto got = apply_pauli(p, psi);
        EXPECT_LT(oracle::max_abs_diff(got, oracle::pauli_dense(p.text()) * v), 1e-12) << p.text();
      }
    }
  }
}

TEST(ApplyPauli, Involution) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 5;
    const auto psi = oracle::random_state(n, rng);
    const auto p = PauliString::from_text(oracle::random_pauli_text(n, rng, true));
    const auto twice = apply_pauli(p, apply_pauli(p, psi));
    for (std::size_t b = 0; b < psi.dim(); ++b) EXPECT_LT(std::abs(twice[b] - psi[b]), 1e-12);
  }
}

TEST(ApplyPauli, DimensionMismatchThrows) {
  EXPECT_THROW(apply_pauli(PauliString::from_text("XX"), StateVector::basis("0")),
               DimensionMismatch);
}

TEST(PauliRotation, SpecExamples) {
  std::mt19937_64 rng(5);
  const auto psi = oracle::random_state(3, rng);
  const auto same = apply_pauli_rotation(PauliString::from_text("XYZ"), 0.0, psi);
  for (std::size_t b = 0; b < psi.dim(); ++b) EXPECT_EQ(same[b], psi[b]);

  const auto r = apply_pauli_rotation(PauliString::from_text("X"), std::numbers::pi / 2,
                                      StateVector::basis("0"));
  expect_state_near(r, {0.0, kI});
}

TEST(PauliRotation, MatchesDenseExponential) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 60; ++t) {
    const int n = 1 + t % 4;
    const auto text = oracle::random_pauli_text(n, rng, true);
    const double theta = t == 0 ? 0.3 : std::uniform_real_distribution<double>(-4, 4)(rng);
    const auto psi = oracle::random_state(n, rng);
    const oracle::Mat u = (kI * theta * oracle::pauli_dense(text)).exp();
    const auto got = apply_pauli_rotation(PauliString::from_text(text), theta, psi);
    EXPECT_LT(oracle::max_abs_diff(got, u * oracle::to_eigen(psi)), 1e-12) << text;
    EXPECT_NEAR(got.norm(), 1.0, 1e-12);
  }
}

TEST(PauliRotation, IdentityIsGlobalPhase) {
  std::mt19937_64 rng(2);
  const auto psi = oracle::random_state(2, rng);
  const auto got = apply_pauli_rotation(PauliString::identity(2), 0.7, psi);
  for (std::size_t b = 0; b < psi.dim(); ++b) {
    EXPECT_LT(std::abs(got[b] - std::exp(kI * 0.7) * psi[b]), 1e-14);
  }
}

TEST(PauliRotation, AnglesCompose) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 40; ++t) {
    const int n = 1 + t % 5;
    const auto p = PauliString::from_text(oracle::random_pauli_text(n, rng));
    const auto psi = oracle::random_state(n, rng);
    const double a = std::uniform_real_distribution<double>(-3, 3)(rng);
    const double b = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto two = apply_pauli_rotation(p, a, apply_pauli_rotation(p, b, psi));
    const auto one = apply_pauli_rotation(p, a + b, psi);
    for (std::size_t i = 0; i < psi.dim(); ++i) EXPECT_LT(std::abs(two[i] - one[i]), 1e-12);
  }
}

TEST(PauliRotation, RejectsNonFiniteAngle) {
  EXPECT_THROW(apply_pauli_rotation(PauliString::from_text("X"), std::nan(""),
                                    StateVector::basis("0")),
               InvalidArgument);
  EXPECT_THROW(apply_pauli_rotation(PauliString::from_text("X"), INFINITY, StateVector::basis("0")),
               InvalidArgument);
}

TEST(PauliExpectation, SpecExamplesAndDenseOracle) {
  EXPECT_NEAR(pauli_expectation(StateVector::plus(1), PauliString::from_text("X")), 1.0, 1e-15);
  EXPECT_NEAR(pauli_expectation(StateVector::basis("0"), PauliString::from_text("X")), 0.0, 1e-15);
  std::mt19937_64 rng(29);
  for (int t = 0; t < 50; ++t) {
    const auto psi = oracle::random_state(3, rng);
    const auto text = oracle::random_pauli_text(3, rng, true);
    const auto v = oracle::to_eigen(psi);
    const cplx want = v.dot(oracle::pauli_dense(text) * v);
    EXPECT_LT(std::abs(want.imag()), 1e-12);
    EXPECT_NEAR(pauli_expectation(psi, PauliString::from_text(text)), want.real(), 1e-12);
  }
}

TEST(PauliProduct, SpecExamples) {
  const auto xx = pauli_product(PauliString::from_text("X"), PauliString::from_text("X"));
  EXPECT_TRUE(xx.pauli.is_identity());
  EXPECT_EQ(xx.phase, cplx(1.0, 0.0));
  const auto xz = pauli_product(PauliString::from_text("X"), PauliString::from_text("Z"));
  EXPECT_EQ(xz.pauli.text(), "Y");
  EXPECT_EQ(xz.phase, cplx(0.0, -1.0));
  const auto zx = pauli_product(PauliString::from_text("Z"), PauliString::from_text("X"));
  EXPECT_EQ(zx.pauli.text(), "Y");
  EXPECT_EQ(zx.phase, cplx(0.0, 1.0));
}

TEST(PauliProduct, MatchesDenseOnAllTwoQubitPairs) {
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      const PauliString p(2, a & 3, a >> 2);
      const PauliString q(2, b & 3, b >> 2);
      const auto r = pauli_product(p, q);
      const oracle::Mat want = oracle::pauli_dense(p.text()) * oracle::pauli_dense(q.text());
      EXPECT_LT((r.phase * oracle::pauli_dense(r.pauli.text()) - want).norm(), 1e-14);
    }
  }
}

TEST(PauliProduct, AssociativeOnAllSingleQubitTriples) {
  const std::array<const char*, 4> letters{"I", "X", "Y", "Z"};
  for (auto a : letters) {
    for (auto b : letters) {
      for (auto c : letters) {
        const auto p = PauliString::from_text(a);
        const auto q = PauliString::from_text(b);
        const auto r = PauliString::from_text(c);
        const auto pq = pauli_product(p, q);
        const auto left = pauli_product(pq.pauli, r);
        const auto qr = pauli_product(q, r);
        const auto right = pauli_product(p, qr.pauli);
        EXPECT_EQ(left.pauli, right.pauli);
        EXPECT_LT(std::abs(pq.phase * left.phase - qr.phase * right.phase), 1e-15);
      }
    }
  }
}

TEST(SampleRandomPauli, UniformOverNonIdentitySingleQubit) {
  std::mt19937_64 rng(31);
  std::map<std::string, int> counts;
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) ++counts[sample_random_pauli(1, rng).text()];
  EXPECT_EQ(counts.count("I"), 0u);
  ASSERT_EQ(counts.size(), 3u);
  double chi2 = 0.0;
  for (const auto& [k, c] : counts) {
    const double e = draws / 3.0;
    chi2 += (c - e) * (c - e) / e;
    EXPECT_NEAR(c, e, 3.0 * std::sqrt(draws * (1.0 / 3) * (2.0 / 3))) << k;
  }
  EXPECT_LT(chi2, 13.8);  // chi-square, 2 dof, p = 0.001
}

TEST(SampleRandomPauli, UniformOverFifteenTwoQubitStrings) {
  std::mt19937_64 rng(37);
  std::map<std::string, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[sample_random_pauli(2, rng).text()];
  ASSERT_EQ(counts.size(), 15u);
  EXPECT_EQ(counts.count("II"), 0u);
  double chi2 = 0.0;
  for (const auto& [k, c] : counts) chi2 += (c - draws / 15.0) * (c - draws / 15.0) / (draws / 15.0);
  EXPECT_LT(chi2, 36.1);  // 14 dof, p = 0.001
}

TEST(SampleRandomPauli, Deterministic) {
  std::mt19937_64 a(99), b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_random_pauli(5, a), sample_random_pauli(5, b));
}

TEST(StateVector, ValidatesNorm) {
  EXPECT_THROW(StateVector::from_amplitudes({1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(StateVector::from_amplitudes({1.0, 0.0, 0.0}), InvalidArgument);
  EXPECT_NO_THROW(StateVector::from_amplitudes({1.0, 0.0}));
  EXPECT_EQ(StateVector::basis("01").dim(), 4u);
  EXPECT_EQ(StateVector::basis("01")[2], cplx(1.0, 0.0));  // qubit 1 set -> index 2
}

TEST(CircuitRecord, AppendPreservesOrder) {
  CircuitRecord c;
  c.append({PauliString::from_text("X"), 0.1});
  CircuitRecord d;
  d.append({PauliString::from_text("Z"), 0.2});
  c.append(d);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.rotations()[0].pauli.text(), "X");
  EXPECT_EQ(c.rotations()[1].angle, 0.2);
}
