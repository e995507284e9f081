#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "bcsnmr/pairing_model.hpp"

using namespace bcsnmr;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST(BuildHp, TwoQubitHandExpansion) {
  const double eps = 2.7, v = 0.4;
  const auto h = build_hp({{eps, eps}, v});
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = eps;
  expect(1, 2) = v;
  expect(2, 1) = v;
  expect(3, 3) = -eps;
  EXPECT_LT(max_entry_diff(h.matrix(), expect), 1e-15);
}

TEST(BuildHp, DecoupledAndSingleSpin) {
  const auto h0 = build_hp({{1.5, 1.5}, 0.0});
  EXPECT_LT(std::abs(h0.matrix()(0, 0) - 1.5), 1e-15);
  EXPECT_LT(std::abs(h0.matrix()(1, 1)), 1e-15);
  EXPECT_LT(std::abs(h0.matrix()(2, 2)), 1e-15);
  EXPECT_LT(std::abs(h0.matrix()(3, 3) + 1.5), 1e-15);

  const auto h1 = build_hp({{3.0}, 0.7});
  EXPECT_EQ(h1.num_qubits(), 1);
  EXPECT_LT(std::abs(h1.matrix()(0, 0) - 1.5), 1e-15);
  EXPECT_LT(std::abs(h1.matrix()(1, 1) + 1.5), 1e-15);
}

TEST(BuildHp, ValidatesParams) {
  EXPECT_THROW(build_hp({{}, 1.0}), ArgumentError);
  EXPECT_THROW(build_hp({{1.0, std::nan("")}, 1.0}), ArgumentError);
  EXPECT_THROW(build_hp({std::vector<double>(kMaxQubits + 1, 1.0), 1.0}), CapacityError);
}

TEST(Diagonalize, PaperDefaultSpectrum) {
  const auto s = diagonalize(PairingParams::paper_default());
  const double e = kTwoPi * 1e4, v = kTwoPi;
  const std::vector<double> expect{-e, -v, v, e};
  ASSERT_EQ(s.eigenvalues.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(rel(s.eigenvalues[i], expect[i]), 1e-9);
  EXPECT_EQ(s.excitation, (std::vector<int>{2, 1, 1, 0}));
}

TEST(Diagonalize, DecoupledHasDegenerateZeroPair) {
  const auto s = diagonalize({{5.0, 5.0}, 0.0});
  EXPECT_NEAR(s.eigenvalues[0], -5.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[1], 0.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[2], 0.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[3], 5.0, 1e-12);
}

TEST(Diagonalize, RandomUniformDrawsMatchClosedForm) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> eps_d(0.1, 1e5), v_d(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double e = eps_d(rng), v = v_d(rng);
    const auto s = diagonalize({{e, e}, v});
    std::vector<double> expect{-e, -std::abs(v), std::abs(v), e};
    std::sort(expect.begin(), expect.end());
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(rel(s.eigenvalues[i], expect[i]), 1e-9);
  }
}

TEST(Diagonalize, BlockLabelsAndEigenpairsForRandomN3) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const PairingParams p{{d(rng), d(rng), d(rng)}, d(rng)};
    const auto h = build_hp(p);
    const auto s = diagonalize(p);
    const auto dense = eigh(h);
    for (std::size_t j = 0; j < 8; ++j) {
      EXPECT_NEAR(s.eigenvalues[j], dense.values[j], 1e-10);
      const auto col = s.eigenvectors.col(static_cast<Eigen::Index>(j));
      EXPECT_LT((h.matrix() * col - s.eigenvalues[j] * col).norm(), 1e-10);
      for (Eigen::Index i = 0; i < 8; ++i) {
        if (std::popcount(static_cast<unsigned>(i)) != s.excitation[j]) EXPECT_EQ(std::abs(col(i)), 0.0);
      }
    }
  }
}

TEST(Diagonalize, CommutesWithTotalZUpToFiveQubits) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> d(-1e4, 1e4);
  for (int n = 1; n <= 5; ++n) {
    PairingParams p;
    for (int i = 0; i < n; ++i) p.eps.push_back(d(rng));
    p.v = d(rng);
    const auto h = build_hp(p);
    const auto z = total_z(n);
    const Matrix comm = h.matrix() * z.matrix() - z.matrix() * h.matrix();
    EXPECT_LT(comm.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ExcitationBlocks, Enumeration) {
  EXPECT_EQ(excitation_block_indices(2, 1), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(excitation_block_indices(2, 0), (std::vector<std::size_t>{0}));
  EXPECT_EQ(excitation_block_indices(3, 2), (std::vector<std::size_t>{3, 5, 6}));
  EXPECT_THROW(excitation_block_indices(2, 3), ArgumentError);
}

TEST(OnePairSplitting, Examples) {
  EXPECT_NEAR(one_pair_splitting(PairingParams::paper_default()), 4 * kPi, 1e-9);
  EXPECT_NEAR(one_pair_splitting({{7.0, 7.0}, 0.0}), 0.0, 1e-12);

  std::mt19937 rng(4);
  std::uniform_real_distribution<double> d(-100.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double e1 = d(rng), e2 = d(rng), v = d(rng);
    const double closed = 2.0 * std::sqrt(std::pow((e1 - e2) / 2.0, 2) + v * v);
    EXPECT_LT(rel(one_pair_splitting({{e1, e2}, v}), closed), 1e-12);
  }
}

TEST(GapReport, UnitConversion) {
  EXPECT_NEAR(gap_report(4 * kPi).splitting_hz, 2.0, 1e-15);
  EXPECT_EQ(gap_report(0.0).splitting_hz, 0.0);
  EXPECT_NEAR(gap_report(kTwoPi).splitting_hz, 1.0, 1e-15);
  EXPECT_FALSE(gap_report(1.0).note.empty());
  EXPECT_THROW(gap_report(-1.0), ArgumentError);
}
