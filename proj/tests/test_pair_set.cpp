#include <gtest/gtest.h>

#include "permlearn/pair_set.hpp"
#include "test_support.hpp"

using namespace permlearn;
using permlearn::oracle::RandomProblem;

TEST(PairObjective, Examples) {
  Rng rng(1);
  const BitImage x(8, oracle::random_bits(64, rng));
  EXPECT_EQ(pair_objective(Permutation::identity(64), x, x), 0u);
  BitImage inv = x;
  inv.bits().flip_all();
  EXPECT_EQ(pair_objective(Permutation::identity(64), x, inv), 64u);
  const auto t = random_permutation(64, rng);
  EXPECT_EQ(pair_objective(t, x, BitImage(8, permute(x.bits(), t))), 0u);
  EXPECT_THROW(pair_objective(t, x, BitImage(4)), contract_error);
}

TEST(TotalObjective, EmptyAndPerfectSets) {
  Rng rng(2);
  ImageSet set(8);
  const auto t = random_permutation(64, rng);
  for (int k = 0; k < 10; ++k) {
    const auto x = oracle::random_bits(64, rng);
    set.add(BitImage(8, x));
    set.add(BitImage(8, permute(x, t)));
  }
  PairSet ps(set);
  EXPECT_EQ(total_objective(t, ps), 0u);
  for (ImageId k = 0; k < 20; k += 2) ps.append(k, k + 1);
  EXPECT_EQ(total_objective_columns(t, ps), 0u);
  EXPECT_EQ(total_objective_rows(t, ps), 0u);
}

TEST(TotalObjective, RowAndColumnFormsAgreeExactly) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t side = 8 + rng.below(25);
    const std::size_t pairs = 16 + rng.below(113);
    RandomProblem p(side, pairs, rng);
    const auto expected = oracle::naive_objective(p.t, p.ps);
    ASSERT_EQ(total_objective_rows(p.t, p.ps), expected);
    ASSERT_EQ(total_objective_columns(p.t, p.ps), expected);
  }
}

TEST(PairSet, ColumnsMatchPixels) {
  Rng rng(4);
  RandomProblem p(8, 16, rng);
  for (std::size_t k = 0; k < p.ps.size(); ++k) {
    const auto& pr = p.ps.pairs()[k];
    for (std::size_t px = 0; px < 64; ++px) {
      ASSERT_EQ(p.ps.first_column(px).test(k), p.set[pr.first].bits().test(px));
      ASSERT_EQ(p.ps.second_column(px).test(k), p.set[pr.second].bits().test(px));
    }
  }
  EXPECT_TRUE(p.ps.columns_consistent());
}

namespace {

// Every image plus its three images under repeated 90-degree rotation, so
// T x_I is stored for every I when T is the rotation.
ImageSet rotation_closed_set(std::size_t side, std::size_t base, Rng& rng) {
  const auto g = oracle::rotation90(side);
  ImageSet set(side);
  for (std::size_t k = 0; k < base; ++k) {
    auto x = oracle::random_bits(side * side, rng, 0.4);
    for (int r = 0; r < 4; ++r) {
      set.add(BitImage(side, x));
      x = permute(x, g);
    }
  }
  return set;
}

}  // namespace

TEST(AddPairs, PlantedTransformationGivesZeroCostPairs) {
  Rng rng(5);
  const ImageSet set = rotation_closed_set(8, 50, rng);
  const MatchIndex index(set, 4, 5, rng);
  const auto g = oracle::rotation90(8);
  PairSet ps(set);
  add_pairs(ps, 1, g, index, rng);
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(pair_objective(g, set[ps.pairs()[0].first], set[ps.pairs()[0].second]), 0u);
  add_pairs(ps, 30, g, index, rng);
  EXPECT_EQ(total_objective(g, ps), 0u);
  EXPECT_TRUE(ps.columns_consistent());
}

TEST(AddPairs, ZeroIsNoOp) {
  Rng rng(6);
  const ImageSet set = rotation_closed_set(8, 5, rng);
  const MatchIndex index(set, 2, 5, rng);
  PairSet ps(set);
  add_pairs(ps, 3, Permutation::identity(64), index, rng);
  const auto before = ps.pairs();
  add_pairs(ps, 0, Permutation::identity(64), index, rng);
  EXPECT_EQ(ps.pairs(), before);
}

TEST(DropRandom, EdgeCounts) {
  Rng rng(7);
  RandomProblem p(8, 16, rng);
  const auto before = p.ps.pairs();
  drop_random(p.ps, 0, rng);
  EXPECT_EQ(p.ps.pairs(), before);
  EXPECT_THROW(drop_random(p.ps, 17, rng), contract_error);
  drop_random(p.ps, 16, rng);
  EXPECT_TRUE(p.ps.empty());
  EXPECT_TRUE(p.ps.columns_consistent());
}

TEST(DropRandom, EachPairEquallyLikely) {
  Rng rng(8);
  ImageSet set(2);
  set.add(BitImage(2));
  const std::size_t n = 10;
  const int trials = 10000;
  std::vector<int> dropped(n, 0);
  for (int k = 0; k < trials; ++k) {
    PairSet ps(set);
    for (std::size_t j = 0; j < n; ++j) ps.append(0, 0, Columns::defer);
    drop_random(ps, 1, rng, Columns::defer);
    std::vector<bool> present(n, false);
    for (const auto& p : ps.pairs()) present[p.serial] = true;
    for (std::size_t j = 0; j < n; ++j) dropped[j] += !present[j];
  }
  double chi2 = 0;
  const double expect = double(trials) / double(n);
  for (int c : dropped) chi2 += (c - expect) * (c - expect) / expect;
  // 9 degrees of freedom; 27.9 is the 0.999 quantile.
  EXPECT_LT(chi2, 27.9);
}

TEST(DropRandom, DeterministicGivenSeed) {
  Rng a(9), b(9);
  RandomProblem pa(8, 32, a), pb(8, 32, b);
  drop_random(pa.ps, 5, a);
  drop_random(pb.ps, 5, b);
  EXPECT_EQ(pa.ps.pairs(), pb.ps.pairs());
}

TEST(RemoveWorst, TieBreakEvictsNewest) {
  ImageSet set(2);
  set.add(BitImage(2, BitVector::from_string("1100")));
  set.add(BitImage(2, BitVector::from_string("0011")));
  PairSet ps(set);
  for (int k = 0; k < 4; ++k) ps.append(0, 1);
  remove_worst(ps, 1, Permutation::identity(4));
  ASSERT_EQ(ps.size(), 3u);
  for (const auto& p : ps.pairs()) EXPECT_NE(p.serial, 3u);
}

TEST(RemoveWorst, StrictMaximumGoesFirst) {
  ImageSet set(2);
  set.add(BitImage(2, BitVector::from_string("1100")));
  set.add(BitImage(2, BitVector::from_string("1101")));
  set.add(BitImage(2, BitVector::from_string("0011")));
  PairSet ps(set);
  ps.append(0, 1);
  ps.append(0, 2);  // d = 4
  ps.append(0, 0);
  remove_worst(ps, 1, Permutation::identity(4));
  ASSERT_EQ(ps.size(), 2u);
  for (const auto& p : ps.pairs()) EXPECT_NE(p.second, 2u);
  EXPECT_THROW(remove_worst(ps, 3, Permutation::identity(4)), contract_error);
}

TEST(RemoveWorst, NeverIncreasesObjective) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    RandomProblem p(8, 32, rng);
    const auto before = total_objective(p.t, p.ps);
    remove_worst(p.ps, 1 + rng.below(10), p.t);
    EXPECT_LE(total_objective(p.t, p.ps), before);
    EXPECT_TRUE(p.ps.columns_consistent());
  }
}

TEST(PairSet, UpdateCycleKeepsSize) {
  Rng rng(11);
  const ImageSet set = rotation_closed_set(8, 40, rng);
  const MatchIndex index(set, 3, 5, rng);
  const auto t = random_permutation(64, rng);
  PairSet ps(set);
  add_pairs(ps, 50, t, index, rng);
  for (int it = 0; it < 20; ++it) {
    add_pairs(ps, 8, t, index, rng, Columns::defer);
    drop_random(ps, 1, rng, Columns::defer);
    remove_worst(ps, 7, t, Columns::defer);
    ps.rebuild_columns();
    ASSERT_EQ(ps.size(), 50u);
  }
  EXPECT_TRUE(ps.columns_consistent());
}
