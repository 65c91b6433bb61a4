#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "permlearn/bit_vector.hpp"
#include "permlearn/permutation.hpp"
#include "test_support.hpp"

using namespace permlearn;
using permlearn::oracle::naive_dot;
using permlearn::oracle::naive_hamming;
using permlearn::oracle::naive_popcount;
using permlearn::oracle::random_bits;

TEST(BitVector, HammingExamples) {
  const auto x = BitVector::from_string("1011001");
  EXPECT_EQ(hamming(x, x), 0u);
  EXPECT_EQ(hamming(BitVector::from_string("0000"), BitVector::from_string("1111")), 4u);
  EXPECT_EQ(hamming(BitVector::from_string("10110"), BitVector::from_string("11010")), 2u);
}

TEST(BitVector, DotExamples) {
  EXPECT_EQ(dot(BitVector::from_string("1111"), BitVector::from_string("1111")), 4u);
  EXPECT_EQ(dot(BitVector::from_string("1010"), BitVector::from_string("0101")), 0u);
  EXPECT_EQ(dot(BitVector::from_string("1100"), BitVector::from_string("1010")), 1u);
}

TEST(BitVector, LengthMismatchIsContractViolation) {
  const BitVector a(10), b(11);
  EXPECT_THROW(hamming(a, b), contract_error);
  EXPECT_THROW(dot(a, b), contract_error);
}

TEST(BitVector, PaddingStaysClear) {
  BitVector v(70, true);
  EXPECT_TRUE(v.padding_clear());
  EXPECT_EQ(v.count(), 70u);
  v.flip_all();
  EXPECT_TRUE(v.padding_clear());
  EXPECT_EQ(v.count(), 0u);
  v.flip_all();
  v.resize(65);
  EXPECT_TRUE(v.padding_clear());
  EXPECT_EQ(v.count(), 65u);
  v.push_back(true);
  EXPECT_TRUE(v.padding_clear());
  EXPECT_EQ(v.count(), 66u);
  EXPECT_THROW(v.set(66), contract_error);
  EXPECT_THROW(BitVector::from_string("01x"), contract_error);
}

TEST(BitVector, PackedKernelsMatchPerBitLoop) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(300);
    const auto a = random_bits(n, rng, rng.uniform());
    const auto b = random_bits(n, rng, rng.uniform());
    ASSERT_EQ(hamming(a, b), naive_hamming(a, b));
    ASSERT_EQ(dot(a, b), naive_dot(a, b));
    ASSERT_EQ(a.count(), naive_popcount(a));
  }
}

TEST(BitVector, HammingPopcountDotIdentity) {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_bits(4096, rng, rng.uniform());
    const auto b = random_bits(4096, rng, rng.uniform());
    ASSERT_EQ(hamming(a, b), a.count() + b.count() - 2 * dot(a, b));
  }
}

TEST(Permutation, PermuteExamples) {
  const auto x = BitVector::from_string("1010");
  EXPECT_EQ(permute(x, Permutation::identity(4)), x);
  const auto rev = Permutation::from_map({3, 2, 1, 0});
  EXPECT_EQ(permute(x, rev), BitVector::from_string("0101"));
  EXPECT_THROW(permute(x, Permutation::identity(5)), contract_error);
}

TEST(Permutation, ComposeMatchesSequentialPermute) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_bits(64, rng);
    const auto t1 = random_permutation(64, rng);
    const auto t2 = random_permutation(64, rng);
    const auto lhs = permute(permute(x, t1), t2);
    // Elementwise: position i of the result holds x[t1[t2[i]]].
    BitVector rhs(64);
    for (std::size_t i = 0; i < 64; ++i) rhs.set(i, x.test(t1[t2[i]]));
    ASSERT_EQ(lhs, rhs);
    ASSERT_EQ(permute(x, compose(t1, t2)), rhs);
  }
}

TEST(Permutation, InverseComposesToIdentity) {
  Rng rng(5);
  const auto p = random_permutation(257, rng);
  EXPECT_EQ(compose(p, inverse(p)), Permutation::identity(257));
  EXPECT_EQ(compose(inverse(p), p), Permutation::identity(257));
}

TEST(Permutation, RandomPermutationContracts) {
  Rng a(99), b(99);
  EXPECT_EQ(random_permutation(1, a), Permutation::identity(1));
  EXPECT_EQ(random_permutation(500, a), random_permutation(500, b));
  const auto big = random_permutation(4096, a);
  std::vector<Permutation::index_type> sorted = big.map();
  std::sort(sorted.begin(), sorted.end());
  std::vector<Permutation::index_type> expect(4096);
  std::iota(expect.begin(), expect.end(), 0u);
  EXPECT_EQ(sorted, expect);
  EXPECT_THROW(random_permutation(0, a), contract_error);
}

TEST(Permutation, RandomPermutationIsRoughlyUniform) {
  // All 6 permutations of 3 elements should appear about equally often.
  Rng rng(1234);
  std::map<std::vector<Permutation::index_type>, int> counts;
  const int trials = 60000;
  for (int k = 0; k < trials; ++k) ++counts[random_permutation(3, rng).map()];
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [_, c] : counts) EXPECT_NEAR(c, trials / 6, 400);
}

TEST(Permutation, SwapInPlace) {
  auto t = Permutation::identity(5);
  t.swap_in_place(0, 1);
  EXPECT_EQ(t.map(), (std::vector<Permutation::index_type>{1, 0, 2, 3, 4}));
  const auto before = t;
  t.swap_in_place(3, 3);
  EXPECT_EQ(t, before);
  t.swap_in_place(2, 4);
  t.swap_in_place(2, 4);
  EXPECT_EQ(t, before);
  EXPECT_THROW(t.swap_in_place(0, 5), contract_error);
}

TEST(Permutation, BijectionSurvivesSwapSequences) {
  Rng rng(8);
  auto t = random_permutation(1024, rng);
  for (int k = 0; k < 10000; ++k) t.swap_in_place(rng.below(1024), rng.below(1024));
  EXPECT_TRUE(t.is_bijection());
}

TEST(Permutation, PermutePreservesPopulation) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_bits(777, rng, rng.uniform());
    EXPECT_EQ(permute(x, random_permutation(777, rng)).count(), x.count());
  }
}

TEST(Permutation, FromMapRejectsNonBijection) {
  EXPECT_THROW(Permutation::from_map({0, 0, 1}), contract_error);
  EXPECT_THROW(Permutation::from_map({0, 3}), contract_error);
}

TEST(Rng, SaveRestoreContinuesSequence) {
  Rng a(42);
  for (int k = 0; k < 17; ++k) a.next();
  Rng b;
  b.restore(a.save());
  for (int k = 0; k < 100; ++k) ASSERT_EQ(a.below(1000), b.below(1000));
}
