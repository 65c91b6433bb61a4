#include <gtest/gtest.h>

#include "permlearn/datasets.hpp"
#include "permlearn/match_index.hpp"
#include "test_support.hpp"

using namespace permlearn;

namespace {

const ImageSet& triangle_set() {
  static const ImageSet set = [] {
    Rng rng(2024);
    return generate_triangles(32, 10000, 0.10, rng);
  }();
  return set;
}

}  // namespace

TEST(MatchIndex, SingleImageIsSingleLeaf) {
  ImageSet set(4);
  set.add(BitImage(4, BitVector::from_string("1010101010101010")));
  Rng rng(1);
  const MatchIndex index(set, 1, 5, rng);
  ASSERT_EQ(index.tree(0).nodes.size(), 1u);
  EXPECT_TRUE(index.tree(0).nodes[0].leaf());
  EXPECT_TRUE(index.validate());
  const BitImage q(4, BitVector::from_string("1111000011110000"));
  const auto r = index.query(q);
  EXPECT_EQ(r.id, 0u);
  EXPECT_EQ(r.distance, hamming(q.bits(), set[0].bits()));
}

TEST(MatchIndex, CapacityOverflowSplitsAtRoot) {
  const std::size_t m = 4, side = 4;
  Rng rng(77);
  Rng peek = rng;
  const auto first_px = random_permutation(side * side, peek)[0];
  ImageSet set(side);
  for (std::size_t k = 0; k <= m; ++k) {
    BitImage img(side);
    img.bits().set(first_px, k % 2 == 1);
    img.bits().set((first_px + 1 + k) % (side * side));  // keeps images distinct
    set.add(img);
  }
  const MatchIndex index(set, 1, m, rng);
  const auto& root = index.tree(0).nodes[0];
  EXPECT_FALSE(root.leaf());
  EXPECT_EQ(root.split_depth, 0u);
  EXPECT_TRUE(index.tree(0).nodes[std::size_t(root.child[0])].leaf());
  EXPECT_TRUE(index.tree(0).nodes[std::size_t(root.child[1])].leaf());
  EXPECT_TRUE(index.validate());
}

TEST(MatchIndex, DuplicatesBeyondCapacityShareOneLeaf) {
  ImageSet set(4);
  for (int k = 0; k < 12; ++k) set.add(BitImage(4, BitVector::from_string("1100110000110011")));
  set.add(BitImage(4, BitVector::from_string("0000000000000001")));
  Rng rng(3);
  const MatchIndex index(set, 3, 5, rng);
  EXPECT_TRUE(index.validate());
  const auto r = index.query(set[5]);
  EXPECT_EQ(r.distance, 0u);
  EXPECT_EQ(r.id, 0u);  // lowest id among identical images
}

TEST(MatchIndex, EmptySetAndBadParametersRejected) {
  ImageSet empty(4);
  Rng rng(1);
  EXPECT_THROW(MatchIndex(empty, 1, 5, rng), data_error);
  EXPECT_THROW(exact_nearest(empty, BitImage(4)), data_error);
  ImageSet one(4);
  one.add(BitImage(4));
  EXPECT_THROW(MatchIndex(one, 0, 5, rng), contract_error);
  EXPECT_THROW(MatchIndex(one, 1, 0, rng), contract_error);
}

TEST(MatchIndex, TriangleTreesPassStructuralCheck) {
  Rng rng(5);
  const MatchIndex index(triangle_set(), 10, 5, rng);
  EXPECT_TRUE(index.validate());
}

TEST(MatchIndex, SelfQueriesReturnZero) {
  Rng rng(6);
  const auto& set = triangle_set();
  const MatchIndex index(set, 10, 5, rng);
  for (ImageId id = 0; id < set.size(); id += 7) {
    const auto r = index.query(set[id]);
    ASSERT_EQ(r.distance, 0u) << "id " << id;
    ASSERT_LE(r.id, id);
  }
}

TEST(MatchIndex, ApproximateNeverBeatsExact) {
  Rng rng(8);
  const auto& set = triangle_set();
  const MatchIndex index(set, 10, 5, rng);
  Rng qrng(9);
  double ratio_sum = 0;
  std::size_t ratio_n = 0, exact_hits = 0, examined = 0;
  for (int k = 0; k < 1000; ++k) {
    const BitImage q = rasterize(random_triangle(32, qrng), 32);
    const auto approx = index.query(q);
    const auto exact = exact_nearest(set, q);
    ASSERT_GE(approx.distance, exact.distance);
    ASSERT_EQ(approx.distance, hamming(set[approx.id].bits(), q.bits()));
    exact_hits += approx.distance == exact.distance;
    examined += approx.examined;
    if (exact.distance > 0) {
      ratio_sum += double(approx.distance) / double(exact.distance);
      ++ratio_n;
    }
  }
  RecordProperty("mean_distance_ratio", std::to_string(ratio_sum / double(ratio_n)));
  RecordProperty("recall_at_1", std::to_string(double(exact_hits) / 1000.0));
  EXPECT_LE(double(examined) / 1000.0, double(set.size()) / 10.0);
}

TEST(MatchIndex, SameSeedSameTreesAndResults) {
  const auto& set = triangle_set();
  Rng a(31), b(31);
  const MatchIndex ia(set, 4, 5, a), ib(set, 4, 5, b);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(ia.tree(k).ordering, ib.tree(k).ordering);
    EXPECT_EQ(ia.tree(k).ids, ib.tree(k).ids);
  }
  Rng q(1);
  for (int k = 0; k < 50; ++k) {
    const BitImage img(32, oracle::random_bits(1024, q, 0.3));
    const auto ra = ia.query(img), rb = ib.query(img);
    EXPECT_EQ(ra.id, rb.id);
    EXPECT_EQ(ra.distance, rb.distance);
  }
}

TEST(ExactNearest, ClosestWithLowestIdTieBreak) {
  ImageSet set(2);
  set.add(BitImage(2, BitVector::from_string("0000")));
  set.add(BitImage(2, BitVector::from_string("1111")));
  set.add(BitImage(2, BitVector::from_string("1111")));
  EXPECT_EQ(exact_nearest(set, set[1]).distance, 0u);
  EXPECT_EQ(exact_nearest(set, BitImage(2, BitVector::from_string("1110"))).id, 1u);
  EXPECT_EQ(exact_nearest(set, BitImage(2, BitVector::from_string("1000"))).id, 0u);
  EXPECT_EQ(exact_nearest(set, BitImage(2, BitVector::from_string("1100"))).id, 0u);
}
