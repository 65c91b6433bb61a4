#include <gtest/gtest.h>

#include <algorithm>

#include "permlearn/serialization.hpp"
#include "test_support.hpp"

using namespace permlearn;

namespace {

bool has_warning(const std::vector<std::string>& w, const std::string& rule) {
  return std::any_of(w.begin(), w.end(), [&](const std::string& s) { return s.find("|" + rule + "|") != std::string::npos; });
}

}  // namespace

TEST(ValidateConfig, TriangleSetSizeIsBorderline) {
  const auto w = validate_config(presets::paper_triangles(), 2.0);
  EXPECT_TRUE(has_warning(w, "|S| >= (L/eps)^3"));
  EXPECT_FALSE(has_warning(w, "|P| >= L/eps"));
  EXPECT_FALSE(has_warning(w, "n_t << L^4"));
  // 30000 < 32768 is the quoted comparison.
  const auto it = std::find_if(w.begin(), w.end(), [](const std::string& s) { return s.find("30000") != std::string::npos; });
  ASSERT_NE(it, w.end());
  EXPECT_NE(it->find("32768"), std::string::npos);
}

TEST(ValidateConfig, TimeStepsAtFourthPowerWarn) {
  LearnConfig c = presets::desk();
  c.n_t = c.L * c.L * c.L * c.L;
  EXPECT_TRUE(has_warning(validate_config(c), "n_t << L^4"));
  c.n_t = c.L * c.L * c.L * c.L / 10;
  EXPECT_FALSE(has_warning(validate_config(c), "n_t << L^4"));
}

TEST(ValidateConfig, PatchPresetHasNoPairRatioWarning) {
  const auto w = validate_config(presets::paper_patches());
  EXPECT_FALSE(has_warning(w, "n_n << |P|"));
  EXPECT_FALSE(has_warning(w, "|S| >= (L/eps)^3"));
}

TEST(ValidateConfig, ZeroRenewalCountsAsUnbounded) {
  LearnConfig c = presets::desk();
  c.n_r = 0;
  EXPECT_TRUE(has_warning(validate_config(c), "n_i >> |P|/n_r"));
  EXPECT_FALSE(has_warning(validate_config(c), "n_r << n_n"));
}

TEST(CheckConfig, StructuralErrors) {
  EXPECT_NO_THROW(check_config(presets::desk()));
  LearnConfig c = presets::desk();
  c.n_r = c.n_n + 1;
  EXPECT_THROW(check_config(c), config_error);
  c = presets::desk();
  c.n_n = c.pair_count + 1;
  EXPECT_THROW(check_config(c), config_error);
  c = presets::desk();
  c.min_minority = 0.5;
  EXPECT_THROW(check_config(c), config_error);
  c = presets::desk();
  c.L = 0;
  EXPECT_THROW(check_config(c), config_error);
  EXPECT_THROW(presets::by_name("nope"), config_error);
  EXPECT_EQ(presets::by_name("desk"), presets::desk());
}

TEST(ConfigJson, RoundTripAndStrictKeys) {
  LearnConfig c = presets::paper_triangles();
  c.seed = 77;
  c.min_minority = 0.2;
  EXPECT_EQ(config_from_json(to_json(c)), c);

  const json partial = json::parse(R"({"n_i": 5, "seed": 3})");
  const LearnConfig p = config_from_json(partial, presets::desk());
  EXPECT_EQ(p.n_i, 5u);
  EXPECT_EQ(p.seed, 3u);
  EXPECT_EQ(p.L, 16u);

  EXPECT_THROW(config_from_json(json::parse(R"({"N_i": 5})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"n_i": -5})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"n_i": 2.5})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"n_i": "5"})")), config_error);
  EXPECT_THROW(config_from_json(json::parse("[1]")), config_error);
}

TEST(LearnedJson, RoundTripProperty) {
  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    LearnedTransformation lt;
    const std::size_t side = 1 + rng.below(12);
    lt.t = random_permutation(side * side, rng);
    lt.final_objective = rng.below(100000);
    lt.config = presets::desk();
    lt.config.seed = rng.next();
    lt.provenance = Provenance{k % 2 ? "random" : "composed", {"a.json", "b.json"}};
    for (std::size_t r = 0; r < rng.below(20); ++r)
      lt.trace.push_back(IterationRecord{rng.below(1000), rng.below(1000), rng.below(1000), rng.below(100)});
    const json j = to_json(lt);
    EXPECT_EQ(learned_from_json(json::parse(j.dump())), lt);
  }
}

TEST(PermutationJson, RejectsNonBijections) {
  EXPECT_THROW(permutation_from_json(json::parse(R"({"size": 3, "map": [0, 0, 1]})")), io_error);
  EXPECT_THROW(permutation_from_json(json::parse(R"({"size": 4, "map": [0, 2, 1]})")), io_error);
  EXPECT_EQ(permutation_from_json(json::parse(R"({"map": [2, 0, 1]})")).map()[0], 2u);
}
