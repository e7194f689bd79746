#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "fixtures.hpp"

using namespace coopsim;

namespace {

Json toy_json() { return Json::parse(fixtures::kTwoSchemes); }

ConfigErrorCode error_of(const Json& raw) {
  try {
    validate_config(raw);
  } catch (const ConfigError& e) {
    return e.code();
  }
  ADD_FAILURE() << "config was accepted";
  return ConfigErrorCode::malformed;
}

}  // namespace

TEST(ValidateConfig, MinimalInstanceIsValid) {
  const auto c = fixtures::load("toy.json");
  EXPECT_EQ(c.num_relays(), 1u);
  EXPECT_EQ(c.num_destinations(), 1u);
  EXPECT_EQ(c.block_length(), 10.0);
  EXPECT_EQ(c.fading.states.size(), 1u);
  EXPECT_EQ(c.support.size(), 1u);
}

TEST(ValidateConfig, DistributionMustSumToOne) {
  auto raw = toy_json();
  raw["fading"]["states"][0]["p"] = 0.9;
  EXPECT_EQ(error_of(raw), ConfigErrorCode::distribution_not_normalized);
}

TEST(ValidateConfig, RejectsNegativeProbability) {
  auto raw = Json::parse(fixtures::kTwoLabels);
  raw["fading"]["states"][0]["p"] = -0.5;
  raw["fading"]["states"][1]["p"] = 1.5;
  EXPECT_EQ(error_of(raw), ConfigErrorCode::negative_probability);
}

TEST(ValidateConfig, RejectsZeroRateVector) {
  auto raw = toy_json();
  raw["schemes"][0]["rates"] = Json::array({0.0});
  EXPECT_EQ(error_of(raw), ConfigErrorCode::zero_rate_vector);
}

TEST(ValidateConfig, RejectsEmptySchemeSet) {
  auto raw = toy_json();
  raw["schemes"] = Json::array();
  raw["support"] = Json::array();
  EXPECT_EQ(error_of(raw), ConfigErrorCode::empty_scheme_set);
}

TEST(ValidateConfig, RejectsUnknownSchemeInSupport) {
  auto raw = toy_json();
  raw["support"][0]["m"] = 7;
  EXPECT_EQ(error_of(raw), ConfigErrorCode::support_references_unknown_scheme);
}

TEST(ValidateConfig, RejectsWrongArity) {
  auto raw = toy_json();
  raw["support"][0]["g1"] = Json::array({"a", "a"});
  EXPECT_EQ(error_of(raw), ConfigErrorCode::dimension_mismatch);
  raw = toy_json();
  raw["schemes"][1]["rates"] = Json::array({1.0, 2.0});
  EXPECT_EQ(error_of(raw), ConfigErrorCode::dimension_mismatch);
}

TEST(ValidateConfig, RejectsUnknownFieldsAndLabels) {
  auto raw = toy_json();
  raw["extra"] = 1;
  EXPECT_EQ(error_of(raw), ConfigErrorCode::unknown_field);
  raw = toy_json();
  raw["fading"]["states"][0]["f1"] = Json::array({"z"});
  EXPECT_EQ(error_of(raw), ConfigErrorCode::unknown_label);
}

TEST(ValidateConfig, Idempotent) {
  for (const char* name : {"toy.json", "toy_fading.json", "desk.json"}) {
    const auto c = fixtures::load(name);
    EXPECT_EQ(validate_config(to_json(c)), c) << name;
  }
}

TEST(ValidateConfig, ZeroProbabilityStatesAreDropped) {
  auto raw = Json::parse(fixtures::kTwoLabels);
  raw["fading"]["states"][0]["p"] = 1.0;
  raw["fading"]["states"][1]["p"] = 0.0;
  const auto c = validate_config(raw);
  ASSERT_EQ(c.fading.states.size(), 1u);
  EXPECT_EQ(c.fading.probability({FirstHopState{1}, SecondHopState{1}}), 0.0);
}

TEST(SampleFading, PointMass) {
  const auto c = fixtures::load("toy.json");
  Rng rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_fading(c, rng), (FadingState{}));
}

TEST(SampleFading, HalfHalfFrequency) {
  const auto c = fixtures::parse(fixtures::kTwoLabels);
  Rng rng(12345);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += sample_fading(c, rng).first.value == 0;
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.5, 0.01);
}

TEST(SampleFading, ConvergesOnDeskConfig) {
  const auto c = fixtures::load("desk.json");
  Rng rng(99);
  const int n = 200000;
  std::map<FadingState, int> counts;
  for (int i = 0; i < n; ++i) ++counts[sample_fading(c, rng)];
  const double bound = 5.0 * std::sqrt(std::log(n) / n);
  for (const auto& w : c.fading.states)
    EXPECT_LE(std::abs(counts[w.state] / static_cast<double>(n) - w.probability), bound);
  EXPECT_EQ(counts.size(), c.fading.states.size());
}

TEST(SampleFading, SameSeedSameSequence) {
  const auto c = fixtures::load("desk.json");
  Rng a(5), b(5);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(sample_fading(c, a), sample_fading(c, b));
}

TEST(Labels, EncodeDecodeRoundTrip) {
  for (std::uint64_t i = 0; i < 64; ++i) EXPECT_EQ(labels::encode(labels::decode(i, 2, 6), 2), i);
  const std::vector<std::size_t> digits{1, 0, 1};
  EXPECT_EQ(labels::encode(digits, 2), 5u);
}

TEST(QueueCount, EncodingBased) {
  EXPECT_EQ(queue_count_encoding_based(4, 2, 2), Count{16});
  EXPECT_EQ(queue_count_encoding_based(1, 1, 1), Count{1});
  EXPECT_EQ(queue_count_encoding_based(3, 2, 1), Count{6});
  EXPECT_EQ(queue_count_encoding_based(fixtures::load("desk.json")), Count{12});
}

TEST(QueueCount, StateBased) {
  EXPECT_EQ(queue_count_state_based(4, 3, 2, 2), Count{32768});
  EXPECT_EQ(queue_count_state_based(1, 1, 1, 1), Count{1});
  EXPECT_EQ(queue_count_state_based(2, 2, 2, 1), Count{64});
  EXPECT_THROW(queue_count_state_based(0, 1, 1, 1), std::invalid_argument);
}

TEST(QueueCount, StateBasedGrowsGeometricallyInK) {
  for (std::uint64_t L : {1, 2, 3, 5})
    for (std::uint64_t F : {1, 2, 3})
      for (std::uint64_t N : {1, 2, 3})
        for (std::uint64_t K = 1; K < 4; ++K) {
          const Count ratio = Count{L} * detail::checked_pow(F, N + 1);
          EXPECT_EQ(queue_count_state_based(L, K + 1, F, N), queue_count_state_based(L, K, F, N) * ratio);
        }
}

TEST(QueueCount, EncodingBasedIgnoresDestinations) {
  auto raw = toy_json();
  const auto one = validate_config(raw);
  raw["shape"]["K"] = 3;
  for (auto& s : raw["schemes"]) s["rates"] = Json::array({1.0, 0.0, 1.0});
  raw["fading"]["states"][0]["f2"] = Json::array({"a", "a", "a"});
  for (auto& s : raw["support"]) s["g2"] = Json::array({"a", "a", "a"});
  EXPECT_EQ(queue_count_encoding_based(validate_config(raw)), queue_count_encoding_based(one));
}

TEST(QueueCount, OverflowIsReported) {
  EXPECT_THROW(queue_count_state_based(1000, 20, 10, 10), CountOverflow);
  EXPECT_EQ(to_string(queue_count_state_based(2, 64, 1, 1)), "18446744073709551616");
}
