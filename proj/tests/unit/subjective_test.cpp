// Copyright 2026 The GestureQA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "aggregation_table.hpp"
#include "gestureqa/error.hpp"
#include "gestureqa/subjective/aggregate.hpp"
#include "gestureqa/subjective/analytics.hpp"
#include "gestureqa/subjective/ratings.hpp"
#include "test_util.hpp"

namespace gestureqa::subjective {
namespace {

using V = std::vector<double>;
using testing::AggregationTable;

// ---- z-score ----

TEST(ZscoreTest, WorkedExamples) {
  EXPECT_EQ(zscore_normalize(V{50, 50, 50}), (V{50, 50, 50}));
  const auto n = zscore_normalize(V{10, 20, 30});
  // sigma = sqrt(200 / 3), so z = -+sqrt(3 / 2) and the ends land at
  // 50 -+ 50 * sqrt(3 / 2) / 3, about 29.59 and 70.41
  const double z = 10.0 / std::sqrt(200.0 / 3.0);
  EXPECT_NEAR(z, std::sqrt(1.5), 1e-15);
  EXPECT_NEAR(n[0], 100.0 * (3.0 - z) / 6.0, 1e-12);
  EXPECT_NEAR(n[1], 50.0, 1e-12);
  EXPECT_NEAR(n[2], 100.0 * (3.0 + z) / 6.0, 1e-12);
  EXPECT_NEAR(n[0], 29.5876, 1e-4);
  EXPECT_NEAR(n[2], 70.4124, 1e-4);
  // near-constant input where the mean does not round exactly
  EXPECT_EQ(zscore_normalize(V{0.1, 0.1, 0.1}), (V{50, 50, 50}));
  // a rating equal to the rater's mean
  EXPECT_NEAR(zscore_normalize(V{3, 9, 6, 1, 11})[2], 50.0, 1e-12);
  EXPECT_EQ(zscore_normalize(V{42}), (V{50}));
}

TEST(ZscoreTest, ClipsToRange) {
  V raw(100, 0.0);
  raw[0] = 1000.0;  // z = sqrt(99), far beyond 3
  const auto n = zscore_normalize(raw);
  EXPECT_EQ(n[0], 100.0);
  for (std::size_t i = 1; i < n.size(); ++i) EXPECT_GE(n[i], 0.0);
}

TEST(ZscoreTest, AffineInvarianceAndRange) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1.0, 100.0), a(0.01, 20.0), b(-500.0, 500.0);
  std::uniform_int_distribution<int> len(2, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    V raw(len(rng));
    for (auto& v : raw) v = u(rng);
    const double sa = a(rng), sb = b(rng);
    V moved(raw);
    for (auto& v : moved) v = sa * v + sb;
    const auto n0 = zscore_normalize(raw), n1 = zscore_normalize(moved);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      ASSERT_NEAR(n0[i], n1[i], 1e-9);
      ASSERT_GE(n0[i], 0.0);
      ASSERT_LE(n0[i], 100.0);
    }
  }
}

TEST(ZscoreTest, EmptyInputIsAContractViolation) {
  EXPECT_THROW(zscore_normalize(V{}), ContractError);
}

// ---- ESBA ----

TEST(EsbaTest, WorkedExamples) {
  EXPECT_TRUE(compute_esba({true, true, false}));
  EXPECT_FALSE(compute_esba({true, false}));
  std::vector<bool> sixteen(16, false);
  std::fill_n(sixteen.begin(), 9, true);
  EXPECT_TRUE(compute_esba(sixteen));
  sixteen[0] = false;
  EXPECT_FALSE(compute_esba(sixteen));  // 8 of 16
  EXPECT_TRUE(compute_esba({true}));
  EXPECT_FALSE(compute_esba({false}));
  EXPECT_THROW(compute_esba({}), ContractError);
}

TEST(EsbaTest, PermutationAndFlipProperties) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<bool> votes(1 + trial % 19);
    int yes = 0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
      votes[i] = rng() & 1;
      yes += votes[i];
    }
    const bool out = compute_esba(votes);
    EXPECT_EQ(out, 2 * yes > static_cast<int>(votes.size()));
    auto shuffled = votes;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(compute_esba(shuffled), out);
    if (2 * yes != static_cast<int>(votes.size())) {
      std::vector<bool> flipped;
      for (bool v : votes) flipped.push_back(!v);
      EXPECT_EQ(compute_esba(flipped), !out);
    }
  }
}

// ---- exclusion ----

NormalizedRating nr(const std::string& rater, const std::string& sample, double q, double c = 50.0) {
  return {rater, sample, q, c, false};
}

TEST(ExclusionTest, IdenticalRankingsKeepEveryone) {
  std::vector<NormalizedRating> t;
  for (int s = 0; s < 8; ++s) {
    for (int r = 0; r < 3; ++r) t.push_back(nr("r" + std::to_string(r), "s" + std::to_string(s), 10.0 * s + r));
  }
  const auto res = exclude_outlier_subjects(t, Dimension::kQuality);
  EXPECT_TRUE(res.excluded.empty());
  EXPECT_EQ(res.kept.size(), t.size());
  for (const auto& [rater, rho] : res.correlations) EXPECT_NEAR(rho, 1.0, 1e-12);
}

TEST(ExclusionTest, ReversedRaterIsExcluded) {
  std::vector<NormalizedRating> t;
  for (int s = 0; s < 10; ++s) {
    t.push_back(nr("honest_a", "s" + std::to_string(s), 5.0 * s));
    t.push_back(nr("honest_b", "s" + std::to_string(s), 5.0 * s + (s % 2)));
    t.push_back(nr("reversed", "s" + std::to_string(s), 100.0 - 5.0 * s));
  }
  const auto res = exclude_outlier_subjects(t, Dimension::kQuality);
  EXPECT_EQ(res.excluded, std::vector<std::string>{"reversed"});
  EXPECT_LT(res.correlations.at("reversed"), -0.9);
  EXPECT_EQ(res.kept.size(), 20u);
  for (const auto& r : res.kept) EXPECT_NE(r.rater_id, "reversed");
  // the other dimension is constant everywhere and excludes nobody
  EXPECT_TRUE(exclude_outlier_subjects(t, Dimension::kConsistency).excluded.empty());
}

TEST(ExclusionTest, LoneRaterPassesThroughUnchanged) {
  std::vector<NormalizedRating> t{nr("solo", "a", 12.5, 70), nr("solo", "b", 90, 10), nr("solo", "c", 50, 50)};
  const auto res = exclude_outlier_subjects(t, Dimension::kQuality);
  EXPECT_TRUE(res.excluded.empty());
  ASSERT_EQ(res.kept.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(res.kept[i].quality, t[i].quality);
    EXPECT_EQ(res.kept[i].consistency, t[i].consistency);
  }
}

TEST(ExclusionTest, StrictThresholdLeavesTheLastRater) {
  std::vector<NormalizedRating> t;
  for (int s = 0; s < 6; ++s) {
    t.push_back(nr("a", "s" + std::to_string(s), s));
    t.push_back(nr("b", "s" + std::to_string(s), (s * 5) % 6));
    t.push_back(nr("c", "s" + std::to_string(s), V{2, 0, 4, 1, 5, 3}[s]));
  }
  const auto res = exclude_outlier_subjects(t, Dimension::kQuality, {1.0, 3});
  EXPECT_EQ(res.excluded.size(), 2u);
  ASSERT_EQ(res.kept.size(), 6u);
  for (const auto& r : res.kept) EXPECT_EQ(r.rater_id, res.kept[0].rater_id);
}

TEST(ExclusionTest, OutlierDoesNotDragHonestRatersOut) {
  // with three raters the reversed one flattens the others' reference mean
  // until it is removed
  std::vector<NormalizedRating> t;
  for (int s = 0; s < 10; ++s) {
    t.push_back(nr("a", "s" + std::to_string(s), 5.0 * s));
    t.push_back(nr("b", "s" + std::to_string(s), 5.0 * s + 7.0 * (s % 2)));
    t.push_back(nr("z", "s" + std::to_string(s), 100.0 - 5.0 * s));
  }
  const auto res = exclude_outlier_subjects(t, Dimension::kQuality);
  EXPECT_EQ(res.excluded, std::vector<std::string>{"z"});
  EXPECT_GT(res.correlations.at("a"), 0.9);
  EXPECT_GT(res.correlations.at("b"), 0.9);
}

TEST(ExclusionTest, SmallOverlapKeepsRater) {
  std::vector<NormalizedRating> t{nr("a", "x", 10), nr("b", "x", 90), nr("a", "y", 90), nr("b", "y", 10)};
  const auto res = exclude_outlier_subjects(t, Dimension::kQuality);
  EXPECT_TRUE(res.excluded.empty());
  EXPECT_TRUE(res.correlations.empty());
}

// ---- MOS ----

TEST(MosTest, WorkedExamples) {
  std::vector<NormalizedRating> t{nr("a", "pair", 40, 10), nr("b", "pair", 60, 30), nr("a", "single", 73, 20)};
  const auto res = compute_mos(t, {}, {});
  ASSERT_EQ(res.records.size(), 2u);
  EXPECT_EQ(res.records[0].sample_id, "pair");
  EXPECT_EQ(res.records[0].mos_quality, 50.0);
  EXPECT_EQ(res.records[0].mos_consistency, 20.0);
  EXPECT_EQ(res.records[0].n_raters, 2);
  EXPECT_EQ(res.records[1].mos_quality, 73.0);
  EXPECT_EQ(res.records[1].n_raters, 1);
  EXPECT_TRUE(res.exceptions.empty());
}

TEST(MosTest, EighteenRatersTwoExcluded) {
  std::vector<NormalizedRating> t;
  for (int r = 0; r < 18; ++r) t.push_back(nr("r" + std::to_string(r), "s", 50.0 + r));
  const auto res = compute_mos(t, {"r3", "r7"}, {"r3", "r7"});
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].n_raters, 16);
  EXPECT_EQ(res.records[0].excluded_raters, (std::vector<std::string>{"r3", "r7"}));
  double sum = 0.0;
  for (int r = 0; r < 18; ++r) sum += r == 3 || r == 7 ? 0.0 : 50.0 + r;
  EXPECT_NEAR(res.records[0].mos_quality, sum / 16.0, 1e-12);
}

TEST(MosTest, SampleWithoutSurvivorsIsAnException) {
  std::vector<NormalizedRating> t{nr("a", "s1", 40), nr("b", "s1", 60), nr("b", "s2", 70)};
  const auto res = compute_mos(t, {"b"}, {});
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].sample_id, "s1");
  EXPECT_EQ(res.exceptions, std::vector<std::string>{"s2"});
}

TEST(MosTest, RaterPermutationInvarianceAndLinearity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<NormalizedRating> t;
  for (int s = 0; s < 5; ++s) {
    for (int r = 0; r < 7; ++r) t.push_back(nr("r" + std::to_string(r), "s" + std::to_string(s), u(rng), u(rng)));
  }
  const auto base = compute_mos(t, {"r2"}, {});
  auto shuffled = t;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto perm = compute_mos(shuffled, {"r2"}, {});
  std::sort(perm.records.begin(), perm.records.end(),
            [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
  for (std::size_t i = 0; i < base.records.size(); ++i) {
    EXPECT_NEAR(perm.records[i].mos_quality, base.records[i].mos_quality, 1e-12);
    EXPECT_NEAR(perm.records[i].mos_consistency, base.records[i].mos_consistency, 1e-12);
  }
  // moving one surviving rating by d moves its sample's MOS by d / n
  auto bumped = t;
  bumped[0].quality += 12.0;  // r0 on s0, 6 survivors in quality
  const auto after = compute_mos(bumped, {"r2"}, {});
  EXPECT_NEAR(after.records[0].mos_quality - base.records[0].mos_quality, 2.0, 1e-12);
  EXPECT_EQ(after.records[1].mos_quality, base.records[1].mos_quality);
  // a rating from an excluded rater has no influence
  auto ignored = t;
  ignored[2].quality = 0.0;  // r2 on s0
  EXPECT_EQ(compute_mos(ignored, {"r2"}, {}).records[0].mos_quality, base.records[0].mos_quality);
}

// ---- the hand-computed table ----

TEST(PipelineTest, ReproducesHandComputedTable) {
  const auto res = run_pipeline(AggregationTable::records());
  EXPECT_EQ(res.excluded_quality, std::vector<std::string>{AggregationTable::kOutlier});
  EXPECT_EQ(res.excluded_consistency, std::vector<std::string>{AggregationTable::kOutlier});
  EXPECT_EQ(res.excluded_any, std::vector<std::string>{AggregationTable::kOutlier});
  EXPECT_TRUE(res.exceptions.empty());
  EXPECT_EQ(res.records_used, 30u);
  ASSERT_EQ(res.aggregates.size(), 6u);
  for (int s = 0; s < AggregationTable::kSamples; ++s) {
    const auto& a = res.aggregates[s];
    SCOPED_TRACE(a.sample_id);
    EXPECT_EQ(a.sample_id, AggregationTable::sample(s));
    EXPECT_NEAR(a.mos_quality, AggregationTable::kMosQuality[s], 1e-12);
    EXPECT_NEAR(a.mos_consistency, AggregationTable::kMosConsistency[s], 1e-12);
    EXPECT_EQ(a.esba, AggregationTable::kEsba[s]);
    EXPECT_EQ(a.n_raters, AggregationTable::kSurvivors);
    EXPECT_EQ(a.excluded_raters, std::vector<std::string>{AggregationTable::kOutlier});
  }
}

TEST(PipelineTest, NormalizeTableStandardisesPerRater) {
  const auto table = normalize_table(AggregationTable::records());
  for (const auto& r : table) {
    const double q = r.quality;
    EXPECT_TRUE(std::abs(q - 100.0 / 3.0) < 1e-12 || std::abs(q - 200.0 / 3.0) < 1e-12) << q;
  }
}

TEST(PipelineTest, EmptyLogAndAllExcluded) {
  EXPECT_THROW(run_pipeline({}), ContractError);
  // quality screens r1 and r2 away and keeps r3; consistency drops the
  // reversed r3. Nobody is left to vote.
  const V zigzag{2, 0, 4, 1, 5, 3};
  std::vector<RatingRecord> rs;
  for (int s = 0; s < 6; ++s) {
    const std::string id = "s" + std::to_string(s);
    rs.push_back({"r1", id, 10.0 + s, 10.0 + s, true, 0});
    rs.push_back({"r2", id, 15.0 - s, 10.0 + s, true, 0});
    rs.push_back({"r3", id, 10.0 + zigzag[s], 15.0 - s, true, 0});
  }
  PipelineConfig strict;
  strict.exclusion.threshold = 1.0;
  EXPECT_THROW(run_pipeline(rs, strict), ConfigError);
}

TEST(PipelineTest, ResubmissionReplacesEarlierRating) {
  auto records = AggregationTable::records();
  const auto before = run_pipeline(records);
  // r5 resubmits everything in line with the majority, later in the log
  for (int s = 0; s < AggregationTable::kSamples; ++s) {
    RatingRecord r = records[s * AggregationTable::kRaters];  // r1's record
    r.rater_id = "r5";
    r.timestamp = 5000.0 + s;
    records.push_back(r);
  }
  const auto after = run_pipeline(records);
  EXPECT_TRUE(after.excluded_any.empty());
  EXPECT_EQ(after.records_used, 30u);
  EXPECT_EQ(after.aggregates[1].n_raters, 5);
  EXPECT_NEAR(before.aggregates[1].mos_quality, 50.0 + 100.0 / 12.0, 1e-12);
  EXPECT_NEAR(after.aggregates[1].mos_quality, 60.0, 1e-12);  // z sum 3 over 5 raters
}

TEST(PipelineTest, ConfigJsonIsStrict) {
  PipelineConfig c;
  c.exclusion.threshold = 0.35;
  c.exclusion.min_overlap = 5;
  const nlohmann::json j = c;
  const auto back = j.get<PipelineConfig>();
  EXPECT_EQ(back.exclusion.threshold, 0.35);
  EXPECT_EQ(back.exclusion.min_overlap, 5u);
  EXPECT_THROW(nlohmann::json::parse(R"({"exclusion":{"treshold":0.1}})").get<PipelineConfig>(), ConfigError);
  EXPECT_THROW(nlohmann::json::parse(R"({"exclusion":{"threshold":2}})").get<PipelineConfig>(), ConfigError);
  EXPECT_THROW(nlohmann::json::parse(R"({"weights":1})").get<PipelineConfig>(), ConfigError);
}

// ---- ratings I/O ----

RatingRecord rec(const std::string& rater, const std::string& sample, double q, double t) {
  return {rater, sample, q, 100.0 - q, q > 50.0, t};
}

TEST(RatingsTest, ValidationNamesTheField) {
  const SliderRange range;
  EXPECT_NO_THROW(validate_rating(rec("a", "s", 1.0, 0), range));
  EXPECT_NO_THROW(validate_rating(rec("a", "s", 99.0, 0), range));
  auto expect_field = [&](RatingRecord r, const std::string& field) {
    try {
      validate_rating(r, range);
      FAIL() << "expected ValidationError for " << field;
    } catch (const ValidationError& e) {
      EXPECT_EQ(std::string(e.what()).rfind(field + ":", 0), 0u) << e.what();
    }
  };
  expect_field(rec("a", "s", 0.5, 0), "quality_raw");
  expect_field(rec("a", "s", 100.5, 0), "quality_raw");  // consistency is -0.5 too, quality reported first
  auto r = rec("a", "s", 50, 0);
  r.consistency_raw = std::nan("");
  expect_field(r, "consistency_raw");
  expect_field(rec("", "s", 50, 0), "rater_id");
  expect_field(rec("a", "", 50, 0), "sample_id");
}

TEST(RatingsTest, JsonLinesRoundTrip) {
  std::vector<RatingRecord> rs{rec("a", "x__gt", 12.25, 1.5), rec("b", "y__emage", 77, 1e9 + 0.125)};
  testing::TempDir dir;
  save_ratings(dir / "log.jsonl", rs);
  EXPECT_EQ(load_ratings(dir / "log.jsonl"), rs);
  const auto j = nlohmann::json::parse(rating_line(rs[1]));
  EXPECT_EQ(j.at("emotion_vote"), "congruent");
  EXPECT_EQ(j.at("quality_raw"), 77.0);
  // boolean votes are accepted on input
  std::istringstream in(R"({"rater_id":"a","sample_id":"s","quality_raw":3,"consistency_raw":4,"emotion_vote":false})");
  const auto parsed = read_ratings(in);
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_FALSE(parsed[0].congruent);
  EXPECT_EQ(parsed[0].timestamp, 0.0);
}

TEST(RatingsTest, TornTailIsSkippedButInteriorCorruptionIsNot) {
  const std::string good = rating_line(rec("a", "s1", 20, 1)) + "\n" + rating_line(rec("a", "s2", 30, 2)) + "\n";
  std::istringstream torn(good + R"({"rater_id":"a","sample_i)");
  EXPECT_EQ(read_ratings(torn).size(), 2u);
  std::istringstream blank(good + "\n\n");
  EXPECT_EQ(read_ratings(blank).size(), 2u);
  std::istringstream broken(rating_line(rec("a", "s1", 20, 1)) + "\n{oops}\n" + rating_line(rec("a", "s2", 30, 2)) +
                            "\n");
  try {
    read_ratings(broken, "log");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("log:2"), std::string::npos) << e.what();
  }
  std::istringstream bad_vote(R"({"rater_id":"a","sample_id":"s","quality_raw":3,"consistency_raw":4,"emotion_vote":"maybe"})"
                              "\n");
  EXPECT_THROW(read_ratings(bad_vote), FormatError);
  std::istringstream missing(R"({"rater_id":"a","quality_raw":3,"consistency_raw":4,"emotion_vote":true})"
                             "\n");
  EXPECT_THROW(read_ratings(missing), FormatError);
  EXPECT_THROW(load_ratings("/nonexistent/ratings.jsonl"), IoError);
}

TEST(RatingsTest, LatestPerPair) {
  const std::vector<RatingRecord> rs{rec("a", "s", 10, 5), rec("b", "s", 20, 1), rec("a", "s", 30, 9),
                                     rec("a", "s", 40, 7), rec("b", "s", 50, 1)};
  const auto latest = latest_per_pair(rs);
  ASSERT_EQ(latest.size(), 2u);
  EXPECT_EQ(latest[0].quality_raw, 30.0);  // a: t = 9 wins over the later t = 7
  EXPECT_EQ(latest[1].quality_raw, 50.0);  // b: equal stamps, later line wins
}

TEST(AggregatesCsvTest, RoundTripAndErrors) {
  std::vector<AggregateRecord> as(2);
  as[0] = {"a__gt", 66.66666666666667, 12.5, true, 16, {}};
  as[1] = {"b__lom", 0.0, 100.0, false, 1, {}};
  const auto text = aggregates_csv(as);
  EXPECT_EQ(text.substr(0, text.find('\n')), "sample_id,mos_quality,mos_consistency,esba,n_raters");
  std::istringstream in(text);
  const auto back = read_aggregates_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_NEAR(back[0].mos_quality, as[0].mos_quality, 1e-8);
  EXPECT_EQ(back[0].esba, true);
  EXPECT_EQ(back[0].n_raters, 16);
  EXPECT_EQ(back[1].sample_id, "b__lom");
  EXPECT_EQ(back[1].mos_consistency, 100.0);
  std::istringstream wrong_header("id,q,c,e,n\n");
  EXPECT_THROW(read_aggregates_csv(wrong_header), FormatError);
  std::istringstream short_row("sample_id,mos_quality,mos_consistency,esba,n_raters\na,1,2,1\n");
  EXPECT_THROW(read_aggregates_csv(short_row), FormatError);
  std::istringstream bad_esba("sample_id,mos_quality,mos_consistency,esba,n_raters\na,1,2,yes,3\n");
  EXPECT_THROW(read_aggregates_csv(bad_esba), FormatError);
  std::istringstream empty("");
  EXPECT_THROW(read_aggregates_csv(empty), FormatError);
}

// ---- analytics ----

DatasetManifest manifest_for(const std::vector<std::pair<SourceMethod, EmotionLabel>>& rows) {
  DatasetManifest m;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SampleRecord s;
    s.audio.id = "aud" + std::to_string(i);
    s.audio.emotion = rows[i].second;
    s.method = rows[i].first;
    s.sample_id = make_sample_id(s.audio.id, s.method);
    m.samples.push_back(s);
  }
  return m;
}

AggregateRecord agg(const SampleRecord& s, double q, double c, bool esba) {
  return {s.sample_id, q, c, esba, 1, {}};
}

TEST(AnalyticsTest, CongruenceFraction) {
  const auto m = manifest_for({{SourceMethod::kEmage, EmotionLabel::kHappiness},
                               {SourceMethod::kEmage, EmotionLabel::kHappiness},
                               {SourceMethod::kEmage, EmotionLabel::kHappiness},
                               {SourceMethod::kEmage, EmotionLabel::kHappiness},
                               {SourceMethod::kLoM, EmotionLabel::kFear},
                               {SourceMethod::kLoM, EmotionLabel::kAnger}});
  const std::vector<AggregateRecord> as{agg(m.samples[0], 1, 1, true),  agg(m.samples[1], 1, 1, true),
                                        agg(m.samples[2], 1, 1, false), agg(m.samples[3], 1, 1, true),
                                        agg(m.samples[4], 1, 1, true),  agg(m.samples[5], 1, 1, true)};
  const auto t = emotion_congruence_accuracy(as, m);
  const MethodEmotion happy{SourceMethod::kEmage, EmotionLabel::kHappiness};
  EXPECT_EQ(t.accuracy.at(happy), 0.75);
  EXPECT_EQ(t.support.at(happy), 4u);
  EXPECT_EQ(t.congruent.at(happy), 3u);
  EXPECT_EQ(t.accuracy.at({SourceMethod::kLoM, EmotionLabel::kFear}), 1.0);
  EXPECT_EQ(t.accuracy.at({SourceMethod::kLoM, EmotionLabel::kAnger}), 1.0);
  EXPECT_EQ(t.accuracy.size(), 3u);
  for (const auto& [key, acc] : t.accuracy) {
    EXPECT_EQ(acc, static_cast<double>(t.congruent.at(key)) / static_cast<double>(t.support.at(key)));
  }
  const auto csv = congruence_csv(t);
  EXPECT_NE(csv.find("emage,happiness,4,3,0.7500"), std::string::npos) << csv;
  const auto md = congruence_markdown(t);
  EXPECT_NE(md.find("| emage |"), std::string::npos);
  EXPECT_NE(md.find("0.75"), std::string::npos);

  auto stray = as;
  stray.push_back({"ghost__gt", 1, 1, true, 1, {}});
  try {
    emotion_congruence_accuracy(stray, m);
    FAIL() << "expected NotFoundError";
  } catch (const NotFoundError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost__gt"), std::string::npos);
  }
}

TEST(AnalyticsTest, ScoreRanges) {
  const auto m = manifest_for({{SourceMethod::kSynTalker, EmotionLabel::kNeutral},
                               {SourceMethod::kSynTalker, EmotionLabel::kSadness},
                               {SourceMethod::kSynTalker, EmotionLabel::kNeutral},
                               {SourceMethod::kGroundTruth, EmotionLabel::kNeutral}});
  const std::vector<AggregateRecord> as{agg(m.samples[0], 50, 10, true), agg(m.samples[1], 30, 20, true),
                                        agg(m.samples[2], 70, 90, false), agg(m.samples[3], 61, 62, true)};
  const auto report = score_range_report(as, m);
  ASSERT_EQ(report.size(), 2u);
  EXPECT_EQ(report[0].method, SourceMethod::kGroundTruth);  // enum order
  EXPECT_EQ(report[0].quality.min, 61.0);
  EXPECT_EQ(report[0].quality.mean, 61.0);
  EXPECT_EQ(report[0].quality.max, 61.0);
  EXPECT_EQ(report[1].count, 3u);
  EXPECT_EQ(report[1].quality.min, 30.0);
  EXPECT_EQ(report[1].quality.mean, 50.0);
  EXPECT_EQ(report[1].quality.max, 70.0);
  EXPECT_EQ(report[1].consistency.mean, 40.0);
  EXPECT_NE(score_range_csv(report).find("syntalker,3,30.0000,50.0000,70.0000"), std::string::npos);
  EXPECT_NE(score_range_markdown(report).find("| gt | 1 | 61.00"), std::string::npos);
  EXPECT_THROW(score_range_report({}, m), ContractError);
}

}  // namespace
}  // namespace gestureqa::subjective
