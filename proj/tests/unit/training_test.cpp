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
#include <map>
#include <memory>
#include <set>

#include <gtest/gtest.h>

#include "gestureqa/error.hpp"
#include "gestureqa/subjective/aggregate.hpp"
#include "gestureqa/synth/synth.hpp"
#include "gestureqa/training/training.hpp"
#include "test_util.hpp"

namespace gestureqa::training {
namespace {

// ---- folds ----

DatasetManifest planned(std::size_t n_audio, std::uint64_t seed = 7) {
  synth::SynthConfig c;
  c.n_audio = n_audio;
  c.seed = seed;
  c.media = synth::MediaMode::kNone;
  return synth::plan_dataset(c).manifest;
}

void expect_partition(const DatasetManifest& m, const std::vector<FoldSplit>& folds, std::size_t k) {
  ASSERT_EQ(folds.size(), k);
  std::map<std::string, std::string> audio_of;
  for (const auto& s : m.samples) audio_of[s.sample_id] = s.audio.id;
  std::multiset<std::string> tested;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    EXPECT_EQ(folds[f].fold_index, f);
    std::set<std::string> train(folds[f].train_sample_ids.begin(), folds[f].train_sample_ids.end());
    std::set<std::string> train_audio, test_audio;
    for (const auto& id : train) train_audio.insert(audio_of.at(id));
    for (const auto& id : folds[f].test_sample_ids) {
      EXPECT_FALSE(train.contains(id));
      test_audio.insert(audio_of.at(id));
      tested.insert(id);
    }
    for (const auto& a : test_audio) ASSERT_FALSE(train_audio.contains(a)) << "audio " << a << " leaks";
    EXPECT_EQ(train.size() + folds[f].test_sample_ids.size(), m.samples.size());
  }
  EXPECT_EQ(tested.size(), m.samples.size());
  for (const auto& s : m.samples) EXPECT_EQ(tested.count(s.sample_id), 1u);
}

TEST(FoldTest, PartitionPropertiesForAllSeedsAndK) {
  const auto m = planned(16);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::size_t k = 2; k <= 16; ++k) {
      SCOPED_TRACE("seed " + std::to_string(seed) + " k " + std::to_string(k));
      const auto folds = make_folds(m, k, seed);
      expect_partition(m, folds, k);
      // near-equal groups: audio counts differ by at most one
      std::size_t lo = SIZE_MAX, hi = 0;
      for (const auto& f : folds) {
        lo = std::min(lo, f.test_sample_ids.size() / 7);
        hi = std::max(hi, f.test_sample_ids.size() / 7);
      }
      EXPECT_LE(hi - lo, 1u);
    }
  }
}

TEST(FoldTest, FullScaleFoldsTestTwoHundredEightySamples) {
  const auto m = planned(200);
  ASSERT_EQ(m.samples.size(), 1400u);
  const auto folds = make_folds(m, 5, 0);
  expect_partition(m, folds, 5);
  for (const auto& f : folds) {
    EXPECT_EQ(f.test_sample_ids.size(), 280u);
    EXPECT_EQ(f.train_sample_ids.size(), 1120u);
  }
}

TEST(FoldTest, DeskScaleFoldsTestFiftySixSamples) {
  const auto m = planned(40);
  const auto folds = make_folds(m, 5, 3);
  std::size_t total = 0;
  for (const auto& f : folds) {
    EXPECT_EQ(f.test_sample_ids.size(), 56u);
    total += f.test_sample_ids.size();
  }
  EXPECT_EQ(total, 280u);
}

TEST(FoldTest, LeaveOneAudioOut) {
  const auto m = planned(8);
  const auto folds = make_folds(m, 8, 5);
  std::set<std::string> seen;
  for (const auto& f : folds) {
    ASSERT_EQ(f.test_sample_ids.size(), 7u);
    const auto* s = m.find(f.test_sample_ids[0]);
    ASSERT_NE(s, nullptr);
    EXPECT_TRUE(seen.insert(s->audio.id).second);
    for (const auto& id : f.test_sample_ids) EXPECT_EQ(m.find(id)->audio.id, s->audio.id);
  }
}

TEST(FoldTest, SeedDeterminism) {
  const auto m = planned(16);
  const auto a = make_folds(m, 5, 42), b = make_folds(m, 5, 42), c = make_folds(m, 5, 43);
  bool differs = false;
  for (std::size_t f = 0; f < 5; ++f) {
    EXPECT_EQ(a[f].test_sample_ids, b[f].test_sample_ids);
    EXPECT_EQ(a[f].train_sample_ids, b[f].train_sample_ids);
    differs |= a[f].test_sample_ids != c[f].test_sample_ids;
  }
  EXPECT_TRUE(differs);
}

TEST(FoldTest, InvalidK) {
  const auto m = planned(8);
  EXPECT_THROW(make_folds(m, 1, 0), ConfigError);
  EXPECT_THROW(make_folds(m, 9, 0), ConfigError);
  EXPECT_NO_THROW(make_folds(m, 8, 0));
}

// ---- schedule ----

TEST(ScheduleTest, WorkedExamples) {
  TrainConfig c;  // lr_peak 1e-4, warmup 0.1
  const std::size_t total = 1000;
  EXPECT_EQ(lr_schedule(0, total, c), 0.0);
  EXPECT_NEAR(lr_schedule(100, total, c), 1e-4, 1e-18);
  EXPECT_NEAR(lr_schedule(550, total, c), 5e-5, 1e-18);
  EXPECT_EQ(lr_schedule(total, total, c), 0.0);
  EXPECT_NEAR(lr_schedule(50, total, c), 5e-5, 1e-18);
  EXPECT_EQ(lr_schedule(0, 0, c), 0.0);
}

TEST(ScheduleTest, ContinuousPiecewiseLinearWithPeakMax) {
  for (double warm : {0.05, 0.1, 0.3, 0.5}) {
    TrainConfig c;
    c.warmup_fraction = warm;
    for (std::size_t total : {20u, 240u, 451u}) {
      double best = 0.0;
      const double kink = warm * static_cast<double>(total);
      for (std::size_t s = 0; s <= total; ++s) {
        const double lr = lr_schedule(s, total, c);
        best = std::max(best, lr);
        EXPECT_GE(lr, 0.0);
        EXPECT_LE(lr, c.lr_peak * (1 + 1e-12));
        if (s > 0) EXPECT_LE(std::abs(lr - lr_schedule(s - 1, total, c)), c.lr_peak / std::min(kink, total - kink) + 1e-18);
        // second difference vanishes except at the kink
        if (s > 0 && s < total && std::abs(static_cast<double>(s) - kink) >= 1.0) {
          const double d2 = lr_schedule(s + 1, total, c) - 2 * lr + lr_schedule(s - 1, total, c);
          EXPECT_NEAR(d2, 0.0, 1e-18);
        }
      }
      EXPECT_GE(best, c.lr_peak * (1.0 - 1.0 / std::min(kink, total - kink)));
      if (std::floor(kink) == kink) EXPECT_NEAR(best, c.lr_peak, 1e-18);
    }
  }
}

TEST(ScheduleTest, BatchesPerEpoch) {
  EXPECT_EQ(batches_per_epoch(224, 10), 23u);  // tail of 4 kept
  EXPECT_EQ(batches_per_epoch(20, 10), 2u);
  EXPECT_EQ(batches_per_epoch(21, 10), 2u);  // tail of 1 dropped
  EXPECT_EQ(batches_per_epoch(22, 10), 3u);
  EXPECT_EQ(batches_per_epoch(1, 10), 0u);
}

TEST(TrainConfigTest, JsonAndValidation) {
  TrainConfig c;
  c.lr_peak = 3e-4;
  c.epochs = 4;
  c.seed = 17;
  c.loss = model::LossKind::kMse;
  const nlohmann::json j = c;
  EXPECT_EQ(nlohmann::json(j.get<TrainConfig>()), j);
  auto parse = [](const char* text) { return nlohmann::json::parse(text).get<TrainConfig>(); };
  EXPECT_THROW(parse(R"({"learning_rate": 1})"), ConfigError);
  EXPECT_NO_THROW(TrainConfig{}.validate());
  auto bad = [](auto mutate) {
    TrainConfig t;
    mutate(t);
    EXPECT_THROW(t.validate(), ConfigError);
  };
  bad([](TrainConfig& t) { t.batch_size = 1; });
  bad([](TrainConfig& t) { t.warmup_fraction = 0.0; });
  bad([](TrainConfig& t) { t.warmup_fraction = 1.0; });
  bad([](TrainConfig& t) { t.epochs = 0; });
  bad([](TrainConfig& t) { t.k_folds = 1; });
  bad([](TrainConfig& t) { t.lr_peak = -1; });
}

// ---- training on a tiny synthetic dataset ----

class TrainingFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<testing::TempDir>();
    synth::SynthConfig s;
    s.n_audio = 16;
    s.methods = {SourceMethod::kGroundTruth, SourceMethod::kMotionCraft};
    s.duration = 1.0;
    s.image_size = 32;
    s.motion_dim = 66;
    s.seed = 3;
    const auto ds = synth::generate_dataset(s, dir_->path());
    manifest_ = new DatasetManifest(ds.manifest);
    aggregates_ = new std::vector<subjective::AggregateRecord>(
        subjective::run_pipeline(synth::generate_ratings(ds, s)).aggregates);
    model_ = new model::ModelConfig();
    model_->encoders.hidden_dim = 16;
    model_->encoders.heads = 2;
    model_->encoders.image_size = 32;
    model_->encoders.vision_frames = 2;
    model_->encoders.spectrogram.clip_seconds = 1.0;
    model_->encoders.spectrogram.mel_bins = 32;
    model_->encoders.motion_dim = 66;
    model_->encoders.vision_layers = 1;
    model_->encoders.audio_layers = 1;
    model_->encoders.motion_layers = 1;
    model_->seed = 5;
    cache_ = new InputCache(*manifest_, dir_->path(), model_->encoders);
  }

  static void TearDownTestSuite() {
    delete cache_;
    delete model_;
    delete aggregates_;
    delete manifest_;
    dir_.reset();
  }

  static TrainConfig quick(int epochs = 3) {
    TrainConfig c;
    c.lr_peak = 1e-3;
    c.epochs = epochs;
    c.batch_size = 8;
    c.k_folds = 2;
    c.seed = 11;
    return c;
  }

  static inline std::unique_ptr<testing::TempDir> dir_;
  static inline DatasetManifest* manifest_ = nullptr;
  static inline std::vector<subjective::AggregateRecord>* aggregates_ = nullptr;
  static inline model::ModelConfig* model_ = nullptr;
  static inline InputCache* cache_ = nullptr;
};

TEST_F(TrainingFixture, CacheHoldsEverySample) {
  EXPECT_EQ(cache_->size(), 32u);
  const auto& in = cache_->at(manifest_->samples[0].sample_id);
  EXPECT_EQ(in.frames.shape(), (nn::Shape{2, 32, 32, 3}));
  EXPECT_EQ(in.spectrograms.dim(0), 1);
  EXPECT_EQ(in.motion.dim(1), 66);
  EXPECT_THROW(cache_->at("missing__gt"), NotFoundError);
}

TEST_F(TrainingFixture, LossDecreasesAndHistoryHasOneEntryPerEpoch) {
  const auto folds = make_folds(*manifest_, 2, 0);
  auto config = quick(8);
  const auto out = train_fold(folds[0], config, *model_, *cache_, *aggregates_);
  ASSERT_EQ(out.history.epochs.size(), 8u);
  EXPECT_LT(out.history.epochs.back().train_loss, out.history.epochs.front().train_loss);
  EXPECT_EQ(out.history.steps, 8u * batches_per_epoch(16, 8));
  EXPECT_EQ(out.history.epochs.back().lr_last, 0.0);
  EXPECT_EQ(out.history.metrics.n, 16u);
  EXPECT_EQ(out.history.test_predictions.size(), 16u);
  for (std::size_t e = 0; e < 8; ++e) EXPECT_EQ(out.history.epochs[e].epoch, static_cast<int>(e + 1));
}

TEST_F(TrainingFixture, ZeroLearningRateLeavesParametersUnchanged) {
  const auto folds = make_folds(*manifest_, 2, 0);
  auto config = quick(1);
  config.lr_peak = 0.0;
  const auto out = train_fold(folds[1], config, *model_, *cache_, *aggregates_);
  const model::GestureScorer fresh(*model_);
  ASSERT_EQ(out.scorer.parameters().size(), fresh.parameters().size());
  for (std::size_t i = 0; i < fresh.parameters().size(); ++i) {
    const auto a = out.scorer.parameters()[i].value.values();
    const auto b = fresh.parameters()[i].value.values();
    ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end())) << fresh.parameters()[i].name;
  }
}

TEST_F(TrainingFixture, SameSeedGivesIdenticalHistory) {
  const auto folds = make_folds(*manifest_, 2, 0);
  const auto a = train_fold(folds[0], quick(2), *model_, *cache_, *aggregates_);
  const auto b = train_fold(folds[0], quick(2), *model_, *cache_, *aggregates_);
  for (std::size_t e = 0; e < 2; ++e) {
    EXPECT_NEAR(a.history.epochs[e].train_loss, b.history.epochs[e].train_loss, 1e-6);
  }
  EXPECT_EQ(nlohmann::json(a.history).dump(), nlohmann::json(b.history).dump());
}

TEST_F(TrainingFixture, NonFiniteLossNamesStepAndBatch) {
  auto broken = *aggregates_;
  const auto folds = make_folds(*manifest_, 2, 0);
  const std::string victim = folds[0].train_sample_ids[3];
  for (auto& a : broken) {
    if (a.sample_id == victim) a.mos_quality = std::nan("");
  }
  try {
    train_fold(folds[0], quick(1), *model_, *cache_, broken);
    FAIL() << "expected NonFiniteLossError";
  } catch (const NonFiniteLossError& e) {
    EXPECT_EQ(e.step(), 0u);
    EXPECT_NE(std::find(e.batch().begin(), e.batch().end(), victim), e.batch().end());
    EXPECT_NE(std::string(e.what()).find(victim), std::string::npos);
  }
}

TEST_F(TrainingFixture, MissingAggregateIsReportedUpFront) {
  auto partial = *aggregates_;
  partial.pop_back();
  const auto folds = make_folds(*manifest_, 2, 0);
  EXPECT_THROW(train_fold(folds[0], quick(1), *model_, *cache_, partial), NotFoundError);
}

TEST_F(TrainingFixture, CrossValidationWritesRunLayout) {
  testing::TempDir run;
  const auto config = quick(1);
  const auto res = cross_validate(config, *model_, *manifest_, *cache_, *aggregates_, run.path());
  ASSERT_EQ(res.folds.size(), 2u);
  double mean_q = 0.0, mean_c = 0.0;
  for (const auto& f : res.folds) {
    mean_q += f.metrics.quality.srcc / 2.0;
    mean_c += f.metrics.consistency.srcc / 2.0;
  }
  EXPECT_NEAR(res.mean.quality.srcc, mean_q, 1e-15);
  EXPECT_NEAR(res.mean.consistency.srcc, mean_c, 1e-15);
  EXPECT_NEAR(res.std.quality.srcc, std::abs(res.folds[0].metrics.quality.srcc - mean_q), 1e-12);
  EXPECT_EQ(res.mean.n, 32u);
  for (int f = 0; f < 2; ++f) {
    const auto fold = run.path() / ("fold" + std::to_string(f));
    for (const char* name : {"history.json", "metrics.json", "predictions.csv", "timing.json"}) {
      EXPECT_TRUE(std::filesystem::exists(fold / name)) << fold / name;
    }
    EXPECT_TRUE(std::filesystem::is_directory(fold / "checkpoint"));
    const auto history = nlohmann::json::parse(testing::slurp(fold / "history.json"));
    EXPECT_EQ(history.at("epochs").size(), 1u);
    // the checkpoint reproduces the fold's predictions
    const auto scorer = model::load_scorer(fold / "checkpoint");
    const auto again = predict_samples(scorer, *cache_, {res.folds[f].test_predictions[0].sample_id});
    EXPECT_NEAR(again[0].quality, res.folds[f].test_predictions[0].quality, 1e-9);
  }
  const auto summary = nlohmann::json::parse(testing::slurp(run / "summary.json"));
  EXPECT_EQ(summary.at("folds").size(), 2u);
  EXPECT_NEAR(summary.at("mean").at("quality").at("srcc").get<double>(), res.mean.quality.srcc, 1e-15);
}

TEST(SummarizeTest, MeanAndPopulationStd) {
  metrics::MetricReport a, b, c;
  a.quality.srcc = 0.7;
  b.quality.srcc = 0.8;
  c.quality.srcc = 0.9;
  a.n = b.n = c.n = 56;
  const auto [mean, sd] = summarize({a, b, c});
  EXPECT_NEAR(mean.quality.srcc, 0.8, 1e-15);
  EXPECT_NEAR(sd.quality.srcc, std::sqrt(0.02 / 3.0), 1e-15);
  EXPECT_EQ(mean.n, 168u);
}

}  // namespace
}  // namespace gestureqa::training
