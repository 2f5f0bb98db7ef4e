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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "gestureqa/error.hpp"
#include "gestureqa/model/checkpoint.hpp"
#include "gestureqa/model/loss.hpp"
#include "gestureqa/model/scorer.hpp"
#include "test_util.hpp"

namespace gestureqa::model {
namespace {

using nn::Shape;
using nn::Tensor;

// Straight transcription of the loss on normalised scores.
double oracle_loss(const std::vector<double>& p, const std::vector<double>& t) {
  auto norm = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean) / n;
    std::vector<double> out;
    for (double x : v) out.push_back((x - mean) / std::sqrt(var + 1e-16));
    return out;
  };
  const auto ph = norm(p), th = norm(t);
  const double n = static_cast<double>(p.size());
  double r = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) r += ph[i] * th[i] / n;
  double mse1 = 0.0, mse2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mse1 += (ph[i] - th[i]) * (ph[i] - th[i]) / n;
    mse2 += (r * ph[i] - th[i]) * (r * ph[i] - th[i]) / n;
  }
  return (mse1 + mse2) / 8.0;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// ---- normalisation and loss ----

TEST(NormalizeTest, WorkedExamples) {
  const std::vector<double> v{1, 2, 3};
  const auto n = normalize_scores(v);
  EXPECT_NEAR(n[0], -std::sqrt(1.5), 1e-7);
  EXPECT_NEAR(n[1], 0.0, 1e-15);
  EXPECT_NEAR(n[2], std::sqrt(1.5), 1e-7);
  for (double x : normalize_scores(std::vector<double>{4, 4, 4})) EXPECT_EQ(x, 0.0);
  const std::vector<double> unit{-1, 1, -1, 1};
  const auto u = normalize_scores(unit);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(u[i], unit[i], 1e-7);
  EXPECT_THROW(normalize_scores(std::vector<double>{1.0}), ContractError);
}

TEST(PlccLossTest, WorkedExamples) {
  EXPECT_NEAR(plcc_loss(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 0.0, 1e-9);
  EXPECT_NEAR(plcc_loss(std::vector<double>{0, 1}, std::vector<double>{1, 0}), 0.5, 1e-9);
  EXPECT_NEAR(plcc_loss(std::vector<double>{1, 0, 1, 0}, std::vector<double>{1, 1, 0, 0}), 0.375, 1e-9);
}

TEST(PlccLossTest, MatchesOracleOnRandomBatches) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 15;
    const auto p = random_vector(n, rng, 3.0), t = random_vector(n, rng, 20.0);
    EXPECT_NEAR(plcc_loss(p, t), oracle_loss(p, t), 1e-12);
    EXPECT_NEAR(plcc_loss_with_grad(p, t).loss, oracle_loss(p, t), 1e-12);
  }
}

TEST(PlccLossTest, NonNegativeAndZeroOnlyForMatchingShapes) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = random_vector(10, rng), t = random_vector(10, rng);
    EXPECT_GE(plcc_loss(p, t), 0.0);
    EXPECT_GT(plcc_loss(p, t), 1e-9);
    std::vector<double> affine(p);
    for (auto& x : affine) x = 2.5 * x - 7.0;
    EXPECT_NEAR(plcc_loss(affine, p), 0.0, 1e-9);
  }
}

TEST(PlccLossTest, AffineInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a_dist(0.01, 100.0), b_dist(-100.0, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_vector(10, rng), t = random_vector(10, rng);
    const double a = a_dist(rng), b = b_dist(rng);
    std::vector<double> q(p);
    for (auto& x : q) x = a * x + b;
    EXPECT_NEAR(plcc_loss(q, t), plcc_loss(p, t), 1e-7);
  }
}

TEST(PlccLossTest, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(4);
  const double h = 1e-5;
  for (int batch = 0; batch < 100; ++batch) {
    const auto p = random_vector(10, rng), t = random_vector(10, rng);
    const auto lg = plcc_loss_with_grad(p, t);
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto plus = p, minus = p;
      plus[i] += h;
      minus[i] -= h;
      const double numeric = (plcc_loss(plus, t) - plcc_loss(minus, t)) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(lg.grad[i]), 1e-6});
      EXPECT_LE(std::abs(lg.grad[i] - numeric) / scale, 1e-4) << "batch " << batch << " index " << i;
    }
  }
}

TEST(PlccLossTest, RejectsDegenerateBatches) {
  EXPECT_THROW(plcc_loss(std::vector<double>{1.0}, std::vector<double>{2.0}), ContractError);
  EXPECT_THROW(plcc_loss(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), ContractError);
}

TEST(TotalLossTest, MeanOfColumns) {
  const Tensor same({3, 2}, {1, 5, 2, 6, 3, 4});
  EXPECT_NEAR(total_loss(same, same), 0.0, 1e-9);
  const Tensor pred({2, 2}, {7, 0, 7, 1});
  const Tensor target({2, 2}, {7, 1, 7, 0});
  // column 0 is constant on both sides (loss 0), column 1 is the 0.5 case
  EXPECT_NEAR(total_loss(pred, target), 0.25, 1e-9);

  std::mt19937_64 rng(5);
  const auto a = random_vector(16, rng), b = random_vector(16, rng);
  Tensor p({8, 2}, a), t({8, 2}, b), ps({8, 2}), ts({8, 2});
  for (int i = 0; i < 8; ++i) {
    ps.at({i, 0}) = p.at({i, 1});
    ps.at({i, 1}) = p.at({i, 0});
    ts.at({i, 0}) = t.at({i, 1});
    ts.at({i, 1}) = t.at({i, 0});
  }
  EXPECT_NEAR(total_loss(ps, ts), total_loss(p, t), 1e-15);
  EXPECT_THROW(total_loss(Tensor({3, 2}), Tensor({2, 2})), ContractError);
}

TEST(TotalLossTest, GradientLayoutMatchesColumns) {
  std::mt19937_64 rng(6);
  const Tensor p({6, 2}, random_vector(12, rng)), t({6, 2}, random_vector(12, rng));
  const auto lg = total_loss_with_grad(p, t);
  EXPECT_NEAR(lg.loss, total_loss(p, t), 1e-15);
  std::vector<double> col(6), tcol(6);
  for (int i = 0; i < 6; ++i) {
    col[i] = p.at({i, 1});
    tcol[i] = t.at({i, 1});
  }
  const auto single = plcc_loss_with_grad(col, tcol);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(lg.grad[2 * i + 1], single.grad[i] / 2.0, 1e-15);
}

TEST(TotalLossTest, MseVariant) {
  const Tensor p({2, 2}, {1, 2, 3, 4}), t({2, 2}, {1, 2, 3, 6});
  EXPECT_NEAR(total_loss(p, t, LossKind::kMse), (0.0 + 2.0) / 2.0, 1e-12);
}

// ---- scorer ----

ModelConfig tiny_model(std::uint64_t seed = 1) {
  ModelConfig c;
  c.encoders.hidden_dim = 16;
  c.encoders.heads = 2;
  c.encoders.image_size = 32;
  c.encoders.vision_frames = 2;
  c.encoders.spectrogram.clip_seconds = 1.0;
  c.encoders.spectrogram.mel_bins = 32;
  c.encoders.motion_dim = 12;
  c.seed = seed;
  return c;
}

SampleInputs random_inputs(const ModelConfig& c, std::uint64_t seed) {
  nn::Rng rng(seed);
  SampleInputs in;
  in.frames = nn::normal_tensor({c.encoders.vision_frames, 32, 32, 3}, 0.3, rng);
  in.spectrograms = nn::normal_tensor({1, c.encoders.spectrogram.frames_per_segment(), 32}, 3.0, rng);
  in.motion = nn::normal_tensor({9, 12}, 0.5, rng);
  return in;
}

TEST(ScorerTest, FuseAndScoreShapeAndPurity) {
  GestureScorer scorer(tiny_model());
  nn::Rng rng(7);
  const Tensor fv = nn::normal_tensor({4, 3, 16}, 1.0, rng);
  const Tensor fa = nn::normal_tensor({4, 2, 16}, 1.0, rng);
  Tensor fm = nn::normal_tensor({4, 1, 16}, 1.0, rng);
  const Tensor out = scorer.fuse_and_score({fv, fa, fm});
  EXPECT_EQ(out.shape(), (Shape{4, 2}));
  EXPECT_TRUE(out.all_finite());

  // rows 0 and 1 identical in every modality
  Tensor fv2 = fv, fa2 = fa, fm2 = fm;
  std::copy_n(fv.data(), 3 * 16, fv2.data() + 3 * 16);
  std::copy_n(fa.data(), 2 * 16, fa2.data() + 2 * 16);
  std::copy_n(fm.data(), 16, fm2.data() + 16);
  const Tensor dup = scorer.fuse_and_score({fv2, fa2, fm2});
  EXPECT_EQ(dup.at({0, 0}), dup.at({1, 0}));
  EXPECT_EQ(dup.at({0, 1}), dup.at({1, 1}));

  EXPECT_THROW(scorer.fuse_and_score({fv, fa, nn::normal_tensor({3, 1, 16}, 1.0, rng)}), ContractError);
}

TEST(ScorerTest, PoolsBeforeConcatenation) {
  GestureScorer scorer(tiny_model());
  nn::Rng rng(8);
  const Tensor fv = nn::normal_tensor({1, 4, 16}, 1.0, rng);
  const Tensor fa = nn::normal_tensor({1, 2, 16}, 1.0, rng);
  const Tensor fm = nn::normal_tensor({1, 1, 16}, 1.0, rng);
  const Tensor pooled = scorer.fuse_and_score({features::pool_temporal(fv), features::pool_temporal(fa), fm});
  const Tensor full = scorer.fuse_and_score({fv, fa, fm});
  EXPECT_NEAR(pooled[0], full[0], 1e-12);
  EXPECT_NEAR(pooled[1], full[1], 1e-12);
}

TEST(ScorerTest, ZeroWeightsGiveOutputBias) {
  GestureScorer scorer(tiny_model());
  for (auto& p : scorer.parameters()) {
    if (p.name.rfind("fusion.", 0) == 0) p.value.fill(0.0);
  }
  auto* bias = scorer.parameters().find("fusion.out.bias");
  ASSERT_NE(bias, nullptr);
  bias->value[0] = 0.25;
  bias->value[1] = -3.0;
  nn::Rng rng(9);
  const Tensor out = scorer.fuse_and_score(
      {nn::normal_tensor({3, 2, 16}, 1.0, rng), nn::normal_tensor({3, 1, 16}, 1.0, rng),
       nn::normal_tensor({3, 1, 16}, 1.0, rng)});
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(out.at({i, 0}), 0.25);
    EXPECT_DOUBLE_EQ(out.at({i, 1}), -3.0);
  }
}

TEST(ScorerTest, HeadShapeFollowsConfig) {
  auto c = tiny_model();
  GestureScorer one(c);
  ASSERT_EQ(one.head().layers().size(), 2u);
  EXPECT_EQ(one.head().layers()[0].in_features(), 48);
  EXPECT_EQ(one.head().layers()[0].out_features(), 16);
  EXPECT_EQ(one.head().layers()[1].out_features(), 2);
  c.fusion.hidden_layers = 0;
  EXPECT_EQ(GestureScorer(c).head().layers().size(), 1u);
  c.fusion.hidden_layers = 2;
  c.fusion.hidden_dim = 7;
  GestureScorer deep(c);
  EXPECT_EQ(deep.head().layers().size(), 3u);
  EXPECT_EQ(deep.head().layers()[1].in_features(), 7);
}

TEST(ScorerTest, ForwardMatchesBatchedPath) {
  const auto c = tiny_model();
  GestureScorer scorer(c);
  const auto in = random_inputs(c, 10);
  const auto raw = scorer.predict_raw(in);
  const std::vector<SampleInputs> batch{in};
  const Tensor out = scorer.fuse_and_score(scorer.extract_features(batch));
  EXPECT_NEAR(out[0], raw[0], 1e-12);
  EXPECT_NEAR(out[1], raw[1], 1e-12);
}

TEST(ScorerTest, SeedDeterminesInitialisation) {
  const auto in = random_inputs(tiny_model(), 11);
  EXPECT_EQ(GestureScorer(tiny_model(3)).predict_raw(in), GestureScorer(tiny_model(3)).predict_raw(in));
  EXPECT_NE(GestureScorer(tiny_model(3)).predict_raw(in), GestureScorer(tiny_model(4)).predict_raw(in));
}

TEST(CalibrationTest, MatchesTargetMoments) {
  std::vector<std::array<double, 2>> raw, target;
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double z = n(rng);
    raw.push_back({0.1 * z + 0.3, -0.2 * z});
    target.push_back({60 + 15 * z + n(rng), 40 + 5 * n(rng)});
  }
  const auto cal = ScoreCalibration::fit(raw, target);
  std::array<double, 2> mean{}, tmean{};
  for (int i = 0; i < 50; ++i) {
    const auto out = cal.apply(raw[i]);
    for (int d = 0; d < 2; ++d) {
      mean[d] += out[d] / 50;
      tmean[d] += target[i][d] / 50;
    }
  }
  EXPECT_NEAR(mean[0], tmean[0], 1e-9);
  EXPECT_NEAR(mean[1], tmean[1], 1e-9);
  // a positive affine map keeps the ordering
  EXPECT_LT(cal.apply({0.0, 0.0})[0], cal.apply({1.0, 0.0})[0]);
  EXPECT_THROW(ScoreCalibration::fit({}, {}), ContractError);
}

TEST(ModelConfigTest, JsonRoundTripAndStrictness) {
  auto c = tiny_model(42);
  c.fusion.hidden_dim = 9;
  c.encoders.window = {1, 2, 3};
  c.encoders.spectrogram.window = features::SpectrogramWindow::kHann;
  const nlohmann::json j = c;
  const auto back = j.get<ModelConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  auto bad = j;
  bad["encoders"]["hiden_dim"] = 3;
  EXPECT_THROW(bad.get<ModelConfig>(), ConfigError);
}

// ---- checkpoints ----

TEST(CheckpointTest, RoundTripRestoresPredictions) {
  testing::TempDir dir;
  const auto c = tiny_model(5);
  GestureScorer a(c);
  a.calibration().target_mean = {55.0, 44.0};
  save_scorer(a, dir / "ck");
  const auto b = load_scorer(dir / "ck");
  const auto in = random_inputs(c, 13);
  EXPECT_EQ(a.predict(in), b.predict(in));
  EXPECT_EQ(b.calibration().target_mean[0], 55.0);
}

TEST(CheckpointTest, ReportsEveryProblemAndLeavesStoreUntouched) {
  testing::TempDir dir;
  nn::ParameterStore saved;
  saved.add("a", Tensor({2}, {1.0, 2.0}));
  saved.add("b", Tensor({3}, {3.0, 4.0, 5.0}));
  saved.add("extra", Tensor({1}, {9.0}));
  save_checkpoint(saved, dir / "ck", {{"note", "x"}});
  EXPECT_EQ(read_checkpoint_metadata(dir / "ck").at("note"), "x");

  nn::ParameterStore target;
  target.add("a", Tensor({2}));
  target.add("b", Tensor({4}));
  target.add("missing", Tensor({1}));
  try {
    load_checkpoint(target, dir / "ck");
    FAIL() << "expected CheckpointError";
  } catch (const CheckpointError& e) {
    EXPECT_EQ(e.report().missing, std::vector<std::string>{"missing"});
    EXPECT_EQ(e.report().unexpected, std::vector<std::string>{"extra"});
    ASSERT_EQ(e.report().mismatched.size(), 1u);
    EXPECT_EQ(e.report().mismatched[0].rfind("b ", 0), 0u) << e.report().mismatched[0];
    EXPECT_FALSE(e.report().ok());
  }
  EXPECT_EQ(target.find("a")->value[0], 0.0);

  nn::ParameterStore partial;
  partial.add("a", Tensor({2}));
  partial.add("b", Tensor({3}));
  partial.add("extra", Tensor({1}));
  partial.add("head.w", Tensor({2}, {7.0, 7.0}));
  const auto report = load_checkpoint(partial, dir / "ck", {"head."});
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.loaded, 3u);
  EXPECT_EQ(partial.find("b")->value[2], 5.0);
  EXPECT_EQ(partial.find("head.w")->value[0], 7.0);
}

TEST(CheckpointTest, MissingOrCorruptIsError) {
  testing::TempDir dir;
  nn::ParameterStore store;
  store.add("a", Tensor({2}));
  EXPECT_THROW(load_checkpoint(store, dir / "none"), Error);
  save_checkpoint(store, dir / "ck");
  testing::spit(dir.path() / "ck" / "parameters.bin", "abc");
  EXPECT_THROW(load_checkpoint(store, dir / "ck"), Error);
}

TEST(CheckpointTest, AdapterModeLoadsEncodersOnly) {
  testing::TempDir dir;
  auto c = tiny_model(6);
  GestureScorer source(c);
  save_checkpoint(source.parameters(), dir / "backbone");

  c.seed = 99;
  c.encoders.backbone_mode = features::BackboneMode::kPretrainedAdapter;
  c.encoders.checkpoint_path = (dir / "backbone").string();
  GestureScorer adapted(c);
  for (const auto& p : source.parameters()) {
    const auto* q = adapted.parameters().find(p.name);
    ASSERT_NE(q, nullptr);
    if (p.name.rfind("fusion.", 0) == 0) continue;
    EXPECT_EQ(q->value, p.value) << p.name;
  }

  c.encoders.checkpoint_path = (dir / "nowhere").string();
  EXPECT_THROW(GestureScorer{c}, Error);
}

}  // namespace
}  // namespace gestureqa::model
