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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>

#include <nlohmann/json.hpp>

#include "gestureqa/features/encoders.hpp"
#include "gestureqa/nn/graph.hpp"
#include "gestureqa/nn/layers.hpp"

namespace gestureqa::model {

inline constexpr int kScoreDims = 2;  // gesture quality, audio-gesture consistency

struct FusionConfig {
  std::int64_t hidden_dim = 0;  // 0 means the encoder width C
  int hidden_layers = 1;
};

struct ModelConfig {
  features::EncoderConfig encoders;
  FusionConfig fusion;
  std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
// Strict: unknown keys raise ConfigError.
void from_json(const nlohmann::json& j, ModelConfig& c);

// Fully connected stack 3C -> hidden -> ... -> 2 with GELU between layers.
class FusionHead {
 public:
  FusionHead() = default;
  FusionHead(nn::ParameterStore& store, std::int64_t in_dim, const FusionConfig& config, nn::Rng& rng);

  nn::Var operator()(nn::Graph& g, nn::Var fused) const;
  const std::vector<nn::Linear>& layers() const { return layers_; }

 private:
  std::vector<nn::Linear> layers_;
};

// Preprocessed media for one sample.
struct SampleInputs {
  nn::Tensor frames;        // [N_v, H, W, 3]
  nn::Tensor spectrograms;  // [N_a, frames, mel_bins]
  nn::Tensor motion;        // [T, D]
};

// Maps raw head outputs onto the MOS scale per dimension by matching the
// mean and spread of training predictions to those of training targets.
struct ScoreCalibration {
  std::array<double, kScoreDims> pred_mean{0.0, 0.0};
  std::array<double, kScoreDims> pred_std{1.0, 1.0};
  std::array<double, kScoreDims> target_mean{0.0, 0.0};
  std::array<double, kScoreDims> target_std{1.0, 1.0};

  std::array<double, kScoreDims> apply(const std::array<double, kScoreDims>& raw) const;
  // Fits from paired rows of raw predictions and targets.
  static ScoreCalibration fit(std::span<const std::array<double, kScoreDims>> raw,
                              std::span<const std::array<double, kScoreDims>> targets);
};

void to_json(nlohmann::json& j, const ScoreCalibration& c);
void from_json(const nlohmann::json& j, ScoreCalibration& c);

// Three single-modality encoders feeding a fusion head that predicts the two
// quality dimensions.
class GestureScorer {
 public:
  explicit GestureScorer(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  nn::ParameterStore& parameters() { return *store_; }
  const nn::ParameterStore& parameters() const { return *store_; }
  const features::VisionEncoder& vision() const { return *vision_; }
  const features::AudioEncoder& audio() const { return *audio_; }
  const features::MotionEncoder& motion() const { return *motion_; }
  const FusionHead& head() const { return head_; }

  ScoreCalibration& calibration() { return calibration_; }
  const ScoreCalibration& calibration() const { return calibration_; }

  // Raw scores [1, 2] for one sample, recorded on `g` for training.
  nn::Var forward(nn::Graph& g, const SampleInputs& inputs) const;
  // Pools F_v and F_a over their token axes, concatenates with F_m and
  // applies the head: rows [N_v, C], [N_a, C], [1, C] -> [1, 2].
  nn::Var fuse(nn::Graph& g, nn::Var vision, nn::Var audio, nn::Var motion) const;

  std::array<double, kScoreDims> predict_raw(const SampleInputs& inputs) const;
  std::array<double, kScoreDims> predict(const SampleInputs& inputs) const;

  features::FeatureBundle extract_features(std::span<const SampleInputs> batch) const;
  // Raw [B, 2] scores from a bundle; throws ContractError on shape mismatch.
  nn::Tensor fuse_and_score(const features::FeatureBundle& bundle) const;

 private:
  ModelConfig config_;
  std::unique_ptr<nn::ParameterStore> store_;
  std::unique_ptr<features::VisionEncoder> vision_;
  std::unique_ptr<features::AudioEncoder> audio_;
  std::unique_ptr<features::MotionEncoder> motion_;
  FusionHead head_;
  ScoreCalibration calibration_;
};

// Checkpoint with the model config and calibration in its metadata.
void save_scorer(const GestureScorer& scorer, const std::filesystem::path& dir);
GestureScorer load_scorer(const std::filesystem::path& dir);

}  // namespace gestureqa::model
