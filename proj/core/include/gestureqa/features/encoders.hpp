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
#include <memory>
#include <string>
#include <vector>

#include "gestureqa/features/logmel.hpp"
#include "gestureqa/nn/graph.hpp"
#include "gestureqa/nn/layers.hpp"

namespace gestureqa::features {

enum class BackboneMode {
  kDeskScale,          // small randomly initialised encoders
  kPretrainedAdapter,  // same architecture, weights loaded from a checkpoint
};

struct EncoderConfig {
  std::int64_t hidden_dim = 128;  // C, shared by all three encoders
  int heads = 4;
  int mlp_ratio = 2;

  // Vision: N_v frames of image_size^2 RGB split into patch_size^2 patches;
  // attention runs in (time, height, width) windows, shifted every other
  // block by half a window.
  std::int64_t vision_frames = 8;
  int image_size = 64;
  int patch_size = 16;
  std::array<int, 3> window = {2, 2, 2};
  int vision_layers = 2;

  // Audio: spectrogram patches of patch_time frames x patch_freq mel bins.
  SpectrogramConfig spectrogram;
  int audio_patch_time = 32;
  int audio_patch_freq = 16;
  double audio_norm_mean = -6.0;
  double audio_norm_std = 5.0;
  int audio_layers = 2;

  // Motion: full-length SMPL-X sequences of motion_dim parameters per frame.
  std::int64_t motion_dim = 165;
  int motion_layers = 2;

  BackboneMode backbone_mode = BackboneMode::kDeskScale;
  std::string checkpoint_path;

  // Throws ConfigError on inconsistent settings.
  void validate() const;
};

// Token groups for (frames x grid x grid) video tokens ordered frame-major.
std::shared_ptr<const nn::WindowPartition> video_window_partition(std::int64_t frames, std::int64_t grid,
                                                                  const std::array<int, 3>& window, bool shifted);

// Windowed-attention video encoder: [N_v, H, W, 3] -> F_v rows [N_v, C].
class VisionEncoder {
 public:
  VisionEncoder(const EncoderConfig& config, nn::ParameterStore& store, nn::Rng& rng);
  nn::Var forward(nn::Graph& g, const nn::Tensor& frames) const;

 private:
  EncoderConfig config_;
  std::int64_t grid_;
  nn::Linear embed_;
  std::vector<nn::TransformerBlock> blocks_;
  std::vector<std::shared_ptr<const nn::WindowPartition>> partitions_;
  nn::LayerNorm norm_;
  nn::Tensor positions_;
};

// Spectrogram transformer applied per 5-second segment:
// [N_a, frames, mel_bins] -> F_a rows [N_a, C].
class AudioEncoder {
 public:
  AudioEncoder(const EncoderConfig& config, nn::ParameterStore& store, nn::Rng& rng);
  nn::Var forward(nn::Graph& g, const nn::Tensor& spectrograms) const;

 private:
  nn::Var encode_segment(nn::Graph& g, const nn::Tensor& spectrograms, std::int64_t segment) const;

  EncoderConfig config_;
  std::int64_t time_patches_;
  std::int64_t freq_patches_;
  nn::Linear embed_;
  std::vector<nn::TransformerBlock> blocks_;
  std::shared_ptr<const nn::WindowPartition> partition_;
  nn::LayerNorm norm_;
  nn::Tensor positions_;
};

// Transformer over the whole motion sequence with a prepended learnable
// summary token: [T, D] -> F_m [1, C].
class MotionEncoder {
 public:
  MotionEncoder(const EncoderConfig& config, nn::ParameterStore& store, nn::Rng& rng);
  nn::Var forward(nn::Graph& g, const nn::Tensor& motion) const;
  // Same, with the sequence already on the graph (input gradients).
  nn::Var forward(nn::Graph& g, nn::Var motion) const;

 private:
  EncoderConfig config_;
  nn::Linear embed_;
  nn::Parameter* summary_token_;
  std::vector<nn::TransformerBlock> blocks_;
  nn::LayerNorm norm_;
};

// Model-internal features for a batch. Shapes: vision [B, N_v, C],
// audio [B, N_a, C], motion [B, 1, C].
struct FeatureBundle {
  nn::Tensor vision;
  nn::Tensor audio;
  nn::Tensor motion;

  std::int64_t batch() const { return motion.dim(0); }
  std::int64_t hidden() const { return motion.dim(2); }
  // Throws ContractError unless B and C agree, F_m has one token and every
  // value is finite.
  void validate() const;
};

// Batched inference wrappers over a leading batch axis.
nn::Tensor encode_vision(const VisionEncoder& encoder, const nn::Tensor& frames);   // [B,N_v,H,W,3]
nn::Tensor encode_audio(const AudioEncoder& encoder, const nn::Tensor& spectrograms);  // [B,N_a,F,M]
nn::Tensor encode_motion(const MotionEncoder& encoder, const nn::Tensor& motion);   // [B,T,D]

// Mean over the token axis: [B, N, C] -> [B, 1, C].
nn::Tensor pool_temporal(const nn::Tensor& features);

}  // namespace gestureqa::features
