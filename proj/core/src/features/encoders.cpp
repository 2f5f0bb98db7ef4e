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

#include "gestureqa/features/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "gestureqa/error.hpp"

namespace gestureqa::features {
namespace {

std::vector<nn::TransformerBlock> make_blocks(nn::ParameterStore& store, const std::string& prefix, int layers,
                                              const EncoderConfig& config, nn::Rng& rng) {
  nn::TransformerBlockConfig block;
  block.dim = config.hidden_dim;
  block.heads = config.heads;
  block.mlp_hidden = config.hidden_dim * config.mlp_ratio;
  std::vector<nn::TransformerBlock> blocks;
  for (int i = 0; i < layers; ++i) {
    blocks.emplace_back(store, prefix + ".blocks." + std::to_string(i), block, rng);
  }
  return blocks;
}

std::string shape_str(const nn::Tensor& t) { return nn::to_string(t.shape()); }

}  // namespace

void EncoderConfig::validate() const {
  if (hidden_dim < 2 || heads < 1 || hidden_dim % heads != 0) {
    throw ConfigError("hidden_dim must be a positive multiple of heads");
  }
  if (mlp_ratio < 1) throw ConfigError("mlp_ratio must be >= 1");
  if (vision_frames < 1) throw ConfigError("vision_frames (N_v) must be >= 1");
  if (patch_size < 1 || image_size < patch_size || image_size % patch_size != 0) {
    throw ConfigError("image_size must be a positive multiple of patch_size");
  }
  if (std::any_of(window.begin(), window.end(), [](int w) { return w < 1; })) {
    throw ConfigError("attention window extents must be >= 1");
  }
  if (!(spectrogram.clip_seconds > 0.0)) throw ConfigError("clip_seconds must be positive");
  if (spectrogram.frames_per_segment() < 1) throw ConfigError("clip shorter than one spectrogram frame");
  if (audio_patch_time < 1 || audio_patch_freq < 1 || spectrogram.mel_bins % audio_patch_freq != 0) {
    throw ConfigError("mel_bins must be a multiple of audio_patch_freq");
  }
  if (!(audio_norm_std > 0.0)) throw ConfigError("audio_norm_std must be positive");
  if (motion_dim < 1) throw ConfigError("motion_dim must be >= 1");
  if (vision_layers < 1 || audio_layers < 1 || motion_layers < 1) throw ConfigError("encoders need >= 1 layer");
  if (backbone_mode == BackboneMode::kPretrainedAdapter && checkpoint_path.empty()) {
    throw ConfigError("pretrained-adapter mode requires checkpoint_path");
  }
}

std::shared_ptr<const nn::WindowPartition> video_window_partition(std::int64_t frames, std::int64_t grid,
                                                                  const std::array<int, 3>& window, bool shifted) {
  const std::array<std::int64_t, 3> extent = {frames, grid, grid};
  std::array<std::int64_t, 3> size{};
  std::array<std::int64_t, 3> shift{};
  for (int d = 0; d < 3; ++d) {
    size[d] = std::min<std::int64_t>(window[d], extent[d]);
    shift[d] = shifted && size[d] < extent[d] ? size[d] / 2 : 0;
  }
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, std::vector<std::int32_t>> groups;
  for (std::int64_t t = 0; t < frames; ++t) {
    for (std::int64_t y = 0; y < grid; ++y) {
      for (std::int64_t x = 0; x < grid; ++x) {
        const auto key = std::make_tuple((t + shift[0]) / size[0], (y + shift[1]) / size[1], (x + shift[2]) / size[2]);
        groups[key].push_back(static_cast<std::int32_t>((t * grid + y) * grid + x));
      }
    }
  }
  auto partition = std::make_shared<nn::WindowPartition>();
  partition->tokens = frames * grid * grid;
  for (auto& [key, members] : groups) partition->windows.push_back(std::move(members));
  return partition;
}

VisionEncoder::VisionEncoder(const EncoderConfig& config, nn::ParameterStore& store, nn::Rng& rng)
    : config_(config), grid_(config.image_size / config.patch_size) {
  config_.validate();
  const std::int64_t patch_dim = static_cast<std::int64_t>(config.patch_size) * config.patch_size * 3;
  embed_ = nn::Linear(store, "vision.embed", patch_dim, config.hidden_dim, rng);
  blocks_ = make_blocks(store, "vision", config.vision_layers, config, rng);
  norm_ = nn::LayerNorm(store, "vision.norm", config.hidden_dim);
  partitions_ = {video_window_partition(config.vision_frames, grid_, config.window, false),
                 video_window_partition(config.vision_frames, grid_, config.window, true)};
  positions_ = nn::sinusoidal_positions(config.vision_frames * grid_ * grid_, config.hidden_dim);
}

nn::Var VisionEncoder::forward(nn::Graph& g, const nn::Tensor& frames) const {
  const std::int64_t n = config_.vision_frames;
  const std::int64_t s = config_.image_size;
  if (frames.rank() != 4 || frames.dim(0) != n || frames.dim(1) != s || frames.dim(2) != s || frames.dim(3) != 3) {
    throw ContractError("vision encoder expects (" + std::to_string(n) + ", " + std::to_string(s) + ", " +
                        std::to_string(s) + ", 3) frames, got " + shape_str(frames));
  }
  const std::int64_t p = config_.patch_size;
  const std::int64_t tokens = n * grid_ * grid_;
  nn::Tensor patches({tokens, p * p * 3});
  double* out = patches.data();
  for (std::int64_t t = 0; t < n; ++t) {
    for (std::int64_t gy = 0; gy < grid_; ++gy) {
      for (std::int64_t gx = 0; gx < grid_; ++gx) {
        for (std::int64_t py = 0; py < p; ++py) {
          const double* row = frames.data() + ((t * s + gy * p + py) * s + gx * p) * 3;
          for (std::int64_t i = 0; i < p * 3; ++i) *out++ = row[i] - 0.5;
        }
      }
    }
  }
  nn::Var x = nn::add(embed_(g, g.constant(std::move(patches))), g.constant(positions_));
  for (std::size_t i = 0; i < blocks_.size(); ++i) x = blocks_[i](g, x, partitions_[i % 2]);
  return nn::mean_row_groups(norm_(g, x), grid_ * grid_);
}

AudioEncoder::AudioEncoder(const EncoderConfig& config, nn::ParameterStore& store, nn::Rng& rng) : config_(config) {
  config_.validate();
  const std::int64_t frames = config.spectrogram.frames_per_segment();
  time_patches_ = (frames + config.audio_patch_time - 1) / config.audio_patch_time;
  freq_patches_ = config.spectrogram.mel_bins / config.audio_patch_freq;
  const std::int64_t patch_dim = static_cast<std::int64_t>(config.audio_patch_time) * config.audio_patch_freq;
  embed_ = nn::Linear(store, "audio.embed", patch_dim, config.hidden_dim, rng);
  blocks_ = make_blocks(store, "audio", config.audio_layers, config, rng);
  norm_ = nn::LayerNorm(store, "audio.norm", config.hidden_dim);
  partition_ = nn::WindowPartition::full(time_patches_ * freq_patches_);
  positions_ = nn::sinusoidal_positions(time_patches_ * freq_patches_, config.hidden_dim);
}

nn::Var AudioEncoder::encode_segment(nn::Graph& g, const nn::Tensor& spec, std::int64_t segment) const {
  const std::int64_t frames = spec.dim(1);
  const std::int64_t mels = spec.dim(2);
  const std::int64_t pt = config_.audio_patch_time;
  const std::int64_t pf = config_.audio_patch_freq;
  nn::Tensor patches({time_patches_ * freq_patches_, pt * pf});
  const double* base = spec.data() + segment * frames * mels;
  const double mean = config_.audio_norm_mean;
  const double inv_std = 1.0 / config_.audio_norm_std;
  for (std::int64_t ti = 0; ti < time_patches_; ++ti) {
    for (std::int64_t fi = 0; fi < freq_patches_; ++fi) {
      double* out = patches.data() + (ti * freq_patches_ + fi) * pt * pf;
      for (std::int64_t dt = 0; dt < pt; ++dt) {
        const std::int64_t f = ti * pt + dt;
        for (std::int64_t df = 0; df < pf; ++df) {
          out[dt * pf + df] = f < frames ? (base[f * mels + fi * pf + df] - mean) * inv_std : 0.0;
        }
      }
    }
  }
  nn::Var x = nn::add(embed_(g, g.constant(std::move(patches))), g.constant(positions_));
  for (const auto& block : blocks_) x = block(g, x, partition_);
  return nn::mean_row_groups(norm_(g, x), time_patches_ * freq_patches_);
}

nn::Var AudioEncoder::forward(nn::Graph& g, const nn::Tensor& spectrograms) const {
  const auto& sc = config_.spectrogram;
  if (spectrograms.rank() != 3 || spectrograms.dim(0) < 1 || spectrograms.dim(1) != sc.frames_per_segment() ||
      spectrograms.dim(2) != sc.mel_bins) {
    throw ContractError("audio encoder expects (N_a, " + std::to_string(sc.frames_per_segment()) + ", " +
                        std::to_string(sc.mel_bins) + ") spectrograms, got " + shape_str(spectrograms));
  }
  std::vector<nn::Var> rows;
  for (std::int64_t s = 0; s < spectrograms.dim(0); ++s) rows.push_back(encode_segment(g, spectrograms, s));
  return rows.size() == 1 ? rows.front() : nn::concat_rows(rows);
}

MotionEncoder::MotionEncoder(const EncoderConfig& config, nn::ParameterStore& store, nn::Rng& rng) : config_(config) {
  config_.validate();
  embed_ = nn::Linear(store, "motion.embed", config.motion_dim, config.hidden_dim, rng);
  summary_token_ = &store.add("motion.summary_token", nn::normal_tensor({1, config.hidden_dim}, 0.02, rng));
  blocks_ = make_blocks(store, "motion", config.motion_layers, config, rng);
  norm_ = nn::LayerNorm(store, "motion.norm", config.hidden_dim);
}

nn::Var MotionEncoder::forward(nn::Graph& g, const nn::Tensor& motion) const {
  return forward(g, g.constant(motion));
}

nn::Var MotionEncoder::forward(nn::Graph& g, nn::Var motion_var) const {
  const nn::Tensor& motion = g.value(motion_var);
  if (motion.rank() != 2 || motion.dim(0) < 1 || motion.dim(1) != config_.motion_dim) {
    throw ContractError("motion encoder expects (T, " + std::to_string(config_.motion_dim) + ") input, got " +
                        shape_str(motion));
  }
  if (!motion.all_finite()) throw ValidationError("motion input contains non-finite values");
  const std::int64_t frames = motion.dim(0);
  nn::Var x = embed_(g, motion_var);
  x = nn::add(x, g.constant(nn::sinusoidal_positions(frames, config_.hidden_dim, 1)));
  const std::array<nn::Var, 2> parts = {g.parameter(*summary_token_), x};
  x = nn::concat_rows(parts);
  const auto partition = nn::WindowPartition::full(frames + 1);
  for (const auto& block : blocks_) x = block(g, x, partition);
  return nn::slice_rows(norm_(g, x), 0, 1);
}

void FeatureBundle::validate() const {
  if (vision.rank() != 3 || audio.rank() != 3 || motion.rank() != 3) {
    throw ContractError("feature bundle tensors must be rank 3");
  }
  const auto b = motion.dim(0);
  const auto c = motion.dim(2);
  if (vision.dim(0) != b || audio.dim(0) != b) throw ContractError("feature bundle batch sizes differ");
  if (vision.dim(2) != c || audio.dim(2) != c) throw ContractError("feature bundle hidden sizes differ");
  if (motion.dim(1) != 1) throw ContractError("motion features must have a single token");
  if (vision.dim(1) < 1 || audio.dim(1) < 1) throw ContractError("feature bundle has an empty token axis");
  if (!vision.all_finite() || !audio.all_finite() || !motion.all_finite()) {
    throw ContractError("feature bundle contains non-finite values");
  }
}

namespace {

template <class Encoder>
nn::Tensor encode_batch(const Encoder& encoder, const nn::Tensor& batch, std::size_t min_rank) {
  if (batch.rank() < min_rank || batch.dim(0) < 1) {
    throw ContractError("batched input needs a leading batch axis, got " + nn::to_string(batch.shape()));
  }
  std::vector<nn::Tensor> rows;
  for (std::int64_t b = 0; b < batch.dim(0); ++b) {
    nn::Graph g;
    rows.push_back(g.value(encoder.forward(g, batch.slice(b))));
  }
  return nn::stack(rows);
}

}  // namespace

nn::Tensor encode_vision(const VisionEncoder& encoder, const nn::Tensor& frames) {
  return encode_batch(encoder, frames, 5);
}

nn::Tensor encode_audio(const AudioEncoder& encoder, const nn::Tensor& spectrograms) {
  return encode_batch(encoder, spectrograms, 4);
}

nn::Tensor encode_motion(const MotionEncoder& encoder, const nn::Tensor& motion) {
  return encode_batch(encoder, motion, 3);
}

nn::Tensor pool_temporal(const nn::Tensor& features) {
  if (features.rank() != 3 || features.dim(1) < 1) {
    throw ContractError("pool_temporal expects (B, N, C) with N >= 1, got " + nn::to_string(features.shape()));
  }
  const auto b = features.dim(0);
  const auto n = features.dim(1);
  const auto c = features.dim(2);
  nn::Tensor out({b, 1, c});
  for (std::int64_t i = 0; i < b; ++i) {
    for (std::int64_t k = 0; k < c; ++k) {
      double s = 0.0;
      for (std::int64_t j = 0; j < n; ++j) s += features[(i * n + j) * c + k];
      out[i * c + k] = s / static_cast<double>(n);
    }
  }
  return out;
}

}  // namespace gestureqa::features
