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

#include "gestureqa/model/scorer.hpp"

#include <cmath>

#include "gestureqa/json_util.hpp"
#include "gestureqa/model/checkpoint.hpp"

namespace gestureqa::model {

using nlohmann::json;

namespace {

std::string_view mode_name(features::BackboneMode m) {
  return m == features::BackboneMode::kDeskScale ? "desk-scale" : "pretrained-adapter";
}

features::BackboneMode parse_mode(const std::string& s) {
  if (s == "desk-scale") return features::BackboneMode::kDeskScale;
  if (s == "pretrained-adapter") return features::BackboneMode::kPretrainedAdapter;
  throw ConfigError("unknown backbone_mode '" + s + "'");
}

json spectrogram_json(const features::SpectrogramConfig& s) {
  return {{"sample_rate", s.sample_rate}, {"clip_seconds", s.clip_seconds}, {"mel_bins", s.mel_bins},
          {"win_ms", s.win_ms},           {"hop_ms", s.hop_ms},             {"low_hz", s.low_hz},
          {"high_hz", s.high_hz},         {"power_floor", s.power_floor},
          {"window", s.window == features::SpectrogramWindow::kHamming ? "hamming" : "hann"}};
}

void read_spectrogram(const json& j, const std::string& path, features::SpectrogramConfig& s) {
  StrictObjectReader r(j, path);
  r.read("sample_rate", s.sample_rate);
  r.read("clip_seconds", s.clip_seconds);
  r.read("mel_bins", s.mel_bins);
  r.read("win_ms", s.win_ms);
  r.read("hop_ms", s.hop_ms);
  r.read("low_hz", s.low_hz);
  r.read("high_hz", s.high_hz);
  r.read("power_floor", s.power_floor);
  std::string window = s.window == features::SpectrogramWindow::kHamming ? "hamming" : "hann";
  r.read("window", window);
  if (window == "hamming") {
    s.window = features::SpectrogramWindow::kHamming;
  } else if (window == "hann") {
    s.window = features::SpectrogramWindow::kHann;
  } else {
    throw ConfigError(path + ".window: unknown window '" + window + "'");
  }
  r.finish();
}

}  // namespace

void to_json(json& j, const ModelConfig& c) {
  const auto& e = c.encoders;
  j = {{"encoders",
        {{"hidden_dim", e.hidden_dim},
         {"heads", e.heads},
         {"mlp_ratio", e.mlp_ratio},
         {"vision_frames", e.vision_frames},
         {"image_size", e.image_size},
         {"patch_size", e.patch_size},
         {"window", e.window},
         {"vision_layers", e.vision_layers},
         {"spectrogram", spectrogram_json(e.spectrogram)},
         {"audio_patch_time", e.audio_patch_time},
         {"audio_patch_freq", e.audio_patch_freq},
         {"audio_norm_mean", e.audio_norm_mean},
         {"audio_norm_std", e.audio_norm_std},
         {"audio_layers", e.audio_layers},
         {"motion_dim", e.motion_dim},
         {"motion_layers", e.motion_layers},
         {"backbone_mode", mode_name(e.backbone_mode)},
         {"checkpoint_path", e.checkpoint_path}}},
       {"fusion", {{"hidden_dim", c.fusion.hidden_dim}, {"hidden_layers", c.fusion.hidden_layers}}},
       {"seed", c.seed}};
}

void from_json(const json& j, ModelConfig& c) {
  StrictObjectReader top(j, "model");
  if (const json* enc = top.child("encoders")) {
    auto& e = c.encoders;
    StrictObjectReader r(*enc, "model.encoders");
    r.read("hidden_dim", e.hidden_dim);
    r.read("heads", e.heads);
    r.read("mlp_ratio", e.mlp_ratio);
    r.read("vision_frames", e.vision_frames);
    r.read("image_size", e.image_size);
    r.read("patch_size", e.patch_size);
    r.read("window", e.window);
    r.read("vision_layers", e.vision_layers);
    if (const json* s = r.child("spectrogram")) read_spectrogram(*s, "model.encoders.spectrogram", e.spectrogram);
    r.read("audio_patch_time", e.audio_patch_time);
    r.read("audio_patch_freq", e.audio_patch_freq);
    r.read("audio_norm_mean", e.audio_norm_mean);
    r.read("audio_norm_std", e.audio_norm_std);
    r.read("audio_layers", e.audio_layers);
    r.read("motion_dim", e.motion_dim);
    r.read("motion_layers", e.motion_layers);
    std::string mode(mode_name(e.backbone_mode));
    r.read("backbone_mode", mode);
    e.backbone_mode = parse_mode(mode);
    r.read("checkpoint_path", e.checkpoint_path);
    r.finish();
  }
  if (const json* fusion = top.child("fusion")) {
    StrictObjectReader r(*fusion, "model.fusion");
    r.read("hidden_dim", c.fusion.hidden_dim);
    r.read("hidden_layers", c.fusion.hidden_layers);
    r.finish();
  }
  top.read("seed", c.seed);
  top.finish();
}

FusionHead::FusionHead(nn::ParameterStore& store, std::int64_t in_dim, const FusionConfig& config, nn::Rng& rng) {
  if (config.hidden_layers < 0) throw ConfigError("fusion.hidden_layers must be >= 0");
  const std::int64_t hidden = config.hidden_dim > 0 ? config.hidden_dim : in_dim / 3;
  std::int64_t width = in_dim;
  for (int i = 0; i < config.hidden_layers; ++i) {
    layers_.emplace_back(store, "fusion.fc" + std::to_string(i), width, hidden, rng);
    width = hidden;
  }
  layers_.emplace_back(store, "fusion.out", width, kScoreDims, rng);
}

nn::Var FusionHead::operator()(nn::Graph& g, nn::Var fused) const {
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) fused = nn::gelu(layers_[i](g, fused));
  return layers_.back()(g, fused);
}

std::array<double, kScoreDims> ScoreCalibration::apply(const std::array<double, kScoreDims>& raw) const {
  std::array<double, kScoreDims> out{};
  for (int d = 0; d < kScoreDims; ++d) {
    const double z = pred_std[d] > 0.0 ? (raw[d] - pred_mean[d]) / pred_std[d] : 0.0;
    out[d] = target_mean[d] + z * target_std[d];
  }
  return out;
}

ScoreCalibration ScoreCalibration::fit(std::span<const std::array<double, kScoreDims>> raw,
                                       std::span<const std::array<double, kScoreDims>> targets) {
  if (raw.size() != targets.size() || raw.empty()) throw ContractError("calibration needs paired, non-empty rows");
  ScoreCalibration c;
  const double n = static_cast<double>(raw.size());
  for (int d = 0; d < kScoreDims; ++d) {
    double pm = 0.0, tm = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      pm += raw[i][d];
      tm += targets[i][d];
    }
    pm /= n;
    tm /= n;
    double pv = 0.0, tv = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      pv += (raw[i][d] - pm) * (raw[i][d] - pm);
      tv += (targets[i][d] - tm) * (targets[i][d] - tm);
    }
    c.pred_mean[d] = pm;
    c.pred_std[d] = std::sqrt(pv / n);
    c.target_mean[d] = tm;
    c.target_std[d] = std::sqrt(tv / n);
  }
  return c;
}

void to_json(json& j, const ScoreCalibration& c) {
  j = {{"pred_mean", c.pred_mean}, {"pred_std", c.pred_std}, {"target_mean", c.target_mean}, {"target_std", c.target_std}};
}

void from_json(const json& j, ScoreCalibration& c) {
  c.pred_mean = j.at("pred_mean").get<std::array<double, kScoreDims>>();
  c.pred_std = j.at("pred_std").get<std::array<double, kScoreDims>>();
  c.target_mean = j.at("target_mean").get<std::array<double, kScoreDims>>();
  c.target_std = j.at("target_std").get<std::array<double, kScoreDims>>();
}

GestureScorer::GestureScorer(const ModelConfig& config)
    : config_(config), store_(std::make_unique<nn::ParameterStore>()) {
  config_.encoders.validate();
  nn::Rng rng(config_.seed);
  vision_ = std::make_unique<features::VisionEncoder>(config_.encoders, *store_, rng);
  audio_ = std::make_unique<features::AudioEncoder>(config_.encoders, *store_, rng);
  motion_ = std::make_unique<features::MotionEncoder>(config_.encoders, *store_, rng);
  head_ = FusionHead(*store_, 3 * config_.encoders.hidden_dim, config_.fusion, rng);
  if (config_.encoders.backbone_mode == features::BackboneMode::kPretrainedAdapter) {
    load_checkpoint(*store_, config_.encoders.checkpoint_path, {"fusion."});
  }
}

nn::Var GestureScorer::fuse(nn::Graph& g, nn::Var vision, nn::Var audio, nn::Var motion) const {
  const std::array<nn::Var, 3> parts = {nn::mean_row_groups(vision, vision.value().rows()),
                                        nn::mean_row_groups(audio, audio.value().rows()), motion};
  return head_(g, nn::concat_cols(parts));
}

nn::Var GestureScorer::forward(nn::Graph& g, const SampleInputs& inputs) const {
  nn::Var v = vision_->forward(g, inputs.frames);
  nn::Var a = audio_->forward(g, inputs.spectrograms);
  nn::Var m = motion_->forward(g, inputs.motion);
  return fuse(g, v, a, m);
}

std::array<double, kScoreDims> GestureScorer::predict_raw(const SampleInputs& inputs) const {
  nn::Graph g;
  const nn::Tensor& out = g.value(forward(g, inputs));
  return {out[0], out[1]};
}

std::array<double, kScoreDims> GestureScorer::predict(const SampleInputs& inputs) const {
  return calibration_.apply(predict_raw(inputs));
}

features::FeatureBundle GestureScorer::extract_features(std::span<const SampleInputs> batch) const {
  if (batch.empty()) throw ContractError("extract_features: empty batch");
  std::vector<nn::Tensor> v, a, m;
  for (const auto& inputs : batch) {
    nn::Graph g;
    v.push_back(g.value(vision_->forward(g, inputs.frames)));
    a.push_back(g.value(audio_->forward(g, inputs.spectrograms)));
    m.push_back(g.value(motion_->forward(g, inputs.motion)));
  }
  features::FeatureBundle bundle{nn::stack(v), nn::stack(a), nn::stack(m)};
  bundle.validate();
  return bundle;
}

nn::Tensor GestureScorer::fuse_and_score(const features::FeatureBundle& bundle) const {
  bundle.validate();
  if (bundle.hidden() != config_.encoders.hidden_dim) throw ContractError("feature width does not match the fusion head");
  const std::int64_t b = bundle.batch();
  nn::Tensor out({b, kScoreDims});
  for (std::int64_t i = 0; i < b; ++i) {
    nn::Graph g;
    const nn::Tensor& scores = g.value(fuse(g, g.constant(bundle.vision.slice(i)), g.constant(bundle.audio.slice(i)),
                                            g.constant(bundle.motion.slice(i))));
    out[i * kScoreDims] = scores[0];
    out[i * kScoreDims + 1] = scores[1];
  }
  return out;
}

void save_scorer(const GestureScorer& scorer, const std::filesystem::path& dir) {
  json meta = {{"model", scorer.config()}, {"calibration", scorer.calibration()}};
  save_checkpoint(scorer.parameters(), dir, meta);
}

GestureScorer load_scorer(const std::filesystem::path& dir) {
  const json meta = read_checkpoint_metadata(dir);
  if (!meta.contains("model")) throw FormatError(dir.string() + ": checkpoint lacks a model config");
  ModelConfig config = meta.at("model").get<ModelConfig>();
  // The stored weights replace whatever the adapter would load.
  config.encoders.backbone_mode = features::BackboneMode::kDeskScale;
  GestureScorer scorer(config);
  load_checkpoint(scorer.parameters(), dir);
  if (meta.contains("calibration")) scorer.calibration() = meta.at("calibration").get<ScoreCalibration>();
  return scorer;
}

}  // namespace gestureqa::model
