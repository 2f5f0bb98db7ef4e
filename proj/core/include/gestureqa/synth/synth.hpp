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

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestureqa/media/image.hpp"
#include "gestureqa/media/wav.hpp"

#include "gestureqa/subjective/ratings.hpp"
#include "gestureqa/types.hpp"

namespace gestureqa::synth {

enum class MediaMode { kFull, kNone };

struct SynthConfig {
  std::size_t n_audio = 40;  // multiple of 8
  std::vector<SourceMethod> methods{kAllMethods.begin(), kAllMethods.end()};
  std::uint64_t seed = 7;

  // Offsets added to the 50 midpoint before squashing; per method. The
  // defaults plant ground truth highest.
  std::map<SourceMethod, double> quality_gap = default_quality_gap();
  std::map<SourceMethod, double> consistency_gap = default_consistency_gap();
  double sample_spread = 12.0;  // within-method std before squashing

  // Congruence probability per (method, emotion).
  std::map<SourceMethod, std::map<EmotionLabel, double>> congruence_rates = default_congruence_rates();

  std::size_t raters = 18;
  double rater_noise = 8.0;
  bool adversary = false;
  double vote_error = 0.1;  // chance a rater misreports the emotion match

  double duration = 5.0;  // seconds per clip
  double motion_fps = 15.0;
  double video_fps = 6.0;
  int image_size = 64;
  double sample_rate = 16000.0;
  std::size_t motion_dim = 165;
  MediaMode media = MediaMode::kFull;

  static std::map<SourceMethod, double> default_quality_gap();
  static std::map<SourceMethod, double> default_consistency_gap();
  static std::map<SourceMethod, std::map<EmotionLabel, double>> default_congruence_rates();

  // Throws ConfigError.
  void validate() const;
  double quality_offset(SourceMethod m) const;
  double consistency_offset(SourceMethod m) const;
  double congruence_rate(SourceMethod m, EmotionLabel e) const;
};

void to_json(nlohmann::json& j, const SynthConfig& c);
// Strict: unknown keys raise ConfigError. Absent keys keep their current
// values; map entries are merged per method. The result is validated.
void from_json(const nlohmann::json& j, SynthConfig& c);

// Hidden ground truth behind one synthetic sample.
struct PlantedSample {
  std::string sample_id;
  std::string audio_id;
  SourceMethod method{};
  EmotionLabel emotion{};
  double quality = 0.0;      // planted MOS in (10, 90)
  double consistency = 0.0;  // planted MOS in (10, 90)
  bool congruent = false;
  double beat_hz = 0.0;
  double beat_phase = 0.0;
};

struct SynthDataset {
  DatasetManifest manifest;
  std::vector<PlantedSample> planted;  // aligned with manifest.samples
};

// The sample plan without touching the disk.
SynthDataset plan_dataset(const SynthConfig& config);

// Writes audio/, motion/, video/ and manifest.json (plus planted.json) under
// out_dir. With MediaMode::kNone only the JSON files are written.
SynthDataset generate_dataset(const SynthConfig& config, const std::filesystem::path& out_dir);

// One record per (rater, sample). Raters see the planted score plus noise
// through a private affine response scale; the optional adversary answers
// on a reversed scale. Votes report the planted congruence, flipped with
// probability vote_error.
std::vector<subjective::RatingRecord> generate_ratings(const SynthDataset& dataset, const SynthConfig& config);
// Re-plans from the config and checks that it matches the manifest.
std::vector<subjective::RatingRecord> generate_ratings(const DatasetManifest& manifest, const SynthConfig& config);

std::string adversary_id();
std::string rater_id(std::size_t index);

// Media generators, exposed for tests. All are deterministic in their
// arguments.
media::Waveform synth_audio(const PlantedSample& sample, const SynthConfig& config);
MotionSequence synth_motion(const PlantedSample& sample, const SynthConfig& config);
media::Image render_pose(std::span<const double> pose, int size);
std::vector<media::Image> render_video(const MotionSequence& motion, const SynthConfig& config);

// Planted posture and stroke readouts of one motion frame, used by tests to
// confirm that the planted scores are visible in the motion.
double slump_of(std::span<const double> pose);
double stroke_of(std::span<const double> pose);
}  // namespace gestureqa::synth
