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
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gestureqa {

// Emotion category of a speech recording. Serialized as lowercase names.
enum class EmotionLabel {
  kNeutral,
  kHappiness,
  kAnger,
  kSadness,
  kContempt,
  kSurprise,
  kFear,
  kDisgust,
};

inline constexpr std::array<EmotionLabel, 8> kAllEmotions = {
    EmotionLabel::kNeutral,  EmotionLabel::kHappiness, EmotionLabel::kAnger,
    EmotionLabel::kSadness,  EmotionLabel::kContempt,  EmotionLabel::kSurprise,
    EmotionLabel::kFear,     EmotionLabel::kDisgust,
};

std::string_view to_string(EmotionLabel e);
std::optional<EmotionLabel> parse_emotion(std::string_view s);

// Where a gesture sequence came from: one of six generators or the captured
// ground truth.
enum class SourceMethod {
  kGroundTruth,
  kEmage,
  kMambaTalk,
  kSynTalker,
  kLoM,
  kMotionCraft,
  kGestureLSM,
};

inline constexpr std::array<SourceMethod, 7> kAllMethods = {
    SourceMethod::kGroundTruth, SourceMethod::kEmage,
    SourceMethod::kMambaTalk,   SourceMethod::kSynTalker,
    SourceMethod::kLoM,         SourceMethod::kMotionCraft,
    SourceMethod::kGestureLSM,
};

std::string_view to_string(SourceMethod m);
std::optional<SourceMethod> parse_method(std::string_view s);

constexpr bool is_generated(SourceMethod m) {
  return m != SourceMethod::kGroundTruth;
}

struct AudioClip {
  std::string id;
  std::filesystem::path path;
  double sample_rate = 0.0;  // Hz
  double duration = 0.0;     // seconds
  EmotionLabel emotion = EmotionLabel::kNeutral;
  std::string speaker_id;

  bool operator==(const AudioClip&) const = default;
};

// Row-major [frames x dim] table of SMPL-X pose parameters.
struct MotionSequence {
  std::size_t frames = 0;
  std::size_t dim = 0;
  double fps = 0.0;
  std::vector<double> values;

  double duration() const { return fps > 0.0 ? frames / fps : 0.0; }
  std::span<const double> row(std::size_t t) const {
    return {values.data() + t * dim, dim};
  }
  bool operator==(const MotionSequence&) const = default;
};

struct SampleRecord {
  std::string sample_id;
  AudioClip audio;
  std::filesystem::path motion_path;
  std::filesystem::path video_path;
  SourceMethod method = SourceMethod::kGroundTruth;

  bool operator==(const SampleRecord&) const = default;
};

struct DatasetManifest {
  std::string version = "1";
  std::size_t motion_dim = 0;
  std::vector<SampleRecord> samples;

  const SampleRecord* find(std::string_view sample_id) const;
  bool operator==(const DatasetManifest&) const = default;
};

// Deterministic join key between ratings and samples: `<audio_id>__<method>`.
std::string make_sample_id(std::string_view audio_id, SourceMethod method);

}  // namespace gestureqa
