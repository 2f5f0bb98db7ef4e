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

#include "gestureqa/types.hpp"

#include <algorithm>

namespace gestureqa {
namespace {

constexpr std::array<std::string_view, 8> kEmotionNames = {
    "neutral", "happiness", "anger", "sadness",
    "contempt", "surprise", "fear", "disgust",
};

constexpr std::array<std::string_view, 7> kMethodNames = {
    "gt", "emage", "mambatalk", "syntalker", "lom", "motioncraft", "gesturelsm",
};

}  // namespace

std::string_view to_string(EmotionLabel e) {
  return kEmotionNames[static_cast<std::size_t>(e)];
}

std::optional<EmotionLabel> parse_emotion(std::string_view s) {
  for (std::size_t i = 0; i < kEmotionNames.size(); ++i) {
    if (kEmotionNames[i] == s) return kAllEmotions[i];
  }
  return std::nullopt;
}

std::string_view to_string(SourceMethod m) {
  return kMethodNames[static_cast<std::size_t>(m)];
}

std::optional<SourceMethod> parse_method(std::string_view s) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i) {
    if (kMethodNames[i] == s) return kAllMethods[i];
  }
  return std::nullopt;
}

const SampleRecord* DatasetManifest::find(std::string_view sample_id) const {
  auto it = std::find_if(samples.begin(), samples.end(),
                         [&](const SampleRecord& s) { return s.sample_id == sample_id; });
  return it == samples.end() ? nullptr : &*it;
}

std::string make_sample_id(std::string_view audio_id, SourceMethod method) {
  std::string id(audio_id);
  id += "__";
  id += to_string(method);
  return id;
}

}  // namespace gestureqa
