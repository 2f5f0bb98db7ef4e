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

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gestureqa/types.hpp"

namespace gestureqa {

// Reads and validates a manifest JSON document. Relative media paths are kept
// verbatim; they are resolved against the manifest's directory by callers.
// Throws FormatError (with line or field path) or ValidationError (naming the
// offending sample_id).
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(const std::string& text);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
std::string dump_manifest(const DatasetManifest& manifest);

// Structural invariants: unique sample ids, one sample per (audio, method),
// sample ids following the join scheme, positive durations and rates, and a
// single definition per audio id.
void validate_manifest(const DatasetManifest& manifest);

// Checks that motion files exist, have the declared dimension, are finite,
// and that audio, motion and video durations agree within one motion frame.
// Returns one message per problem; empty means consistent.
std::vector<std::string> check_media_consistency(const DatasetManifest& manifest,
                                                 const std::filesystem::path& media_root);

struct DesignTargets {
  std::size_t emotions = 8;
  std::size_t audio_per_emotion = 25;
  std::size_t methods = 7;
};

struct CompositionReport {
  std::map<EmotionLabel, std::size_t> audio_per_emotion;
  std::map<SourceMethod, std::size_t> samples_per_method;
  std::size_t distinct_audio = 0;
  std::vector<std::string> flags;

  bool matches_design() const { return flags.empty(); }
};

CompositionReport validate_composition(const DatasetManifest& manifest,
                                       const DesignTargets& design = {});

}  // namespace gestureqa
