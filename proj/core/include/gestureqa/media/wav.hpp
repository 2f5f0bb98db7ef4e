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
#include <vector>

namespace gestureqa::media {

// Mono waveform with samples in [-1, 1].
struct Waveform {
  double sample_rate = 0.0;
  std::vector<double> samples;

  double duration() const { return sample_rate > 0.0 ? samples.size() / sample_rate : 0.0; }
};

// Reads RIFF/WAVE files with 16-bit, 24-bit or 32-bit integer PCM or 32-bit
// float samples. Multi-channel input is downmixed by averaging channels.
Waveform read_wav(const std::filesystem::path& path);

// Writes 16-bit PCM mono.
void write_wav(const Waveform& wave, const std::filesystem::path& path);

// Linear-interpolation resampler; identity when the rates already match.
Waveform resample(const Waveform& wave, double target_rate);

}  // namespace gestureqa::media
