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
#include <span>
#include <vector>

#include "gestureqa/media/wav.hpp"
#include "gestureqa/nn/tensor.hpp"
#include "gestureqa/types.hpp"

namespace gestureqa::features {

enum class SpectrogramWindow { kHamming, kHann };

struct SpectrogramConfig {
  double sample_rate = 16000.0;
  double clip_seconds = 5.0;
  int mel_bins = 128;
  double win_ms = 25.0;
  double hop_ms = 10.0;
  double low_hz = 20.0;
  double high_hz = 0.0;  // 0 means Nyquist
  SpectrogramWindow window = SpectrogramWindow::kHamming;
  double power_floor = 1e-10;

  std::int64_t window_samples() const;
  std::int64_t hop_samples() const;
  std::int64_t fft_size() const;  // next power of two >= window length
  std::int64_t segment_samples() const;
  std::int64_t frames_per_segment() const;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters equally spaced on the mel scale, [mel_bins x (fft/2+1)].
std::vector<double> mel_filterbank(const SpectrogramConfig& config);

// Log-mel spectrogram of one segment of exactly segment_samples() samples:
// [frames_per_segment x mel_bins], log(max(power, floor)).
std::vector<double> log_mel_segment(std::span<const double> segment, const SpectrogramConfig& config);

// Splits a waveform (resampled to the configured rate) into consecutive
// clip_seconds segments, zero-padding the last, and returns
// [N_a, frames, mel_bins] with N_a = ceil(duration / clip_seconds).
// Throws MediaError for empty audio.
nn::Tensor audio_to_logmel(const media::Waveform& wave, const SpectrogramConfig& config);
nn::Tensor audio_to_logmel(const std::filesystem::path& wav_path, const SpectrogramConfig& config);

}  // namespace gestureqa::features
