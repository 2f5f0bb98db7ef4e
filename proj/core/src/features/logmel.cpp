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

#include "gestureqa/features/logmel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "gestureqa/error.hpp"

namespace gestureqa::features {
namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

}  // namespace

std::int64_t SpectrogramConfig::window_samples() const {
  return static_cast<std::int64_t>(std::llround(sample_rate * win_ms / 1000.0));
}
std::int64_t SpectrogramConfig::hop_samples() const {
  return static_cast<std::int64_t>(std::llround(sample_rate * hop_ms / 1000.0));
}
std::int64_t SpectrogramConfig::fft_size() const {
  std::int64_t n = 1;
  while (n < window_samples()) n <<= 1;
  return n;
}
std::int64_t SpectrogramConfig::segment_samples() const {
  return static_cast<std::int64_t>(std::llround(sample_rate * clip_seconds));
}
std::int64_t SpectrogramConfig::frames_per_segment() const {
  const auto n = segment_samples();
  const auto w = window_samples();
  return n < w ? 0 : 1 + (n - w) / hop_samples();
}

double hz_to_mel(double hz) { return 1127.0 * std::log1p(hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * std::expm1(mel / 1127.0); }

std::vector<double> mel_filterbank(const SpectrogramConfig& config) {
  const std::int64_t bins = config.fft_size() / 2 + 1;
  const double nyquist = config.sample_rate / 2.0;
  const double high = config.high_hz > 0.0 ? config.high_hz : nyquist;
  if (config.mel_bins < 1 || !(config.low_hz >= 0.0) || !(high > config.low_hz) || high > nyquist) {
    throw ConfigError("invalid mel filterbank range");
  }
  const double mel_lo = hz_to_mel(config.low_hz);
  const double mel_hi = hz_to_mel(high);
  const double delta = (mel_hi - mel_lo) / (config.mel_bins + 1);
  std::vector<double> bank(static_cast<std::size_t>(config.mel_bins * bins), 0.0);
  for (int m = 0; m < config.mel_bins; ++m) {
    const double left = mel_lo + m * delta;
    const double center = left + delta;
    const double right = center + delta;
    for (std::int64_t k = 0; k < bins; ++k) {
      const double mel = hz_to_mel(config.sample_rate * static_cast<double>(k) / config.fft_size());
      double w = 0.0;
      if (mel > left && mel <= center) {
        w = (mel - left) / delta;
      } else if (mel > center && mel < right) {
        w = (right - mel) / delta;
      }
      bank[static_cast<std::size_t>(m * bins + k)] = w;
    }
  }
  return bank;
}

std::vector<double> log_mel_segment(std::span<const double> segment, const SpectrogramConfig& config) {
  if (static_cast<std::int64_t>(segment.size()) != config.segment_samples()) {
    throw ContractError("log_mel_segment expects " + std::to_string(config.segment_samples()) + " samples");
  }
  const std::int64_t win = config.window_samples();
  const std::int64_t hop = config.hop_samples();
  const std::int64_t nfft = config.fft_size();
  const std::int64_t bins = nfft / 2 + 1;
  const std::int64_t frames = config.frames_per_segment();
  const int mels = config.mel_bins;
  if (frames < 1) throw ConfigError("segment shorter than one analysis window");

  std::vector<double> window(static_cast<std::size_t>(win));
  const double a0 = config.window == SpectrogramWindow::kHamming ? 0.54 : 0.5;
  for (std::int64_t i = 0; i < win; ++i) {
    window[static_cast<std::size_t>(i)] =
        a0 - (1.0 - a0) * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(win - 1));
  }
  const std::vector<double> bank = mel_filterbank(config);

  std::unique_ptr<double, decltype(&fftw_free)> in(fftw_alloc_real(static_cast<std::size_t>(nfft)), &fftw_free);
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(
      fftw_alloc_complex(static_cast<std::size_t>(bins)), &fftw_free);
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.get(), out.get(), FFTW_ESTIMATE));
  }
  if (!plan) throw Error("fftw planning failed");

  std::vector<double> result(static_cast<std::size_t>(frames * mels));
  std::vector<double> power(static_cast<std::size_t>(bins));
  for (std::int64_t f = 0; f < frames; ++f) {
    std::fill(in.get(), in.get() + nfft, 0.0);
    for (std::int64_t i = 0; i < win; ++i) {
      in.get()[i] = segment[static_cast<std::size_t>(f * hop + i)] * window[static_cast<std::size_t>(i)];
    }
    fftw_execute(plan.get());
    for (std::int64_t k = 0; k < bins; ++k) {
      const double re = out.get()[k][0];
      const double im = out.get()[k][1];
      power[static_cast<std::size_t>(k)] = re * re + im * im;
    }
    for (int m = 0; m < mels; ++m) {
      double e = 0.0;
      const double* row = bank.data() + static_cast<std::ptrdiff_t>(m) * bins;
      for (std::int64_t k = 0; k < bins; ++k) e += row[k] * power[static_cast<std::size_t>(k)];
      result[static_cast<std::size_t>(f * mels + m)] = std::log(std::max(e, config.power_floor));
    }
  }
  return result;
}

nn::Tensor audio_to_logmel(const media::Waveform& wave, const SpectrogramConfig& config) {
  if (wave.samples.empty()) throw MediaError("audio has zero length");
  const media::Waveform mono = media::resample(wave, config.sample_rate);
  if (mono.samples.empty()) throw MediaError("audio has zero length after resampling");
  const std::int64_t seg = config.segment_samples();
  const auto total = static_cast<std::int64_t>(mono.samples.size());
  const std::int64_t segments = (total + seg - 1) / seg;
  const std::int64_t frames = config.frames_per_segment();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(segments * frames * config.mel_bins));
  std::vector<double> buffer(static_cast<std::size_t>(seg));
  for (std::int64_t s = 0; s < segments; ++s) {
    std::fill(buffer.begin(), buffer.end(), 0.0);
    const std::int64_t begin = s * seg;
    const std::int64_t n = std::min(seg, total - begin);
    std::copy_n(mono.samples.begin() + begin, n, buffer.begin());
    const auto spec = log_mel_segment(buffer, config);
    values.insert(values.end(), spec.begin(), spec.end());
  }
  return nn::Tensor({segments, frames, config.mel_bins}, std::move(values));
}

nn::Tensor audio_to_logmel(const std::filesystem::path& wav_path, const SpectrogramConfig& config) {
  return audio_to_logmel(media::read_wav(wav_path), config);
}

}  // namespace gestureqa::features
