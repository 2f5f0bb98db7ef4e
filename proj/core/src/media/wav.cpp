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

#include "gestureqa/media/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "gestureqa/error.hpp"

namespace gestureqa::media {
namespace {

std::uint32_t u32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t(p[3]) << 24);
}
std::uint16_t u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MediaError("cannot open audio file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw MediaError(where + "not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw MediaError(where + "short fmt chunk");
      format = u16(chunk + 8);
      channels = u16(chunk + 10);
      rate = u32(chunk + 12);
      bits = u16(chunk + 22);
      if (format == 0xFFFE && avail >= 26) format = u16(chunk + 8 + 24);  // extensible
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || rate == 0) throw MediaError(where + "missing fmt chunk");
  if (data == nullptr) throw MediaError(where + "missing data chunk");
  const bool pcm = format == 1;
  const bool ieee = format == 3;
  if (!(pcm && (bits == 16 || bits == 24 || bits == 32)) && !(ieee && bits == 32)) {
    throw MediaError(where + "unsupported sample format " + std::to_string(format) + "/" +
                     std::to_string(bits) + " bits");
  }
  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  Waveform wave;
  wave.sample_rate = rate;
  wave.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* s = data + (i * channels + c) * width;
      double v = 0.0;
      if (ieee) {
        float f;
        std::memcpy(&f, s, 4);
        v = f;
      } else if (bits == 16) {
        v = static_cast<std::int16_t>(u16(s)) / 32768.0;
      } else if (bits == 24) {
        std::int32_t x = s[0] | (s[1] << 8) | (s[2] << 16);
        if (x & 0x800000) x -= 0x1000000;
        v = x / 8388608.0;
      } else {
        v = static_cast<std::int32_t>(u32(s)) / 2147483648.0;
      }
      acc += v;
    }
    wave.samples[i] = acc / channels;
  }
  return wave;
}

void write_wav(const Waveform& wave, const std::filesystem::path& path) {
  if (!(wave.sample_rate > 0.0)) throw MediaError("write_wav: sample rate must be positive");
  const auto rate = static_cast<std::uint32_t>(std::lround(wave.sample_rate));
  const auto data_bytes = static_cast<std::uint32_t>(wave.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : wave.samples) {
    const long q = std::clamp(std::lround(s * 32768.0), -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

Waveform resample(const Waveform& wave, double target_rate) {
  if (!(target_rate > 0.0)) throw MediaError("resample: target rate must be positive");
  if (wave.sample_rate == target_rate || wave.samples.empty()) {
    Waveform copy = wave;
    copy.sample_rate = target_rate;
    return copy;
  }
  const double ratio = wave.sample_rate / target_rate;
  const auto n = static_cast<std::size_t>(std::floor(wave.samples.size() / ratio));
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(n);
  const std::size_t last = wave.samples.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i * ratio;
    const auto i0 = std::min(static_cast<std::size_t>(x), last);
    const std::size_t i1 = std::min(i0 + 1, last);
    const double frac = x - static_cast<double>(i0);
    out.samples[i] = wave.samples[i0] * (1.0 - frac) + wave.samples[i1] * frac;
  }
  return out;
}

}  // namespace gestureqa::media
