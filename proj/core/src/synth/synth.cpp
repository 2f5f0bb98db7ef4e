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

#include "gestureqa/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "gestureqa/error.hpp"
#include "gestureqa/hash.hpp"
#include "gestureqa/json_util.hpp"
#include "gestureqa/manifest.hpp"
#include "gestureqa/media/video.hpp"
#include "gestureqa/motion_io.hpp"

namespace gestureqa::synth {

using nlohmann::json;
using Rng = std::mt19937_64;

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finaliser
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(mix(mix(mix(seed ^ mix(tag)) ^ a) ^ mix(b + 0x51ed27ULL)));
}

enum Tag : std::uint64_t { kAudioTag = 1, kPlantTag, kCongruenceTag, kMotionTag, kAudioSignalTag, kRaterTag, kVoteTag };

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

double squash(double raw) { return 10.0 + 80.0 / (1.0 + std::exp(-(raw - 50.0) / 20.0)); }
// Planted score mapped to (0, 1).
double unit(double planted) { return std::clamp((planted - 10.0) / 80.0, 0.0, 1.0); }

std::string audio_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "a%04zu", i);
  return buf;
}

// SMPL-X body joint j (1-based, after the global orientation) and axis.
constexpr std::size_t body_dim(std::size_t joint, std::size_t axis) { return 3 + 3 * (joint - 1) + axis; }
constexpr std::size_t kBodyDims = 66;
constexpr std::size_t kSpine[] = {3, 6, 9};
constexpr std::size_t kNeck = 12, kHead = 15;
constexpr std::size_t kLeftShoulder = 16, kRightShoulder = 17, kLeftElbow = 18, kRightElbow = 19;
constexpr std::size_t kLeftHip = 1, kRightHip = 2;

struct EmotionVoice {
  double f0;
  double noise;
};

EmotionVoice voice(EmotionLabel e) {
  switch (e) {
    case EmotionLabel::kNeutral: return {180.0, 0.08};
    case EmotionLabel::kHappiness: return {260.0, 0.12};
    case EmotionLabel::kAnger: return {220.0, 0.35};
    case EmotionLabel::kSadness: return {140.0, 0.05};
    case EmotionLabel::kContempt: return {170.0, 0.20};
    case EmotionLabel::kSurprise: return {300.0, 0.18};
    case EmotionLabel::kFear: return {240.0, 0.28};
    case EmotionLabel::kDisgust: return {160.0, 0.24};
  }
  return {180.0, 0.1};
}

double beat_pulse(double t, double hz, double phase) {
  const double s = std::max(0.0, std::sin(2.0 * kPi * hz * t + phase));
  return s * s;
}

}  // namespace

std::map<SourceMethod, double> SynthConfig::default_quality_gap() {
  return {{SourceMethod::kGroundTruth, 28.0}, {SourceMethod::kEmage, 14.0},       {SourceMethod::kMambaTalk, 6.0},
          {SourceMethod::kSynTalker, 0.0},    {SourceMethod::kLoM, -6.0},         {SourceMethod::kMotionCraft, -14.0},
          {SourceMethod::kGestureLSM, -20.0}};
}

std::map<SourceMethod, double> SynthConfig::default_consistency_gap() {
  return {{SourceMethod::kGroundTruth, 24.0}, {SourceMethod::kEmage, 4.0},        {SourceMethod::kMambaTalk, 12.0},
          {SourceMethod::kSynTalker, -4.0},   {SourceMethod::kLoM, 8.0},          {SourceMethod::kMotionCraft, -16.0},
          {SourceMethod::kGestureLSM, -10.0}};
}

std::map<SourceMethod, std::map<EmotionLabel, double>> SynthConfig::default_congruence_rates() {
  const std::map<SourceMethod, double> base = {
      {SourceMethod::kGroundTruth, 0.85}, {SourceMethod::kEmage, 0.6}, {SourceMethod::kMambaTalk, 0.55},
      {SourceMethod::kSynTalker, 0.7},    {SourceMethod::kLoM, 0.5},   {SourceMethod::kMotionCraft, 0.45},
      {SourceMethod::kGestureLSM, 0.65}};
  const std::map<EmotionLabel, double> shift = {
      {EmotionLabel::kNeutral, 0.1},   {EmotionLabel::kHappiness, 0.05}, {EmotionLabel::kAnger, 0.0},
      {EmotionLabel::kSadness, -0.1},  {EmotionLabel::kContempt, -0.15}, {EmotionLabel::kSurprise, 0.0},
      {EmotionLabel::kFear, -0.1},     {EmotionLabel::kDisgust, -0.05}};
  std::map<SourceMethod, std::map<EmotionLabel, double>> out;
  for (const auto& [m, p] : base) {
    for (const auto& [e, d] : shift) out[m][e] = std::clamp(p + d, 0.0, 1.0);
  }
  return out;
}

double SynthConfig::quality_offset(SourceMethod m) const {
  auto it = quality_gap.find(m);
  return it == quality_gap.end() ? 0.0 : it->second;
}

double SynthConfig::consistency_offset(SourceMethod m) const {
  auto it = consistency_gap.find(m);
  return it == consistency_gap.end() ? 0.0 : it->second;
}

double SynthConfig::congruence_rate(SourceMethod m, EmotionLabel e) const {
  auto it = congruence_rates.find(m);
  if (it == congruence_rates.end()) return 0.5;
  auto jt = it->second.find(e);
  return jt == it->second.end() ? 0.5 : jt->second;
}

void SynthConfig::validate() const {
  if (n_audio == 0 || n_audio % kAllEmotions.size() != 0) {
    throw ConfigError("synth.n_audio must be a positive multiple of 8, got " + std::to_string(n_audio));
  }
  if (methods.empty()) throw ConfigError("synth.methods is empty");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      if (methods[i] == methods[j]) throw ConfigError("synth.methods lists " + std::string(to_string(methods[i])) + " twice");
    }
  }
  for (const auto& [m, rates] : congruence_rates) {
    for (const auto& [e, p] : rates) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("synth.congruence_rates." + std::string(to_string(m)) + "." + std::string(to_string(e)) +
                          " must lie in [0, 1]");
      }
    }
  }
  if (raters == 0) throw ConfigError("synth.raters must be >= 1");
  if (!(rater_noise >= 0.0)) throw ConfigError("synth.rater_noise must be >= 0");
  if (!(vote_error >= 0.0 && vote_error < 0.5)) throw ConfigError("synth.vote_error must lie in [0, 0.5)");
  if (!(sample_spread >= 0.0)) throw ConfigError("synth.sample_spread must be >= 0");
  if (!(duration > 0.0)) throw ConfigError("synth.duration must be > 0");
  if (!(motion_fps > 0.0) || !(video_fps > 0.0)) throw ConfigError("synth fps values must be > 0");
  if (image_size < 16) throw ConfigError("synth.image_size must be >= 16");
  if (!(sample_rate >= 8000.0)) throw ConfigError("synth.sample_rate must be >= 8000");
  if (motion_dim < kBodyDims) throw ConfigError("synth.motion_dim must be >= 66 (global orientation + body pose)");
}

namespace {

json method_map_json(const std::map<SourceMethod, double>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[std::string(to_string(k))] = v;
  return j;
}

SourceMethod method_key(const std::string& s, const std::string& path) {
  auto m = parse_method(s);
  if (!m) throw ConfigError(path + ": unknown method '" + s + "'");
  return *m;
}

void merge_method_map(const json& j, const std::string& path, std::map<SourceMethod, double>& out) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object keyed by method");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw ConfigError(path + "." + k + ": expected a number");
    out[method_key(k, path)] = v.get<double>();
  }
}

}  // namespace

void to_json(json& j, const SynthConfig& c) {
  json methods = json::array();
  for (SourceMethod m : c.methods) methods.push_back(std::string(to_string(m)));
  json rates = json::object();
  for (const auto& [m, per] : c.congruence_rates) {
    json row = json::object();
    for (const auto& [e, p] : per) row[std::string(to_string(e))] = p;
    rates[std::string(to_string(m))] = row;
  }
  j = {{"n_audio", c.n_audio},
       {"methods", methods},
       {"seed", c.seed},
       {"quality_gap", method_map_json(c.quality_gap)},
       {"consistency_gap", method_map_json(c.consistency_gap)},
       {"sample_spread", c.sample_spread},
       {"congruence_rates", rates},
       {"raters", c.raters},
       {"rater_noise", c.rater_noise},
       {"adversary", c.adversary},
       {"vote_error", c.vote_error},
       {"duration", c.duration},
       {"motion_fps", c.motion_fps},
       {"video_fps", c.video_fps},
       {"image_size", c.image_size},
       {"sample_rate", c.sample_rate},
       {"motion_dim", c.motion_dim},
       {"media", c.media == MediaMode::kFull ? "full" : "none"}};
}

void from_json(const json& j, SynthConfig& c) {
  StrictObjectReader r(j, "synth");
  r.read("n_audio", c.n_audio);
  if (const json* m = r.child("methods")) {
    if (!m->is_array()) throw ConfigError("synth.methods: expected an array");
    c.methods.clear();
    for (const auto& v : *m) {
      if (!v.is_string()) throw ConfigError("synth.methods: expected method names");
      c.methods.push_back(method_key(v.get<std::string>(), "synth.methods"));
    }
  }
  r.read("seed", c.seed);
  if (const json* g = r.child("quality_gap")) merge_method_map(*g, "synth.quality_gap", c.quality_gap);
  if (const json* g = r.child("consistency_gap")) merge_method_map(*g, "synth.consistency_gap", c.consistency_gap);
  r.read("sample_spread", c.sample_spread);
  if (const json* rates = r.child("congruence_rates")) {
    if (!rates->is_object()) throw ConfigError("synth.congruence_rates: expected an object keyed by method");
    for (const auto& [k, v] : rates->items()) {
      const std::string path = "synth.congruence_rates." + k;
      const SourceMethod m = method_key(k, "synth.congruence_rates");
      if (v.is_number()) {
        for (EmotionLabel e : kAllEmotions) c.congruence_rates[m][e] = v.get<double>();
      } else if (v.is_object()) {
        for (const auto& [ek, ev] : v.items()) {
          auto e = parse_emotion(ek);
          if (!e) throw ConfigError(path + ": unknown emotion '" + ek + "'");
          if (!ev.is_number()) throw ConfigError(path + "." + ek + ": expected a number");
          c.congruence_rates[m][*e] = ev.get<double>();
        }
      } else {
        throw ConfigError(path + ": expected a number or an object keyed by emotion");
      }
    }
  }
  r.read("raters", c.raters);
  r.read("rater_noise", c.rater_noise);
  r.read("adversary", c.adversary);
  r.read("vote_error", c.vote_error);
  r.read("duration", c.duration);
  r.read("motion_fps", c.motion_fps);
  r.read("video_fps", c.video_fps);
  r.read("image_size", c.image_size);
  r.read("sample_rate", c.sample_rate);
  r.read("motion_dim", c.motion_dim);
  std::string media = c.media == MediaMode::kFull ? "full" : "none";
  r.read("media", media);
  if (media == "full") {
    c.media = MediaMode::kFull;
  } else if (media == "none") {
    c.media = MediaMode::kNone;
  } else {
    throw ConfigError("synth.media must be 'full' or 'none', got '" + media + "'");
  }
  r.finish();
  c.validate();
}

SynthDataset plan_dataset(const SynthConfig& config) {
  config.validate();
  SynthDataset out;
  out.manifest.motion_dim = config.motion_dim;
  struct AudioPlan {
    AudioClip clip;
    double beat_hz;
    double beat_phase;
  };
  std::vector<AudioPlan> audio;
  for (std::size_t a = 0; a < config.n_audio; ++a) {
    Rng rng = stream(config.seed, kAudioTag, a);
    AudioPlan p;
    p.clip.id = audio_name(a);
    p.clip.path = "audio/" + p.clip.id + ".wav";
    p.clip.sample_rate = config.sample_rate;
    p.clip.duration = config.duration;
    p.clip.emotion = kAllEmotions[a % kAllEmotions.size()];
    p.clip.speaker_id = "spk" + std::to_string(a % 5);
    p.beat_hz = uniform(rng, 1.2, 2.4);
    p.beat_phase = uniform(rng, 0.0, 2.0 * kPi);
    audio.push_back(std::move(p));
  }
  for (std::size_t a = 0; a < audio.size(); ++a) {
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      const SourceMethod m = config.methods[mi];
      SampleRecord s;
      s.sample_id = make_sample_id(audio[a].clip.id, m);
      s.audio = audio[a].clip;
      s.method = m;
      s.motion_path = "motion/" + s.sample_id + ".bin";
      s.video_path = "video/" + s.sample_id;
      Rng rng = stream(config.seed, kPlantTag, a, static_cast<std::uint64_t>(m));
      PlantedSample p;
      p.sample_id = s.sample_id;
      p.audio_id = audio[a].clip.id;
      p.method = m;
      p.emotion = audio[a].clip.emotion;
      p.quality = squash(50.0 + config.quality_offset(m) + config.sample_spread * normal(rng));
      p.consistency = squash(50.0 + config.consistency_offset(m) + config.sample_spread * normal(rng));
      p.beat_hz = audio[a].beat_hz;
      p.beat_phase = audio[a].beat_phase;
      out.manifest.samples.push_back(std::move(s));
      out.planted.push_back(p);
    }
  }
  // Exact per-stratum congruent counts, so that recovered rates are not
  // subject to sampling noise in the planted labels themselves.
  for (SourceMethod m : config.methods) {
    for (EmotionLabel e : kAllEmotions) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < out.planted.size(); ++i) {
        if (out.planted[i].method == m && out.planted[i].emotion == e) idx.push_back(i);
      }
      if (idx.empty()) continue;
      Rng rng = stream(config.seed, kCongruenceTag, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(e));
      std::shuffle(idx.begin(), idx.end(), rng);
      const auto k = static_cast<std::size_t>(std::llround(config.congruence_rate(m, e) * static_cast<double>(idx.size())));
      for (std::size_t i = 0; i < idx.size(); ++i) out.planted[idx[i]].congruent = i < k;
    }
  }
  validate_manifest(out.manifest);
  return out;
}

media::Waveform synth_audio(const PlantedSample& sample, const SynthConfig& config) {
  const EmotionVoice v = voice(sample.emotion);
  Rng rng = stream(config.seed, kAudioSignalTag, fnv1a64(sample.audio_id));
  media::Waveform w;
  w.sample_rate = config.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(config.duration * config.sample_rate));
  w.samples.resize(n);
  const double vibrato_hz = uniform(rng, 4.0, 6.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / config.sample_rate;
    const double f = v.f0 * (1.0 + 0.02 * std::sin(2.0 * kPi * vibrato_hz * t));
    phase += 2.0 * kPi * f / config.sample_rate;
    double tone = 0.0;
    for (int h = 1; h <= 4; ++h) tone += std::sin(h * phase) / h;
    const double env = 0.3 + 0.7 * beat_pulse(t, sample.beat_hz, sample.beat_phase);
    const double x = env * (0.25 * tone / 2.08 + 0.25 * v.noise * normal(rng));
    w.samples[i] = std::clamp(x, -1.0, 1.0);
  }
  return w;
}

MotionSequence synth_motion(const PlantedSample& sample, const SynthConfig& config) {
  Rng rng = stream(config.seed, kMotionTag, fnv1a64(sample.sample_id));
  MotionSequence m;
  m.fps = config.motion_fps;
  m.dim = config.motion_dim;
  m.frames = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.duration * config.motion_fps)));
  m.values.assign(m.frames * m.dim, 0.0);

  struct Wave {
    double amp, hz, phase;
  };
  std::vector<std::array<Wave, 2>> base(m.dim);
  for (std::size_t d = 0; d < m.dim; ++d) {
    const double amp = d < kBodyDims ? 0.06 : 0.04;
    for (auto& w : base[d]) w = {amp * uniform(rng, 0.5, 1.0), uniform(rng, 0.15, 0.6), uniform(rng, 0.0, 2.0 * kPi)};
  }
  const double uq = unit(sample.quality);
  const double uc = unit(sample.consistency);
  const double jitter = 0.01 + 0.10 * (1.0 - uq);
  const double slump = 0.5 * (1.0 - uq);
  const double stroke = 0.2 + 1.0 * uc;
  // Poorly aligned gestures land off the audio beat.
  const double lag = kPi * (1.0 - uc);

  for (std::size_t t = 0; t < m.frames; ++t) {
    const double time = static_cast<double>(t) / m.fps;
    double* row = m.values.data() + t * m.dim;
    for (std::size_t d = 0; d < m.dim; ++d) {
      double v = 0.0;
      for (const auto& w : base[d]) v += w.amp * std::sin(2.0 * kPi * w.hz * time + w.phase);
      if (d < kBodyDims) v += jitter * normal(rng);
      row[d] = v;
    }
    for (std::size_t j : kSpine) row[body_dim(j, 0)] += slump;
    row[body_dim(kNeck, 0)] += 0.5 * slump;
    const double pulse = stroke * beat_pulse(time, sample.beat_hz, sample.beat_phase + lag);
    row[body_dim(kLeftShoulder, 2)] += pulse;
    row[body_dim(kRightShoulder, 2)] -= pulse;
    row[body_dim(kLeftElbow, 2)] += 0.6 * pulse;
    row[body_dim(kRightElbow, 2)] -= 0.6 * pulse;
  }
  return m;
}

double slump_of(std::span<const double> pose) {
  double s = 0.0;
  for (std::size_t j : kSpine) s += pose[body_dim(j, 0)];
  return s;
}

double stroke_of(std::span<const double> pose) {
  return pose[body_dim(kLeftShoulder, 2)] - pose[body_dim(kRightShoulder, 2)];
}

namespace {

struct Canvas {
  media::Image img;
  double scale;

  void disc(double cx, double cy, double r, const std::array<std::uint8_t, 3>& c) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) std::copy(c.begin(), c.end(), img.pixel(x, y));
      }
    }
  }

  void line(double x0, double y0, double x1, double y1, const std::array<std::uint8_t, 3>& c) {
    const double len = std::hypot(x1 - x0, y1 - y0);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
    for (int i = 0; i <= steps; ++i) {
      const double a = static_cast<double>(i) / steps;
      disc(x0 + a * (x1 - x0), y0 + a * (y1 - y0), 1.1 * scale, c);
    }
  }
};

}  // namespace

media::Image render_pose(std::span<const double> pose, int size) {
  Canvas cv{media::Image(size, size), size / 64.0};
  std::fill(cv.img.rgb.begin(), cv.img.rgb.end(), std::uint8_t{235});
  const double s = cv.scale;
  auto at = [&](std::size_t j, std::size_t axis) { return pose[body_dim(j, axis)]; };

  const double px = 32.0 * s, py = 44.0 * s;
  const double lean = pose[0] + slump_of(pose);
  const double tx = px + 16.0 * s * std::sin(lean), ty = py - 16.0 * s * std::cos(lean);
  const double head = lean + at(kNeck, 0) + at(kHead, 0);
  const double hx = tx + 6.0 * s * std::sin(head), hy = ty - 6.0 * s * std::cos(head);

  const std::array<std::uint8_t, 3> torso{40, 60, 160}, arm{200, 60, 40}, leg{40, 140, 60}, skull{120, 80, 160};
  // legs
  for (int side : {-1, 1}) {
    const double hip_x = px + side * 3.0 * s;
    const double ang = 0.15 * side + at(side < 0 ? kLeftHip : kRightHip, 0);
    cv.line(hip_x, py, hip_x + 14.0 * s * std::sin(ang), py + 14.0 * s * std::cos(ang), leg);
  }
  cv.line(px, py, tx, ty, torso);
  // arms hang at 0.3 rad and rise with the shoulder/elbow angles
  for (int side : {-1, 1}) {
    const double sx = tx + side * 5.0 * s, sy = ty + 1.0 * s;
    const double upper = 0.3 + (side < 0 ? at(kLeftShoulder, 2) : -at(kRightShoulder, 2));
    const double fore = upper + (side < 0 ? at(kLeftElbow, 2) : -at(kRightElbow, 2));
    const double ex = sx + side * 9.0 * s * std::sin(upper), ey = sy + 9.0 * s * std::cos(upper);
    const double wx = ex + side * 8.0 * s * std::sin(fore), wy = ey + 8.0 * s * std::cos(fore);
    cv.line(tx, ty, sx, sy, torso);
    cv.line(sx, sy, ex, ey, arm);
    cv.line(ex, ey, wx, wy, arm);
  }
  cv.disc(hx, hy, 4.0 * s, skull);
  return std::move(cv.img);
}

std::vector<media::Image> render_video(const MotionSequence& motion, const SynthConfig& config) {
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(motion.duration() * config.video_fps)));
  std::vector<media::Image> frames;
  frames.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto t = static_cast<std::size_t>(std::llround(static_cast<double>(k) * motion.fps / config.video_fps));
    frames.push_back(render_pose(motion.row(std::min(t, motion.frames - 1)), config.image_size));
  }
  return frames;
}

namespace {

json planted_json(const std::vector<PlantedSample>& planted) {
  json arr = json::array();
  for (const auto& p : planted) {
    arr.push_back({{"sample_id", p.sample_id},
                   {"method", std::string(to_string(p.method))},
                   {"emotion", std::string(to_string(p.emotion))},
                   {"quality", p.quality},
                   {"consistency", p.consistency},
                   {"congruent", p.congruent},
                   {"beat_hz", p.beat_hz}});
  }
  return arr;
}

}  // namespace

SynthDataset generate_dataset(const SynthConfig& config, const std::filesystem::path& out_dir) {
  SynthDataset ds = plan_dataset(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  if (config.media == MediaMode::kFull) {
    std::filesystem::create_directories(out_dir / "audio");
    std::filesystem::create_directories(out_dir / "motion");
    std::filesystem::create_directories(out_dir / "video");
    for (std::size_t i = 0; i < ds.planted.size(); ++i) {
      const PlantedSample& p = ds.planted[i];
      const SampleRecord& s = ds.manifest.samples[i];
      if (i == 0 || ds.planted[i - 1].audio_id != p.audio_id) {
        media::write_wav(synth_audio(p, config), out_dir / s.audio.path);
      }
      const MotionSequence motion = synth_motion(p, config);
      write_motion(motion, out_dir / s.motion_path);
      media::FrameDirectoryVideo::write(out_dir / s.video_path, render_video(motion, config), config.video_fps);
    }
  }
  save_manifest(ds.manifest, out_dir / "manifest.json");
  std::ofstream planted(out_dir / "planted.json", std::ios::trunc);
  if (!planted) throw IoError("cannot write " + (out_dir / "planted.json").string());
  planted << planted_json(ds.planted).dump(2) << '\n';
  return ds;
}

std::string rater_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rater_%02zu", index + 1);
  return buf;
}

std::string adversary_id() { return "rater_adv"; }

std::vector<subjective::RatingRecord> generate_ratings(const SynthDataset& dataset, const SynthConfig& config) {
  config.validate();
  const std::size_t total = config.raters + (config.adversary ? 1 : 0);
  std::vector<subjective::RatingRecord> out;
  out.reserve(total * dataset.planted.size());
  for (std::size_t r = 0; r < total; ++r) {
    const bool adversarial = r == config.raters;
    Rng rng = stream(config.seed, kRaterTag, r);
    // Private response scale that keeps planted scores inside the slider.
    const double a = uniform(rng, 0.45, 1.0);
    const double b = uniform(rng, -1.0, 1.0) * 0.8 * (50.0 - 40.0 * a);
    Rng votes = stream(config.seed, kVoteTag, r);
    const std::string id = adversarial ? adversary_id() : rater_id(r);
    double clock = 1.7e9 + 1.0e5 * static_cast<double>(r);
    for (const auto& p : dataset.planted) {
      auto respond = [&](double planted) {
        double v = 50.0 + a * (planted - 50.0 + config.rater_noise * normal(rng)) + b;
        if (adversarial) v = 101.0 - v;
        return std::clamp(v, 1.0, 100.0);
      };
      subjective::RatingRecord rec;
      rec.rater_id = id;
      rec.sample_id = p.sample_id;
      rec.quality_raw = respond(p.quality);
      rec.consistency_raw = respond(p.consistency);
      const bool flip = std::uniform_real_distribution<double>(0.0, 1.0)(votes) < config.vote_error;
      rec.congruent = adversarial ? !p.congruent : (p.congruent != flip);
      clock += 7.0;
      rec.timestamp = clock;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<subjective::RatingRecord> generate_ratings(const DatasetManifest& manifest, const SynthConfig& config) {
  SynthDataset ds = plan_dataset(config);
  if (ds.manifest.samples.size() != manifest.samples.size()) {
    throw ValidationError("manifest does not match the synth config (sample count differs)");
  }
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    if (ds.manifest.samples[i].sample_id != manifest.samples[i].sample_id) {
      throw ValidationError("manifest does not match the synth config at sample '" + manifest.samples[i].sample_id +
                            "'");
    }
  }
  return generate_ratings(ds, config);
}

}  // namespace gestureqa::synth
