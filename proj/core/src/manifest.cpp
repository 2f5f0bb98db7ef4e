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

#include "gestureqa/manifest.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "gestureqa/error.hpp"
#include "gestureqa/media/video.hpp"
#include "gestureqa/media/wav.hpp"
#include "gestureqa/motion_io.hpp"

namespace gestureqa {
namespace {

using nlohmann::json;

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

template <class T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError(where + "." + key + ": missing field");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(where + "." + key + ": wrong type");
  }
}

}  // namespace

DatasetManifest parse_manifest(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("manifest parse error at line " + std::to_string(line_of(text, e.byte)) + ": " +
                      e.what());
  }
  DatasetManifest m;
  m.version = field<std::string>(doc, "version", "manifest");
  m.motion_dim = field<std::size_t>(doc, "motion_dim", "manifest");
  if (!doc.contains("samples") || !doc["samples"].is_array()) {
    throw FormatError("manifest.samples: missing or not an array");
  }
  const auto& samples = doc["samples"];
  m.samples.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string where = "samples[" + std::to_string(i) + "]";
    const json& s = samples[i];
    SampleRecord r;
    r.sample_id = field<std::string>(s, "sample_id", where);
    const auto method = field<std::string>(s, "method", where);
    const auto parsed_method = parse_method(method);
    if (!parsed_method) throw FormatError(where + ".method: unknown method '" + method + "'");
    r.method = *parsed_method;
    if (!s.contains("audio")) throw FormatError(where + ".audio: missing field");
    const json& a = s["audio"];
    const std::string aw = where + ".audio";
    r.audio.id = field<std::string>(a, "id", aw);
    r.audio.path = field<std::string>(a, "path", aw);
    r.audio.sample_rate = field<double>(a, "sample_rate", aw);
    r.audio.duration = field<double>(a, "duration", aw);
    const auto emotion = field<std::string>(a, "emotion", aw);
    const auto parsed_emotion = parse_emotion(emotion);
    if (!parsed_emotion) throw FormatError(aw + ".emotion: unknown emotion '" + emotion + "'");
    r.audio.emotion = *parsed_emotion;
    r.audio.speaker_id = field<std::string>(a, "speaker_id", aw);
    r.motion_path = field<std::string>(s, "motion_path", where);
    r.video_path = field<std::string>(s, "video_path", where);
    m.samples.push_back(std::move(r));
  }
  validate_manifest(m);
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

std::string dump_manifest(const DatasetManifest& manifest) {
  json doc;
  doc["version"] = manifest.version;
  doc["motion_dim"] = manifest.motion_dim;
  json samples = json::array();
  for (const auto& s : manifest.samples) {
    samples.push_back({
        {"sample_id", s.sample_id},
        {"method", to_string(s.method)},
        {"audio",
         {{"id", s.audio.id},
          {"path", s.audio.path.generic_string()},
          {"sample_rate", s.audio.sample_rate},
          {"duration", s.audio.duration},
          {"emotion", to_string(s.audio.emotion)},
          {"speaker_id", s.audio.speaker_id}}},
        {"motion_path", s.motion_path.generic_string()},
        {"video_path", s.video_path.generic_string()},
    });
  }
  doc["samples"] = std::move(samples);
  return doc.dump(2) + "\n";
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  validate_manifest(manifest);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << dump_manifest(manifest);
  if (!out) throw IoError("failed writing manifest " + path.string());
}

void validate_manifest(const DatasetManifest& manifest) {
  if (manifest.motion_dim == 0 && !manifest.samples.empty()) {
    throw ValidationError("manifest motion_dim must be positive");
  }
  std::unordered_set<std::string> ids;
  std::set<std::pair<std::string, SourceMethod>> pairs;
  std::unordered_map<std::string, const AudioClip*> clips;
  for (const auto& s : manifest.samples) {
    const std::string who = "sample '" + s.sample_id + "'";
    if (!ids.insert(s.sample_id).second) throw ValidationError("duplicate sample_id '" + s.sample_id + "'");
    if (!pairs.emplace(s.audio.id, s.method).second) {
      throw ValidationError(who + ": (audio, method) pair appears more than once");
    }
    if (s.sample_id != make_sample_id(s.audio.id, s.method)) {
      throw ValidationError(who + ": id must be '" + make_sample_id(s.audio.id, s.method) + "'");
    }
    if (!(s.audio.duration > 0.0) || !std::isfinite(s.audio.duration)) {
      throw ValidationError(who + ": audio duration must be positive");
    }
    if (!(s.audio.sample_rate > 0.0) || !std::isfinite(s.audio.sample_rate)) {
      throw ValidationError(who + ": audio sample_rate must be positive");
    }
    auto [it, fresh] = clips.emplace(s.audio.id, &s.audio);
    if (!fresh && !(*it->second == s.audio)) {
      throw ValidationError(who + ": audio id '" + s.audio.id + "' is defined inconsistently");
    }
  }
}

std::vector<std::string> check_media_consistency(const DatasetManifest& manifest,
                                                 const std::filesystem::path& media_root) {
  std::vector<std::string> problems;
  auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() ? p : media_root / p; };
  for (const auto& s : manifest.samples) {
    const std::string who = s.sample_id + ": ";
    try {
      const MotionSequence motion = read_motion(resolve(s.motion_path));
      if (motion.dim != manifest.motion_dim) {
        problems.push_back(who + "motion dim " + std::to_string(motion.dim) + " != manifest " +
                           std::to_string(manifest.motion_dim));
      }
      const double frame = 1.0 / motion.fps;
      const double tolerance = frame + 1e-9;
      if (std::abs(motion.duration() - s.audio.duration) > tolerance) {
        problems.push_back(who + "motion/audio durations differ by more than one frame");
      }
      const auto video = media::FrameDirectoryVideo::open(resolve(s.video_path));
      if (std::abs(video.duration() - s.audio.duration) > tolerance) {
        problems.push_back(who + "video/audio durations differ by more than one frame");
      }
    } catch (const Error& e) {
      problems.push_back(who + e.what());
    }
  }
  return problems;
}

CompositionReport validate_composition(const DatasetManifest& manifest, const DesignTargets& design) {
  CompositionReport report;
  std::set<std::string> audio_seen;
  for (const auto& s : manifest.samples) {
    ++report.samples_per_method[s.method];
    if (audio_seen.insert(s.audio.id).second) ++report.audio_per_emotion[s.audio.emotion];
  }
  report.distinct_audio = audio_seen.size();
  const std::size_t design_audio = design.emotions * design.audio_per_emotion;
  if (report.samples_per_method.size() != design.methods) {
    report.flags.push_back("method count " + std::to_string(report.samples_per_method.size()) + " ≠ " +
                           std::to_string(design.methods));
  }
  if (report.audio_per_emotion.size() != design.emotions) {
    report.flags.push_back("emotion count " + std::to_string(report.audio_per_emotion.size()) + " ≠ " +
                           std::to_string(design.emotions));
  }
  if (report.distinct_audio != design_audio) {
    report.flags.push_back("reduced scale: " + std::to_string(report.distinct_audio) + " audio ≠ " +
                           std::to_string(design_audio));
  }
  for (const auto& [emotion, count] : report.audio_per_emotion) {
    if (count != design.audio_per_emotion) {
      report.flags.push_back("emotion " + std::string(to_string(emotion)) + ": " + std::to_string(count) +
                             " audio ≠ " + std::to_string(design.audio_per_emotion));
    }
  }
  for (const auto& [method, count] : report.samples_per_method) {
    if (count != design_audio) {
      report.flags.push_back("method " + std::string(to_string(method)) + ": " + std::to_string(count) +
                             " samples ≠ " + std::to_string(design_audio));
    }
  }
  return report;
}

}  // namespace gestureqa
