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

#include "gestureqa/model/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <sstream>

namespace gestureqa::model {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "gestureqa-checkpoint";
constexpr int kVersion = 1;

json read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw CheckpointError("missing checkpoint manifest in " + dir.string(), {});
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("checkpoint manifest " + (dir / "manifest.json").string() + ": " + e.what());
  }
  if (doc.value("format", "") != kFormat) throw FormatError(dir.string() + ": not a gestureqa checkpoint");
  if (doc.value("version", 0) != kVersion) throw FormatError(dir.string() + ": unsupported checkpoint version");
  return doc;
}

}  // namespace

std::string CheckpointReport::summary() const {
  std::ostringstream os;
  os << loaded << " loaded";
  auto list = [&](const char* label, const std::vector<std::string>& names) {
    if (names.empty()) return;
    os << "; " << label << ":";
    for (const auto& n : names) os << ' ' << n;
  };
  list("missing", missing);
  list("unexpected", unexpected);
  list("mismatched", mismatched);
  return os.str();
}

void save_checkpoint(const nn::ParameterStore& store, const std::filesystem::path& dir, const json& metadata) {
  static_assert(std::endian::native == std::endian::little);
  std::filesystem::create_directories(dir);
  json entries = json::array();
  std::int64_t offset = 0;
  std::ofstream bin(dir / "parameters.bin", std::ios::binary);
  if (!bin) throw IoError("cannot write " + (dir / "parameters.bin").string());
  for (const auto& p : store) {
    entries.push_back({{"name", p.name}, {"shape", p.value.shape()}, {"offset", offset}});
    bin.write(reinterpret_cast<const char*>(p.value.data()), static_cast<std::streamsize>(p.value.size() * 8));
    offset += p.value.size();
  }
  if (!bin) throw IoError("failed writing " + (dir / "parameters.bin").string());
  json doc = {{"format", kFormat}, {"version", kVersion}, {"parameters", entries}, {"metadata", metadata}};
  std::ofstream out(dir / "manifest.json");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + (dir / "manifest.json").string());
}

json read_checkpoint_metadata(const std::filesystem::path& dir) {
  return read_manifest(dir).value("metadata", json::object());
}

CheckpointReport load_checkpoint(nn::ParameterStore& store, const std::filesystem::path& dir,
                                 const std::vector<std::string>& optional_prefixes) {
  const json doc = read_manifest(dir);
  std::ifstream bin(dir / "parameters.bin", std::ios::binary);
  if (!bin) throw CheckpointError("missing parameters.bin in " + dir.string(), {});
  bin.seekg(0, std::ios::end);
  const std::int64_t available = static_cast<std::int64_t>(bin.tellg()) / 8;

  struct Entry {
    nn::Shape shape;
    std::int64_t offset;
  };
  std::map<std::string, Entry> on_disk;
  for (const auto& e : doc.at("parameters")) {
    on_disk.emplace(e.at("name").get<std::string>(), Entry{e.at("shape").get<nn::Shape>(), e.at("offset").get<std::int64_t>()});
  }

  CheckpointReport report;
  std::vector<std::pair<nn::Parameter*, const Entry*>> plan;
  for (auto& p : store) {
    auto it = on_disk.find(p.name);
    if (it == on_disk.end()) {
      const bool optional = std::any_of(optional_prefixes.begin(), optional_prefixes.end(),
                                        [&](const std::string& prefix) { return p.name.rfind(prefix, 0) == 0; });
      if (!optional) report.missing.push_back(p.name);
      continue;
    }
    if (it->second.shape != p.value.shape() || it->second.offset + p.value.size() > available) {
      report.mismatched.push_back(p.name + " " + nn::to_string(it->second.shape) + " vs " +
                                  nn::to_string(p.value.shape()));
      continue;
    }
    plan.emplace_back(&p, &it->second);
  }
  for (const auto& [name, entry] : on_disk) {
    if (store.find(name) == nullptr) report.unexpected.push_back(name);
  }
  if (!report.ok()) throw CheckpointError("checkpoint " + dir.string() + " does not match model: " + report.summary(), report);

  for (auto [param, entry] : plan) {
    bin.seekg(entry->offset * 8);
    bin.read(reinterpret_cast<char*>(param->value.data()), static_cast<std::streamsize>(param->value.size() * 8));
    if (!bin) throw FormatError("truncated parameters.bin in " + dir.string());
    ++report.loaded;
  }
  return report;
}

}  // namespace gestureqa::model
