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

#include "gestureqa/subjective/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "gestureqa/error.hpp"

namespace gestureqa::subjective {

namespace {

std::unordered_map<std::string, const SampleRecord*> index_manifest(const DatasetManifest& manifest) {
  std::unordered_map<std::string, const SampleRecord*> index;
  for (const auto& s : manifest.samples) index.emplace(s.sample_id, &s);
  return index;
}

const SampleRecord& join(const std::unordered_map<std::string, const SampleRecord*>& index,
                         const std::string& sample_id) {
  auto it = index.find(sample_id);
  if (it == index.end()) throw NotFoundError("sample '" + sample_id + "' is not in the manifest");
  return *it->second;
}

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

CongruenceTable emotion_congruence_accuracy(const std::vector<AggregateRecord>& aggregates,
                                            const DatasetManifest& manifest) {
  const auto index = index_manifest(manifest);
  CongruenceTable t;
  for (const auto& a : aggregates) {
    const SampleRecord& s = join(index, a.sample_id);
    const MethodEmotion key{s.method, s.audio.emotion};
    ++t.support[key];
    t.congruent[key] += a.esba ? 1 : 0;
  }
  for (const auto& [key, n] : t.support) {
    t.congruent.try_emplace(key, 0);
    t.accuracy[key] = static_cast<double>(t.congruent.at(key)) / static_cast<double>(n);
  }
  return t;
}

std::vector<MethodScoreRange> score_range_report(const std::vector<AggregateRecord>& aggregates,
                                                 const DatasetManifest& manifest) {
  if (aggregates.empty()) throw ContractError("score_range_report: no aggregates");
  const auto index = index_manifest(manifest);
  std::map<SourceMethod, std::vector<const AggregateRecord*>> groups;
  for (const auto& a : aggregates) groups[join(index, a.sample_id).method].push_back(&a);
  std::vector<MethodScoreRange> out;
  for (const auto& [method, rows] : groups) {
    MethodScoreRange r;
    r.method = method;
    r.count = rows.size();
    auto range = [&](Dimension d) {
      ScoreRange s{rows.front()->mos(d), 0.0, rows.front()->mos(d)};
      double sum = 0.0;
      for (const auto* a : rows) {
        s.min = std::min(s.min, a->mos(d));
        s.max = std::max(s.max, a->mos(d));
        sum += a->mos(d);
      }
      s.mean = sum / static_cast<double>(rows.size());
      return s;
    };
    r.quality = range(Dimension::kQuality);
    r.consistency = range(Dimension::kConsistency);
    out.push_back(r);
  }
  return out;
}

std::string congruence_csv(const CongruenceTable& table) {
  std::ostringstream out;
  out << "method,emotion,support,congruent,accuracy\n";
  for (const auto& [key, acc] : table.accuracy) {
    out << to_string(key.first) << ',' << to_string(key.second) << ',' << table.support.at(key) << ','
        << table.congruent.at(key) << ',' << fmt(acc) << '\n';
  }
  return out.str();
}

std::string congruence_markdown(const CongruenceTable& table) {
  std::set<SourceMethod> methods;
  for (const auto& [key, acc] : table.accuracy) methods.insert(key.first);
  std::ostringstream out;
  out << "| method |";
  for (EmotionLabel e : kAllEmotions) out << ' ' << to_string(e) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < kAllEmotions.size(); ++i) out << "---|";
  out << '\n';
  for (SourceMethod m : methods) {
    out << "| " << to_string(m) << " |";
    for (EmotionLabel e : kAllEmotions) {
      auto it = table.accuracy.find({m, e});
      out << ' ' << (it == table.accuracy.end() ? std::string("-") : fmt(it->second, "%.2f")) << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string score_range_csv(const std::vector<MethodScoreRange>& report) {
  std::ostringstream out;
  out << "method,count,quality_min,quality_mean,quality_max,consistency_min,consistency_mean,consistency_max\n";
  for (const auto& r : report) {
    out << to_string(r.method) << ',' << r.count << ',' << fmt(r.quality.min) << ',' << fmt(r.quality.mean) << ','
        << fmt(r.quality.max) << ',' << fmt(r.consistency.min) << ',' << fmt(r.consistency.mean) << ','
        << fmt(r.consistency.max) << '\n';
  }
  return out.str();
}

std::string score_range_markdown(const std::vector<MethodScoreRange>& report) {
  std::ostringstream out;
  out << "| method | n | quality min | quality mean | quality max | consistency min | consistency mean | "
         "consistency max |\n|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report) {
    out << "| " << to_string(r.method) << " | " << r.count << " | " << fmt(r.quality.min, "%.2f") << " | "
        << fmt(r.quality.mean, "%.2f") << " | " << fmt(r.quality.max, "%.2f") << " | "
        << fmt(r.consistency.min, "%.2f") << " | " << fmt(r.consistency.mean, "%.2f") << " | "
        << fmt(r.consistency.max, "%.2f") << " |\n";
  }
  return out.str();
}

}  // namespace gestureqa::subjective
