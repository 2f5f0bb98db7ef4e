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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gestureqa/subjective/ratings.hpp"
#include "gestureqa/types.hpp"

namespace gestureqa::subjective {

using MethodEmotion = std::pair<SourceMethod, EmotionLabel>;

struct CongruenceTable {
  std::map<MethodEmotion, double> accuracy;
  std::map<MethodEmotion, std::size_t> support;
  std::map<MethodEmotion, std::size_t> congruent;
};

// Fraction of congruent ESBA labels per (method, audio emotion). Throws
// NotFoundError naming any aggregate whose sample is not in the manifest.
CongruenceTable emotion_congruence_accuracy(const std::vector<AggregateRecord>& aggregates,
                                            const DatasetManifest& manifest);

struct ScoreRange {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct MethodScoreRange {
  SourceMethod method{};
  std::size_t count = 0;
  ScoreRange quality;
  ScoreRange consistency;
};

// Per-method min/mean/max of both MOS dimensions, in method enum order.
// Throws ContractError on empty input, NotFoundError on unjoined samples.
std::vector<MethodScoreRange> score_range_report(const std::vector<AggregateRecord>& aggregates,
                                                 const DatasetManifest& manifest);

std::string congruence_csv(const CongruenceTable& table);
std::string congruence_markdown(const CongruenceTable& table);
std::string score_range_csv(const std::vector<MethodScoreRange>& report);
std::string score_range_markdown(const std::vector<MethodScoreRange>& report);

}  // namespace gestureqa::subjective
