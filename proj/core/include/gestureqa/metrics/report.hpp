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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestureqa/subjective/ratings.hpp"

namespace gestureqa::metrics {

struct DimensionMetrics {
  double srcc = 0.0;
  double plcc = 0.0;
  double krcc = 0.0;
  double rmse = 0.0;
};

struct MetricReport {
  DimensionMetrics quality;
  DimensionMetrics consistency;
  std::size_t n = 0;

  const DimensionMetrics& operator[](subjective::Dimension d) const {
    return d == subjective::Dimension::kQuality ? quality : consistency;
  }
};

// {"quality": {"srcc": .., "plcc": .., "krcc": .., "rmse": ..}, "consistency": {..}, "n": ..}
void to_json(nlohmann::json& j, const MetricReport& r);
void from_json(const nlohmann::json& j, MetricReport& r);
void save_report(const std::filesystem::path& path, const MetricReport& r);

struct Prediction {
  std::string sample_id;
  double quality = 0.0;
  double consistency = 0.0;
};

struct EvalOptions {
  // Map predictions through a fitted four-parameter logistic before scoring.
  bool logistic_fit = false;
};

// Scores predictions against MOS. Throws NotFoundError naming a predicted
// sample without an aggregate and ContractError for n < 2.
MetricReport evaluate(const std::vector<Prediction>& predictions,
                      const std::vector<subjective::AggregateRecord>& aggregates, const EvalOptions& options = {});

}  // namespace gestureqa::metrics
