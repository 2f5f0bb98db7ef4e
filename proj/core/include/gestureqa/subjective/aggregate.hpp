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
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gestureqa/subjective/ratings.hpp"

namespace gestureqa::subjective {

// Per-rater standardisation with the population std, mapped through
// 100 * (z + 3) / 6 and clipped to [0, 100]. A constant rater maps to 50.
// Throws ContractError on empty input.
std::vector<double> zscore_normalize(std::span<const double> raw);

// One rating after per-rater normalisation of both dimensions.
struct NormalizedRating {
  std::string rater_id;
  std::string sample_id;
  double quality = 0.0;
  double consistency = 0.0;
  bool congruent = false;

  double score(Dimension d) const { return d == Dimension::kQuality ? quality : consistency; }
};

// Expects one record per (rater, sample); see latest_per_pair().
std::vector<NormalizedRating> normalize_table(const std::vector<RatingRecord>& records);

struct ExclusionConfig {
  double threshold = 0.2;       // minimum leave-one-out SRCC
  std::size_t min_overlap = 3;  // fewer shared samples: keep the rater
};

struct ExclusionResult {
  std::vector<NormalizedRating> kept;
  std::vector<std::string> excluded;              // sorted rater ids
  std::map<std::string, double> correlations;     // raters with a defined SRCC
};

// Drops raters whose normalised scores rank-correlate with the mean of the
// other raters on shared samples below the threshold. Screening is repeated
// with the worst such rater removed until every remaining rater passes, so
// the last rater standing is always kept. Raters with too little overlap or
// an undefined correlation are kept. `correlations` holds each rater's value
// from the last round it took part in.
ExclusionResult exclude_outlier_subjects(const std::vector<NormalizedRating>& table, Dimension dim,
                                         const ExclusionConfig& config = {});

// Strict majority; an exact tie is incongruent. Throws ContractError on no votes.
bool compute_esba(const std::vector<bool>& votes);

struct MosResult {
  std::vector<AggregateRecord> records;  // sample order of first appearance
  std::vector<std::string> exceptions;   // samples left without a surviving rating
};

// Means of surviving normalised scores per sample and dimension; ESBA by
// majority over raters excluded in neither dimension, who also make up
// n_raters. Samples lacking any of the three are listed as exceptions.
MosResult compute_mos(const std::vector<NormalizedRating>& table, const std::set<std::string>& excluded_quality,
                      const std::set<std::string>& excluded_consistency);

struct PipelineConfig {
  ExclusionConfig exclusion;
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
// Strict: unknown keys raise ConfigError.
void from_json(const nlohmann::json& j, PipelineConfig& c);

struct PipelineResult {
  std::vector<AggregateRecord> aggregates;
  std::vector<std::string> exceptions;
  std::vector<std::string> excluded_quality;
  std::vector<std::string> excluded_consistency;
  std::vector<std::string> excluded_any;  // union, also used for ESBA
  std::size_t records_used = 0;
};

// Latest-wins dedup, normalisation, per-dimension exclusion, MOS and ESBA.
// Throws ContractError on an empty log and ConfigError when the union of the
// two exclusion sets leaves no rater for ESBA.
PipelineResult run_pipeline(const std::vector<RatingRecord>& records, const PipelineConfig& config = {});

}  // namespace gestureqa::subjective
