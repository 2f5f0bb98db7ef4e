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
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gestureqa/subjective/aggregate.hpp"
#include "gestureqa/subjective/ratings.hpp"
#include "gestureqa/types.hpp"

namespace gestureqa::service {

struct ServiceOptions {
  // Registered raters. Empty means anyone may rate.
  std::vector<std::string> roster;
  std::uint64_t seed = 0;  // experiment seed for presentation orders
  subjective::SliderRange slider;
  subjective::PipelineConfig pipeline;
  // Offer already-rated samples again once a rater has seen everything.
  bool revision_mode = false;
};

struct Assignment {
  std::string rater_id;
  std::string sample_id;
  std::string video_url;
  std::string audio_url;
  std::size_t position = 0;  // 1-based
  std::size_t total = 0;
};

struct Progress {
  std::string rater_id;
  std::size_t rated = 0;
  std::size_t total = 0;
};

struct Ack {
  std::string rater_id;
  std::string sample_id;
  double server_timestamp = 0.0;
  bool replaced = false;  // an earlier rating for the pair existed
};

// Presentation order for one rater: a permutation of the manifest order
// seeded by the experiment seed and the rater id.
std::vector<std::size_t> presentation_order(std::size_t samples, std::uint64_t seed, const std::string& rater_id);

// Rating experiment state over an append-only JSON-lines log. Every accepted
// rating is written and fsync'ed before submit_rating() returns. Thread-safe.
class AnnotationService {
 public:
  // Replays an existing log. A torn final line (a write that never
  // completed) is cut off; any other malformed line raises FormatError.
  AnnotationService(DatasetManifest manifest, std::filesystem::path media_root, std::filesystem::path log_path,
                    ServiceOptions options = {});
  ~AnnotationService();
  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  // Next unrated sample in the rater's order, or nullopt when done.
  // Unknown raters raise NotFoundError.
  std::optional<Assignment> next_sample(const std::string& rater_id);
  // ValidationError for out-of-range fields, NotFoundError for unknown
  // samples or raters. The server clock replaces the record's timestamp.
  Ack submit_rating(subjective::RatingRecord record);
  Progress progress(const std::string& rater_id) const;

  // Point-in-time copy of the log.
  std::vector<subjective::RatingRecord> snapshot() const;
  // Subjective pipeline over a snapshot. ContractError on an empty log.
  subjective::PipelineResult export_aggregates() const;

  const DatasetManifest& manifest() const { return manifest_; }
  const SampleRecord& sample(const std::string& sample_id) const;
  std::filesystem::path media_path(const std::filesystem::path& relative) const { return media_root_ / relative; }
  const ServiceOptions& options() const { return options_; }

 private:
  void require_rater(const std::string& rater_id) const;
  void append_line(const std::string& line);

  DatasetManifest manifest_;
  std::filesystem::path media_root_;
  std::filesystem::path log_path_;
  ServiceOptions options_;
  std::map<std::string, std::size_t> index_;  // sample id -> manifest position
  std::set<std::string> roster_;

  mutable std::mutex mutex_;
  int fd_ = -1;
  std::vector<subjective::RatingRecord> records_;
  std::map<std::string, std::set<std::string>> rated_;  // rater -> samples
  std::map<std::string, std::vector<std::size_t>> orders_;
  double last_timestamp_ = 0.0;
};

}  // namespace gestureqa::service
