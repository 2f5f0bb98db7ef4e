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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace gestureqa::subjective {

enum class Dimension { kQuality, kConsistency };
std::string_view to_string(Dimension d);

struct SliderRange {
  double min = 1.0;
  double max = 100.0;
  bool contains(double v) const { return v >= min && v <= max; }
};

struct RatingRecord {
  std::string rater_id;
  std::string sample_id;
  double quality_raw = 0.0;
  double consistency_raw = 0.0;
  bool congruent = false;  // the ESBA vote
  double timestamp = 0.0;  // seconds since epoch

  double raw(Dimension d) const { return d == Dimension::kQuality ? quality_raw : consistency_raw; }
  bool operator==(const RatingRecord&) const = default;
};

// Throws ValidationError naming the offending field.
void validate_rating(const RatingRecord& r, const SliderRange& range);

void to_json(nlohmann::json& j, const RatingRecord& r);
// Throws FormatError on missing or mistyped fields.
void from_json(const nlohmann::json& j, RatingRecord& r);

// JSON-lines ratings log. A final line without its newline is a write that
// never completed and is skipped; any other malformed line is a FormatError
// naming the line number.
std::vector<RatingRecord> read_ratings(std::istream& in, const std::string& source = "ratings");
std::vector<RatingRecord> load_ratings(const std::filesystem::path& path);
void save_ratings(const std::filesystem::path& path, const std::vector<RatingRecord>& records);
std::string rating_line(const RatingRecord& r);

// Resubmission semantics: one record per (rater, sample), the latest by
// timestamp; equal timestamps resolve to the later log position.
std::vector<RatingRecord> latest_per_pair(const std::vector<RatingRecord>& records);

struct AggregateRecord {
  std::string sample_id;
  double mos_quality = 0.0;
  double mos_consistency = 0.0;
  bool esba = false;  // congruent
  int n_raters = 0;
  std::vector<std::string> excluded_raters;

  double mos(Dimension d) const { return d == Dimension::kQuality ? mos_quality : mos_consistency; }
};

// CSV with header sample_id,mos_quality,mos_consistency,esba,n_raters.
void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRecord>& records);
std::string aggregates_csv(const std::vector<AggregateRecord>& records);
void save_aggregates_csv(const std::filesystem::path& path, const std::vector<AggregateRecord>& records);
std::vector<AggregateRecord> read_aggregates_csv(std::istream& in, const std::string& source = "aggregates");
std::vector<AggregateRecord> load_aggregates_csv(const std::filesystem::path& path);

}  // namespace gestureqa::subjective
