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

#include "gestureqa/subjective/ratings.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gestureqa/error.hpp"

namespace gestureqa::subjective {

using nlohmann::json;

std::string_view to_string(Dimension d) { return d == Dimension::kQuality ? "quality" : "consistency"; }

void validate_rating(const RatingRecord& r, const SliderRange& range) {
  if (r.rater_id.empty()) throw ValidationError("rater_id: empty");
  if (r.sample_id.empty()) throw ValidationError("sample_id: empty");
  auto check = [&](const char* field, double v) {
    if (!std::isfinite(v) || !range.contains(v)) {
      std::ostringstream msg;
      msg << field << ": " << v << " outside slider range [" << range.min << ", " << range.max << "]";
      throw ValidationError(msg.str());
    }
  };
  check("quality_raw", r.quality_raw);
  check("consistency_raw", r.consistency_raw);
  if (!std::isfinite(r.timestamp)) throw ValidationError("timestamp: not finite");
}

void to_json(json& j, const RatingRecord& r) {
  j = {{"rater_id", r.rater_id},
       {"sample_id", r.sample_id},
       {"quality_raw", r.quality_raw},
       {"consistency_raw", r.consistency_raw},
       {"emotion_vote", r.congruent ? "congruent" : "incongruent"},
       {"timestamp", r.timestamp}};
}

void from_json(const json& j, RatingRecord& r) {
  if (!j.is_object()) throw FormatError("rating: expected an object");
  auto field = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw FormatError(std::string("rating: missing field '") + key + "'");
    return j.at(key);
  };
  try {
    r.rater_id = field("rater_id").get<std::string>();
    r.sample_id = field("sample_id").get<std::string>();
    r.quality_raw = field("quality_raw").get<double>();
    r.consistency_raw = field("consistency_raw").get<double>();
    r.timestamp = j.contains("timestamp") ? j.at("timestamp").get<double>() : 0.0;
    const json& vote = field("emotion_vote");
    if (vote.is_boolean()) {
      r.congruent = vote.get<bool>();
    } else {
      const auto s = vote.get<std::string>();
      if (s == "congruent") {
        r.congruent = true;
      } else if (s == "incongruent") {
        r.congruent = false;
      } else {
        throw FormatError("rating: emotion_vote must be 'congruent' or 'incongruent', got '" + s + "'");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("rating: ") + e.what());
  }
}

std::string rating_line(const RatingRecord& r) { return json(r).dump(); }

std::vector<RatingRecord> read_ratings(std::istream& in, const std::string& source) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<RatingRecord> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    ++line_no;
    const std::size_t nl = text.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = text.substr(pos, complete ? nl - pos : std::string::npos);
    pos = complete ? nl + 1 : text.size();
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).get<RatingRecord>());
    } catch (const std::exception& e) {
      if (!complete) break;  // torn tail
      throw FormatError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RatingRecord> load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ratings log " + path.string());
  return read_ratings(in, path.string());
}

void save_ratings(const std::filesystem::path& path, const std::vector<RatingRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : records) out << rating_line(r) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<RatingRecord> latest_per_pair(const std::vector<RatingRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::size_t> latest;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto key = std::make_pair(records[i].rater_id, records[i].sample_id);
    auto it = latest.find(key);
    if (it == latest.end()) {
      latest.emplace(key, i);
    } else if (records[i].timestamp >= records[it->second].timestamp) {
      it->second = i;
    }
  }
  std::vector<std::size_t> keep;
  keep.reserve(latest.size());
  for (const auto& [key, i] : latest) keep.push_back(i);
  std::sort(keep.begin(), keep.end());
  std::vector<RatingRecord> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(records[i]);
  return out;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

constexpr const char* kCsvHeader = "sample_id,mos_quality,mos_consistency,esba,n_raters";

}  // namespace

void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.sample_id << ',' << format_number(r.mos_quality) << ',' << format_number(r.mos_consistency) << ','
        << (r.esba ? 1 : 0) << ',' << r.n_raters << '\n';
  }
}

std::string aggregates_csv(const std::vector<AggregateRecord>& records) {
  std::ostringstream out;
  write_aggregates_csv(out, records);
  return out.str();
}

void save_aggregates_csv(const std::filesystem::path& path, const std::vector<AggregateRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_aggregates_csv(out, records);
}

std::vector<AggregateRecord> read_aggregates_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw FormatError(source + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw FormatError(source + ":1: expected header '" + std::string(kCsvHeader) + "'");
  std::vector<AggregateRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (cells.size() != 5) throw FormatError(where + ": expected 5 columns, got " + std::to_string(cells.size()));
    AggregateRecord r;
    r.sample_id = cells[0];
    try {
      std::size_t used = 0;
      r.mos_quality = std::stod(cells[1], &used);
      r.mos_consistency = std::stod(cells[2], &used);
      if (cells[3] != "0" && cells[3] != "1") throw FormatError(where + ": esba must be 0 or 1");
      r.esba = cells[3] == "1";
      r.n_raters = std::stoi(cells[4]);
    } catch (const std::logic_error&) {
      throw FormatError(where + ": malformed number");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AggregateRecord> load_aggregates_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_aggregates_csv(in, path.string());
}

}  // namespace gestureqa::subjective
