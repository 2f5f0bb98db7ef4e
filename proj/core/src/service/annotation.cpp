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

#include "gestureqa/service/annotation.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "gestureqa/error.hpp"
#include "gestureqa/hash.hpp"

namespace gestureqa::service {

std::vector<std::size_t> presentation_order(std::size_t samples, std::uint64_t seed, const std::string& rater_id) {
  std::vector<std::size_t> order(samples);
  std::iota(order.begin(), order.end(), 0);
  char seed_bytes[8];
  std::memcpy(seed_bytes, &seed, sizeof seed);
  std::mt19937_64 rng(fnv1a64(rater_id, fnv1a64(std::string_view(seed_bytes, sizeof seed_bytes))));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

namespace {

std::string errno_text() { return std::strerror(errno); }

// Returns the log contents up to the last complete line and cuts off
// anything after it.
std::string recover_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const std::size_t end = text.rfind('\n');
  const std::size_t keep = end == std::string::npos ? 0 : end + 1;
  if (keep < text.size()) {
    std::filesystem::resize_file(path, keep);
    text.resize(keep);
  }
  return text;
}

}  // namespace

AnnotationService::AnnotationService(DatasetManifest manifest, std::filesystem::path media_root,
                                     std::filesystem::path log_path, ServiceOptions options)
    : manifest_(std::move(manifest)),
      media_root_(std::move(media_root)),
      log_path_(std::move(log_path)),
      options_(std::move(options)),
      roster_(options_.roster.begin(), options_.roster.end()) {
  for (std::size_t i = 0; i < manifest_.samples.size(); ++i) index_.emplace(manifest_.samples[i].sample_id, i);
  if (log_path_.has_parent_path()) std::filesystem::create_directories(log_path_.parent_path());
  std::istringstream existing(recover_log(log_path_));
  records_ = subjective::read_ratings(existing, log_path_.string());
  for (const auto& r : records_) {
    rated_[r.rater_id].insert(r.sample_id);
    last_timestamp_ = std::max(last_timestamp_, r.timestamp);
  }
  fd_ = ::open(log_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open ratings log " + log_path_.string() + ": " + errno_text());
}

AnnotationService::~AnnotationService() {
  if (fd_ >= 0) ::close(fd_);
}

void AnnotationService::require_rater(const std::string& rater_id) const {
  if (rater_id.empty()) throw NotFoundError("empty rater id");
  if (!roster_.empty() && !roster_.contains(rater_id)) throw NotFoundError("unknown rater '" + rater_id + "'");
}

const SampleRecord& AnnotationService::sample(const std::string& sample_id) const {
  auto it = index_.find(sample_id);
  if (it == index_.end()) throw NotFoundError("unknown sample '" + sample_id + "'");
  return manifest_.samples[it->second];
}

std::optional<Assignment> AnnotationService::next_sample(const std::string& rater_id) {
  require_rater(rater_id);
  std::lock_guard lock(mutex_);
  auto it = orders_.find(rater_id);
  if (it == orders_.end()) {
    it = orders_.emplace(rater_id, presentation_order(manifest_.samples.size(), options_.seed, rater_id)).first;
  }
  const auto& rated = rated_[rater_id];
  const std::size_t total = manifest_.samples.size();
  auto make = [&](std::size_t i) {
    const auto& s = manifest_.samples[i];
    return Assignment{rater_id,
                      s.sample_id,
                      "/api/media/" + s.sample_id + "/video",
                      "/api/media/" + s.sample_id + "/audio",
                      std::min(rated.size() + 1, total),
                      total};
  };
  for (std::size_t i : it->second) {
    if (!rated.contains(manifest_.samples[i].sample_id)) return make(i);
  }
  if (options_.revision_mode && total > 0) return make(it->second.front());
  return std::nullopt;
}

void AnnotationService::append_line(const std::string& line) {
  std::string buf = line + '\n';
  const char* p = buf.data();
  std::size_t left = buf.size();
  while (left > 0) {
    const ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("ratings log write failed: " + errno_text());
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw IoError("ratings log fsync failed: " + errno_text());
}

Ack AnnotationService::submit_rating(subjective::RatingRecord record) {
  require_rater(record.rater_id);
  sample(record.sample_id);
  record.timestamp = 0.0;
  subjective::validate_rating(record, options_.slider);
  std::lock_guard lock(mutex_);
  const double now = std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
  // strictly increasing, so latest-wins never depends on clock resolution
  record.timestamp = std::max(now, last_timestamp_ + 1e-6);
  append_line(subjective::rating_line(record));
  last_timestamp_ = record.timestamp;
  const bool replaced = !rated_[record.rater_id].insert(record.sample_id).second;
  records_.push_back(record);
  return Ack{record.rater_id, record.sample_id, record.timestamp, replaced};
}

Progress AnnotationService::progress(const std::string& rater_id) const {
  require_rater(rater_id);
  std::lock_guard lock(mutex_);
  auto it = rated_.find(rater_id);
  return Progress{rater_id, it == rated_.end() ? 0 : it->second.size(), manifest_.samples.size()};
}

std::vector<subjective::RatingRecord> AnnotationService::snapshot() const {
  std::lock_guard lock(mutex_);
  return records_;
}

subjective::PipelineResult AnnotationService::export_aggregates() const {
  const auto records = snapshot();
  if (records.empty()) throw ContractError("empty log: no ratings to aggregate");
  return subjective::run_pipeline(records, options_.pipeline);
}

}  // namespace gestureqa::service
