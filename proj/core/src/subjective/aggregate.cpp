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

#include "gestureqa/subjective/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "gestureqa/error.hpp"
#include "gestureqa/json_util.hpp"
#include "gestureqa/metrics/correlation.hpp"

namespace gestureqa::subjective {

std::vector<double> zscore_normalize(std::span<const double> raw) {
  if (raw.empty()) throw ContractError("zscore_normalize: no ratings");
  std::vector<double> out(raw.size(), 50.0);
  const double n = static_cast<double>(raw.size());
  const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
  double var = 0.0;
  for (double v : raw) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  double scale = 0.0;
  for (double v : raw) scale = std::max(scale, std::abs(v));
  if (!(sd > 1e-12 * scale)) return out;  // constant up to rounding of the mean
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double z = (raw[i] - mean) / sd;
    out[i] = std::clamp(100.0 * (z + 3.0) / 6.0, 0.0, 100.0);
  }
  return out;
}

std::vector<NormalizedRating> normalize_table(const std::vector<RatingRecord>& records) {
  std::map<std::string, std::vector<std::size_t>> by_rater;
  for (std::size_t i = 0; i < records.size(); ++i) by_rater[records[i].rater_id].push_back(i);
  std::vector<NormalizedRating> out(records.size());
  for (const auto& [rater, idx] : by_rater) {
    std::vector<double> q, c;
    for (std::size_t i : idx) {
      q.push_back(records[i].quality_raw);
      c.push_back(records[i].consistency_raw);
    }
    const auto nq = zscore_normalize(q);
    const auto nc = zscore_normalize(c);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& r = records[idx[k]];
      out[idx[k]] = {r.rater_id, r.sample_id, nq[k], nc[k], r.congruent};
    }
  }
  return out;
}

ExclusionResult exclude_outlier_subjects(const std::vector<NormalizedRating>& table, Dimension dim,
                                         const ExclusionConfig& config) {
  std::map<std::string, std::vector<const NormalizedRating*>> by_rater;
  for (const auto& r : table) by_rater[r.rater_id].push_back(&r);
  ExclusionResult result;
  std::set<std::string> excluded;
  // Screen repeatedly, dropping the single worst rater each round, so an
  // outlier never drags the reference mean of the honest raters with it.
  while (by_rater.size() - excluded.size() >= 2) {
    std::unordered_map<std::string, std::pair<double, int>> totals;  // sample -> (sum, count)
    for (const auto& r : table) {
      if (excluded.contains(r.rater_id)) continue;
      auto& t = totals[r.sample_id];
      t.first += r.score(dim);
      t.second += 1;
    }
    std::map<std::string, double> round;
    for (const auto& [rater, rows] : by_rater) {
      if (excluded.contains(rater)) continue;
      std::vector<double> own, others;
      for (const NormalizedRating* r : rows) {
        const auto& t = totals.at(r->sample_id);
        if (t.second < 2) continue;
        own.push_back(r->score(dim));
        others.push_back((t.first - r->score(dim)) / (t.second - 1));
      }
      if (own.size() < std::max<std::size_t>(config.min_overlap, 2)) continue;
      try {
        round[rater] = metrics::srcc(own, others);
      } catch (const ContractError&) {
        // constant ranks: no evidence either way
      }
    }
    const auto worst = std::min_element(round.begin(), round.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [rater, rho] : round) result.correlations[rater] = rho;
    if (worst == round.end() || worst->second >= config.threshold) break;
    excluded.insert(worst->first);
  }
  result.excluded.assign(excluded.begin(), excluded.end());
  for (const auto& r : table) {
    if (!excluded.contains(r.rater_id)) result.kept.push_back(r);
  }
  return result;
}

bool compute_esba(const std::vector<bool>& votes) {
  if (votes.empty()) throw ContractError("compute_esba: no votes");
  const auto yes = std::count(votes.begin(), votes.end(), true);
  return 2 * static_cast<std::size_t>(yes) > votes.size();
}

MosResult compute_mos(const std::vector<NormalizedRating>& table, const std::set<std::string>& excluded_quality,
                      const std::set<std::string>& excluded_consistency) {
  struct Acc {
    double q_sum = 0.0, c_sum = 0.0;
    int q_n = 0, c_n = 0;
    std::vector<bool> votes;
    std::set<std::string> excluded;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Acc> acc;
  for (const auto& r : table) {
    auto [it, fresh] = acc.try_emplace(r.sample_id);
    if (fresh) order.push_back(r.sample_id);
    Acc& a = it->second;
    const bool drop_q = excluded_quality.contains(r.rater_id);
    const bool drop_c = excluded_consistency.contains(r.rater_id);
    if (!drop_q) {
      a.q_sum += r.quality;
      ++a.q_n;
    }
    if (!drop_c) {
      a.c_sum += r.consistency;
      ++a.c_n;
    }
    if (!drop_q && !drop_c) {
      a.votes.push_back(r.congruent);
    } else {
      a.excluded.insert(r.rater_id);
    }
  }
  MosResult result;
  for (const auto& id : order) {
    const Acc& a = acc.at(id);
    if (a.q_n == 0 || a.c_n == 0 || a.votes.empty()) {
      result.exceptions.push_back(id);
      continue;
    }
    AggregateRecord rec;
    rec.sample_id = id;
    rec.mos_quality = a.q_sum / a.q_n;
    rec.mos_consistency = a.c_sum / a.c_n;
    rec.esba = compute_esba(a.votes);
    rec.n_raters = static_cast<int>(a.votes.size());
    rec.excluded_raters.assign(a.excluded.begin(), a.excluded.end());
    result.records.push_back(std::move(rec));
  }
  return result;
}

PipelineResult run_pipeline(const std::vector<RatingRecord>& records, const PipelineConfig& config) {
  if (records.empty()) throw ContractError("empty log: no ratings to aggregate");
  const auto latest = latest_per_pair(records);
  const auto table = normalize_table(latest);
  const auto q = exclude_outlier_subjects(table, Dimension::kQuality, config.exclusion);
  const auto c = exclude_outlier_subjects(table, Dimension::kConsistency, config.exclusion);
  const std::set<std::string> eq(q.excluded.begin(), q.excluded.end());
  const std::set<std::string> ec(c.excluded.begin(), c.excluded.end());
  std::set<std::string> any = eq;
  any.insert(ec.begin(), ec.end());
  if (!table.empty()) {
    std::set<std::string> raters;
    for (const auto& r : table) raters.insert(r.rater_id);
    if (std::includes(any.begin(), any.end(), raters.begin(), raters.end())) {
      throw ConfigError("outlier screening leaves no rater for ESBA; the threshold is too strict");
    }
  }
  auto mos = compute_mos(table, eq, ec);
  PipelineResult out;
  out.aggregates = std::move(mos.records);
  out.exceptions = std::move(mos.exceptions);
  out.excluded_quality = q.excluded;
  out.excluded_consistency = c.excluded;
  out.excluded_any.assign(any.begin(), any.end());
  out.records_used = latest.size();
  return out;
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = {{"exclusion", {{"threshold", c.exclusion.threshold}, {"min_overlap", c.exclusion.min_overlap}}}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
  StrictObjectReader top(j, "pipeline");
  if (const auto* ex = top.child("exclusion")) {
    StrictObjectReader r(*ex, top.path_of("exclusion"));
    r.read("threshold", c.exclusion.threshold);
    r.read("min_overlap", c.exclusion.min_overlap);
    r.finish();
  }
  top.finish();
  if (!(c.exclusion.threshold >= -1.0 && c.exclusion.threshold <= 1.0)) {
    throw ConfigError("pipeline.exclusion.threshold: must lie in [-1, 1]");
  }
}

}  // namespace gestureqa::subjective
