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

#include "gestureqa/metrics/report.hpp"

#include <fstream>
#include <unordered_map>

#include "gestureqa/error.hpp"
#include "gestureqa/metrics/correlation.hpp"

namespace gestureqa::metrics {

using nlohmann::json;

namespace {

json dimension_json(const DimensionMetrics& d) {
  return {{"srcc", d.srcc}, {"plcc", d.plcc}, {"krcc", d.krcc}, {"rmse", d.rmse}};
}

DimensionMetrics dimension_from(const json& j) {
  return {j.at("srcc").get<double>(), j.at("plcc").get<double>(), j.at("krcc").get<double>(),
          j.at("rmse").get<double>()};
}

DimensionMetrics score(std::vector<double> pred, const std::vector<double>& target, bool logistic) {
  if (logistic) {
    const Logistic4 f = fit_logistic(pred, target);
    for (double& p : pred) p = f(p);
  }
  return {srcc(pred, target), plcc(pred, target), krcc(pred, target), rmse(pred, target)};
}

}  // namespace

void to_json(json& j, const MetricReport& r) {
  j = {{"quality", dimension_json(r.quality)}, {"consistency", dimension_json(r.consistency)}, {"n", r.n}};
}

void from_json(const json& j, MetricReport& r) {
  try {
    r.quality = dimension_from(j.at("quality"));
    r.consistency = dimension_from(j.at("consistency"));
    r.n = j.at("n").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("metric report: ") + e.what());
  }
}

void save_report(const std::filesystem::path& path, const MetricReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << json(r).dump(2) << '\n';
}

MetricReport evaluate(const std::vector<Prediction>& predictions,
                      const std::vector<subjective::AggregateRecord>& aggregates, const EvalOptions& options) {
  if (predictions.size() < 2) throw ContractError("evaluate: needs at least 2 predictions");
  std::unordered_map<std::string, const subjective::AggregateRecord*> index;
  for (const auto& a : aggregates) index[a.sample_id] = &a;
  std::vector<double> pq, pc, tq, tc;
  for (const auto& p : predictions) {
    auto it = index.find(p.sample_id);
    if (it == index.end()) throw NotFoundError("no aggregate for predicted sample '" + p.sample_id + "'");
    pq.push_back(p.quality);
    pc.push_back(p.consistency);
    tq.push_back(it->second->mos_quality);
    tc.push_back(it->second->mos_consistency);
  }
  MetricReport r;
  r.n = predictions.size();
  r.quality = score(std::move(pq), tq, options.logistic_fit);
  r.consistency = score(std::move(pc), tc, options.logistic_fit);
  return r;
}

}  // namespace gestureqa::metrics
