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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestureqa/error.hpp"
#include "gestureqa/metrics/report.hpp"
#include "gestureqa/model/loss.hpp"
#include "gestureqa/model/scorer.hpp"
#include "gestureqa/nn/adam.hpp"
#include "gestureqa/subjective/ratings.hpp"
#include "gestureqa/types.hpp"

namespace gestureqa::training {

struct TrainConfig {
  double lr_peak = 1e-4;
  std::size_t batch_size = 10;
  int epochs = 20;
  double warmup_fraction = 0.1;
  std::uint64_t seed = 0;
  std::size_t k_folds = 5;
  model::LossKind loss = model::LossKind::kPlcc;
  nn::AdamConfig adam;
  // Fit the per-dimension affine map from raw outputs to the MOS scale on
  // the training split after training.
  bool calibrate = true;
  bool logistic_eval = false;

  // Throws ConfigError.
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
// Strict: unknown keys raise ConfigError.
void from_json(const nlohmann::json& j, TrainConfig& c);

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<std::string> train_sample_ids;
  std::vector<std::string> test_sample_ids;
};

// Shuffles the distinct audio ids with `seed` and cuts them into k groups of
// near-equal size; fold i tests every sample of group i. Throws ConfigError
// for k < 2 or fewer audio ids than k.
std::vector<FoldSplit> make_folds(const DatasetManifest& manifest, std::size_t k, std::uint64_t seed);

// Linear warmup from 0 to lr_peak over warmup_fraction * total_steps, then
// linear decay to 0 at total_steps.
double lr_schedule(std::size_t step, std::size_t total_steps, const TrainConfig& config);

// Full batches plus a tail batch when it holds at least two samples.
std::size_t batches_per_epoch(std::size_t samples, std::size_t batch_size);

// Decoded, model-ready inputs keyed by sample id.
class InputCache {
 public:
  // Decodes every sample of the manifest. Media paths resolve against
  // media_root. Spectrograms are computed once per audio clip.
  InputCache(const DatasetManifest& manifest, const std::filesystem::path& media_root,
             const features::EncoderConfig& encoders);

  const model::SampleInputs& at(const std::string& sample_id) const;
  bool contains(const std::string& sample_id) const { return inputs_.contains(sample_id); }
  std::size_t size() const { return inputs_.size(); }
  std::size_t padded_videos() const { return padded_; }

 private:
  std::map<std::string, model::SampleInputs> inputs_;
  std::size_t padded_ = 0;
};

model::SampleInputs load_sample_inputs(const SampleRecord& sample, const std::filesystem::path& media_root,
                                       const features::EncoderConfig& encoders);

class NonFiniteLossError : public Error {
 public:
  NonFiniteLossError(const std::string& what, std::size_t step, std::vector<std::string> batch)
      : Error(what), step_(step), batch_(std::move(batch)) {}
  std::size_t step() const { return step_; }
  const std::vector<std::string>& batch() const { return batch_; }

 private:
  std::size_t step_;
  std::vector<std::string> batch_;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double lr_last = 0.0;
  double seconds = 0.0;
};

struct RunHistory {
  std::size_t fold_index = 0;
  std::vector<EpochRecord> epochs;
  metrics::MetricReport metrics;
  std::vector<metrics::Prediction> test_predictions;
  std::size_t steps = 0;
  double seconds = 0.0;
  std::filesystem::path checkpoint;  // empty when nothing was written
};

// Deterministic part only; timing_json() has the wall-clock times.
void to_json(nlohmann::json& j, const RunHistory& h);
nlohmann::json timing_json(const RunHistory& h);

using ProgressFn = std::function<void(const std::string&)>;

struct FoldOutput {
  RunHistory history;
  model::GestureScorer scorer;
};

// Trains a fresh scorer on the fold's training split and evaluates it on
// the test split. When out_dir is set, writes history.json, metrics.json,
// predictions.csv and checkpoint/ there. Throws NonFiniteLossError naming
// the step and batch when the loss stops being finite.
FoldOutput train_fold(const FoldSplit& fold, const TrainConfig& config, const model::ModelConfig& model_config,
                      const InputCache& inputs, const std::vector<subjective::AggregateRecord>& aggregates,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                      const ProgressFn& progress = {});

struct CrossValidationResult {
  std::vector<RunHistory> folds;
  metrics::MetricReport mean;
  metrics::MetricReport std;  // population std across folds
};

void to_json(nlohmann::json& j, const CrossValidationResult& r);

// make_folds + train_fold per fold. With run_dir set, fold i writes into
// run_dir/fold<i> and the summary goes to run_dir/summary.json.
CrossValidationResult cross_validate(const TrainConfig& config, const model::ModelConfig& model_config,
                                     const DatasetManifest& manifest, const InputCache& inputs,
                                     const std::vector<subjective::AggregateRecord>& aggregates,
                                     const std::optional<std::filesystem::path>& run_dir = std::nullopt,
                                     const ProgressFn& progress = {});

// Mean and population std of fold reports.
std::pair<metrics::MetricReport, metrics::MetricReport> summarize(const std::vector<metrics::MetricReport>& reports);

// Predictions for the given samples, on the MOS scale via the scorer's
// calibration.
std::vector<metrics::Prediction> predict_samples(const model::GestureScorer& scorer, const InputCache& inputs,
                                                 const std::vector<std::string>& sample_ids);

// Keeps large tensor buffers inside the heap between steps instead of
// returning them to the OS each time. No-op off glibc.
void tune_allocator();

}  // namespace gestureqa::training
