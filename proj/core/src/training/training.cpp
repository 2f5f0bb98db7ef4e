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

#include "gestureqa/training/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "gestureqa/features/frames.hpp"
#include "gestureqa/features/logmel.hpp"
#include "gestureqa/json_util.hpp"
#include "gestureqa/motion_io.hpp"

namespace gestureqa::training {

using nlohmann::json;

void TrainConfig::validate() const {
  if (!(lr_peak >= 0.0)) throw ConfigError("train.lr_peak must be >= 0");
  if (batch_size < 2) throw ConfigError("train.batch_size must be >= 2");
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) throw ConfigError("train.warmup_fraction must lie in (0, 1)");
  if (k_folds < 2) throw ConfigError("train.k_folds must be >= 2");
}

void to_json(json& j, const TrainConfig& c) {
  j = {{"lr_peak", c.lr_peak},
       {"batch_size", c.batch_size},
       {"epochs", c.epochs},
       {"warmup_fraction", c.warmup_fraction},
       {"seed", c.seed},
       {"k_folds", c.k_folds},
       {"loss", c.loss == model::LossKind::kPlcc ? "plcc" : "mse"},
       {"adam", {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"eps", c.adam.eps}}},
       {"calibrate", c.calibrate},
       {"logistic_eval", c.logistic_eval}};
}

void from_json(const json& j, TrainConfig& c) {
  StrictObjectReader r(j, "train");
  r.read("lr_peak", c.lr_peak);
  r.read("batch_size", c.batch_size);
  r.read("epochs", c.epochs);
  r.read("warmup_fraction", c.warmup_fraction);
  r.read("seed", c.seed);
  r.read("k_folds", c.k_folds);
  std::string loss = c.loss == model::LossKind::kPlcc ? "plcc" : "mse";
  r.read("loss", loss);
  if (loss == "plcc") {
    c.loss = model::LossKind::kPlcc;
  } else if (loss == "mse") {
    c.loss = model::LossKind::kMse;
  } else {
    throw ConfigError("train.loss must be 'plcc' or 'mse', got '" + loss + "'");
  }
  if (const json* adam = r.child("adam")) {
    StrictObjectReader a(*adam, "train.adam");
    a.read("beta1", c.adam.beta1);
    a.read("beta2", c.adam.beta2);
    a.read("eps", c.adam.eps);
    a.finish();
  }
  r.read("calibrate", c.calibrate);
  r.read("logistic_eval", c.logistic_eval);
  r.finish();
}

std::vector<FoldSplit> make_folds(const DatasetManifest& manifest, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("make_folds: k must be >= 2, got " + std::to_string(k));
  std::vector<std::string> audio;
  std::set<std::string> seen;
  for (const auto& s : manifest.samples) {
    if (seen.insert(s.audio.id).second) audio.push_back(s.audio.id);
  }
  if (audio.size() < k) {
    throw ConfigError("make_folds: " + std::to_string(audio.size()) + " audio ids cannot fill " + std::to_string(k) +
                      " folds");
  }
  std::sort(audio.begin(), audio.end());
  std::mt19937_64 rng(seed);
  std::shuffle(audio.begin(), audio.end(), rng);
  std::unordered_map<std::string, std::size_t> group;
  for (std::size_t i = 0; i < audio.size(); ++i) group[audio[i]] = i * k / audio.size();
  std::vector<FoldSplit> folds(k);
  for (std::size_t f = 0; f < k; ++f) folds[f].fold_index = f;
  for (const auto& s : manifest.samples) {
    const std::size_t g = group.at(s.audio.id);
    for (std::size_t f = 0; f < k; ++f) {
      (f == g ? folds[f].test_sample_ids : folds[f].train_sample_ids).push_back(s.sample_id);
    }
  }
  return folds;
}

double lr_schedule(std::size_t step, std::size_t total_steps, const TrainConfig& config) {
  if (total_steps == 0) return 0.0;
  step = std::min(step, total_steps);
  const double total = static_cast<double>(total_steps);
  const double warm = config.warmup_fraction * total;
  const double s = static_cast<double>(step);
  if (s <= warm) return warm > 0.0 ? config.lr_peak * s / warm : config.lr_peak;
  return config.lr_peak * (total - s) / (total - warm);
}

std::size_t batches_per_epoch(std::size_t samples, std::size_t batch_size) {
  return samples / batch_size + (samples % batch_size >= 2 ? 1 : 0);
}

model::SampleInputs load_sample_inputs(const SampleRecord& sample, const std::filesystem::path& media_root,
                                       const features::EncoderConfig& encoders) {
  model::SampleInputs in;
  auto frames = features::sample_frames(media_root / sample.video_path,
                                        static_cast<std::size_t>(encoders.vision_frames), encoders.image_size);
  in.frames = std::move(frames.frames);
  in.spectrograms = features::audio_to_logmel(media_root / sample.audio.path, encoders.spectrogram);
  const MotionSequence motion = read_motion(media_root / sample.motion_path);
  if (static_cast<std::int64_t>(motion.dim) != encoders.motion_dim) {
    throw ValidationError(sample.sample_id + ": motion dimension " + std::to_string(motion.dim) +
                          " does not match the model's " + std::to_string(encoders.motion_dim));
  }
  in.motion = nn::Tensor({static_cast<std::int64_t>(motion.frames), static_cast<std::int64_t>(motion.dim)},
                         motion.values);
  return in;
}

InputCache::InputCache(const DatasetManifest& manifest, const std::filesystem::path& media_root,
                       const features::EncoderConfig& encoders) {
  std::map<std::string, nn::Tensor> spectrograms;
  for (const auto& s : manifest.samples) {
    model::SampleInputs in;
    auto frames = features::sample_frames(media_root / s.video_path,
                                          static_cast<std::size_t>(encoders.vision_frames), encoders.image_size);
    if (frames.padded) ++padded_;
    in.frames = std::move(frames.frames);
    auto it = spectrograms.find(s.audio.id);
    if (it == spectrograms.end()) {
      it = spectrograms.emplace(s.audio.id, features::audio_to_logmel(media_root / s.audio.path, encoders.spectrogram))
               .first;
    }
    in.spectrograms = it->second;
    const MotionSequence motion = read_motion(media_root / s.motion_path);
    if (static_cast<std::int64_t>(motion.dim) != encoders.motion_dim) {
      throw ValidationError(s.sample_id + ": motion dimension " + std::to_string(motion.dim) +
                            " does not match the model's " + std::to_string(encoders.motion_dim));
    }
    in.motion = nn::Tensor({static_cast<std::int64_t>(motion.frames), static_cast<std::int64_t>(motion.dim)},
                           motion.values);
    inputs_.emplace(s.sample_id, std::move(in));
  }
}

const model::SampleInputs& InputCache::at(const std::string& sample_id) const {
  auto it = inputs_.find(sample_id);
  if (it == inputs_.end()) throw NotFoundError("no decoded inputs for sample '" + sample_id + "'");
  return it->second;
}

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 64 << 20);
#endif
}

std::vector<metrics::Prediction> predict_samples(const model::GestureScorer& scorer, const InputCache& inputs,
                                                 const std::vector<std::string>& sample_ids) {
  std::vector<metrics::Prediction> out;
  out.reserve(sample_ids.size());
  for (const auto& id : sample_ids) {
    const auto p = scorer.predict(inputs.at(id));
    out.push_back({id, p[0], p[1]});
  }
  return out;
}

void to_json(json& j, const RunHistory& h) {
  json epochs = json::array();
  for (const auto& e : h.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"lr_last", e.lr_last}});
  }
  // wall-clock times live in timing_json() so this stays byte-reproducible
  j = {{"fold", h.fold_index}, {"epochs", epochs}, {"steps", h.steps}, {"metrics", h.metrics}};
}

json timing_json(const RunHistory& h) {
  json epochs = json::array();
  for (const auto& e : h.epochs) epochs.push_back(e.seconds);
  return {{"fold", h.fold_index}, {"epoch_seconds", epochs}, {"seconds", h.seconds}};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_predictions(const std::filesystem::path& path, const std::vector<metrics::Prediction>& preds,
                       const std::unordered_map<std::string, const subjective::AggregateRecord*>& targets) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "sample_id,pred_quality,pred_consistency,mos_quality,mos_consistency\n";
  out.precision(10);
  for (const auto& p : preds) {
    const auto* t = targets.at(p.sample_id);
    out << p.sample_id << ',' << p.quality << ',' << p.consistency << ',' << t->mos_quality << ','
        << t->mos_consistency << '\n';
  }
}

}  // namespace

FoldOutput train_fold(const FoldSplit& fold, const TrainConfig& config, const model::ModelConfig& model_config,
                      const InputCache& inputs, const std::vector<subjective::AggregateRecord>& aggregates,
                      const std::optional<std::filesystem::path>& out_dir, const ProgressFn& progress) {
  config.validate();
  tune_allocator();
  const auto t0 = Clock::now();
  std::unordered_map<std::string, const subjective::AggregateRecord*> targets;
  for (const auto& a : aggregates) targets[a.sample_id] = &a;
  for (const auto* ids : {&fold.train_sample_ids, &fold.test_sample_ids}) {
    for (const auto& id : *ids) {
      if (!targets.contains(id)) throw NotFoundError("no aggregate for sample '" + id + "'");
      inputs.at(id);
    }
  }
  if (fold.train_sample_ids.size() < 2) throw ConfigError("fold " + std::to_string(fold.fold_index) + " has fewer than 2 training samples");

  FoldOutput out{RunHistory{}, model::GestureScorer(model_config)};
  RunHistory& history = out.history;
  model::GestureScorer& scorer = out.scorer;
  history.fold_index = fold.fold_index;
  nn::ParameterStore& params = scorer.parameters();
  nn::Adam adam(params, config.adam);

  const std::size_t n = fold.train_sample_ids.size();
  const std::size_t per_epoch = batches_per_epoch(n, config.batch_size);
  const std::size_t total_steps = per_epoch * static_cast<std::size_t>(config.epochs);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (fold.fold_index + 1)));

  std::size_t step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto te = Clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    double lr = 0.0;
    for (std::size_t b = 0; b < per_epoch; ++b) {
      const std::size_t begin = b * config.batch_size;
      const std::size_t size = std::min(config.batch_size, n - begin);
      std::vector<std::string> ids;
      std::vector<std::unique_ptr<nn::Graph>> graphs;
      std::vector<nn::Var> outputs;
      nn::Tensor pred({static_cast<std::int64_t>(size), model::kScoreDims});
      nn::Tensor target({static_cast<std::int64_t>(size), model::kScoreDims});
      for (std::size_t i = 0; i < size; ++i) {
        const std::string& id = fold.train_sample_ids[order[begin + i]];
        ids.push_back(id);
        graphs.push_back(std::make_unique<nn::Graph>());
        outputs.push_back(scorer.forward(*graphs.back(), inputs.at(id)));
        const nn::Tensor& o = outputs.back().value();
        pred[2 * i] = o[0];
        pred[2 * i + 1] = o[1];
        target[2 * i] = targets.at(id)->mos_quality;
        target[2 * i + 1] = targets.at(id)->mos_consistency;
      }
      const model::LossGradient lg = model::total_loss_with_grad(pred, target, config.loss);
      if (!std::isfinite(lg.loss) || !pred.all_finite()) {
        std::string list;
        for (const auto& id : ids) list += (list.empty() ? "" : ", ") + id;
        throw NonFiniteLossError("non-finite training loss at step " + std::to_string(step) + " (fold " +
                                     std::to_string(fold.fold_index) + ", epoch " + std::to_string(epoch) +
                                     ", batch " + std::to_string(b) + ": " + list + ")",
                                 step, ids);
      }
      nn::GradientSet grads = nn::zero_gradients(params);
      for (std::size_t i = 0; i < size; ++i) {
        nn::Tensor seed({1, model::kScoreDims}, {lg.grad[2 * i], lg.grad[2 * i + 1]});
        graphs[i]->backward(outputs[i], seed);
        graphs[i]->accumulate_parameter_gradients(grads);
        graphs[i].reset();
      }
      lr = lr_schedule(step + 1, total_steps, config);
      adam.step(grads, lr);
      ++step;
      loss_sum += lg.loss;
    }
    EpochRecord rec{epoch, loss_sum / static_cast<double>(per_epoch), lr, seconds_since(te)};
    history.epochs.push_back(rec);
    if (progress) {
      progress("fold " + std::to_string(fold.fold_index) + " epoch " + std::to_string(epoch) + "/" +
               std::to_string(config.epochs) + " loss " + fmt(rec.train_loss) + " (" + fmt(rec.seconds, 1) + " s)");
    }
  }
  history.steps = step;

  std::vector<std::array<double, model::kScoreDims>> raw, mos;
  for (const auto& id : fold.train_sample_ids) {
    raw.push_back(scorer.predict_raw(inputs.at(id)));
    mos.push_back({targets.at(id)->mos_quality, targets.at(id)->mos_consistency});
  }
  if (config.calibrate) scorer.calibration() = model::ScoreCalibration::fit(raw, mos);

  history.test_predictions = predict_samples(scorer, inputs, fold.test_sample_ids);
  std::vector<subjective::AggregateRecord> test_targets;
  for (const auto& id : fold.test_sample_ids) test_targets.push_back(*targets.at(id));
  history.metrics = metrics::evaluate(history.test_predictions, test_targets, {config.logistic_eval});
  history.seconds = seconds_since(t0);

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    history.checkpoint = *out_dir / "checkpoint";
    model::save_scorer(scorer, history.checkpoint);
    write_json(*out_dir / "history.json", history);
    write_json(*out_dir / "timing.json", timing_json(history));
    metrics::save_report(*out_dir / "metrics.json", history.metrics);
    write_predictions(*out_dir / "predictions.csv", history.test_predictions, targets);
  }
  if (progress) {
    progress("fold " + std::to_string(fold.fold_index) + " test SRCC quality " + fmt(history.metrics.quality.srcc) +
             ", consistency " + fmt(history.metrics.consistency.srcc) + " (n=" + std::to_string(history.metrics.n) +
             ", " + fmt(history.seconds, 1) + " s)");
  }
  return out;
}

std::pair<metrics::MetricReport, metrics::MetricReport> summarize(const std::vector<metrics::MetricReport>& reports) {
  metrics::MetricReport mean, sd;
  if (reports.empty()) return {mean, sd};
  const double k = static_cast<double>(reports.size());
  auto fields = [](metrics::MetricReport& r) {
    return std::array<double*, 8>{&r.quality.srcc,     &r.quality.plcc,     &r.quality.krcc,     &r.quality.rmse,
                                  &r.consistency.srcc, &r.consistency.plcc, &r.consistency.krcc, &r.consistency.rmse};
  };
  auto mf = fields(mean);
  auto sf = fields(sd);
  for (auto r : reports) {
    auto rf = fields(r);
    for (std::size_t i = 0; i < rf.size(); ++i) *mf[i] += *rf[i] / k;
    mean.n += r.n;
  }
  for (auto r : reports) {
    auto rf = fields(r);
    for (std::size_t i = 0; i < rf.size(); ++i) *sf[i] += (*rf[i] - *mf[i]) * (*rf[i] - *mf[i]) / k;
  }
  for (double* v : sf) *v = std::sqrt(*v);
  sd.n = mean.n;
  return {mean, sd};
}

void to_json(json& j, const CrossValidationResult& r) {
  json folds = json::array();
  for (const auto& f : r.folds) folds.push_back({{"fold", f.fold_index}, {"metrics", f.metrics}});
  j = {{"folds", folds}, {"mean", r.mean}, {"std", r.std}};
}

CrossValidationResult cross_validate(const TrainConfig& config, const model::ModelConfig& model_config,
                                     const DatasetManifest& manifest, const InputCache& inputs,
                                     const std::vector<subjective::AggregateRecord>& aggregates,
                                     const std::optional<std::filesystem::path>& run_dir, const ProgressFn& progress) {
  config.validate();
  const auto folds = make_folds(manifest, config.k_folds, config.seed);
  CrossValidationResult result;
  std::vector<metrics::MetricReport> reports;
  for (const auto& fold : folds) {
    std::optional<std::filesystem::path> dir;
    if (run_dir) dir = *run_dir / ("fold" + std::to_string(fold.fold_index));
    auto out = train_fold(fold, config, model_config, inputs, aggregates, dir, progress);
    reports.push_back(out.history.metrics);
    result.folds.push_back(std::move(out.history));
  }
  std::tie(result.mean, result.std) = summarize(reports);
  if (run_dir) write_json(*run_dir / "summary.json", result);
  return result;
}

}  // namespace gestureqa::training
