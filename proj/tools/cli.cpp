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

#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gestureqa/error.hpp"
#include "gestureqa/manifest.hpp"
#include "gestureqa/metrics/report.hpp"
#include "gestureqa/model/scorer.hpp"
#include "gestureqa/service/annotation.hpp"
#include "gestureqa/service/http.hpp"
#include "gestureqa/subjective/aggregate.hpp"
#include "gestureqa/subjective/analytics.hpp"
#include "gestureqa/synth/synth.hpp"
#include "gestureqa/training/training.hpp"

namespace gestureqa::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set: empty path component in '" + key + "'");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("--set: '" + key + "' descends into a non-object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

void check_sections(const json& config, const std::vector<std::string>& allowed) {
  if (!config.is_object()) throw ConfigError("config: expected an object");
  for (const auto& [key, value] : config.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError("config: unknown section '" + key + "' (this command reads: " + list + ")");
    }
  }
}

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_file, "JSON config file");
  cmd->add_option("--set", c.overrides, "Override a config value, dotted.key=value (repeatable)");
}

json load_config(const Common& c, const std::vector<std::string>& sections,
                 const std::vector<std::string>& flag_overrides) {
  json config = json::object();
  if (!c.config_file.empty()) {
    std::ifstream in(c.config_file);
    if (!in) throw IoError("cannot open config " + c.config_file);
    try {
      config = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(c.config_file + ": " + e.what());
    }
  }
  // dedicated flags first, so --set has the last word
  for (const auto& o : flag_overrides) apply_override(config, o);
  for (const auto& o : c.overrides) apply_override(config, o);
  check_sections(config, sections);
  return config;
}

template <class T>
T section(const json& config, const char* name) {
  T value{};
  if (config.contains(name)) value = config.at(name).get<T>();
  return value;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string kv(const std::string& key, const std::string& value) { return key + "=" + value; }

std::vector<subjective::AggregateRecord> aggregates_from(const fs::path& aggregates, const fs::path& ratings,
                                                         const subjective::PipelineConfig& pipeline) {
  if (!aggregates.empty()) return subjective::load_aggregates_csv(aggregates);
  if (ratings.empty()) throw ConfigError("need --aggregates or --ratings");
  return subjective::run_pipeline(subjective::load_ratings(ratings), pipeline).aggregates;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string out;
  std::optional<std::size_t> n_audio;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> media;
  bool adversary = false;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  std::vector<std::string> flags;
  if (a.n_audio) flags.push_back(kv("synth.n_audio", std::to_string(*a.n_audio)));
  if (a.seed) flags.push_back(kv("synth.seed", std::to_string(*a.seed)));
  if (a.media) flags.push_back(kv("synth.media", json(*a.media).dump()));
  if (a.adversary) flags.push_back("synth.adversary=true");
  const json config = load_config(a.common, {"synth"}, flags);
  const auto sc = section<synth::SynthConfig>(config, "synth");

  const fs::path dir = a.out;
  const auto dataset = synth::generate_dataset(sc, dir);
  const auto ratings = synth::generate_ratings(dataset, sc);
  subjective::save_ratings(dir / "ratings.jsonl", ratings);
  write_json(dir / "config.json", {{"synth", sc}});
  out << "wrote " << dataset.manifest.samples.size() << " samples and " << ratings.size() << " ratings to "
      << dir.string() << "\n";
  return kOk;
}

// ---- aggregate ------------------------------------------------------------

struct AggregateArgs {
  Common common;
  std::string in;
  std::string out;
  std::string report;
};

int cmd_aggregate(const AggregateArgs& a, std::ostream& out, std::ostream& err) {
  const json config = load_config(a.common, {"pipeline"}, {});
  const auto pc = section<subjective::PipelineConfig>(config, "pipeline");
  const auto result = subjective::run_pipeline(subjective::load_ratings(a.in), pc);
  if (a.out.empty()) {
    subjective::write_aggregates_csv(out, result.aggregates);
  } else {
    subjective::save_aggregates_csv(a.out, result.aggregates);
  }
  if (!a.report.empty()) {
    write_json(a.report, {{"pipeline", pc},
                          {"records_used", result.records_used},
                          {"excluded_quality", result.excluded_quality},
                          {"excluded_consistency", result.excluded_consistency},
                          {"excluded", result.excluded_any},
                          {"exceptions", result.exceptions}});
  }
  for (const auto& r : result.excluded_any) err << "excluded rater " << r << "\n";
  for (const auto& s : result.exceptions) err << "no surviving rating for " << s << "\n";
  return kOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string data;
  std::string aggregates;
  std::string ratings;
  std::string runs = "runs";
  std::string name = "run";
  std::optional<std::size_t> folds;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  std::vector<std::string> flags;
  if (a.folds) flags.push_back(kv("train.k_folds", std::to_string(*a.folds)));
  if (a.epochs) flags.push_back(kv("train.epochs", std::to_string(*a.epochs)));
  if (a.seed) flags.push_back(kv("train.seed", std::to_string(*a.seed)));
  const json config = load_config(a.common, {"train", "model", "pipeline"}, flags);
  const auto tc = section<training::TrainConfig>(config, "train");
  const auto mc = section<model::ModelConfig>(config, "model");
  const auto pc = section<subjective::PipelineConfig>(config, "pipeline");
  tc.validate();

  const fs::path data = a.data;
  const auto manifest = load_manifest(data / "manifest.json");
  fs::path ratings = a.ratings;
  if (a.aggregates.empty() && ratings.empty()) ratings = data / "ratings.jsonl";
  const auto aggregates = aggregates_from(a.aggregates, ratings, pc);

  const fs::path run_dir = fs::path(a.runs) / a.name;
  fs::create_directories(run_dir);
  write_json(run_dir / "config.json", {{"train", tc}, {"model", mc}, {"pipeline", pc}});

  training::tune_allocator();
  const training::InputCache inputs(manifest, data, mc.encoders);
  training::ProgressFn progress;
  if (!a.quiet) progress = [&out](const std::string& line) { out << line << std::endl; };
  const auto result = training::cross_validate(tc, mc, manifest, inputs, aggregates, run_dir, progress);
  out << "mean SRCC quality " << result.mean.quality.srcc << ", consistency " << result.mean.consistency.srcc
      << " over " << result.folds.size() << " folds; " << run_dir.string() << "\n";
  return kOk;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string checkpoint;
  std::string data;
  std::string aggregates;
  std::string ratings;
  std::string ids;
  std::string out;
  bool logistic = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const json config = load_config(a.common, {"pipeline"}, {});
  const auto pc = section<subjective::PipelineConfig>(config, "pipeline");
  const auto scorer = model::load_scorer(a.checkpoint);
  const fs::path data = a.data;
  const auto manifest = load_manifest(data / "manifest.json");
  fs::path ratings = a.ratings;
  if (a.aggregates.empty() && ratings.empty()) ratings = data / "ratings.jsonl";
  const auto aggregates = aggregates_from(a.aggregates, ratings, pc);

  std::vector<std::string> ids;
  if (!a.ids.empty()) {
    std::ifstream in(a.ids);
    if (!in) throw IoError("cannot open " + a.ids);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) ids.push_back(line);
    }
  } else {
    for (const auto& agg : aggregates) ids.push_back(agg.sample_id);
  }
  DatasetManifest subset;
  subset.version = manifest.version;
  subset.motion_dim = manifest.motion_dim;
  for (const auto& id : ids) {
    const auto* s = manifest.find(id);
    if (!s) throw NotFoundError("sample not in manifest: " + id);
    subset.samples.push_back(*s);
  }
  const training::InputCache inputs(subset, data, scorer.config().encoders);
  const auto predictions = training::predict_samples(scorer, inputs, ids);
  const auto report = metrics::evaluate(predictions, aggregates, {a.logistic});
  if (!a.out.empty()) metrics::save_report(a.out, report);
  out << json(report).dump(2) << "\n";
  return kOk;
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
  Common common;
  std::string data;
  std::string log;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> roster;
  std::uint64_t seed = 0;
  bool revision = false;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  const json config = load_config(a.common, {"pipeline"}, {});
  service::ServiceOptions options;
  options.pipeline = section<subjective::PipelineConfig>(config, "pipeline");
  options.roster = a.roster;
  options.seed = a.seed;
  options.revision_mode = a.revision;
  const fs::path data = a.data;
  const fs::path log = a.log.empty() ? data / "live_ratings.jsonl" : fs::path(a.log);

  // Block the stop signals before any server thread exists so that only the
  // waiter below sees them.
  sigset_t stop_set;
  sigemptyset(&stop_set);
  sigaddset(&stop_set, SIGINT);
  sigaddset(&stop_set, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &stop_set, &previous);

  service::AnnotationService svc(load_manifest(data / "manifest.json"), data, log, options);
  service::HttpServer server(svc);
  const int port = server.bind(a.host, a.port);
  out << "listening on http://" << a.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&stop_set, &sig);
    server.stop();
  });
  server.listen();
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "stopped" << std::endl;
  return kOk;
}

// ---- report ---------------------------------------------------------------

struct ReportArgs {
  Common common;
  std::string data;
  std::string aggregates;
  std::string ratings;
  std::string format = "markdown";
  std::string out_dir;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const json config = load_config(a.common, {"pipeline"}, {});
  const auto pc = section<subjective::PipelineConfig>(config, "pipeline");
  const fs::path data = a.data;
  const auto manifest = load_manifest(data / "manifest.json");
  fs::path ratings = a.ratings;
  if (a.aggregates.empty() && ratings.empty()) ratings = data / "ratings.jsonl";
  const auto aggregates = aggregates_from(a.aggregates, ratings, pc);

  const auto ranges = subjective::score_range_report(aggregates, manifest);
  const auto congruence = subjective::emotion_congruence_accuracy(aggregates, manifest);
  const bool csv = a.format == "csv";
  const std::string range_text = csv ? subjective::score_range_csv(ranges) : subjective::score_range_markdown(ranges);
  const std::string cong_text =
      csv ? subjective::congruence_csv(congruence) : subjective::congruence_markdown(congruence);
  if (a.out_dir.empty()) {
    out << range_text << "\n" << cong_text;
  } else {
    const std::string ext = csv ? ".csv" : ".md";
    write_text(fs::path(a.out_dir) / ("score_ranges" + ext), range_text);
    write_text(fs::path(a.out_dir) / ("emotion_congruence" + ext), cong_text);
    out << "wrote " << a.out_dir << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gestureqa: subjective ratings, planted datasets and gesture quality scoring", "gestureqa"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a planted-signal dataset and its ratings log");
  add_common(synth, synth_args.common);
  synth->add_option("-o,--out", synth_args.out, "Output directory")->required();
  synth->add_option("--n-audio", synth_args.n_audio, "Audio clips (multiple of 8)");
  synth->add_option("--seed", synth_args.seed, "Generator seed");
  synth->add_option("--media", synth_args.media, "full or none")->check(CLI::IsMember({"full", "none"}));
  synth->add_flag("--adversary", synth_args.adversary, "Add a rater answering on a reversed scale");

  AggregateArgs agg_args;
  auto* aggregate = app.add_subcommand("aggregate", "Ratings log to per-sample MOS/ESBA CSV");
  add_common(aggregate, agg_args.common);
  aggregate->add_option("-i,--in", agg_args.in, "Ratings log (JSON lines)")->required();
  aggregate->add_option("-o,--out", agg_args.out, "CSV output (default stdout)");
  aggregate->add_option("--report", agg_args.report, "Write the exclusion report as JSON");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "k-fold cross-validation");
  add_common(train, train_args.common);
  train->add_option("-d,--data", train_args.data, "Dataset directory with manifest.json")->required();
  train->add_option("--aggregates", train_args.aggregates, "Aggregates CSV");
  train->add_option("--ratings", train_args.ratings, "Ratings log (default <data>/ratings.jsonl)");
  train->add_option("--runs", train_args.runs, "Runs directory")->capture_default_str();
  train->add_option("--name", train_args.name, "Run name")->capture_default_str();
  train->add_option("--folds", train_args.folds, "Number of folds");
  train->add_option("--epochs", train_args.epochs, "Epochs per fold");
  train->add_option("--seed", train_args.seed, "Fold and shuffle seed");
  train->add_flag("-q,--quiet", train_args.quiet, "No progress output");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score a checkpoint against MOS");
  add_common(eval, eval_args.common);
  eval->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint directory")->required();
  eval->add_option("-d,--data", eval_args.data, "Dataset directory with manifest.json")->required();
  eval->add_option("--aggregates", eval_args.aggregates, "Aggregates CSV");
  eval->add_option("--ratings", eval_args.ratings, "Ratings log (default <data>/ratings.jsonl)");
  eval->add_option("--ids", eval_args.ids, "File with one sample id per line (default: every aggregate)");
  eval->add_option("-o,--out", eval_args.out, "Write the report as JSON");
  eval->add_flag("--logistic", eval_args.logistic, "Fit a 4-parameter logistic before scoring");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  add_common(serve, serve_args.common);
  serve->add_option("-d,--data", serve_args.data, "Dataset directory with manifest.json")->required();
  serve->add_option("--log", serve_args.log, "Ratings log (default <data>/live_ratings.jsonl)");
  serve->add_option("--host", serve_args.host)->capture_default_str();
  serve->add_option("--port", serve_args.port, "0 picks a free port")->capture_default_str();
  serve->add_option("--roster", serve_args.roster, "Registered raters (default: open)")->delimiter(',');
  serve->add_option("--seed", serve_args.seed, "Presentation-order seed")->capture_default_str();
  serve->add_flag("--revision", serve_args.revision, "Offer rated samples again after the last one");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Per-method score ranges and emotion congruence tables");
  add_common(report, report_args.common);
  report->add_option("-d,--data", report_args.data, "Dataset directory with manifest.json")->required();
  report->add_option("--aggregates", report_args.aggregates, "Aggregates CSV");
  report->add_option("--ratings", report_args.ratings, "Ratings log (default <data>/ratings.jsonl)");
  report->add_option("--format", report_args.format)->check(CLI::IsMember({"csv", "markdown"}))->capture_default_str();
  report->add_option("--out-dir", report_args.out_dir, "Write files instead of printing");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gestureqa: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_args, out);
    if (aggregate->parsed()) return cmd_aggregate(agg_args, out, err);
    if (train->parsed()) return cmd_train(train_args, out);
    if (eval->parsed()) return cmd_eval(eval_args, out);
    if (serve->parsed()) return cmd_serve(serve_args, out);
    if (report->parsed()) return cmd_report(report_args, out);
  } catch (const ValidationError& e) {
    err << "gestureqa: invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const ConfigError& e) {
    err << "gestureqa: config: " << e.what() << "\n";
    return kValidation;
  } catch (const FormatError& e) {
    err << "gestureqa: malformed input: " << e.what() << "\n";
    return kValidation;
  } catch (const ContractError& e) {
    err << "gestureqa: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "gestureqa: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace gestureqa::cli
