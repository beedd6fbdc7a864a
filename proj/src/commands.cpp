// Copyright 2026 The idxqual Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "idxqual/commands.hpp"

#include <fstream>
#include <sstream>

#include "idxqual/bundle.hpp"
#include "idxqual/error.hpp"
#include "idxqual/experiment.hpp"
#include "json_io.hpp"

namespace idxqual {

namespace fs = std::filesystem;
using json_io::Json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("cannot write " + path.string());
}

fs::path output_dir(const RunConfig& config) {
  if (!config.output_dir) throw ConfigError("no output directory: set output_dir or pass --out");
  return *config.output_dir;
}

RunConfig load_with_overrides(const CommandOptions& options) {
  RunConfig config = load_run_config(options.config);
  if (options.seed) config.experiment.seed = *options.seed;
  if (options.out) config.output_dir = *options.out;
  if (options.threads) {
    if (*options.threads < 1) throw ConfigError("--threads must be positive");
    config.experiment.threads = *options.threads;
    config.experiment.pipeline.threads = *options.threads;
  }
  return config;
}

std::string metrics_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "fold,n_eval,n_excluded,rho,mse\n";
  for (const auto& f : result.folds)
    out << f.fold << ',' << f.n_eval << ',' << f.n_excluded << ',' << format_number(f.rho) << ','
        << format_number(f.mse) << '\n';
  out << "mean,,," << format_number(result.report.rho.mean) << ',' << format_number(result.report.mse.mean) << '\n';
  out << "sd,,," << format_number(result.report.rho.sd) << ',' << format_number(result.report.mse.sd) << '\n';
  return out.str();
}

std::string estimates_jsonl(const ExperimentResult& result) {
  std::string out;
  for (const auto& f : result.folds) {
    for (std::size_t i = 0; i < f.estimates.size(); ++i) {
      const auto& e = f.estimates[i];
      Json j;
      j["fold"] = f.fold;
      j["id"] = e.doc_id;
      j["recall_hat"] = e.recall_hat;
      j["true_recall"] = f.true_recall[i] ? Json(*f.true_recall[i]) : Json(nullptr);
      j["true_precision"] = f.true_precision[i];
      j["precision"] = {{"mean", e.precision.mean},
                        {"product", e.precision.product},
                        {"median", e.precision.median},
                        {"min", e.precision.min}};
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::string summary_text(const ExperimentResult& result) {
  std::ostringstream out;
  const auto& c = result.classifier;
  out << "mask " << result.mask.to_string() << '\n'
      << "rho " << format_number(result.report.rho.mean) << " +- " << format_number(result.report.rho.sd) << '\n'
      << "mse " << format_number(result.report.mse.mean) << " +- " << format_number(result.report.mse.sd) << '\n'
      << "excluded_empty_gold " << result.report.excluded << '\n'
      << "classifier_trainings " << result.classifier_trainings << '\n'
      << "calibration_trainings " << result.calibration_trainings << '\n'
      << "classifier_micro_f1 " << format_number(c.micro_f1) << '\n'
      << "classifier_sample_f1 " << format_number(c.sample_f1) << '\n'
      << "classifier_sample_recall " << format_number(c.sample_recall) << '\n';
  return out.str();
}

}  // namespace

RunConfig resolve_config(const CommandOptions& options) {
  RunConfig config = load_with_overrides(options);
  validate_paths(config);
  return config;
}

void cmd_synth(const CommandOptions& options, std::ostream& log) {
  RunConfig config = load_with_overrides(options);
  SynthConfig synth = config.synth.value_or(SynthConfig{});
  if (!config.synth) synth.seed = config.experiment.seed;
  if (options.seed) synth.seed = *options.seed;
  const fs::path dir = output_dir(config);
  if (!fs::is_directory(dir)) throw ConfigError("output directory not found: " + dir.string());
  const Corpus corpus = generate(synth);
  write_synth(corpus, dir);
  log << "wrote " << corpus.size() << " documents and " << corpus.vocabulary->size() << " concepts to "
      << dir.string() << '\n';
}

void cmd_run(const CommandOptions& options, std::ostream& log) {
  const RunConfig config = resolve_config(options);
  const fs::path dir = output_dir(config);
  const Corpus corpus = load_run_corpus(config);
  const auto result = run_experiment(corpus, config.experiment);
  write_file(dir / "metrics.csv", metrics_csv(result));
  write_file(dir / "sweep.csv", sweep_csv(result.pooled_sweep));
  for (const auto& f : result.folds) write_file(dir / ("sweep_fold" + std::to_string(f.fold) + ".csv"), sweep_csv(f.sweep));
  write_file(dir / "estimates.jsonl", estimates_jsonl(result));
  write_file(dir / "summary.txt", summary_text(result));
  log << summary_text(result) << '\n' << sweep_table(result.pooled_sweep);
}

void cmd_ablate(const CommandOptions& options, std::ostream& log) {
  const RunConfig config = resolve_config(options);
  const fs::path dir = output_dir(config);
  const Corpus corpus = load_run_corpus(config);
  const auto report = run_ablation(corpus, config.experiment, config.ablation_groups);
  write_file(dir / "ablation.csv", ablation_csv(report));
  write_file(dir / "ablation.txt", ablation_table(report));
  log << ablation_table(report);
}

void cmd_sweep(const fs::path& estimates, const std::optional<fs::path>& config, const fs::path& out,
               std::ostream& log) {
  if (!fs::is_directory(out)) throw ConfigError("output directory not found: " + out.string());
  std::vector<double> thresholds = default_thresholds();
  if (config) thresholds = load_run_config(*config).experiment.thresholds;
  std::ifstream in(estimates);
  if (!in) throw Error("cannot open " + estimates.string());
  std::vector<double> recall_hat, true_precision;
  std::vector<std::optional<double>> true_recall;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = Json::parse(line);
      recall_hat.push_back(j.at("recall_hat").get<double>());
      const auto& r = j.at("true_recall");
      true_recall.push_back(r.is_null() ? std::nullopt : std::optional<double>(r.get<double>()));
      true_precision.push_back(j.at("true_precision").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed estimate record: ") + e.what(), line_no);
    }
  }
  const auto rows = threshold_sweep(recall_hat, true_recall, true_precision, thresholds);
  write_file(out / "sweep.csv", sweep_csv(rows));
  log << sweep_table(rows);
}

void cmd_train(const CommandOptions& options, std::ostream& log) {
  const RunConfig config = resolve_config(options);
  const fs::path dir = output_dir(config);
  const Corpus corpus = load_run_corpus(config);
  const auto bundle = train_bundle(corpus, config);
  save_bundle(bundle, dir / "model.json");
  log << "trained on " << corpus.size() << " documents; bundle written to " << (dir / "model.json").string() << '\n';
}

void cmd_predict(const fs::path& bundle_path, const fs::path& corpus, const fs::path& out, std::ostream& log) {
  if (!fs::is_directory(out)) throw ConfigError("output directory not found: " + out.string());
  const auto bundle = load_bundle(bundle_path);
  std::ifstream in(corpus);
  if (!in) throw Error("cannot open " + corpus.string());
  std::string result, line;
  std::size_t line_no = 0, n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id, text;
    try {
      const auto j = Json::parse(line);
      id = j.at("id").get<std::string>();
      text = j.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed document: ") + e.what(), line_no);
    }
    result += result_json(bundle, apply_bundle(bundle, id, text));
    result += '\n';
    ++n;
  }
  write_file(out / "predictions.jsonl", result);
  log << "scored " << n << " documents\n";
}

}  // namespace idxqual
