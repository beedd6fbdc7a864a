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

#include "idxqual/experiment.hpp"

#include <algorithm>

#include "idxqual/error.hpp"
#include "idxqual/random.hpp"

namespace idxqual {

namespace {

std::vector<std::uint32_t> assigned_concepts(const Prediction& prediction) {
  std::vector<std::uint32_t> out;
  out.reserve(prediction.assigned.size());
  for (const auto& a : prediction.assigned) out.push_back(a.concept_index);
  return out;
}

PipelineParams pipeline_for(const ExperimentConfig& config, std::uint64_t seed) {
  PipelineParams params = config.pipeline;
  params.threads = config.threads;
  params.classifier.sgd.seed = derive_seed(seed, "classifier");
  params.calibration.seed = derive_seed(seed, "calibration");
  return params;
}

// Random sample without replacement, returned ascending.
std::vector<std::size_t> sample(const std::vector<std::size_t>& items, std::size_t size, std::uint64_t seed) {
  std::vector<std::size_t> pool(items);
  Rng rng(seed);
  size = std::min(size, pool.size());
  for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

ExperimentData collect_experiment_data(const Corpus& corpus, const ExperimentConfig& config) {
  if (!corpus.vocabulary) throw InvalidArgument("run_experiment: corpus without vocabulary");
  const auto plan = make_folds(corpus, config.outer_folds, config.inner_folds, config.seed);
  const auto tokens = tokenize_corpus(corpus);
  const GroupMask all = GroupMask::all();

  ExperimentData data;
  std::vector<std::vector<std::uint32_t>> pooled_gold, pooled_predicted;
  for (std::size_t o = 0; o < plan.outer.size(); ++o) {
    const std::uint64_t fold_seed = derive_seed(config.seed, o);
    const auto training = plan.training_set(o);
    const auto quality_terms = build_quality_terms(tokens, training, config.pipeline.text);
    FoldData fold;

    for (std::size_t i = 0; i < plan.inner[o].size(); ++i) {
      const auto dev_train = plan.dev_train(o, i);
      const auto model = train_indexing_model(corpus, tokens, dev_train, quality_terms,
                                              pipeline_for(config, derive_seed(fold_seed, i)));
      ++data.classifier_trainings;
      ++data.calibration_trainings;
      for (auto d : plan.inner[o][i]) {
        const auto& doc = corpus.documents[d];
        if (!doc.has_gold()) {
          ++fold.train_excluded;
          continue;
        }
        auto analysis = model.analyze(tokens[d], all);
        fold.train_recall.push_back(*doc_recall(doc.gold_index, assigned_concepts(analysis.prediction)));
        fold.train_features.push_back(std::move(analysis.features));
      }
    }

    const std::size_t dev_train_size = training.size() - plan.inner[o].front().size();
    const auto validation_docs = sample(training, dev_train_size, derive_seed(fold_seed, "validation-sample"));
    const auto validation = train_indexing_model(corpus, tokens, validation_docs, quality_terms,
                                                 pipeline_for(config, derive_seed(fold_seed, "validation")));
    ++data.classifier_trainings;
    ++data.calibration_trainings;
    for (auto d : plan.outer[o]) {
      const auto& doc = corpus.documents[d];
      auto analysis = validation.analyze(tokens[d], all);
      EvalRecord record;
      record.doc_index = d;
      record.doc_id = doc.id;
      record.assigned = assigned_concepts(analysis.prediction);
      record.true_recall = doc_recall(doc.gold_index, record.assigned);
      record.true_precision = doc_precision(doc.gold_index, record.assigned);
      record.precision = precision_scores(analysis.prediction);
      record.features = std::move(analysis.features);
      pooled_gold.push_back(doc.gold_index);
      pooled_predicted.push_back(record.assigned);
      fold.eval.push_back(std::move(record));
    }
    data.folds.push_back(std::move(fold));
  }
  data.classifier = f1_scores(pooled_gold, pooled_predicted);
  return data;
}

ExperimentResult evaluate_experiment(const ExperimentData& data, const ExperimentConfig& config, GroupMask mask) {
  if (mask.empty()) throw InvalidArgument("evaluate_experiment: empty feature mask");
  ExperimentResult result;
  result.mask = mask;
  result.classifier_trainings = data.classifier_trainings;
  result.calibration_trainings = data.calibration_trainings;
  result.classifier = data.classifier;

  std::vector<double> rhos, mses;
  std::vector<double> pooled_estimates, pooled_precision;
  std::vector<std::optional<double>> pooled_recall;
  for (std::size_t o = 0; o < data.folds.size(); ++o) {
    const auto& fold = data.folds[o];
    std::vector<FeatureVector> rows;
    rows.reserve(fold.train_features.size());
    for (const auto& fv : fold.train_features) rows.push_back(fv.restricted(mask));
    LearnerSpec learner = config.recall;
    learner.seed = derive_seed(derive_seed(config.seed, o), "recall");
    const auto estimator = train_recall_estimator(rows, fold.train_recall, learner);

    FoldOutcome outcome;
    outcome.fold = o;
    std::vector<double> estimated, truth;
    for (const auto& record : fold.eval) {
      const double recall_hat = estimate_recall(estimator, record.features.restricted(mask));
      outcome.estimates.push_back({record.doc_id, recall_hat, record.precision});
      outcome.true_recall.push_back(record.true_recall);
      outcome.true_precision.push_back(record.true_precision);
      if (record.true_recall) {
        estimated.push_back(recall_hat);
        truth.push_back(*record.true_recall);
      } else {
        ++outcome.n_excluded;
      }
    }
    outcome.n_eval = estimated.size();
    outcome.rho = pearson(estimated, truth);
    outcome.mse = mse(estimated, truth);
    std::vector<double> fold_estimates;
    for (const auto& e : outcome.estimates) fold_estimates.push_back(e.recall_hat);
    outcome.sweep = threshold_sweep(fold_estimates, outcome.true_recall, outcome.true_precision, config.thresholds);
    rhos.push_back(outcome.rho);
    mses.push_back(outcome.mse);
    pooled_estimates.insert(pooled_estimates.end(), fold_estimates.begin(), fold_estimates.end());
    pooled_recall.insert(pooled_recall.end(), outcome.true_recall.begin(), outcome.true_recall.end());
    pooled_precision.insert(pooled_precision.end(), outcome.true_precision.begin(), outcome.true_precision.end());
    result.report.excluded += outcome.n_excluded;
    result.folds.push_back(std::move(outcome));
  }
  result.report.rho = summarize(std::move(rhos));
  result.report.mse = summarize(std::move(mses));
  result.pooled_sweep = threshold_sweep(pooled_estimates, pooled_recall, pooled_precision, config.thresholds);
  return result;
}

ExperimentResult run_experiment(const Corpus& corpus, const ExperimentConfig& config) {
  return evaluate_experiment(collect_experiment_data(corpus, config), config, config.mask);
}

std::vector<GroupMask> ablation_masks(GroupMask groups) {
  if (groups.empty()) throw InvalidArgument("ablation needs at least one feature group");
  std::vector<GroupMask> masks{groups};
  std::vector<FeatureGroup> present;
  for (auto g : kAllGroups)
    if (groups.has(g)) present.push_back(g);
  if (present.size() < 2) return masks;
  for (auto g : present) masks.push_back(groups.without(g));
  for (auto g : present)
    if (std::find(masks.begin(), masks.end(), GroupMask::only(g)) == masks.end())  // two groups: already listed
      masks.push_back(GroupMask::only(g));
  return masks;
}

AblationReport run_ablation(const ExperimentData& data, const ExperimentConfig& config, GroupMask groups) {
  std::vector<std::pair<GroupMask, MetricReport>> runs;
  for (auto mask : ablation_masks(groups)) runs.emplace_back(mask, evaluate_experiment(data, config, mask).report);
  return make_ablation_report(runs);
}

AblationReport run_ablation(const Corpus& corpus, const ExperimentConfig& config, GroupMask groups) {
  return run_ablation(collect_experiment_data(corpus, config), config, groups);
}

}  // namespace idxqual
