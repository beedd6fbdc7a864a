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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idxqual/corpus.hpp"
#include "idxqual/eval.hpp"
#include "idxqual/pipeline.hpp"
#include "idxqual/quality.hpp"

namespace idxqual {

struct ExperimentConfig {
  std::size_t outer_folds = 5;
  std::size_t inner_folds = 5;
  std::uint64_t seed = 0;
  PipelineParams pipeline;
  LearnerSpec recall;
  GroupMask mask = GroupMask::all();
  std::vector<double> thresholds = default_thresholds();
  int threads = 1;
};

/// One eval-test document scored by the validation model of its fold.
struct EvalRecord {
  std::size_t doc_index = 0;
  std::string doc_id;
  FeatureVector features;
  std::optional<double> true_recall;
  double true_precision = 1.0;
  PrecisionScores precision;
  std::vector<std::uint32_t> assigned;
};

struct FoldData {
  /// Quality features of the inner dev-test documents and their true recall.
  std::vector<FeatureVector> train_features;
  std::vector<double> train_recall;
  std::size_t train_excluded = 0;
  std::vector<EvalRecord> eval;
};

/// Everything the protocol produces before the recall estimator is fit:
/// features are extracted with all groups so any mask can be evaluated.
struct ExperimentData {
  std::vector<FoldData> folds;
  std::size_t classifier_trainings = 0;
  std::size_t calibration_trainings = 0;
  /// Validation classifiers on their eval-test folds, pooled.
  F1Summary classifier;
};

struct FoldOutcome {
  std::size_t fold = 0;
  std::vector<QualityEstimate> estimates;
  std::vector<std::optional<double>> true_recall;
  std::vector<double> true_precision;
  double rho = 0.0;
  double mse = 0.0;
  std::size_t n_eval = 0;
  std::size_t n_excluded = 0;
  std::vector<SweepRow> sweep;
};

struct ExperimentResult {
  GroupMask mask;
  MetricReport report;
  std::vector<FoldOutcome> folds;
  /// Sweep over the eval-test documents of all folds together.
  std::vector<SweepRow> pooled_sweep;
  std::size_t classifier_trainings = 0;
  std::size_t calibration_trainings = 0;
  F1Summary classifier;
};

/// Nested cross-validation. Per outer fold: classifier and calibration are
/// trained on each inner dev-train split and applied to its dev-test split,
/// giving (features, true recall) rows; a validation model is then trained on
/// a random sample of the outer training set of dev-train size and applied to
/// the eval-test fold.
ExperimentData collect_experiment_data(const Corpus& corpus, const ExperimentConfig& config);

/// Fits the recall estimator per fold on `mask` and scores the eval-test folds.
ExperimentResult evaluate_experiment(const ExperimentData& data, const ExperimentConfig& config, GroupMask mask);

ExperimentResult run_experiment(const Corpus& corpus, const ExperimentConfig& config);

/// Masks evaluated by an ablation over `groups`: the full set, each
/// leave-one-out set and each single group.
std::vector<GroupMask> ablation_masks(GroupMask groups);

AblationReport run_ablation(const ExperimentData& data, const ExperimentConfig& config, GroupMask groups);
AblationReport run_ablation(const Corpus& corpus, const ExperimentConfig& config, GroupMask groups);

}  // namespace idxqual
