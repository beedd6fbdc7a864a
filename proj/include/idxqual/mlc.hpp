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
#include <span>
#include <string>
#include <vector>

#include "idxqual/corpus.hpp"
#include "idxqual/textproc.hpp"

namespace idxqual {

struct SgdParams {
  int epochs = 10;
  /// Initial step; the rate decays as eta0 / (1 + eta0 * lambda * t).
  double eta0 = 0.1;
  /// L2 strength (bias is not penalized).
  double lambda = 1e-5;
  std::uint64_t seed = 0;
};

struct BrlrParams {
  SgdParams sgd;
  /// Assignment threshold on the confidence.
  double threshold = 0.5;
  /// Worker count; never changes the result.
  int threads = 1;
};

/// Bias of the constant model used for concepts without positive examples.
inline constexpr double kConstantNegativeBias = -9.0;

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  /// Constant model: weights empty, score is the bias alone.
  bool constant = false;

  double score(const DocVector& x) const;
};

double sigmoid(double z);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> weight_gradient;
  double bias_gradient = 0.0;
};

/// L2-regularized log-loss of one example and its gradient:
/// -[y log p + (1-y) log(1-p)] + lambda/2 |w|^2 with p = sigmoid(w.x + b).
LossAndGradient logistic_loss(const LogisticModel& model, const DocVector& x, int label, double lambda);

/// SGD over shuffled rows; `dim` is the feature dimension.
LogisticModel train_logreg(std::span<const DocVector> rows, std::span<const std::uint8_t> labels,
                           std::size_t dim, const SgdParams& params);

struct Assignment {
  std::uint32_t concept_index;
  double confidence;
};

struct Prediction {
  std::string doc_id;
  /// Assigned concepts (confidence >= threshold), ascending concept index.
  std::vector<Assignment> assigned;
};

/// One independent logistic model per vocabulary concept.
class BrlrModel {
 public:
  BrlrModel() = default;
  BrlrModel(std::vector<LogisticModel> models, std::size_t dim, double threshold, SgdParams params);

  std::size_t concept_count() const { return models_.size(); }
  std::size_t dimension() const { return dim_; }
  double threshold() const { return threshold_; }
  const SgdParams& params() const { return params_; }
  const std::vector<LogisticModel>& models() const { return models_; }

  /// Confidence of every concept.
  std::vector<double> confidences(const DocVector& x) const;
  Prediction predict(const DocVector& x) const;

 private:
  std::vector<LogisticModel> models_;
  std::size_t dim_ = 0;
  double threshold_ = 0.5;
  SgdParams params_;
};

/// Trains one model per vocabulary concept. labels[r] lists the concept
/// indices of row r. Concepts with no positives get the constant model.
BrlrModel train_brlr(const Vocabulary& vocabulary, std::span<const DocVector> rows,
                     std::span<const std::vector<std::uint32_t>> labels, std::size_t dim,
                     const BrlrParams& params);

/// Convenience overload: vectorizes the selected documents with `index`.
BrlrModel train_brlr(const Corpus& corpus, std::span<const std::size_t> doc_indices, const TermIndex& index,
                     const BrlrParams& params);

}  // namespace idxqual
