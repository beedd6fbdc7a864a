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

#include "idxqual/mlc.hpp"

#include <cmath>
#include <numeric>

#include "idxqual/error.hpp"
#include "idxqual/parallel.hpp"
#include "idxqual/random.hpp"

namespace idxqual {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogisticModel::score(const DocVector& x) const {
  double z = bias;
  if (!constant)
    for (const auto& [j, v] : x) z += weights[j] * v;
  return z;
}

LossAndGradient logistic_loss(const LogisticModel& model, const DocVector& x, int label, double lambda) {
  const double z = model.score(x);
  const double p = sigmoid(z);
  LossAndGradient out;
  // log(1 + e^-z) for y=1 and log(1 + e^z) for y=0, in a stable form
  const double margin = label == 1 ? z : -z;
  out.loss = margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
  double norm2 = 0.0;
  for (double w : model.weights) norm2 += w * w;
  out.loss += 0.5 * lambda * norm2;
  const double g = p - label;
  out.weight_gradient.resize(model.weights.size());
  for (std::size_t j = 0; j < model.weights.size(); ++j) out.weight_gradient[j] = lambda * model.weights[j];
  for (const auto& [j, v] : x) out.weight_gradient[j] += g * v;
  out.bias_gradient = g;
  return out;
}

LogisticModel train_logreg(std::span<const DocVector> rows, std::span<const std::uint8_t> labels,
                           std::size_t dim, const SgdParams& params) {
  if (rows.empty()) throw InvalidArgument("train_logreg: no rows");
  if (rows.size() != labels.size()) throw InvalidArgument("train_logreg: rows and labels differ in length");
  for (const auto& row : rows)
    for (const auto& [j, v] : row) {
      if (!std::isfinite(v)) throw InvalidArgument("train_logreg: non-finite feature value");
      if (j >= dim) throw InvalidArgument("train_logreg: feature index out of range");
    }
  for (auto y : labels)
    if (y > 1) throw InvalidArgument("train_logreg: labels must be 0 or 1");

  // w = scale * v so the L2 shrink is O(1) per step.
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(params.seed);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t r : order) {
      const double eta = params.eta0 / (1.0 + params.eta0 * params.lambda * static_cast<double>(t));
      double z = bias;
      for (const auto& [j, x] : rows[r]) z += scale * v[j] * x;
      const double g = sigmoid(z) - labels[r];
      scale *= 1.0 - eta * params.lambda;
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
      const double step = eta * g / scale;
      for (const auto& [j, x] : rows[r]) v[j] -= step * x;
      bias -= eta * g;
      ++t;
    }
  }
  LogisticModel model;
  model.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) model.weights[j] = scale * v[j];
  model.bias = bias;
  for (double w : model.weights)
    if (!std::isfinite(w)) throw Error("train_logreg: diverged (non-finite weight)");
  if (!std::isfinite(model.bias)) throw Error("train_logreg: diverged (non-finite bias)");
  return model;
}

BrlrModel::BrlrModel(std::vector<LogisticModel> models, std::size_t dim, double threshold, SgdParams params)
    : models_(std::move(models)), dim_(dim), threshold_(threshold), params_(params) {
  for (const auto& m : models_)
    if (!m.constant && m.weights.size() != dim_) throw InvalidArgument("BrlrModel: weight vector size mismatch");
}

std::vector<double> BrlrModel::confidences(const DocVector& x) const {
  std::vector<double> out(models_.size());
  for (std::size_t c = 0; c < models_.size(); ++c) out[c] = sigmoid(models_[c].score(x));
  return out;
}

Prediction BrlrModel::predict(const DocVector& x) const {
  Prediction pred;
  for (std::size_t c = 0; c < models_.size(); ++c) {
    const double p = sigmoid(models_[c].score(x));
    if (p >= threshold_) pred.assigned.push_back({static_cast<std::uint32_t>(c), p});
  }
  return pred;
}

BrlrModel train_brlr(const Vocabulary& vocabulary, std::span<const DocVector> rows,
                     std::span<const std::vector<std::uint32_t>> labels, std::size_t dim,
                     const BrlrParams& params) {
  if (rows.empty()) throw InvalidArgument("train_brlr: empty training slice");
  if (rows.size() != labels.size()) throw InvalidArgument("train_brlr: rows and labels differ in length");
  const std::size_t n_concepts = vocabulary.size();
  std::vector<std::vector<std::size_t>> positives(n_concepts);
  for (std::size_t r = 0; r < labels.size(); ++r)
    for (auto c : labels[r]) {
      if (c >= n_concepts) throw InvalidArgument("train_brlr: concept index out of range");
      positives[c].push_back(r);
    }

  std::vector<LogisticModel> models(n_concepts);
  parallel_for(n_concepts, params.threads, [&](std::size_t c) {
    if (positives[c].empty()) {
      models[c].constant = true;
      models[c].bias = kConstantNegativeBias;
      return;
    }
    std::vector<std::uint8_t> y(rows.size(), 0);
    for (auto r : positives[c]) y[r] = 1;
    SgdParams sgd = params.sgd;
    sgd.seed = derive_seed(params.sgd.seed, vocabulary.concept_at(c).id);
    models[c] = train_logreg(rows, y, dim, sgd);
  });
  return BrlrModel(std::move(models), dim, params.threshold, params.sgd);
}

BrlrModel train_brlr(const Corpus& corpus, std::span<const std::size_t> doc_indices, const TermIndex& index,
                     const BrlrParams& params) {
  std::vector<DocVector> rows;
  std::vector<std::vector<std::uint32_t>> labels;
  rows.reserve(doc_indices.size());
  labels.reserve(doc_indices.size());
  for (auto d : doc_indices) {
    const auto& doc = corpus.documents.at(d);
    rows.push_back(vectorize(tokenize(doc.text), index));
    labels.push_back(doc.gold_index);
  }
  return train_brlr(*corpus.vocabulary, rows, labels, index.size(), params);
}

}  // namespace idxqual
