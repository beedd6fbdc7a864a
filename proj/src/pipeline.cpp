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

#include "idxqual/pipeline.hpp"

#include "idxqual/error.hpp"

namespace idxqual {

namespace {

std::vector<TokenSeq> select(std::span<const TokenSeq> tokens, std::span<const std::size_t> docs) {
  std::vector<TokenSeq> out;
  out.reserve(docs.size());
  for (auto d : docs) out.push_back(tokens[d]);
  return out;
}

}  // namespace

IndexingModel::Analysis IndexingModel::analyze(const TokenSeq& tokens, GroupMask mask) const {
  Analysis out;
  out.prediction = classifier.predict(vectorize(tokens, classifier_index));
  out.calibrated = predict_calibration(calibration, tokens);
  out.features = extract_features(tokens, out.prediction, out.calibrated, *vocabulary, classifier_index,
                                  calibration.quality_terms, mask);
  return out;
}

std::vector<TokenSeq> tokenize_corpus(const Corpus& corpus) {
  std::vector<TokenSeq> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus.documents) out.push_back(tokenize(doc.text));
  return out;
}

TermIndex build_quality_terms(std::span<const TokenSeq> tokens, std::span<const std::size_t> docs,
                              const TextParams& params) {
  const auto slice = select(tokens, docs);
  return build_term_index(slice, 1, params.quality_terms);
}

IndexingModel train_indexing_model(const Corpus& corpus, std::span<const TokenSeq> tokens,
                                   std::span<const std::size_t> train_docs, const TermIndex& quality_terms,
                                   const PipelineParams& params) {
  if (train_docs.empty()) throw InvalidArgument("train_indexing_model: empty training slice");
  if (tokens.size() != corpus.size()) throw InvalidArgument("train_indexing_model: tokens not aligned with corpus");
  IndexingModel model;
  model.vocabulary = corpus.vocabulary;
  const auto slice = select(tokens, train_docs);
  model.classifier_index = build_term_index(slice, params.text.min_df, params.text.max_terms);

  std::vector<DocVector> rows;
  std::vector<std::vector<std::uint32_t>> labels;
  rows.reserve(slice.size());
  labels.reserve(slice.size());
  for (std::size_t i = 0; i < slice.size(); ++i) {
    rows.push_back(vectorize(slice[i], model.classifier_index));
    labels.push_back(corpus.documents[train_docs[i]].gold_index);
  }
  auto classifier_params = params.classifier;
  classifier_params.threads = params.threads;
  model.classifier =
      train_brlr(*corpus.vocabulary, rows, labels, model.classifier_index.size(), classifier_params);
  model.calibration = train_calibration(slice, category_counts(*corpus.vocabulary, labels), quality_terms,
                                        corpus.vocabulary->categories(), params.calibration, params.threads);
  return model;
}

}  // namespace idxqual
