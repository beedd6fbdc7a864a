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
#include <memory>
#include <span>
#include <vector>

#include "idxqual/corpus.hpp"
#include "idxqual/mlc.hpp"
#include "idxqual/quality.hpp"
#include "idxqual/regress.hpp"
#include "idxqual/textproc.hpp"

namespace idxqual {

struct TextParams {
  std::size_t min_df = 1;
  std::size_t max_terms = 100000;
  /// Cap of the TERM_i indicator list used by calibration and quality features.
  std::size_t quality_terms = 1000;
};

struct PipelineParams {
  TextParams text;
  BrlrParams classifier;
  LearnerSpec calibration;
  int threads = 1;
};

/// Classifier plus label calibration trained on one slice of a corpus.
struct IndexingModel {
  std::shared_ptr<const Vocabulary> vocabulary;
  TermIndex classifier_index;
  BrlrModel classifier;
  CalibrationModel calibration;

  struct Analysis {
    Prediction prediction;
    std::vector<double> calibrated;
    FeatureVector features;
  };

  Analysis analyze(const TokenSeq& tokens, GroupMask mask) const;
};

/// Trains classifier and calibration on `train_docs`. `tokens` is aligned
/// with corpus.documents. Seeds come from params.
IndexingModel train_indexing_model(const Corpus& corpus, std::span<const TokenSeq> tokens,
                                   std::span<const std::size_t> train_docs, const TermIndex& quality_terms,
                                   const PipelineParams& params);

/// Tokens of every document, in corpus order.
std::vector<TokenSeq> tokenize_corpus(const Corpus& corpus);

/// Quality term list over the selected documents.
TermIndex build_quality_terms(std::span<const TokenSeq> tokens, std::span<const std::size_t> docs,
                              const TextParams& params);

}  // namespace idxqual
