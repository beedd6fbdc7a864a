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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "idxqual/config.hpp"
#include "idxqual/pipeline.hpp"

namespace idxqual {

inline constexpr int kBundleVersion = 1;
inline constexpr std::string_view kBundleFormat = "idxqual-bundle";

/// Trained indexing pipeline plus recall estimator, ready to apply to new text.
struct ModelBundle {
  int version = kBundleVersion;
  IndexingModel indexing;
  RecallEstimator recall;
  /// Configuration the bundle was trained with.
  RunConfig config;
};

struct DocumentResult {
  Prediction prediction;
  QualityEstimate estimate;
};

/// Trains the pipeline on the whole corpus. Recall-estimator rows come from
/// an inner cross-validation over the same corpus (config inner fold count).
ModelBundle train_bundle(const Corpus& corpus, const RunConfig& config);

DocumentResult apply_bundle(const ModelBundle& bundle, const std::string& doc_id, std::string_view text);

std::string bundle_json(const ModelBundle& bundle);
/// Throws BundleError on malformed, truncated or incompatible input.
ModelBundle parse_bundle(std::string_view text);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

/// One JSON line: id, assigned concepts with confidences, recall estimate and
/// precision scores.
std::string result_json(const ModelBundle& bundle, const DocumentResult& result);

}  // namespace idxqual
