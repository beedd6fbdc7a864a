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
#include <string_view>
#include <vector>

#include "idxqual/corpus.hpp"
#include "idxqual/mlc.hpp"
#include "idxqual/regress.hpp"
#include "idxqual/textproc.hpp"

namespace idxqual {

// Reliability-indicator groups: volume (V), content (C), label
// calibration (LC) and confidence aggregations (PI).
enum class FeatureGroup : std::uint8_t {
  kVolume = 1,
  kContent = 2,
  kCalibration = 4,
  kConfidence = 8,
};

inline constexpr FeatureGroup kAllGroups[] = {FeatureGroup::kVolume, FeatureGroup::kContent,
                                              FeatureGroup::kCalibration, FeatureGroup::kConfidence};

std::string_view group_name(FeatureGroup group);

class GroupMask {
 public:
  constexpr GroupMask() = default;
  constexpr explicit GroupMask(std::uint8_t bits) : bits_(bits & 0x0f) {}
  static constexpr GroupMask all() { return GroupMask(0x0f); }
  static constexpr GroupMask only(FeatureGroup g) { return GroupMask(static_cast<std::uint8_t>(g)); }

  constexpr bool has(FeatureGroup g) const { return (bits_ & static_cast<std::uint8_t>(g)) != 0; }
  constexpr GroupMask without(FeatureGroup g) const {
    return GroupMask(static_cast<std::uint8_t>(bits_ & ~static_cast<std::uint8_t>(g)));
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(GroupMask other) const { return (bits_ & other.bits_) == other.bits_; }
  constexpr std::uint8_t bits() const { return bits_; }

  /// "V+C+LC+PI" style; "none" for the empty mask.
  std::string to_string() const;
  /// Accepts "V+LC", "all", "none" (case-insensitive group names).
  static GroupMask parse(std::string_view text);

  constexpr bool operator==(const GroupMask&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

/// Quality features of one indexed document. Masked-out groups are left empty
/// and contribute no columns.
struct FeatureVector {
  GroupMask mask;
  // V
  double char_count = 0.0;
  double token_count = 0.0;
  // C
  std::vector<double> term_indicators;
  double oov_count = 0.0;
  // LC: per category, calibrated (expected) and predicted counts
  std::vector<double> calibrated;
  std::vector<double> predicted;
  // PI: aggregations of assigned-concept confidences
  double confidence_mean = 0.0;
  double confidence_product = 0.0;
  double confidence_median = 0.0;
  double confidence_min = 0.0;
  double assigned_count = 0.0;

  /// Dense columns in group order V, C, LC, PI. LC expands per category to
  /// (calibrated, predicted, difference, |difference|) followed by the same
  /// four values for the totals.
  std::vector<double> to_row() const;
  std::size_t width() const;
  /// Copy restricted to `subset`, which must be contained in `mask`.
  FeatureVector restricted(GroupMask subset) const;

  bool operator==(const FeatureVector&) const = default;
};

std::vector<std::string> feature_names(GroupMask mask, const TermIndex& quality_terms,
                                       const std::vector<std::string>& categories);

/// Builds the quality features of one document. `calibrated` holds one
/// expected count per vocabulary category. OOV is counted against the
/// classifier's term index; term indicators use the quality term list.
FeatureVector extract_features(const TokenSeq& tokens, const Prediction& prediction,
                               std::span<const double> calibrated, const Vocabulary& vocabulary,
                               const TermIndex& classifier_index, const TermIndex& quality_terms,
                               GroupMask mask);

// --- label calibration ---

/// [#chars, #tokens, TERM_1 .. TERM_n] over the quality term list.
std::vector<double> calibration_row(const TokenSeq& tokens, const TermIndex& quality_terms);

/// Gold concept counts per category, one row per document.
Matrix category_counts(const Vocabulary& vocabulary, std::span<const std::vector<std::uint32_t>> gold);

struct CalibrationModel {
  TermIndex quality_terms;
  MultiOutputModel model;

  std::size_t input_width() const { return 2 + quality_terms.size(); }
  const std::vector<std::string>& categories() const { return model.names; }
};

CalibrationModel train_calibration(std::span<const TokenSeq> docs, const Matrix& gold_counts,
                                   const TermIndex& quality_terms, std::vector<std::string> categories,
                                   const LearnerSpec& learner, int threads = 1);

/// Expected concept count per category, real-valued and clamped at 0.
std::vector<double> predict_calibration(const CalibrationModel& model, std::span<const double> row);
std::vector<double> predict_calibration(const CalibrationModel& model, const TokenSeq& tokens);

// --- recall estimation ---

struct RecallEstimator {
  EnsembleModel model;
  GroupMask mask;
  std::size_t width = 0;
};

RecallEstimator train_recall_estimator(std::span<const FeatureVector> rows, std::span<const double> recall,
                                       const LearnerSpec& learner);

/// Raw regressor output clamped into [0, 1].
double clamp_unit(double value);
double estimate_recall(const RecallEstimator& estimator, const FeatureVector& features);

// --- precision scores and gating ---

struct PrecisionScores {
  double mean = 1.0;
  double product = 1.0;
  double median = 1.0;
  double min = 1.0;
};

/// Aggregates of the assigned confidences; an empty assignment scores 1.0
/// everywhere (nothing assigned, nothing wrong).
PrecisionScores precision_scores(const Prediction& prediction);

struct QualityEstimate {
  std::string doc_id;
  double recall_hat = 0.0;
  PrecisionScores precision;
};

/// Ids with recall_hat >= t, in input order.
std::vector<std::string> gate(std::span<const QualityEstimate> estimates, double t);

}  // namespace idxqual
