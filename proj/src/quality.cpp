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

#include "idxqual/quality.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "idxqual/error.hpp"

namespace idxqual {

namespace {

struct Aggregates {
  double mean = 0.0;
  double product = 0.0;
  double median = 0.0;
  double min = 0.0;
};

Aggregates aggregate(const Prediction& prediction) {
  Aggregates out;
  const auto& assigned = prediction.assigned;
  if (assigned.empty()) return out;
  std::vector<double> values;
  values.reserve(assigned.size());
  double sum = 0.0;
  double product = 1.0;
  for (const auto& a : assigned) {
    values.push_back(a.confidence);
    sum += a.confidence;
    product *= a.confidence;
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  out.mean = sum / static_cast<double>(n);
  out.product = product;
  out.median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  out.min = values.front();
  return out;
}

void append_calibration_block(std::vector<double>& row, double calibrated, double predicted) {
  row.push_back(calibrated);
  row.push_back(predicted);
  row.push_back(calibrated - predicted);
  row.push_back(std::abs(calibrated - predicted));
}

}  // namespace

std::string_view group_name(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::kVolume: return "V";
    case FeatureGroup::kContent: return "C";
    case FeatureGroup::kCalibration: return "LC";
    case FeatureGroup::kConfidence: return "PI";
  }
  return "?";
}

std::string GroupMask::to_string() const {
  std::string out;
  for (auto g : kAllGroups) {
    if (!has(g)) continue;
    if (!out.empty()) out += '+';
    out += group_name(g);
  }
  return out.empty() ? "none" : out;
}

GroupMask GroupMask::parse(std::string_view text) {
  std::string lower;
  for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "all") return all();
  if (lower == "none") return GroupMask();
  GroupMask mask;
  std::size_t start = 0;
  while (start <= lower.size()) {
    const auto plus = std::min(lower.find('+', start), lower.size());
    const auto part = std::string_view(lower).substr(start, plus - start);
    bool matched = false;
    for (auto g : kAllGroups) {
      std::string name(group_name(g));
      for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (part == name || (g == FeatureGroup::kConfidence && part == "pi")) {
        mask = GroupMask(static_cast<std::uint8_t>(mask.bits() | static_cast<std::uint8_t>(g)));
        matched = true;
      }
    }
    if (!matched) throw InvalidArgument("unknown feature group '" + std::string(part) + "' in '" + std::string(text) + "'");
    start = plus + 1;
  }
  return mask;
}

std::vector<double> FeatureVector::to_row() const {
  std::vector<double> row;
  row.reserve(width());
  if (mask.has(FeatureGroup::kVolume)) {
    row.push_back(char_count);
    row.push_back(token_count);
  }
  if (mask.has(FeatureGroup::kContent)) {
    row.insert(row.end(), term_indicators.begin(), term_indicators.end());
    row.push_back(oov_count);
  }
  if (mask.has(FeatureGroup::kCalibration)) {
    double total_calibrated = 0.0;
    double total_predicted = 0.0;
    for (std::size_t k = 0; k < calibrated.size(); ++k) {
      append_calibration_block(row, calibrated[k], predicted[k]);
      total_calibrated += calibrated[k];
      total_predicted += predicted[k];
    }
    append_calibration_block(row, total_calibrated, total_predicted);
  }
  if (mask.has(FeatureGroup::kConfidence)) {
    row.push_back(confidence_mean);
    row.push_back(confidence_product);
    row.push_back(confidence_median);
    row.push_back(confidence_min);
    row.push_back(assigned_count);
  }
  return row;
}

std::size_t FeatureVector::width() const {
  std::size_t w = 0;
  if (mask.has(FeatureGroup::kVolume)) w += 2;
  if (mask.has(FeatureGroup::kContent)) w += term_indicators.size() + 1;
  if (mask.has(FeatureGroup::kCalibration)) w += 4 * (calibrated.size() + 1);
  if (mask.has(FeatureGroup::kConfidence)) w += 5;
  return w;
}

FeatureVector FeatureVector::restricted(GroupMask subset) const {
  if (!mask.contains(subset)) throw InvalidArgument("restricted: groups " + subset.to_string() + " not all present");
  FeatureVector out = *this;
  out.mask = subset;
  if (!subset.has(FeatureGroup::kVolume)) out.char_count = out.token_count = 0.0;
  if (!subset.has(FeatureGroup::kContent)) {
    out.term_indicators.clear();
    out.oov_count = 0.0;
  }
  if (!subset.has(FeatureGroup::kCalibration)) {
    out.calibrated.clear();
    out.predicted.clear();
  }
  if (!subset.has(FeatureGroup::kConfidence)) {
    out.confidence_mean = out.confidence_product = out.confidence_median = out.confidence_min = 0.0;
    out.assigned_count = 0.0;
  }
  return out;
}

std::vector<std::string> feature_names(GroupMask mask, const TermIndex& quality_terms,
                                       const std::vector<std::string>& categories) {
  std::vector<std::string> names;
  if (mask.has(FeatureGroup::kVolume)) {
    names.emplace_back("#_Char");
    names.emplace_back("#_WS");
  }
  if (mask.has(FeatureGroup::kContent)) {
    for (const auto& term : quality_terms.terms()) names.push_back("TERM_" + term);
    names.emplace_back("#_W_OOV");
  }
  if (mask.has(FeatureGroup::kCalibration)) {
    auto block = [&](const std::string& suffix) {
      names.push_back("Lhat_" + suffix);
      names.push_back("Lstar_" + suffix);
      names.push_back("Lhat-Lstar_" + suffix);
      names.push_back("|Lhat-Lstar|_" + suffix);
    };
    for (const auto& c : categories) block(c);
    block("total");
  }
  if (mask.has(FeatureGroup::kConfidence))
    for (const char* n : {"PI_mean", "PI_product", "PI_median", "PI_min", "|L*|"}) names.emplace_back(n);
  return names;
}

FeatureVector extract_features(const TokenSeq& tokens, const Prediction& prediction,
                               std::span<const double> calibrated, const Vocabulary& vocabulary,
                               const TermIndex& classifier_index, const TermIndex& quality_terms,
                               GroupMask mask) {
  for (const auto& a : prediction.assigned) {
    if (!(a.confidence > 0.0 && a.confidence < 1.0))
      throw InvalidArgument("extract_features: confidence " + std::to_string(a.confidence) + " outside (0,1)");
    if (a.concept_index >= vocabulary.size()) throw InvalidArgument("extract_features: unknown concept index");
  }
  FeatureVector fv;
  fv.mask = mask;
  if (mask.has(FeatureGroup::kVolume)) {
    fv.char_count = static_cast<double>(tokens.char_count);
    fv.token_count = static_cast<double>(tokens.token_count());
  }
  if (mask.has(FeatureGroup::kContent)) {
    fv.term_indicators.assign(quality_terms.size(), 0.0);
    for (const auto& token : tokens.tokens)
      if (auto col = quality_terms.find(token)) fv.term_indicators[*col] = 1.0;
    fv.oov_count = static_cast<double>(count_oov(tokens, classifier_index));
  }
  if (mask.has(FeatureGroup::kCalibration)) {
    const std::size_t k = vocabulary.categories().size();
    if (calibrated.size() != k)
      throw InvalidArgument("extract_features: " + std::to_string(calibrated.size()) +
                            " calibration outputs for " + std::to_string(k) + " categories");
    fv.calibrated.assign(calibrated.begin(), calibrated.end());
    fv.predicted.assign(k, 0.0);
    for (const auto& a : prediction.assigned) fv.predicted[vocabulary.category_of(a.concept_index)] += 1.0;
  }
  if (mask.has(FeatureGroup::kConfidence)) {
    const auto agg = aggregate(prediction);
    fv.confidence_mean = agg.mean;
    fv.confidence_product = agg.product;
    fv.confidence_median = agg.median;
    fv.confidence_min = agg.min;
    fv.assigned_count = static_cast<double>(prediction.assigned.size());
  }
  return fv;
}

std::vector<double> calibration_row(const TokenSeq& tokens, const TermIndex& quality_terms) {
  std::vector<double> row(2 + quality_terms.size(), 0.0);
  row[0] = static_cast<double>(tokens.char_count);
  row[1] = static_cast<double>(tokens.token_count());
  for (const auto& token : tokens.tokens)
    if (auto col = quality_terms.find(token)) row[2 + *col] = 1.0;
  return row;
}

Matrix category_counts(const Vocabulary& vocabulary, std::span<const std::vector<std::uint32_t>> gold) {
  Matrix counts(gold.size(), vocabulary.categories().size());
  for (std::size_t r = 0; r < gold.size(); ++r)
    for (auto c : gold[r]) counts(r, vocabulary.category_of(c)) += 1.0;
  return counts;
}

CalibrationModel train_calibration(std::span<const TokenSeq> docs, const Matrix& gold_counts,
                                   const TermIndex& quality_terms, std::vector<std::string> categories,
                                   const LearnerSpec& learner, int threads) {
  if (docs.empty()) throw InvalidArgument("train_calibration: empty training slice");
  if (gold_counts.rows() != docs.size()) throw InvalidArgument("train_calibration: targets and documents differ");
  Matrix x(docs.size(), 2 + quality_terms.size());
  for (std::size_t r = 0; r < docs.size(); ++r) {
    const auto row = calibration_row(docs[r], quality_terms);
    std::copy(row.begin(), row.end(), x.row(r).begin());
  }
  CalibrationModel model;
  model.quality_terms = quality_terms;
  model.model = fit_multi_output(learner, x, gold_counts, std::move(categories), threads);
  return model;
}

std::vector<double> predict_calibration(const CalibrationModel& model, std::span<const double> row) {
  if (row.size() != model.input_width())
    throw InvalidArgument("predict_calibration: expected " + std::to_string(model.input_width()) +
                          " features, got " + std::to_string(row.size()));
  auto out = model.model.predict(row);
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

std::vector<double> predict_calibration(const CalibrationModel& model, const TokenSeq& tokens) {
  return predict_calibration(model, calibration_row(tokens, model.quality_terms));
}

RecallEstimator train_recall_estimator(std::span<const FeatureVector> rows, std::span<const double> recall,
                                       const LearnerSpec& learner) {
  if (rows.size() < 2) throw InvalidArgument("train_recall_estimator: need at least 2 rows");
  if (rows.size() != recall.size()) throw InvalidArgument("train_recall_estimator: rows and targets differ");
  const GroupMask mask = rows.front().mask;
  if (mask.empty()) throw InvalidArgument("train_recall_estimator: no feature groups selected");
  const std::size_t width = rows.front().width();
  Matrix x(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].mask != mask || rows[r].width() != width)
      throw InvalidArgument("train_recall_estimator: inconsistent feature layout");
    if (!(recall[r] >= 0.0 && recall[r] <= 1.0)) throw InvalidArgument("train_recall_estimator: recall outside [0,1]");
    const auto row = rows[r].to_row();
    std::copy(row.begin(), row.end(), x.row(r).begin());
  }
  return {fit_learner(learner, x, recall), mask, width};
}

double clamp_unit(double value) { return std::clamp(value, 0.0, 1.0); }

double estimate_recall(const RecallEstimator& estimator, const FeatureVector& features) {
  if (features.mask != estimator.mask)
    throw InvalidArgument("estimate_recall: estimator expects groups " + estimator.mask.to_string() + ", got " +
                          features.mask.to_string());
  const auto row = features.to_row();
  if (row.size() != estimator.width) throw InvalidArgument("estimate_recall: feature width mismatch");
  return clamp_unit(estimator.model.predict(row));
}

PrecisionScores precision_scores(const Prediction& prediction) {
  if (prediction.assigned.empty()) return {};
  const auto agg = aggregate(prediction);
  return {agg.mean, agg.product, agg.median, agg.min};
}

std::vector<std::string> gate(std::span<const QualityEstimate> estimates, double t) {
  std::vector<std::string> out;
  for (const auto& e : estimates)
    if (e.recall_hat >= t) out.push_back(e.doc_id);
  return out;
}

}  // namespace idxqual
