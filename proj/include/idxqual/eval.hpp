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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idxqual/quality.hpp"

namespace idxqual {

struct OverlapCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

template <typename T>
OverlapCounts overlap(const std::vector<T>& gold, const std::vector<T>& predicted) {
  std::vector<T> g(gold), p(predicted);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  std::vector<T> common;
  std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(common));
  return {common.size(), p.size() - common.size(), g.size() - common.size()};
}

/// |gold ∩ predicted| / |gold|; nullopt when gold is empty (excluded from
/// recall aggregates).
template <typename T>
std::optional<double> doc_recall(const std::vector<T>& gold, const std::vector<T>& predicted) {
  if (gold.empty()) return std::nullopt;
  const auto c = overlap(gold, predicted);
  return static_cast<double>(c.true_positives) / static_cast<double>(c.true_positives + c.false_negatives);
}

/// |gold ∩ predicted| / |predicted|; 1.0 when nothing is predicted.
template <typename T>
double doc_precision(const std::vector<T>& gold, const std::vector<T>& predicted) {
  const auto c = overlap(gold, predicted);
  const auto n = c.true_positives + c.false_positives;
  return n == 0 ? 1.0 : static_cast<double>(c.true_positives) / static_cast<double>(n);
}

struct F1Summary {
  double sample_f1 = 0.0;
  double sample_precision = 0.0;
  double sample_recall = 0.0;
  double micro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  /// Documents with empty gold sets, left out of the sample averages.
  std::size_t excluded = 0;
};

/// Sample-based averages (per-document f1, 0 when p + r = 0) and micro
/// averages over summed counts.
F1Summary f1_scores(std::span<const std::vector<std::uint32_t>> gold,
                    std::span<const std::vector<std::uint32_t>> predicted);
F1Summary f1_scores(std::span<const std::vector<std::string>> gold,
                    std::span<const std::vector<std::string>> predicted);

/// Pearson product-moment correlation. Throws when lengths differ, n < 2 or
/// both inputs are constant; returns 0 when exactly one input is constant.
double pearson(std::span<const double> x, std::span<const double> y);
double mse(std::span<const double> predictions, std::span<const double> truths);

struct Summary {
  std::vector<double> values;
  double mean = 0.0;
  /// Population standard deviation across values.
  double sd = 0.0;
};
Summary summarize(std::vector<double> values);

struct MetricReport {
  Summary rho;
  Summary mse;
  std::size_t excluded = 0;
};

struct SweepRow {
  double threshold = 0.0;
  double coverage = 0.0;
  double mean_recall = 0.0;
  double mean_precision = 0.0;
  double recall_gain = 0.0;
  std::size_t n_selected = 0;
};

/// 0.00, 0.05, ..., 1.00.
std::vector<double> default_thresholds();

/// One row per threshold (ascending). Coverage counts every document;
/// recall means skip documents whose true recall is undefined. Recall gain
/// is relative to the mean recall of the whole collection.
std::vector<SweepRow> threshold_sweep(std::span<const double> estimates,
                                      std::span<const std::optional<double>> true_recall,
                                      std::span<const double> true_precision, std::span<const double> thresholds);

struct AblationRow {
  GroupMask mask;
  Summary rho;
  Summary mse;
  double rho_delta_pct = 0.0;
  double mse_delta_pct = 0.0;
  bool rho_significant = false;
  bool mse_significant = false;
};

struct AblationReport {
  std::vector<AblationRow> rows;
};

/// Deltas against the first entry. A difference is significant when it
/// exceeds the sum of the two standard deviations.
AblationReport make_ablation_report(const std::vector<std::pair<GroupMask, MetricReport>>& runs);

/// Shortest decimal that round-trips; "nan" for NaN.
std::string format_number(double value);

std::string sweep_csv(std::span<const SweepRow> rows);
std::string ablation_csv(const AblationReport& report);
std::string ablation_table(const AblationReport& report);
std::string sweep_table(std::span<const SweepRow> rows);

}  // namespace idxqual
