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

#include "idxqual/eval.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "idxqual/error.hpp"

namespace idxqual {

namespace {

template <typename T>
F1Summary f1_impl(std::span<const std::vector<T>> gold, std::span<const std::vector<T>> predicted) {
  if (gold.empty()) throw InvalidArgument("f1_scores: empty collection");
  if (gold.size() != predicted.size()) throw InvalidArgument("f1_scores: gold and predicted differ in length");
  F1Summary out;
  std::size_t tp = 0, fp = 0, fn = 0, counted = 0;
  double f1_sum = 0.0, p_sum = 0.0, r_sum = 0.0;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    const auto c = overlap(gold[d], predicted[d]);
    tp += c.true_positives;
    fp += c.false_positives;
    fn += c.false_negatives;
    if (gold[d].empty()) {
      ++out.excluded;
      continue;
    }
    const double p = doc_precision(gold[d], predicted[d]);
    const double r = *doc_recall(gold[d], predicted[d]);
    p_sum += p;
    r_sum += r;
    f1_sum += p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    ++counted;
  }
  if (counted > 0) {
    const auto n = static_cast<double>(counted);
    out.sample_f1 = f1_sum / n;
    out.sample_precision = p_sum / n;
    out.sample_recall = r_sum / n;
  }
  const auto tpd = static_cast<double>(tp);
  out.micro_precision = tp + fp == 0 ? 1.0 : tpd / static_cast<double>(tp + fp);
  out.micro_recall = tp + fn == 0 ? 0.0 : tpd / static_cast<double>(tp + fn);
  const auto denominator = static_cast<double>(2 * tp + fp + fn);
  out.micro_f1 = denominator == 0.0 ? 0.0 : 2.0 * tpd / denominator;
  return out;
}

double mean_two_pass(std::span<const double> v) {
  double sum = 0.0;
  for (double a : v) sum += a;
  const double m = sum / static_cast<double>(v.size());
  double corr = 0.0;
  for (double a : v) corr += a - m;
  return m + corr / static_cast<double>(v.size());
}

std::string fixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace

F1Summary f1_scores(std::span<const std::vector<std::uint32_t>> gold,
                    std::span<const std::vector<std::uint32_t>> predicted) {
  return f1_impl(gold, predicted);
}

F1Summary f1_scores(std::span<const std::vector<std::string>> gold,
                    std::span<const std::vector<std::string>> predicted) {
  return f1_impl(gold, predicted);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  if (x.size() < 2) throw InvalidArgument("pearson: need at least 2 points");
  const double mx = mean_two_pass(x);
  const double my = mean_two_pass(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 && syy == 0.0) throw InvalidArgument("pearson: both inputs are constant");
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double mse(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) throw InvalidArgument("mse: length mismatch");
  if (predictions.empty()) throw InvalidArgument("mse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - truths[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  s.mean = mean_two_pass(s.values);
  double ss = 0.0;
  for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(s.values.size()));
  return s;
}

std::vector<double> default_thresholds() {
  std::vector<double> out;
  for (int i = 0; i <= 20; ++i) out.push_back(i / 20.0);
  return out;
}

std::vector<SweepRow> threshold_sweep(std::span<const double> estimates,
                                      std::span<const std::optional<double>> true_recall,
                                      std::span<const double> true_precision, std::span<const double> thresholds) {
  const std::size_t n = estimates.size();
  if (n == 0) throw InvalidArgument("threshold_sweep: empty collection");
  if (true_recall.size() != n || true_precision.size() != n)
    throw InvalidArgument("threshold_sweep: inputs differ in length");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw InvalidArgument("threshold_sweep: thresholds must be ascending");
  double full_recall_sum = 0.0;
  std::size_t full_recall_n = 0;
  for (const auto& r : true_recall)
    if (r) {
      full_recall_sum += *r;
      ++full_recall_n;
    }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double full_recall = full_recall_n ? full_recall_sum / static_cast<double>(full_recall_n) : nan;

  std::vector<SweepRow> rows;
  rows.reserve(thresholds.size());
  for (double t : thresholds) {
    SweepRow row;
    row.threshold = t;
    double recall_sum = 0.0, precision_sum = 0.0;
    std::size_t recall_n = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(estimates[i] >= t)) continue;
      ++row.n_selected;
      precision_sum += true_precision[i];
      if (true_recall[i]) {
        recall_sum += *true_recall[i];
        ++recall_n;
      }
    }
    row.coverage = static_cast<double>(row.n_selected) / static_cast<double>(n);
    row.mean_precision = row.n_selected ? precision_sum / static_cast<double>(row.n_selected) : nan;
    row.mean_recall = recall_n ? recall_sum / static_cast<double>(recall_n) : nan;
    row.recall_gain = full_recall > 0.0 ? (row.mean_recall - full_recall) / full_recall : nan;
    rows.push_back(row);
  }
  return rows;
}

AblationReport make_ablation_report(const std::vector<std::pair<GroupMask, MetricReport>>& runs) {
  if (runs.empty()) throw InvalidArgument("make_ablation_report: no runs");
  AblationReport report;
  const auto& full = runs.front().second;
  for (const auto& [mask, metrics] : runs) {
    AblationRow row;
    row.mask = mask;
    row.rho = metrics.rho;
    row.mse = metrics.mse;
    // written as -(full - x)/full so the reference row reads -0.0
    row.rho_delta_pct = -((full.rho.mean - metrics.rho.mean) / full.rho.mean) * 100.0;
    row.mse_delta_pct = -((full.mse.mean - metrics.mse.mean) / full.mse.mean) * 100.0;
    row.rho_significant = std::abs(metrics.rho.mean - full.rho.mean) > metrics.rho.sd + full.rho.sd;
    row.mse_significant = std::abs(metrics.mse.mean - full.mse.mean) > metrics.mse.sd + full.mse.sd;
    report.rows.push_back(row);
  }
  return report;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("format_number: conversion failed");
  return std::string(buf, end);
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "threshold,coverage,mean_recall,mean_precision,recall_gain,n_selected\n";
  for (const auto& r : rows)
    out << format_number(r.threshold) << ',' << format_number(r.coverage) << ',' << format_number(r.mean_recall)
        << ',' << format_number(r.mean_precision) << ',' << format_number(r.recall_gain) << ',' << r.n_selected
        << '\n';
  return out.str();
}

std::string ablation_csv(const AblationReport& report) {
  std::ostringstream out;
  out << "mask,rho_mean,rho_sd,rho_delta_pct,mse_mean,mse_sd,mse_delta_pct,significant\n";
  for (const auto& r : report.rows)
    out << r.mask.to_string() << ',' << format_number(r.rho.mean) << ',' << format_number(r.rho.sd) << ','
        << format_number(r.rho_delta_pct) << ',' << format_number(r.mse.mean) << ',' << format_number(r.mse.sd)
        << ',' << format_number(r.mse_delta_pct) << ',' << (r.rho_significant ? 1 : 0) << '\n';
  return out.str();
}

std::string ablation_table(const AblationReport& report) {
  std::ostringstream out;
  out << "groups       rho     sd     d_rho      mse     sd     d_mse\n";
  for (const auto& r : report.rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %6.3f  %5.3f  %6.1f%%%s  %6.3f  %5.3f  %6.1f%%%s\n",
                  r.mask.to_string().c_str(), r.rho.mean, r.rho.sd, r.rho_delta_pct, r.rho_significant ? "*" : " ",
                  r.mse.mean, r.mse.sd, r.mse_delta_pct, r.mse_significant ? "*" : " ");
    out << buf;
  }
  out << "(* difference to the first row exceeds the sum of both sd)\n";
  return out.str();
}

std::string sweep_table(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "threshold  coverage  recall  precision       RG  selected\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%9s  %8s  %6s  %9s  %6s%%  %8zu\n", fixed(r.threshold, 2).c_str(),
                  fixed(r.coverage, 3).c_str(), fixed(r.mean_recall, 3).c_str(), fixed(r.mean_precision, 3).c_str(),
                  fixed(100.0 * r.recall_gain, 1).c_str(), r.n_selected);
    out << buf;
  }
  return out.str();
}

}  // namespace idxqual
