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
#include <string>
#include <string_view>
#include <vector>

#include "idxqual/random.hpp"

namespace idxqual {

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct TreeParams {
  int max_depth = 3;
  /// Minimum (weighted) sample count in each child of a split.
  double min_samples_leaf = 1.0;
};

struct TreeNode {
  /// -1 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  /// Mean target of the training rows that reached the node.
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

/// Binary regression tree; x[feature] <= threshold goes left. Node 0 is the root.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes);

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;
  std::size_t leaf_count() const;

 private:
  std::vector<TreeNode> nodes_;
};

namespace detail {

// Per-feature nonzero entries sorted by (value, row). Zero entries are
// implicit, which keeps split search proportional to the number of nonzeros.
class SortedColumns {
 public:
  explicit SortedColumns(const Matrix& x);

  std::size_t features() const { return offsets_.size() - 1; }
  std::span<const std::uint32_t> rows(std::size_t f) const {
    return {rows_.data() + offsets_[f], offsets_[f + 1] - offsets_[f]};
  }
  std::span<const double> values(std::size_t f) const {
    return {values_.data() + offsets_[f], offsets_[f + 1] - offsets_[f]};
  }
  /// Position (relative to the feature's start) of the first positive value.
  std::size_t first_positive(std::size_t f) const { return first_positive_[f]; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> rows_;
  std::vector<double> values_;
  std::vector<std::size_t> first_positive_;
};

/// Greedy variance-reduction tree over rows with positive weight.
RegressionTree build_tree(const Matrix& x, const SortedColumns& columns, std::span<const double> y,
                          std::span<const double> weights, const TreeParams& params);

}  // namespace detail

/// CART regression tree: best split by squared-error reduction over midpoints
/// of sorted unique values; ties go to the lowest feature, then the lowest
/// threshold. Stops at max_depth, min_samples_leaf or zero variance.
RegressionTree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params);
/// Weighted variant; rows with zero weight are ignored.
RegressionTree fit_tree(const Matrix& x, std::span<const double> y, std::span<const double> weights,
                        const TreeParams& params);

enum class LearnerKind { kLinear, kDecisionTree, kGradientBoosting, kExtraTrees, kAdaBoostR2 };
enum class AdaBoostLoss { kLinear, kSquare, kExponential };

std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view name);
std::string_view to_string(AdaBoostLoss loss);
AdaBoostLoss parse_adaboost_loss(std::string_view name);

struct GradientBoostingParams {
  int stages = 100;
  double shrinkage = 0.1;
  double subsample = 1.0;
  TreeParams tree{3, 1.0};
  std::uint64_t seed = 0;
};

struct ExtraTreesParams {
  int n_trees = 100;
  /// Candidate features per node; 0 means round(sqrt(d)).
  int k_features = 0;
  /// Negative means unbounded.
  int max_depth = -1;
  int min_samples_split = 2;
  std::uint64_t seed = 0;
};

struct AdaBoostParams {
  int stages = 50;
  AdaBoostLoss loss = AdaBoostLoss::kLinear;
  TreeParams tree{3, 1.0};
  std::uint64_t seed = 0;
};

/// Fitted regressor of any supported family.
struct EnsembleModel {
  LearnerKind kind = LearnerKind::kLinear;
  /// Initial prediction (gradient boosting).
  double base = 0.0;
  std::vector<RegressionTree> trees;
  /// Shrinkage (boosting), 1/n (extra-trees) or ln(1/beta) (AdaBoost.R2).
  std::vector<double> tree_weights;
  std::vector<double> coefficients;
  double intercept = 0.0;

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& x) const;
};

/// Weighted median: smallest value whose cumulative weight reaches half the total.
double weighted_median(std::span<const double> values, std::span<const double> weights);

EnsembleModel fit_gradient_boosting(const Matrix& x, std::span<const double> y,
                                    const GradientBoostingParams& params);
EnsembleModel fit_extra_trees(const Matrix& x, std::span<const double> y, const ExtraTreesParams& params);
EnsembleModel fit_adaboost_r2(const Matrix& x, std::span<const double> y, const AdaBoostParams& params);
/// Least squares via normal equations with 1e-8 added to the Gram diagonal.
EnsembleModel fit_linear(const Matrix& x, std::span<const double> y);

/// A learner family plus all hyperparameters. `seed` overrides the
/// per-family seeds when fitting.
struct LearnerSpec {
  LearnerKind kind = LearnerKind::kGradientBoosting;
  TreeParams tree{3, 1.0};
  GradientBoostingParams boosting;
  ExtraTreesParams extra_trees;
  AdaBoostParams adaboost;
  std::uint64_t seed = 0;
};

EnsembleModel fit_learner(const LearnerSpec& spec, const Matrix& x, std::span<const double> y);

struct MultiOutputModel {
  std::vector<std::string> names;
  std::vector<EnsembleModel> models;
  std::size_t input_width = 0;

  std::vector<double> predict(std::span<const double> x) const;
};

/// Seed used for output column `column` when fitting with base seed `seed`.
inline std::uint64_t output_seed(std::uint64_t seed, std::size_t column) {
  return derive_seed(seed, static_cast<std::uint64_t>(column));
}

/// One independent model per column of `targets`.
MultiOutputModel fit_multi_output(const LearnerSpec& spec, const Matrix& x, const Matrix& targets,
                                  std::vector<std::string> names, int threads = 1);

}  // namespace idxqual
