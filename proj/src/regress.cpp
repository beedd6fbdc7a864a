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

#include "idxqual/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "idxqual/error.hpp"
#include "idxqual/parallel.hpp"

namespace idxqual {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw InvalidArgument("Matrix::from_rows: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

// --- trees ---

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InvalidArgument("RegressionTree: no nodes");
  for (const auto& node : nodes_) {
    if (node.is_leaf()) continue;
    const auto n = static_cast<int>(nodes_.size());
    if (node.left <= 0 || node.right <= 0 || node.left >= n || node.right >= n)
      throw InvalidArgument("RegressionTree: child index out of range");
  }
}

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& node = nodes_[id];
    id = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                               : node.right);
  }
  return nodes_[id].value;
}

int RegressionTree::depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    deepest = std::max(deepest, depth[id]);
    if (!nodes_[id].is_leaf()) {
      depth[static_cast<std::size_t>(nodes_[id].left)] = depth[id] + 1;
      depth[static_cast<std::size_t>(nodes_[id].right)] = depth[id] + 1;
    }
  }
  return deepest;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace detail {

SortedColumns::SortedColumns(const Matrix& x) {
  const std::size_t d = x.cols();
  offsets_.assign(d + 1, 0);
  first_positive_.assign(d, 0);
  std::vector<std::pair<double, std::uint32_t>> entries;
  for (std::size_t f = 0; f < d; ++f) {
    entries.clear();
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double v = x(r, f);
      if (std::isnan(v)) throw InvalidArgument("feature matrix contains NaN");
      if (v != 0.0) entries.emplace_back(v, static_cast<std::uint32_t>(r));
    }
    std::sort(entries.begin(), entries.end());
    std::size_t positive = entries.size();
    for (std::size_t e = 0; e < entries.size(); ++e) {
      if (entries[e].first > 0.0) {
        positive = e;
        break;
      }
    }
    first_positive_[f] = positive;
    for (const auto& [v, r] : entries) {
      values_.push_back(v);
      rows_.push_back(r);
    }
    offsets_[f + 1] = values_.size();
  }
}

namespace {

struct NodeStats {
  double weight = 0.0;
  double mean = 0.0;
  double sse = 0.0;
  int depth = 0;
};

// Fills stats for nodes [first, last) from the rows currently mapped to them.
// Two-pass mean so that constant targets give their value exactly.
void compute_stats(std::span<const int> node_of, std::span<const double> y, std::span<const double> w,
                   std::size_t first, std::size_t last, std::vector<NodeStats>& stats) {
  const std::size_t k = last - first;
  std::vector<double> sum(k, 0.0);
  std::vector<double> weight(k, 0.0);
  for (std::size_t r = 0; r < node_of.size(); ++r) {
    const int id = node_of[r];
    if (id < static_cast<int>(first) || id >= static_cast<int>(last)) continue;
    const std::size_t s = static_cast<std::size_t>(id) - first;
    sum[s] += w[r] * y[r];
    weight[s] += w[r];
  }
  std::vector<double> mean(k), corr(k, 0.0);
  for (std::size_t s = 0; s < k; ++s) mean[s] = weight[s] > 0 ? sum[s] / weight[s] : 0.0;
  for (std::size_t r = 0; r < node_of.size(); ++r) {
    const int id = node_of[r];
    if (id < static_cast<int>(first) || id >= static_cast<int>(last)) continue;
    const std::size_t s = static_cast<std::size_t>(id) - first;
    corr[s] += w[r] * (y[r] - mean[s]);
  }
  for (std::size_t s = 0; s < k; ++s)
    if (weight[s] > 0) mean[s] += corr[s] / weight[s];
  std::vector<double> sse(k, 0.0);
  for (std::size_t r = 0; r < node_of.size(); ++r) {
    const int id = node_of[r];
    if (id < static_cast<int>(first) || id >= static_cast<int>(last)) continue;
    const std::size_t s = static_cast<std::size_t>(id) - first;
    const double dev = y[r] - mean[s];
    sse[s] += w[r] * dev * dev;
  }
  for (std::size_t s = 0; s < k; ++s) {
    stats[first + s].weight = weight[s];
    stats[first + s].mean = mean[s];
    stats[first + s].sse = sse[s];
  }
}

double midpoint(double lo, double hi) {
  const double mid = (lo + hi) / 2.0;
  return mid < hi ? mid : lo;
}

}  // namespace

RegressionTree build_tree(const Matrix& x, const SortedColumns& columns, std::span<const double> y,
                          std::span<const double> weights, const TreeParams& params) {
  const std::size_t n = x.rows();
  if (n == 0) throw InvalidArgument("fit_tree: empty input");
  if (y.size() != n || weights.size() != n) throw InvalidArgument("fit_tree: X, y and weights differ in length");
  if (params.max_depth < 0) throw InvalidArgument("fit_tree: max_depth must be >= 0");
  for (std::size_t r = 0; r < n; ++r) {
    if (!std::isfinite(y[r])) throw InvalidArgument("fit_tree: non-finite target");
    if (!(weights[r] >= 0.0) || !std::isfinite(weights[r])) throw InvalidArgument("fit_tree: invalid weight");
  }

  std::vector<int> node_of(n, -1);
  for (std::size_t r = 0; r < n; ++r)
    if (weights[r] > 0.0) node_of[r] = 0;
  std::vector<TreeNode> nodes(1);
  std::vector<NodeStats> stats(1);
  compute_stats(node_of, y, weights, 0, 1, stats);
  if (stats[0].weight <= 0.0) throw InvalidArgument("fit_tree: no rows with positive weight");

  const double min_leaf = std::max(params.min_samples_leaf, 0.0);
  std::vector<int> slot_of_row(n, -1);
  std::vector<double> centered(n, 0.0);
  std::size_t level_begin = 0;
  std::size_t level_end = 1;
  while (level_begin < level_end) {
    std::vector<std::size_t> active;
    std::vector<int> slot_of_node(level_end - level_begin, -1);
    for (std::size_t id = level_begin; id < level_end; ++id) {
      const auto& st = stats[id];
      nodes[id].value = st.mean;
      if (st.depth < params.max_depth && st.weight >= 2.0 * min_leaf && st.sse > 0.0) {
        slot_of_node[id - level_begin] = static_cast<int>(active.size());
        active.push_back(id);
      }
    }
    if (active.empty()) break;

    const std::size_t k = active.size();
    std::vector<double> total_w(k, 0.0), total_s(k, 0.0), tol(k);
    std::vector<std::size_t> total_count(k, 0);
    for (std::size_t r = 0; r < n; ++r) {
      slot_of_row[r] = -1;
      const int id = node_of[r];
      if (id < static_cast<int>(level_begin)) continue;
      const int s = slot_of_node[static_cast<std::size_t>(id) - level_begin];
      if (s < 0) {
        node_of[r] = -1;
        continue;
      }
      slot_of_row[r] = s;
      centered[r] = y[r] - stats[active[static_cast<std::size_t>(s)]].mean;
      total_w[static_cast<std::size_t>(s)] += weights[r];
      total_s[static_cast<std::size_t>(s)] += weights[r] * centered[r];
      ++total_count[static_cast<std::size_t>(s)];
    }
    for (std::size_t s = 0; s < k; ++s) tol[s] = 1e-10 * stats[active[s]].sse;

    std::vector<double> best_gain(k, 0.0), best_threshold(k, 0.0);
    std::vector<int> best_feature(k, -1);
    std::vector<double> nz_w(k), nz_s(k), left_w(k), left_s(k), last(k);
    std::vector<std::size_t> nz_count(k);
    std::vector<char> has_last(k);

    for (std::size_t f = 0; f < columns.features(); ++f) {
      const auto rows = columns.rows(f);
      if (rows.empty()) continue;
      const auto values = columns.values(f);
      std::fill(nz_w.begin(), nz_w.end(), 0.0);
      std::fill(nz_s.begin(), nz_s.end(), 0.0);
      std::fill(nz_count.begin(), nz_count.end(), 0);
      for (std::size_t e = 0; e < rows.size(); ++e) {
        const int s = slot_of_row[rows[e]];
        if (s < 0) continue;
        nz_w[static_cast<std::size_t>(s)] += weights[rows[e]];
        nz_s[static_cast<std::size_t>(s)] += weights[rows[e]] * centered[rows[e]];
        ++nz_count[static_cast<std::size_t>(s)];
      }
      std::fill(left_w.begin(), left_w.end(), 0.0);
      std::fill(left_s.begin(), left_s.end(), 0.0);
      std::fill(has_last.begin(), has_last.end(), 0);

      auto process = [&](std::size_t s, double value, double w, double sum) {
        if (has_last[s] && value != last[s]) {
          const double lw = left_w[s];
          const double rw = total_w[s] - lw;
          if (lw >= min_leaf && rw >= min_leaf) {
            const double ls = left_s[s];
            const double rs = total_s[s] - ls;
            const double gain = ls * ls / lw + rs * rs / rw - total_s[s] * total_s[s] / total_w[s];
            if (gain > best_gain[s] + tol[s]) {
              best_gain[s] = gain;
              best_feature[s] = static_cast<int>(f);
              best_threshold[s] = midpoint(last[s], value);
            }
          }
        }
        left_w[s] += w;
        left_s[s] += sum;
        last[s] = value;
        has_last[s] = 1;
      };

      const std::size_t positive = columns.first_positive(f);
      for (std::size_t e = 0; e < positive; ++e) {
        const int s = slot_of_row[rows[e]];
        if (s >= 0) process(static_cast<std::size_t>(s), values[e], weights[rows[e]], weights[rows[e]] * centered[rows[e]]);
      }
      for (std::size_t s = 0; s < k; ++s)
        if (total_count[s] > nz_count[s]) process(s, 0.0, total_w[s] - nz_w[s], total_s[s] - nz_s[s]);
      for (std::size_t e = positive; e < rows.size(); ++e) {
        const int s = slot_of_row[rows[e]];
        if (s >= 0) process(static_cast<std::size_t>(s), values[e], weights[rows[e]], weights[rows[e]] * centered[rows[e]]);
      }
    }

    const std::size_t next_begin = nodes.size();
    std::vector<int> left_child(k, -1);
    for (std::size_t s = 0; s < k; ++s) {
      if (best_feature[s] < 0) continue;
      const std::size_t id = active[s];
      const int child = static_cast<int>(nodes.size());
      nodes[id].feature = best_feature[s];
      nodes[id].threshold = best_threshold[s];
      nodes[id].left = child;
      nodes[id].right = child + 1;
      left_child[s] = child;
      nodes.resize(nodes.size() + 2);
      stats.resize(stats.size() + 2);
      stats[static_cast<std::size_t>(child)].depth = stats[id].depth + 1;
      stats[static_cast<std::size_t>(child) + 1].depth = stats[id].depth + 1;
    }
    for (std::size_t r = 0; r < n; ++r) {
      const int s = slot_of_row[r];
      if (s < 0) continue;
      const std::size_t slot = static_cast<std::size_t>(s);
      if (left_child[slot] < 0) {
        node_of[r] = -1;
        continue;
      }
      const bool go_left = x(r, static_cast<std::size_t>(best_feature[slot])) <= best_threshold[slot];
      node_of[r] = go_left ? left_child[slot] : left_child[slot] + 1;
    }
    level_begin = next_begin;
    level_end = nodes.size();
    if (level_begin < level_end) compute_stats(node_of, y, weights, level_begin, level_end, stats);
  }
  return RegressionTree(std::move(nodes));
}

}  // namespace detail

RegressionTree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params) {
  const std::vector<double> weights(x.rows(), 1.0);
  return fit_tree(x, y, weights, params);
}

RegressionTree fit_tree(const Matrix& x, std::span<const double> y, std::span<const double> weights,
                        const TreeParams& params) {
  if (x.rows() == 0) throw InvalidArgument("fit_tree: empty input");
  const detail::SortedColumns columns(x);
  return detail::build_tree(x, columns, y, weights, params);
}

// --- learner names ---

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kLinear: return "linear";
    case LearnerKind::kDecisionTree: return "decision_tree";
    case LearnerKind::kGradientBoosting: return "gradient_boosting";
    case LearnerKind::kExtraTrees: return "extra_trees";
    case LearnerKind::kAdaBoostR2: return "adaboost";
  }
  return "unknown";
}

LearnerKind parse_learner_kind(std::string_view name) {
  for (auto kind : {LearnerKind::kLinear, LearnerKind::kDecisionTree, LearnerKind::kGradientBoosting,
                    LearnerKind::kExtraTrees, LearnerKind::kAdaBoostR2})
    if (to_string(kind) == name) return kind;
  throw InvalidArgument("unknown regressor '" + std::string(name) + "'");
}

std::string_view to_string(AdaBoostLoss loss) {
  switch (loss) {
    case AdaBoostLoss::kLinear: return "linear";
    case AdaBoostLoss::kSquare: return "square";
    case AdaBoostLoss::kExponential: return "exponential";
  }
  return "unknown";
}

AdaBoostLoss parse_adaboost_loss(std::string_view name) {
  for (auto loss : {AdaBoostLoss::kLinear, AdaBoostLoss::kSquare, AdaBoostLoss::kExponential})
    if (to_string(loss) == name) return loss;
  throw InvalidArgument("unknown AdaBoost loss '" + std::string(name) + "'");
}

// --- ensembles ---

namespace {

void check_xy(const Matrix& x, std::span<const double> y, const char* who) {
  if (x.rows() == 0) throw InvalidArgument(std::string(who) + ": empty input");
  if (y.size() != x.rows()) throw InvalidArgument(std::string(who) + ": X and y differ in length");
  for (double v : y)
    if (!std::isfinite(v)) throw InvalidArgument(std::string(who) + ": non-finite target");
}

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double a : v) sum += a;
  double m = sum / static_cast<double>(v.size());
  double corr = 0.0;
  for (double a : v) corr += a - m;
  return m + corr / static_cast<double>(v.size());
}

EnsembleModel gradient_boosting(const Matrix& x, const detail::SortedColumns& columns, std::span<const double> y,
                                const GradientBoostingParams& params) {
  check_xy(x, y, "fit_gradient_boosting");
  if (params.stages < 0) throw InvalidArgument("fit_gradient_boosting: stages must be >= 0");
  if (!(params.shrinkage > 0.0 && params.shrinkage <= 1.0))
    throw InvalidArgument("fit_gradient_boosting: shrinkage must be in (0, 1]");
  if (!(params.subsample > 0.0 && params.subsample <= 1.0))
    throw InvalidArgument("fit_gradient_boosting: subsample must be in (0, 1]");
  const std::size_t n = x.rows();
  EnsembleModel model;
  model.kind = LearnerKind::kGradientBoosting;
  model.base = mean_of(y);
  std::vector<double> fitted(n, model.base), residual(n), weights(n, 1.0);
  const std::size_t sample_size =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.subsample * static_cast<double>(n))));
  std::vector<std::size_t> order(n);
  Rng rng(params.seed);
  for (int m = 0; m < params.stages; ++m) {
    for (std::size_t r = 0; r < n; ++r) residual[r] = y[r] - fitted[r];
    if (sample_size < n) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::fill(weights.begin(), weights.end(), 0.0);
      for (std::size_t i = 0; i < sample_size; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(order[i], order[j]);
        weights[order[i]] = 1.0;
      }
    }
    auto tree = detail::build_tree(x, columns, residual, weights, params.tree);
    for (std::size_t r = 0; r < n; ++r) fitted[r] += params.shrinkage * tree.predict(x.row(r));
    model.trees.push_back(std::move(tree));
    model.tree_weights.push_back(params.shrinkage);
  }
  return model;
}

std::size_t grow_extra_tree(const Matrix& x, std::span<const double> y, std::vector<std::uint32_t> rows, int depth,
                            const ExtraTreesParams& params, std::size_t k, Rng& rng,
                            std::vector<std::size_t>& feature_order, std::vector<TreeNode>& nodes) {
  const std::size_t id = nodes.size();
  nodes.emplace_back();
  double sum = 0.0;
  double lo_y = y[rows.front()];
  double hi_y = lo_y;
  for (auto r : rows) {
    sum += y[r];
    lo_y = std::min(lo_y, y[r]);
    hi_y = std::max(hi_y, y[r]);
  }
  const double count = static_cast<double>(rows.size());
  double mean = sum / count;
  double corr = 0.0;
  for (auto r : rows) corr += y[r] - mean;
  mean += corr / count;
  nodes[id].value = mean;
  if (rows.size() < static_cast<std::size_t>(std::max(params.min_samples_split, 2)) || lo_y == hi_y ||
      (params.max_depth >= 0 && depth >= params.max_depth))
    return id;

  double total_s = 0.0;
  for (auto r : rows) total_s += y[r] - mean;
  const std::size_t d = x.cols();
  double best_gain = -std::numeric_limits<double>::infinity();
  int best_feature = -1;
  double best_threshold = 0.0;
  std::size_t found = 0;
  for (std::size_t drawn = 0; drawn < d && found < k; ++drawn) {
    const std::size_t j = drawn + rng.below(d - drawn);
    std::swap(feature_order[drawn], feature_order[j]);
    const std::size_t f = feature_order[drawn];
    double lo = x(rows.front(), f);
    double hi = lo;
    for (auto r : rows) {
      lo = std::min(lo, x(r, f));
      hi = std::max(hi, x(r, f));
    }
    if (lo == hi) continue;
    ++found;
    double threshold = lo + rng.uniform() * (hi - lo);
    if (threshold >= hi) threshold = lo;
    double lw = 0.0;
    double ls = 0.0;
    for (auto r : rows)
      if (x(r, f) <= threshold) {
        lw += 1.0;
        ls += y[r] - mean;
      }
    const double rw = count - lw;
    const double rs = total_s - ls;
    const double gain = ls * ls / lw + rs * rs / rw - total_s * total_s / count;
    if (gain > best_gain) {
      best_gain = gain;
      best_feature = static_cast<int>(f);
      best_threshold = threshold;
    }
  }
  if (best_feature < 0) return id;

  std::vector<std::uint32_t> left, right;
  for (auto r : rows) (x(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right).push_back(r);
  rows.clear();
  rows.shrink_to_fit();
  const auto l = grow_extra_tree(x, y, std::move(left), depth + 1, params, k, rng, feature_order, nodes);
  const auto r = grow_extra_tree(x, y, std::move(right), depth + 1, params, k, rng, feature_order, nodes);
  nodes[id].feature = best_feature;
  nodes[id].threshold = best_threshold;
  nodes[id].left = static_cast<int>(l);
  nodes[id].right = static_cast<int>(r);
  return id;
}

EnsembleModel adaboost_r2(const Matrix& x, const detail::SortedColumns& columns, std::span<const double> y,
                          const AdaBoostParams& params) {
  check_xy(x, y, "fit_adaboost_r2");
  if (params.stages < 1) throw InvalidArgument("fit_adaboost_r2: stages must be >= 1");
  const std::size_t n = x.rows();
  EnsembleModel model;
  model.kind = LearnerKind::kAdaBoostR2;
  std::vector<double> sample_weight(n, 1.0 / static_cast<double>(n));
  std::vector<double> cumulative(n), counts(n), error(n);
  Rng rng(params.seed);
  for (int m = 0; m < params.stages; ++m) {
    std::partial_sum(sample_weight.begin(), sample_weight.end(), cumulative.begin());
    std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform() * cumulative.back();
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const auto pick = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), n - 1);
      counts[pick] += 1.0;
    }
    auto tree = detail::build_tree(x, columns, y, counts, params.tree);
    double max_error = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      error[r] = std::abs(tree.predict(x.row(r)) - y[r]);
      max_error = std::max(max_error, error[r]);
    }
    if (max_error == 0.0) {
      model.trees.push_back(std::move(tree));
      model.tree_weights.push_back(1.0);
      break;
    }
    double average_loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double loss = error[r] / max_error;
      if (params.loss == AdaBoostLoss::kSquare) loss = loss * loss;
      if (params.loss == AdaBoostLoss::kExponential) loss = 1.0 - std::exp(-loss);
      error[r] = loss;
      average_loss += sample_weight[r] * loss;
    }
    if (average_loss >= 0.5) {
      if (model.trees.empty()) {
        model.trees.push_back(std::move(tree));
        model.tree_weights.push_back(1.0);
      }
      break;
    }
    const double beta = average_loss / (1.0 - average_loss);
    model.trees.push_back(std::move(tree));
    model.tree_weights.push_back(std::log(1.0 / beta));
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      sample_weight[r] *= std::pow(beta, 1.0 - error[r]);
      total += sample_weight[r];
    }
    if (!(total > 0.0)) break;
    for (double& w : sample_weight) w /= total;
  }
  return model;
}

EnsembleModel fit_with_columns(const LearnerSpec& spec, const Matrix& x, std::span<const double> y,
                               const detail::SortedColumns* columns) {
  std::unique_ptr<detail::SortedColumns> owned;
  auto cols = [&]() -> const detail::SortedColumns& {
    if (columns) return *columns;
    if (!owned) owned = std::make_unique<detail::SortedColumns>(x);
    return *owned;
  };
  switch (spec.kind) {
    case LearnerKind::kLinear: return fit_linear(x, y);
    case LearnerKind::kDecisionTree: {
      check_xy(x, y, "fit_tree");
      EnsembleModel model;
      model.kind = LearnerKind::kDecisionTree;
      const std::vector<double> weights(x.rows(), 1.0);
      model.trees.push_back(detail::build_tree(x, cols(), y, weights, spec.tree));
      model.tree_weights.push_back(1.0);
      return model;
    }
    case LearnerKind::kGradientBoosting: {
      auto params = spec.boosting;
      params.seed = spec.seed;
      check_xy(x, y, "fit_gradient_boosting");
      return gradient_boosting(x, cols(), y, params);
    }
    case LearnerKind::kExtraTrees: {
      auto params = spec.extra_trees;
      params.seed = spec.seed;
      return fit_extra_trees(x, y, params);
    }
    case LearnerKind::kAdaBoostR2: {
      auto params = spec.adaboost;
      params.seed = spec.seed;
      check_xy(x, y, "fit_adaboost_r2");
      return adaboost_r2(x, cols(), y, params);
    }
  }
  throw InvalidArgument("unsupported learner");
}

}  // namespace

double weighted_median(std::span<const double> values, std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size())
    throw InvalidArgument("weighted_median: empty or mismatched input");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double cumulative = 0.0;
  for (auto i : order) {
    cumulative += weights[i];
    if (cumulative >= 0.5 * total) return values[i];
  }
  return values[order.back()];
}

double EnsembleModel::predict(std::span<const double> x) const {
  switch (kind) {
    case LearnerKind::kLinear: {
      if (x.size() != coefficients.size()) throw InvalidArgument("predict: feature width mismatch");
      double out = intercept;
      for (std::size_t j = 0; j < coefficients.size(); ++j) out += coefficients[j] * x[j];
      return out;
    }
    case LearnerKind::kDecisionTree: return trees.at(0).predict(x);
    case LearnerKind::kGradientBoosting: {
      double out = base;
      for (std::size_t t = 0; t < trees.size(); ++t) out += tree_weights[t] * trees[t].predict(x);
      return out;
    }
    case LearnerKind::kExtraTrees: {
      std::vector<double> values(trees.size());
      for (std::size_t t = 0; t < trees.size(); ++t) values[t] = trees[t].predict(x);
      const double m = mean_of(values);
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      return std::clamp(m, *lo, *hi);
    }
    case LearnerKind::kAdaBoostR2: {
      std::vector<double> values(trees.size());
      for (std::size_t t = 0; t < trees.size(); ++t) values[t] = trees[t].predict(x);
      return weighted_median(values, tree_weights);
    }
  }
  return 0.0;
}

std::vector<double> EnsembleModel::predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

EnsembleModel fit_gradient_boosting(const Matrix& x, std::span<const double> y,
                                    const GradientBoostingParams& params) {
  check_xy(x, y, "fit_gradient_boosting");
  const detail::SortedColumns columns(x);
  return gradient_boosting(x, columns, y, params);
}

EnsembleModel fit_extra_trees(const Matrix& x, std::span<const double> y, const ExtraTreesParams& params) {
  check_xy(x, y, "fit_extra_trees");
  if (params.n_trees < 1) throw InvalidArgument("fit_extra_trees: n_trees must be >= 1");
  const std::size_t d = x.cols();
  std::size_t k = params.k_features > 0
                      ? static_cast<std::size_t>(params.k_features)
                      : static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
  k = std::clamp<std::size_t>(k, 1, std::max<std::size_t>(d, 1));
  EnsembleModel model;
  model.kind = LearnerKind::kExtraTrees;
  std::vector<std::uint32_t> all(x.rows());
  std::iota(all.begin(), all.end(), 0u);
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> feature_order(d);
    std::iota(feature_order.begin(), feature_order.end(), std::size_t{0});
    std::vector<TreeNode> nodes;
    grow_extra_tree(x, y, all, 0, params, k, rng, feature_order, nodes);
    model.trees.emplace_back(std::move(nodes));
    model.tree_weights.push_back(1.0 / params.n_trees);
  }
  return model;
}

EnsembleModel fit_adaboost_r2(const Matrix& x, std::span<const double> y, const AdaBoostParams& params) {
  check_xy(x, y, "fit_adaboost_r2");
  const detail::SortedColumns columns(x);
  return adaboost_r2(x, columns, y, params);
}

EnsembleModel fit_linear(const Matrix& x, std::span<const double> y) {
  check_xy(x, y, "fit_linear");
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd design(n, d + 1);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) design(r, c) = x(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    design(r, d) = 1.0;
  }
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), n);
  Eigen::MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += 1e-8;
  const Eigen::VectorXd beta = gram.ldlt().solve(design.transpose() * target);
  EnsembleModel model;
  model.kind = LearnerKind::kLinear;
  model.coefficients.assign(beta.data(), beta.data() + d);
  model.intercept = beta(d);
  for (double c : model.coefficients)
    if (!std::isfinite(c)) throw Error("fit_linear: non-finite coefficient");
  return model;
}

EnsembleModel fit_learner(const LearnerSpec& spec, const Matrix& x, std::span<const double> y) {
  return fit_with_columns(spec, x, y, nullptr);
}

std::vector<double> MultiOutputModel::predict(std::span<const double> x) const {
  if (x.size() != input_width) throw InvalidArgument("MultiOutputModel: feature width mismatch");
  std::vector<double> out(models.size());
  for (std::size_t c = 0; c < models.size(); ++c) out[c] = models[c].predict(x);
  return out;
}

MultiOutputModel fit_multi_output(const LearnerSpec& spec, const Matrix& x, const Matrix& targets,
                                  std::vector<std::string> names, int threads) {
  if (targets.rows() != x.rows()) throw InvalidArgument("fit_multi_output: X and targets differ in rows");
  if (names.size() != targets.cols()) throw InvalidArgument("fit_multi_output: column count mismatch");
  if (x.rows() == 0) throw InvalidArgument("fit_multi_output: empty input");
  MultiOutputModel out;
  out.names = std::move(names);
  out.input_width = x.cols();
  out.models.resize(targets.cols());
  std::unique_ptr<detail::SortedColumns> columns;
  if (spec.kind != LearnerKind::kLinear && spec.kind != LearnerKind::kExtraTrees)
    columns = std::make_unique<detail::SortedColumns>(x);
  parallel_for(targets.cols(), threads, [&](std::size_t c) {
    LearnerSpec column_spec = spec;
    column_spec.seed = output_seed(spec.seed, c);
    const auto y = targets.column(c);
    out.models[c] = fit_with_columns(column_spec, x, y, columns.get());
  });
  return out;
}

}  // namespace idxqual
