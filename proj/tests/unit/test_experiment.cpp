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

#include <cmath>

#include "doctest.h"
#include "idxqual/error.hpp"
#include "idxqual/experiment.hpp"
#include "idxqual/synth.hpp"
#include "oracles.hpp"

using namespace idxqual;

namespace {

const Corpus& small_corpus() {
  static const Corpus corpus = [] {
    SynthConfig c;
    c.n_docs = 400;
    c.n_concepts = 35;
    c.seed = 21;
    return generate(c);
  }();
  return corpus;
}

ExperimentConfig small_config(int threads = 1) {
  ExperimentConfig c;
  c.seed = 5;
  c.pipeline.classifier.sgd.epochs = 4;
  c.recall.boosting.stages = 30;
  c.threads = threads;
  c.pipeline.threads = threads;
  c.pipeline.classifier.threads = threads;
  return c;
}

}  // namespace

TEST_CASE("ablation masks") {
  auto m = ablation_masks(GroupMask::all());
  REQUIRE(m.size() == 9);
  CHECK(m[0] == GroupMask::all());
  CHECK(m[1].to_string() == "C+LC+PI");
  CHECK(m[4].to_string() == "V+C+LC");
  CHECK(m[5].to_string() == "V");
  CHECK(m[8].to_string() == "PI");
  CHECK(ablation_masks(GroupMask::only(FeatureGroup::kCalibration)).size() == 1);
  CHECK(ablation_masks(GroupMask::parse("V+C+LC")).size() == 7);
  const auto pair = ablation_masks(GroupMask::parse("V+LC"));
  REQUIRE(pair.size() == 3);
  CHECK(pair[1].to_string() == "LC");
  CHECK(pair[2].to_string() == "V");
  CHECK_THROWS_AS(ablation_masks(GroupMask()), InvalidArgument);
}

TEST_CASE("nested cross-validation") {
  const auto& corpus = small_corpus();
  const auto config = small_config();
  const auto data = collect_experiment_data(corpus, config);
  CHECK(data.classifier_trainings == 30);
  CHECK(data.calibration_trainings == 30);
  REQUIRE(data.folds.size() == 5);

  std::size_t eval_docs = 0;
  for (const auto& fold : data.folds) {
    eval_docs += fold.eval.size();
    // inner dev-test folds cover the outer training set
    CHECK(fold.train_features.size() + fold.train_excluded == corpus.size() - fold.eval.size());
    for (const auto& r : fold.eval) {
      const auto& doc = corpus.documents[r.doc_index];
      const auto c = oracle::count(doc.gold_index, r.assigned);
      if (doc.gold_index.empty()) {
        CHECK_FALSE(r.true_recall.has_value());
      } else {
        CHECK(*r.true_recall == doctest::Approx(static_cast<double>(c.tp) / (c.tp + c.fn)));
      }
      CHECK(r.true_precision == (c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fp)));
      CHECK(r.features.mask == GroupMask::all());
    }
  }
  CHECK(eval_docs == corpus.size());

  const auto result = evaluate_experiment(data, config, GroupMask::all());
  REQUIRE(result.folds.size() == 5);
  for (std::size_t o = 0; o < 5; ++o) {
    const auto& f = result.folds[o];
    std::vector<double> est, truth;
    for (std::size_t i = 0; i < f.estimates.size(); ++i) {
      CHECK(f.estimates[i].recall_hat >= 0.0);
      CHECK(f.estimates[i].recall_hat <= 1.0);
      if (f.true_recall[i]) {
        est.push_back(f.estimates[i].recall_hat);
        truth.push_back(*f.true_recall[i]);
      }
    }
    CHECK(std::abs(f.rho - oracle::pearson(est, truth)) < 1e-10);
    CHECK(std::abs(f.mse - oracle::mse(est, truth)) < 1e-10);
    CHECK(result.report.rho.values[o] == f.rho);
    CHECK(f.sweep.front().coverage == 1.0);
  }
  CHECK(result.pooled_sweep.size() == 21);
  CHECK(result.pooled_sweep.front().coverage == 1.0);
  CHECK(result.report.rho.mean > 0.0);

  SUBCASE("rerun is identical") {
    const auto again = run_experiment(corpus, config);
    CHECK(again.report.rho.values == result.report.rho.values);
    CHECK(again.report.mse.values == result.report.mse.values);
  }
  SUBCASE("thread count does not change results") {
    const auto threaded = run_experiment(corpus, small_config(3));
    CHECK(threaded.report.rho.values == result.report.rho.values);
    CHECK(threaded.report.mse.values == result.report.mse.values);
  }
  SUBCASE("ablation reuses collected data") {
    const auto report = run_ablation(data, config, GroupMask::all());
    REQUIRE(report.rows.size() == 9);
    CHECK(report.rows[0].rho.values == result.report.rho.values);
    CHECK_THROWS_AS(evaluate_experiment(data, config, GroupMask()), InvalidArgument);
  }
}
