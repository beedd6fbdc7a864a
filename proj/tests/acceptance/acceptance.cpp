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

// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 when a
// gating criterion fails. Usage: acceptance WORK_DIR

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "idxqual/commands.hpp"
#include "idxqual/config.hpp"
#include "idxqual/eval.hpp"
#include "idxqual/experiment.hpp"
#include "idxqual/mlc.hpp"
#include "idxqual/random.hpp"
#include "idxqual/regress.hpp"
#include "idxqual/synth.hpp"
#include "oracles.hpp"

using namespace idxqual;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure messages of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ < 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  Outcome done(std::string detail) const {
    if (failures_ == 0) return {true, std::move(detail)};
    return {false, std::to_string(failures_) + " failures: " + notes_};
  }

 private:
  int failures_ = 0;
  std::string notes_;
};

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---- metric oracles ----

Outcome metric_oracles() {
  Check c;
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const auto n = 2 + rng.below(200);
    std::vector<double> x, y;
    const double slope = rng.uniform() * 2 - 1;
    for (std::uint64_t i = 0; i < n; ++i) {
      x.push_back(rng.uniform() * 100 - 50);
      y.push_back(slope * x.back() + rng.uniform() * 30);
    }
    c.expect(std::abs(pearson(x, y) - oracle::pearson(x, y)) <= 1e-10, "pearson pair " + std::to_string(t));
    c.expect(std::abs(mse(x, y) - oracle::mse(x, y)) <= 1e-10 * std::max(1.0, oracle::mse(x, y)),
             "mse pair " + std::to_string(t));
  }
  for (int t = 0; t < 50; ++t) {
    std::vector<std::string> gold, pred;
    for (auto k = 1 + rng.below(6); k > 0; --k) gold.push_back("c" + std::to_string(rng.below(9)));
    for (auto k = rng.below(7); k > 0; --k) pred.push_back("c" + std::to_string(rng.below(9)));
    const auto counts = oracle::count(gold, pred);
    const double p = counts.tp + counts.fp == 0 ? 1.0 : double(counts.tp) / (counts.tp + counts.fp);
    const double r = double(counts.tp) / (counts.tp + counts.fn);
    const double f = p + r == 0 ? 0.0 : 2 * p * r / (p + r);
    c.expect(doc_precision(gold, pred) == p, "precision case " + std::to_string(t));
    c.expect(*doc_recall(gold, pred) == r, "recall case " + std::to_string(t));
    std::vector<std::vector<std::string>> g{gold}, q{pred};
    const auto s = f1_scores(std::span<const std::vector<std::string>>(g), std::span<const std::vector<std::string>>(q));
    c.expect(std::abs(s.sample_f1 - f) < 1e-15, "f1 case " + std::to_string(t));
  }
  return c.done("1000 pairs within 1e-10, 50 counted cases");
}

// ---- regressor oracles ----

Outcome regressor_oracles() {
  Check c;
  Rng rng(2);
  std::size_t datasets = 0;
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t d = 1; d <= 3; ++d)
      for (int t = 0; t < 500; ++t) {
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < n; ++i) {
          std::vector<double> row;
          for (std::size_t f = 0; f < d; ++f) row.push_back(static_cast<double>(rng.below(4)) - 1.0);
          x.push_back(row);
          y.push_back(rng.bernoulli(0.5) ? static_cast<double>(rng.below(3)) : rng.uniform() * 10 - 5);
        }
        const int depth = static_cast<int>(rng.below(5));
        const double min_leaf = 1.0 + static_cast<double>(rng.below(3));
        const auto tree = fit_tree(Matrix::from_rows(x), y, {depth, min_leaf});
        c.expect(oracle::same_tree(*oracle::fit_tree(x, y, depth, min_leaf), tree),
                 "tree n=" + std::to_string(n) + " d=" + std::to_string(d));
        ++datasets;
      }

  // one boosting stage
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 4; ++i) {
      x.push_back({static_cast<double>(rng.below(4)), static_cast<double>(rng.below(2))});
      y.push_back(rng.uniform() * 10);
    }
    GradientBoostingParams p;
    p.stages = 1;
    p.shrinkage = 0.5;
    const auto m = fit_gradient_boosting(Matrix::from_rows(x), y, p);
    const double f0 = oracle::mean(y, {0, 1, 2, 3});
    std::vector<double> residual;
    for (double v : y) residual.push_back(v - f0);
    const auto tree = oracle::fit_tree(x, residual, p.tree.max_depth, p.tree.min_samples_leaf);
    for (const auto& row : x) {
      const double expect = f0 + 0.5 * oracle::predict(*tree, row);
      c.expect(std::abs(m.predict(row) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)), "boosting stage");
    }
  }

  // AdaBoost.R2 weighted median
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) {
      x.push_back({static_cast<double>(rng.below(5)), static_cast<double>(rng.below(5)), rng.uniform()});
      y.push_back(x.back()[0] + rng.uniform() * 3);
    }
    AdaBoostParams p;
    p.seed = static_cast<std::uint64_t>(t);
    const auto m = fit_adaboost_r2(Matrix::from_rows(x), y, p);
    for (const auto& row : x) {
      std::vector<double> outs;
      for (const auto& tree : m.trees) outs.push_back(tree.predict(row));
      c.expect(m.predict(row) == oracle::weighted_median(outs, m.tree_weights), "adaboost median");
    }
  }

  // noiseless linear data
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + rng.below(5);
    std::vector<double> beta;
    for (std::size_t j = 0; j < d; ++j) beta.push_back(rng.uniform() * 6 - 3);
    const double b0 = rng.uniform() * 4 - 2;
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < 3 * d + 5; ++i) {
      std::vector<double> row;
      double v = b0;
      for (std::size_t j = 0; j < d; ++j) {
        row.push_back(rng.uniform() * 4 - 2);
        v += beta[j] * row.back();
      }
      x.push_back(row);
      y.push_back(v);
    }
    const auto m = fit_linear(Matrix::from_rows(x), y);
    for (std::size_t j = 0; j < d; ++j) c.expect(std::abs(m.coefficients[j] - beta[j]) < 1e-6, "ols coefficient");
    c.expect(std::abs(m.intercept - b0) < 1e-6, "ols intercept");
  }
  return c.done(std::to_string(datasets) + " tree datasets exact; boosting, AdaBoost.R2, OLS agree");
}

// ---- SGD logistic regression ----

long double loss_oracle(const std::vector<double>& w, double b, const DocVector& x, int y, double lambda) {
  long double z = b;
  for (const auto& e : x) z += static_cast<long double>(w[e.index]) * e.value;
  const long double p = 1.0L / (1.0L + std::exp(-z));
  long double n2 = 0.0L;
  for (double v : w) n2 += static_cast<long double>(v) * v;
  return -(y * std::log(p) + (1 - y) * std::log(1.0L - p)) + 0.5L * lambda * n2;
}

Outcome sgd_checks() {
  Check c;
  Rng rng(3);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t dim = 5;
    LogisticModel m;
    for (std::size_t j = 0; j < dim; ++j) m.weights.push_back(rng.uniform() * 4 - 2);
    m.bias = rng.uniform() * 2 - 1;
    DocVector x;
    for (std::uint32_t j = 0; j < dim; ++j)
      if (rng.bernoulli(0.7)) x.push_back({j, rng.uniform() * 3 - 1.5});
    const int y = rng.bernoulli(0.5);
    const double lambda = 1e-3;
    const auto lg = logistic_loss(m, x, y, lambda);
    const double h = 1e-5;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8}); };
    for (std::size_t j = 0; j < dim; ++j) {
      auto wp = m.weights, wm = m.weights;
      wp[j] += h;
      wm[j] -= h;
      const double fd = static_cast<double>((loss_oracle(wp, m.bias, x, y, lambda) - loss_oracle(wm, m.bias, x, y, lambda)) / (2 * h));
      worst = std::max(worst, rel(lg.weight_gradient[j], fd));
    }
    const double fdb = static_cast<double>(
        (loss_oracle(m.weights, m.bias + h, x, y, lambda) - loss_oracle(m.weights, m.bias - h, x, y, lambda)) / (2 * h));
    worst = std::max(worst, rel(lg.bias_gradient, fdb));
  }
  c.expect(worst < 1e-4, "gradient relative error " + std::to_string(worst));

  // 10 points split by the line x0 + x1 = 1
  std::vector<DocVector> rows;
  std::vector<std::uint8_t> labels;
  const double pts[10][2] = {{0.1, 0.2}, {0.3, 0.1}, {0.2, 0.5}, {0.6, 0.1}, {0.0, 0.7},
                             {0.9, 0.8}, {1.2, 0.3}, {0.4, 1.1}, {1.0, 1.0}, {0.7, 0.9}};
  for (int i = 0; i < 10; ++i) {
    rows.push_back({{0u, pts[i][0]}, {1u, pts[i][1]}});
    labels.push_back(i >= 5);
  }
  SgdParams p;
  p.epochs = 200;
  p.eta0 = 0.5;
  p.seed = 1;
  const auto model = train_logreg(rows, labels, 2, p);
  int correct = 0;
  for (int i = 0; i < 10; ++i) correct += (model.score(rows[i]) >= 0.0) == (labels[i] == 1);
  c.expect(correct == 10, "toy accuracy " + std::to_string(correct) + "/10");
  char worst_text[32];
  std::snprintf(worst_text, sizeof worst_text, "%.1e", worst);
  return c.done(std::string("max gradient rel. error ") + worst_text + ", toy accuracy 10/10");
}

// ---- synthetic end-to-end ----

RunConfig default_run(const fs::path& out) {
  RunConfig config;
  SynthConfig synth;
  synth.seed = kSeed;
  config.synth = synth;
  config.output_dir = out;
  config.experiment.seed = kSeed;
  return config;
}

Outcome end_to_end(const ExperimentResult& result) {
  Check c;
  const auto& r = result.report;
  c.expect(r.rho.mean >= 0.5, "rho " + fmt(r.rho.mean));
  c.expect(r.mse.mean <= 0.08, "mse " + fmt(r.mse.mean));
  return c.done("rho " + fmt(r.rho.mean) + " +- " + fmt(r.rho.sd) + ", mse " + fmt(r.mse.mean, 4) + " +- " +
                fmt(r.mse.sd, 4) + ", classifier micro f1 " + fmt(result.classifier.micro_f1));
}

Outcome ablation(const AblationReport& report) {
  Check c;
  auto rho = [&](const char* mask) {
    for (const auto& row : report.rows)
      if (row.mask == GroupMask::parse(mask)) return row.rho.mean;
    return std::nan("");
  };
  const double lc = rho("LC"), v = rho("V"), cn = rho("C");
  c.expect(lc > v, "LC-only " + fmt(lc) + " <= V-only " + fmt(v));
  c.expect(lc > cn, "LC-only " + fmt(lc) + " <= C-only " + fmt(cn));
  const double without_lc = rho("V+C+PI");
  for (const char* other : {"C+LC+PI", "V+LC+PI", "V+C+LC"})
    c.expect(without_lc < rho(other), std::string("dropping LC ") + fmt(without_lc) + " vs " + other + " " + fmt(rho(other)));
  std::ostringstream detail;
  detail << "LC-only " << fmt(lc) << " > V-only " << fmt(v) << ", C-only " << fmt(cn) << "; leave-one-out deltas";
  for (const char* m : {"C+LC+PI", "V+LC+PI", "V+C+PI", "V+C+LC"})
    for (const auto& row : report.rows)
      if (row.mask == GroupMask::parse(m)) detail << ' ' << m << ' ' << fmt(row.rho_delta_pct, 1) << '%';
  return c.done(detail.str());
}

Outcome sweep_properties(const std::vector<SweepRow>& rows) {
  Check c;
  const double full_precision = rows.front().mean_precision;
  double best_gain = -INFINITY, best_at = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i > 0) {
      c.expect(r.coverage <= rows[i - 1].coverage, "coverage rises at t=" + fmt(r.threshold, 2));
      if (r.n_selected >= 50)
        c.expect(r.mean_recall >= rows[i - 1].mean_recall - 0.02, "recall drops at t=" + fmt(r.threshold, 2));
    }
    if (r.coverage >= 0.1)
      c.expect(r.mean_precision >= full_precision - 0.02, "precision drops at t=" + fmt(r.threshold, 2));
    if (r.coverage >= 0.2 && r.recall_gain > best_gain) {
      best_gain = r.recall_gain;
      best_at = r.threshold;
    }
  }
  c.expect(best_gain > 0.2, "best RG " + fmt(100 * best_gain, 1) + "%");
  return c.done("best RG with coverage >= 0.2: " + fmt(100 * best_gain, 1) + "% at t=" + fmt(best_at, 2));
}

Outcome protocol(const ExperimentData& data, const ExperimentConfig& config) {
  Check c;
  c.expect(config.outer_folds == 5 && config.inner_folds == 5, "fold layout");
  c.expect(data.classifier_trainings == 30, std::to_string(data.classifier_trainings) + " classifier trainings");
  return c.done(std::to_string(data.classifier_trainings) + " classifier trainings for 5 x (5 + 1)");
}

Outcome determinism(const fs::path& work) {
  Check c;
  const fs::path config_path = work / "run.json";
  {
    std::ofstream out(config_path);
    out << R"({"seed": )" << kSeed << R"(, "synth": {}})" << '\n';
  }
  std::vector<fs::path> dirs;
  for (int threads : {1, 4}) {
    const auto dir = work / ("run_threads" + std::to_string(threads));
    fs::remove_all(dir);
    fs::create_directories(dir);
    CommandOptions options;
    options.config = config_path;
    options.out = dir;
    options.threads = threads;
    std::ostringstream log;
    cmd_run(options, log);
    dirs.push_back(dir);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    if (entry.path().extension() != ".csv") continue;
    const auto other = dirs[1] / entry.path().filename();
    c.expect(fs::exists(other) && read_file(entry.path()) == read_file(other), entry.path().filename().string() + " differs");
    ++compared;
  }
  c.expect(compared >= 7, "only " + std::to_string(compared) + " CSV files written");
  return c.done(std::to_string(compared) + " CSV files byte-identical for --threads 1 and 4");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance WORK_DIR\n";
    return 2;
  }
  const fs::path work = argv[1];
  fs::create_directories(work);
  int failed = 0;

  // shared_s: time already spent on work this criterion reuses
  auto report = [&](const std::string& name, double budget_s, const std::function<Outcome()>& fn,
                    double shared_s = 0.0) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = shared_s + std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt(budget_s, 0) + " s budget";
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " (" << fmt(secs, 1) << " s)" << std::endl;
  };

  report("metric-oracles", 1, metric_oracles);
  report("regressor-oracles", 10, regressor_oracles);
  report("sgd-logistic", 1, sgd_checks);

  const auto config = default_run(work);
  ExperimentData data;
  ExperimentResult full;
  double collect_s = 0;
  {
    const auto start = std::chrono::steady_clock::now();
    try {
      data = collect_experiment_data(load_run_corpus(config), config.experiment);
      full = evaluate_experiment(data, config.experiment, GroupMask::all());
    } catch (const std::exception& e) {
      std::cout << "FAIL synthetic-run: exception: " << e.what() << std::endl;
      return 1;
    }
    collect_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  report("end-to-end-synthetic", 300, [&] { return end_to_end(full); }, collect_s);
  report(
      "ablation-ordering", 900, [&] { return ablation(run_ablation(data, config.experiment, GroupMask::all())); },
      collect_s);
  report("threshold-sweep", 1, [&] { return sweep_properties(full.pooled_sweep); });
  report("protocol-30-trainings", 1, [&] { return protocol(data, config.experiment); });
  report("determinism-threads", 600, [&] { return determinism(work); });
  std::cout << "SKIP eurlex-optional: EURLEX titles dataset not available offline" << std::endl;

  std::cout << (failed == 0 ? "all gating criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
