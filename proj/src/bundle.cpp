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

#include "idxqual/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>

#include "idxqual/error.hpp"
#include "idxqual/eval.hpp"
#include "idxqual/random.hpp"
#include "json_io.hpp"

namespace idxqual {

namespace {

using json_io::Json;

std::vector<std::uint32_t> assigned_concepts(const Prediction& prediction) {
  std::vector<std::uint32_t> out;
  for (const auto& a : prediction.assigned) out.push_back(a.concept_index);
  return out;
}

Json term_index_json(const TermIndex& index) {
  return {{"terms", index.terms()}, {"df", index.document_frequency()}, {"total_docs", index.total_docs()}};
}

TermIndex term_index_from(const Json& j) {
  return TermIndex(j.at("terms").get<std::vector<std::string>>(), j.at("df").get<std::vector<std::size_t>>(),
                   j.at("total_docs").get<std::size_t>());
}

Json ensemble_json(const EnsembleModel& m) {
  Json trees = Json::array();
  for (const auto& tree : m.trees) {
    Json nodes = Json::array();
    for (const auto& n : tree.nodes()) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    trees.push_back(std::move(nodes));
  }
  return {{"kind", std::string(to_string(m.kind))}, {"base", m.base},
          {"intercept", m.intercept},               {"coefficients", m.coefficients},
          {"tree_weights", m.tree_weights},         {"trees", std::move(trees)}};
}

EnsembleModel ensemble_from(const Json& j, std::size_t width) {
  EnsembleModel m;
  m.kind = parse_learner_kind(j.at("kind").get<std::string>());
  m.base = j.at("base").get<double>();
  m.intercept = j.at("intercept").get<double>();
  m.coefficients = j.at("coefficients").get<std::vector<double>>();
  m.tree_weights = j.at("tree_weights").get<std::vector<double>>();
  for (const auto& nodes_json : j.at("trees")) {
    std::vector<TreeNode> nodes;
    for (const auto& n : nodes_json) {
      if (!n.is_array() || n.size() != 5) throw BundleError("bundle: malformed tree node");
      TreeNode node;
      node.feature = n[0].get<int>();
      node.threshold = n[1].get<double>();
      node.left = n[2].get<int>();
      node.right = n[3].get<int>();
      node.value = n[4].get<double>();
      const int id = static_cast<int>(nodes.size());
      if (!node.is_leaf() && (node.feature >= static_cast<int>(width) || node.left <= id || node.right <= id))
        throw BundleError("bundle: inconsistent tree node");
      nodes.push_back(node);
    }
    m.trees.emplace_back(std::move(nodes));
  }
  bool ok = true;
  switch (m.kind) {
    case LearnerKind::kLinear: ok = m.coefficients.size() == width; break;
    case LearnerKind::kDecisionTree: ok = m.trees.size() == 1; break;
    case LearnerKind::kGradientBoosting: ok = m.tree_weights.size() == m.trees.size(); break;
    case LearnerKind::kExtraTrees: ok = !m.trees.empty(); break;
    case LearnerKind::kAdaBoostR2: ok = !m.trees.empty() && m.tree_weights.size() == m.trees.size(); break;
  }
  if (!ok) throw BundleError("bundle: inconsistent regression model");
  return m;
}

Json bundle_to_json(const ModelBundle& b) {
  const auto& im = b.indexing;
  Json j;
  j["format"] = std::string(kBundleFormat);
  j["version"] = b.version;
  j["config"] = json_io::to_json(b.config);

  Json vocab = Json::array();
  for (const auto& c : im.vocabulary->concepts()) vocab.push_back({c.id, c.label, c.category});
  j["vocabulary"] = std::move(vocab);
  j["classifier_index"] = term_index_json(im.classifier_index);

  const auto& clf = im.classifier;
  Json models = Json::array();
  for (const auto& m : clf.models())
    models.push_back({{"constant", m.constant}, {"bias", m.bias}, {"weights", m.weights}});
  const auto& sgd = clf.params();
  j["classifier"] = {{"dimension", clf.dimension()},
                     {"threshold", clf.threshold()},
                     {"sgd", {{"epochs", sgd.epochs}, {"eta0", sgd.eta0}, {"lambda", sgd.lambda}, {"seed", sgd.seed}}},
                     {"models", std::move(models)}};

  Json outputs = Json::array();
  const auto& cal = im.calibration.model;
  for (std::size_t k = 0; k < cal.models.size(); ++k)
    outputs.push_back({{"name", cal.names[k]}, {"model", ensemble_json(cal.models[k])}});
  j["calibration"] = {{"quality_terms", term_index_json(im.calibration.quality_terms)},
                      {"input_width", cal.input_width},
                      {"outputs", std::move(outputs)}};
  j["recall"] = {{"mask", b.recall.mask.to_string()}, {"width", b.recall.width}, {"model", ensemble_json(b.recall.model)}};
  return j;
}

ModelBundle bundle_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("format") || j["format"] != kBundleFormat)
    throw BundleError("not an idxqual model bundle");
  if (!j.contains("version") || !j["version"].is_number_integer()) throw BundleError("bundle: missing version");
  const int version = j["version"].get<int>();
  if (version != kBundleVersion)
    throw BundleError("bundle: unsupported version " + std::to_string(version) + " (this build reads version " +
                      std::to_string(kBundleVersion) + ")");
  ModelBundle b;
  b.version = version;
  b.config = json_io::run_config_from_json(j.at("config"), {});

  auto vocab = std::make_shared<Vocabulary>();
  for (const auto& c : j.at("vocabulary")) vocab->add({c.at(0).get<std::string>(), c.at(1).get<std::string>(), c.at(2).get<std::string>()});
  auto& im = b.indexing;
  im.vocabulary = vocab;
  im.classifier_index = term_index_from(j.at("classifier_index"));

  const auto& clf = j.at("classifier");
  const auto dim = clf.at("dimension").get<std::size_t>();
  if (dim != im.classifier_index.size()) throw BundleError("bundle: classifier dimension mismatch");
  SgdParams sgd;
  const auto& s = clf.at("sgd");
  sgd.epochs = s.at("epochs").get<int>();
  sgd.eta0 = s.at("eta0").get<double>();
  sgd.lambda = s.at("lambda").get<double>();
  sgd.seed = s.at("seed").get<std::uint64_t>();
  std::vector<LogisticModel> models;
  for (const auto& m : clf.at("models")) {
    LogisticModel lm;
    lm.constant = m.at("constant").get<bool>();
    lm.bias = m.at("bias").get<double>();
    lm.weights = m.at("weights").get<std::vector<double>>();
    if (lm.constant ? !lm.weights.empty() : lm.weights.size() != dim) throw BundleError("bundle: weight vector size");
    models.push_back(std::move(lm));
  }
  if (models.size() != vocab->size()) throw BundleError("bundle: classifier does not match vocabulary");
  im.classifier = BrlrModel(std::move(models), dim, clf.at("threshold").get<double>(), sgd);

  const auto& cal = j.at("calibration");
  im.calibration.quality_terms = term_index_from(cal.at("quality_terms"));
  auto& mo = im.calibration.model;
  mo.input_width = cal.at("input_width").get<std::size_t>();
  if (mo.input_width != im.calibration.input_width()) throw BundleError("bundle: calibration width mismatch");
  for (const auto& out : cal.at("outputs")) {
    mo.names.push_back(out.at("name").get<std::string>());
    mo.models.push_back(ensemble_from(out.at("model"), mo.input_width));
  }
  if (mo.names != vocab->categories()) throw BundleError("bundle: calibration outputs do not match categories");

  const auto& rec = j.at("recall");
  b.recall.mask = GroupMask::parse(rec.at("mask").get<std::string>());
  b.recall.width = rec.at("width").get<std::size_t>();
  b.recall.model = ensemble_from(rec.at("model"), b.recall.width);
  return b;
}

}  // namespace

ModelBundle train_bundle(const Corpus& corpus, const RunConfig& config) {
  const auto& e = config.experiment;
  if (corpus.size() < e.inner_folds) throw InvalidArgument("train_bundle: corpus smaller than fold count");
  const auto tokens = tokenize_corpus(corpus);
  std::vector<std::size_t> all(corpus.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto quality_terms = build_quality_terms(tokens, all, e.pipeline.text);

  auto params_for = [&](std::uint64_t seed) {
    PipelineParams p = e.pipeline;
    p.threads = e.threads;
    p.classifier.sgd.seed = derive_seed(seed, "classifier");
    p.calibration.seed = derive_seed(seed, "calibration");
    return p;
  };
  const std::uint64_t seed = derive_seed(e.seed, "bundle");
  const auto parts = partition(all, e.inner_folds, derive_seed(seed, "folds"));
  std::vector<FeatureVector> rows;
  std::vector<double> recall;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::vector<std::size_t> train;
    for (std::size_t k = 0; k < parts.size(); ++k)
      if (k != i) train.insert(train.end(), parts[k].begin(), parts[k].end());
    std::sort(train.begin(), train.end());
    const auto model = train_indexing_model(corpus, tokens, train, quality_terms, params_for(derive_seed(seed, i)));
    for (auto d : parts[i]) {
      const auto& doc = corpus.documents[d];
      if (!doc.has_gold()) continue;
      auto analysis = model.analyze(tokens[d], e.mask);
      recall.push_back(*doc_recall(doc.gold_index, assigned_concepts(analysis.prediction)));
      rows.push_back(std::move(analysis.features));
    }
  }
  ModelBundle b;
  b.config = config;
  LearnerSpec learner = e.recall;
  learner.seed = derive_seed(seed, "recall");
  b.recall = train_recall_estimator(rows, recall, learner);
  b.indexing = train_indexing_model(corpus, tokens, all, quality_terms, params_for(derive_seed(seed, "final")));
  return b;
}

DocumentResult apply_bundle(const ModelBundle& bundle, const std::string& doc_id, std::string_view text) {
  auto analysis = bundle.indexing.analyze(tokenize(text), bundle.recall.mask);
  DocumentResult out;
  out.prediction = std::move(analysis.prediction);
  out.prediction.doc_id = doc_id;
  out.estimate.doc_id = doc_id;
  out.estimate.recall_hat = estimate_recall(bundle.recall, analysis.features);
  out.estimate.precision = precision_scores(out.prediction);
  return out;
}

std::string bundle_json(const ModelBundle& bundle) { return bundle_to_json(bundle).dump(); }

ModelBundle parse_bundle(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw BundleError(std::string("bundle: corrupt file: ") + e.what());
  }
  try {
    return bundle_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw BundleError(std::string("bundle: corrupt file: ") + e.what());
  } catch (const BundleError&) {
    throw;
  } catch (const Error& e) {
    throw BundleError(std::string("bundle: corrupt file: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write bundle " + path.string());
  out << bundle_json(bundle) << '\n';
  if (!out) throw Error("cannot write bundle " + path.string());
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("cannot open bundle " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_bundle(buffer.str());
}

std::string result_json(const ModelBundle& bundle, const DocumentResult& result) {
  Json concepts = Json::array();
  for (const auto& a : result.prediction.assigned)
    concepts.push_back({{"id", bundle.indexing.vocabulary->concept_at(a.concept_index).id}, {"confidence", a.confidence}});
  const auto& p = result.estimate.precision;
  Json j;
  j["id"] = result.estimate.doc_id;
  j["concepts"] = std::move(concepts);
  j["recall_hat"] = result.estimate.recall_hat;
  j["precision"] = {{"mean", p.mean}, {"product", p.product}, {"median", p.median}, {"min", p.min}};
  return j.dump();
}

}  // namespace idxqual
