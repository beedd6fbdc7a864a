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

#include "idxqual/config.hpp"

#include <fstream>
#include <sstream>

#include "json_io.hpp"

namespace idxqual {

namespace json_io {

namespace {

std::string at(std::string_view where, std::string_view key) {
  return std::string(where) + "." + std::string(key);
}

std::uint64_t get_u64(const Json& j, std::string_view key, std::uint64_t fallback, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer() && it->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(it->get<std::int64_t>());
  throw ConfigError(at(where, key) + " must be a non-negative integer");
}

int get_int(const Json& j, std::string_view key, int fallback, int lo, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(at(where, key) + " must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < lo || v > 1000000000) throw ConfigError(at(where, key) + " is out of range");
  return static_cast<int>(v);
}

std::size_t get_size(const Json& j, std::string_view key, std::size_t fallback, std::size_t lo, std::string_view where) {
  const auto v = get_u64(j, key, fallback, where);
  if (v < lo) throw ConfigError(at(where, key) + " must be at least " + std::to_string(lo));
  return static_cast<std::size_t>(v);
}

double get_double(const Json& j, std::string_view key, double fallback, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(at(where, key) + " must be a number");
  return it->get<double>();
}

std::string get_string(const Json& j, std::string_view key, std::string_view where) {
  const auto& v = j.at(std::string(key));
  if (!v.is_string()) throw ConfigError(at(where, key) + " must be a string");
  return v.get<std::string>();
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void require_object(const Json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
}

void reject_unknown(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) throw ConfigError("unknown key " + at(where, item.key()));
  }
}

Json to_json(const LearnerSpec& spec) {
  Json j;
  j["kind"] = std::string(to_string(spec.kind));
  switch (spec.kind) {
    case LearnerKind::kLinear:
      break;
    case LearnerKind::kDecisionTree:
      j["max_depth"] = spec.tree.max_depth;
      j["min_samples_leaf"] = spec.tree.min_samples_leaf;
      break;
    case LearnerKind::kGradientBoosting:
      j["stages"] = spec.boosting.stages;
      j["shrinkage"] = spec.boosting.shrinkage;
      j["subsample"] = spec.boosting.subsample;
      j["max_depth"] = spec.boosting.tree.max_depth;
      j["min_samples_leaf"] = spec.boosting.tree.min_samples_leaf;
      break;
    case LearnerKind::kExtraTrees:
      j["n_trees"] = spec.extra_trees.n_trees;
      j["k_features"] = spec.extra_trees.k_features;
      j["max_depth"] = spec.extra_trees.max_depth;
      j["min_samples_split"] = spec.extra_trees.min_samples_split;
      break;
    case LearnerKind::kAdaBoostR2:
      j["stages"] = spec.adaboost.stages;
      j["loss"] = std::string(to_string(spec.adaboost.loss));
      j["max_depth"] = spec.adaboost.tree.max_depth;
      j["min_samples_leaf"] = spec.adaboost.tree.min_samples_leaf;
      break;
  }
  return j;
}

LearnerSpec learner_from_json(const Json& j, std::string_view where) {
  require_object(j, where);
  if (!j.contains("kind")) throw ConfigError(std::string(where) + ".kind is required");
  LearnerSpec spec;
  try {
    spec.kind = parse_learner_kind(get_string(j, "kind", where));
  } catch (const InvalidArgument& e) {
    throw ConfigError(at(where, "kind") + ": " + e.what());
  }
  auto tree = [&](TreeParams& t) {
    t.max_depth = get_int(j, "max_depth", t.max_depth, 0, where);
    t.min_samples_leaf = get_double(j, "min_samples_leaf", t.min_samples_leaf, where);
    check(t.min_samples_leaf >= 1.0, at(where, "min_samples_leaf") + " must be at least 1");
  };
  switch (spec.kind) {
    case LearnerKind::kLinear:
      reject_unknown(j, {"kind"}, where);
      break;
    case LearnerKind::kDecisionTree:
      reject_unknown(j, {"kind", "max_depth", "min_samples_leaf"}, where);
      tree(spec.tree);
      break;
    case LearnerKind::kGradientBoosting: {
      reject_unknown(j, {"kind", "stages", "shrinkage", "subsample", "max_depth", "min_samples_leaf"}, where);
      auto& b = spec.boosting;
      b.stages = get_int(j, "stages", b.stages, 0, where);
      b.shrinkage = get_double(j, "shrinkage", b.shrinkage, where);
      b.subsample = get_double(j, "subsample", b.subsample, where);
      check(b.shrinkage > 0.0 && b.shrinkage <= 1.0, at(where, "shrinkage") + " must lie in (0, 1]");
      check(b.subsample > 0.0 && b.subsample <= 1.0, at(where, "subsample") + " must lie in (0, 1]");
      tree(b.tree);
      break;
    }
    case LearnerKind::kExtraTrees: {
      reject_unknown(j, {"kind", "n_trees", "k_features", "max_depth", "min_samples_split"}, where);
      auto& e = spec.extra_trees;
      e.n_trees = get_int(j, "n_trees", e.n_trees, 1, where);
      e.k_features = get_int(j, "k_features", e.k_features, 0, where);
      e.max_depth = get_int(j, "max_depth", e.max_depth, -1, where);
      e.min_samples_split = get_int(j, "min_samples_split", e.min_samples_split, 2, where);
      break;
    }
    case LearnerKind::kAdaBoostR2: {
      reject_unknown(j, {"kind", "stages", "loss", "max_depth", "min_samples_leaf"}, where);
      auto& a = spec.adaboost;
      a.stages = get_int(j, "stages", a.stages, 1, where);
      if (j.contains("loss")) {
        try {
          a.loss = parse_adaboost_loss(get_string(j, "loss", where));
        } catch (const InvalidArgument& e) {
          throw ConfigError(at(where, "loss") + ": " + e.what());
        }
      }
      tree(a.tree);
      break;
    }
  }
  return spec;
}

Json to_json(const SynthConfig& c) {
  Json j;
  j["n_docs"] = c.n_docs;
  j["n_concepts"] = c.n_concepts;
  j["n_categories"] = c.n_categories;
  j["terms_per_concept"] = c.terms_per_concept;
  j["count_distribution"] = c.count_distribution;
  j["oov_rate"] = c.oov_rate;
  j["truncation_rate"] = c.truncation_rate;
  j["ambiguity_rate"] = c.ambiguity_rate;
  j["cue_variants"] = c.cue_variants;
  j["max_filler"] = c.max_filler;
  j["always_oov"] = c.always_oov;
  j["seed"] = c.seed;
  return j;
}

SynthConfig synth_from_json(const Json& j, std::optional<std::uint64_t> default_seed) {
  constexpr std::string_view where = "synth";
  require_object(j, where);
  reject_unknown(j,
                 {"n_docs", "n_concepts", "n_categories", "terms_per_concept", "count_distribution", "oov_rate",
                  "truncation_rate", "ambiguity_rate", "cue_variants", "max_filler", "always_oov", "seed"},
                 where);
  SynthConfig c;
  c.n_docs = get_size(j, "n_docs", c.n_docs, 1, where);
  c.n_concepts = get_size(j, "n_concepts", c.n_concepts, 1, where);
  c.n_categories = get_size(j, "n_categories", c.n_categories, 1, where);
  c.terms_per_concept = get_size(j, "terms_per_concept", c.terms_per_concept, 1, where);
  if (j.contains("count_distribution")) {
    const auto& d = j["count_distribution"];
    check(d.is_array(), "synth.count_distribution must be an array");
    c.count_distribution.clear();
    for (const auto& p : d) {
      check(p.is_number(), "synth.count_distribution must hold numbers");
      c.count_distribution.push_back(p.get<double>());
    }
  }
  c.oov_rate = get_double(j, "oov_rate", c.oov_rate, where);
  c.truncation_rate = get_double(j, "truncation_rate", c.truncation_rate, where);
  c.ambiguity_rate = get_double(j, "ambiguity_rate", c.ambiguity_rate, where);
  c.cue_variants = get_size(j, "cue_variants", c.cue_variants, 1, where);
  c.max_filler = get_size(j, "max_filler", c.max_filler, 0, where);
  if (j.contains("always_oov")) {
    const auto& ids = j["always_oov"];
    check(ids.is_array(), "synth.always_oov must be an array");
    for (const auto& id : ids) {
      check(id.is_string(), "synth.always_oov must hold strings");
      c.always_oov.push_back(id.get<std::string>());
    }
  }
  if (j.contains("seed"))
    c.seed = get_u64(j, "seed", 0, where);
  else if (default_seed)
    c.seed = *default_seed;
  else
    throw ConfigError("synth.seed is required");
  c.validate();
  return c;
}

Json to_json(const RunConfig& c) {
  const auto& e = c.experiment;
  Json j;
  j["seed"] = e.seed;
  if (c.corpus) j["corpus"] = c.corpus->string();
  if (c.vocabulary) j["vocabulary"] = c.vocabulary->string();
  if (c.output_dir) j["output_dir"] = c.output_dir->string();
  if (c.synth) j["synth"] = to_json(*c.synth);
  j["folds"] = {{"outer", e.outer_folds}, {"inner", e.inner_folds}};
  const auto& t = e.pipeline.text;
  j["text"] = {{"min_df", t.min_df}, {"max_terms", t.max_terms}, {"quality_terms", t.quality_terms}};
  const auto& b = e.pipeline.classifier;
  j["classifier"] = {{"epochs", b.sgd.epochs}, {"eta0", b.sgd.eta0}, {"lambda", b.sgd.lambda}, {"threshold", b.threshold}};
  j["calibration"] = to_json(e.pipeline.calibration);
  j["recall"] = to_json(e.recall);
  j["mask"] = e.mask.to_string();
  j["ablation_groups"] = c.ablation_groups.to_string();
  j["thresholds"] = e.thresholds;
  j["threads"] = e.threads;
  return j;
}

RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  constexpr std::string_view where = "config";
  require_object(j, where);
  reject_unknown(j,
                 {"seed", "corpus", "vocabulary", "output_dir", "synth", "folds", "text", "classifier", "calibration",
                  "recall", "mask", "ablation_groups", "thresholds", "threads"},
                 where);
  if (!j.contains("seed")) throw ConfigError("config.seed is required");
  RunConfig c;
  auto& e = c.experiment;
  e.seed = get_u64(j, "seed", 0, where);

  auto path = [&](std::string_view key) -> std::optional<std::filesystem::path> {
    if (!j.contains(key)) return std::nullopt;
    std::filesystem::path p = get_string(j, key, where);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  c.corpus = path("corpus");
  c.vocabulary = path("vocabulary");
  c.output_dir = path("output_dir");
  check(c.corpus.has_value() == c.vocabulary.has_value(), "config.corpus and config.vocabulary go together");
  if (j.contains("synth")) c.synth = synth_from_json(j["synth"], e.seed);

  if (j.contains("folds")) {
    const auto& f = j["folds"];
    require_object(f, "config.folds");
    reject_unknown(f, {"outer", "inner"}, "config.folds");
    e.outer_folds = get_size(f, "outer", e.outer_folds, 2, "config.folds");
    e.inner_folds = get_size(f, "inner", e.inner_folds, 2, "config.folds");
  }
  if (j.contains("text")) {
    const auto& t = j["text"];
    require_object(t, "config.text");
    reject_unknown(t, {"min_df", "max_terms", "quality_terms"}, "config.text");
    auto& p = e.pipeline.text;
    p.min_df = get_size(t, "min_df", p.min_df, 1, "config.text");
    p.max_terms = get_size(t, "max_terms", p.max_terms, 1, "config.text");
    p.quality_terms = get_size(t, "quality_terms", p.quality_terms, 1, "config.text");
  }
  if (j.contains("classifier")) {
    const auto& m = j["classifier"];
    require_object(m, "config.classifier");
    reject_unknown(m, {"epochs", "eta0", "lambda", "threshold"}, "config.classifier");
    auto& b = e.pipeline.classifier;
    b.sgd.epochs = get_int(m, "epochs", b.sgd.epochs, 1, "config.classifier");
    b.sgd.eta0 = get_double(m, "eta0", b.sgd.eta0, "config.classifier");
    b.sgd.lambda = get_double(m, "lambda", b.sgd.lambda, "config.classifier");
    b.threshold = get_double(m, "threshold", b.threshold, "config.classifier");
    check(b.sgd.eta0 > 0.0, "config.classifier.eta0 must be positive");
    check(b.sgd.lambda >= 0.0, "config.classifier.lambda must be non-negative");
    check(b.threshold > 0.0 && b.threshold < 1.0, "config.classifier.threshold must lie in (0, 1)");
  }
  if (j.contains("calibration")) e.pipeline.calibration = learner_from_json(j["calibration"], "config.calibration");
  if (j.contains("recall")) e.recall = learner_from_json(j["recall"], "config.recall");
  auto mask = [&](std::string_view key, GroupMask fallback) {
    if (!j.contains(key)) return fallback;
    GroupMask m;
    try {
      m = GroupMask::parse(get_string(j, key, where));
    } catch (const InvalidArgument& err) {
      throw ConfigError(at(where, key) + ": " + err.what());
    }
    check(!m.empty(), at(where, key) + " selects no feature group");
    return m;
  };
  e.mask = mask("mask", e.mask);
  c.ablation_groups = mask("ablation_groups", c.ablation_groups);
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    check(t.is_array() && !t.empty(), "config.thresholds must be a non-empty array");
    e.thresholds.clear();
    for (const auto& v : t) {
      check(v.is_number(), "config.thresholds must hold numbers");
      const double x = v.get<double>();
      check(x >= 0.0 && x <= 1.0, "config.thresholds must lie in [0, 1]");
      check(e.thresholds.empty() || x > e.thresholds.back(), "config.thresholds must be strictly ascending");
      e.thresholds.push_back(x);
    }
  }
  e.threads = get_int(j, "threads", e.threads, 1, where);
  e.pipeline.threads = e.threads;
  return c;
}

}  // namespace json_io

namespace {

json_io::Json parse_text(std::string_view text) {
  try {
    return json_io::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  return json_io::run_config_from_json(parse_text(json_text), base_dir);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), path.parent_path());
}

void validate_paths(const RunConfig& config) {
  namespace fs = std::filesystem;
  if (!config.corpus && !config.synth) throw ConfigError("config names neither a corpus nor a synth section");
  if (config.corpus && !fs::is_regular_file(*config.corpus))
    throw ConfigError("corpus file not found: " + config.corpus->string());
  if (config.vocabulary && !fs::is_regular_file(*config.vocabulary))
    throw ConfigError("vocabulary file not found: " + config.vocabulary->string());
  if (config.output_dir && !fs::is_directory(*config.output_dir))
    throw ConfigError("output directory not found: " + config.output_dir->string());
}

std::string run_config_json(const RunConfig& config) { return json_io::to_json(config).dump(2); }

SynthConfig parse_synth_config(std::string_view json_text) {
  const auto j = parse_text(json_text);
  json_io::require_object(j, "config");
  std::optional<std::uint64_t> seed;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
      throw ConfigError("config.seed must be a non-negative integer");
    seed = j["seed"].get<std::uint64_t>();
  }
  return json_io::synth_from_json(j.contains("synth") ? j["synth"] : json_io::Json::object(), seed);
}

LearnerSpec parse_learner_spec(std::string_view json_text) {
  return json_io::learner_from_json(parse_text(json_text), "learner");
}

std::string learner_spec_json(const LearnerSpec& spec) { return json_io::to_json(spec).dump(); }

Corpus load_run_corpus(const RunConfig& config) {
  if (config.corpus) {
    auto vocab = std::make_shared<const Vocabulary>(load_vocabulary(*config.vocabulary));
    return load_corpus(*config.corpus, std::move(vocab));
  }
  if (config.synth) return generate(*config.synth);
  throw ConfigError("config names neither a corpus nor a synth section");
}

}  // namespace idxqual
