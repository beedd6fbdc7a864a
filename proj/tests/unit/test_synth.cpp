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

#include <algorithm>
#include <set>

#include "doctest.h"
#include "idxqual/error.hpp"
#include "idxqual/eval.hpp"
#include "idxqual/mlc.hpp"
#include "idxqual/synth.hpp"
#include "idxqual/textproc.hpp"
#include "support.hpp"

using namespace idxqual;

namespace {

SynthConfig small(std::uint64_t seed) {
  SynthConfig c;
  c.n_docs = 1200;
  c.n_concepts = 40;
  c.seed = seed;
  return c;
}

// Trains on the first half, predicts the second half; returns predicted ids.
std::vector<std::vector<std::string>> fit_half(const Corpus& corpus) {
  std::vector<std::size_t> train;
  std::vector<TokenSeq> train_tokens;
  for (std::size_t d = 0; d < corpus.size() / 2; ++d) {
    train.push_back(d);
    train_tokens.push_back(tokenize(corpus.documents[d].text));
  }
  const auto index = build_term_index(train_tokens, 1, 100000);
  BrlrParams params;
  params.sgd.seed = 1;
  const auto model = train_brlr(corpus, train, index, params);
  std::vector<std::vector<std::string>> out;
  for (std::size_t d = corpus.size() / 2; d < corpus.size(); ++d) {
    auto p = model.predict(vectorize(tokenize(corpus.documents[d].text), index));
    out.emplace_back();
    for (auto& a : p.assigned) out.back().push_back(corpus.vocabulary->concept_at(a.concept_index).id);
  }
  return out;
}

}  // namespace

TEST_CASE("pseudo words") {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < 20000; ++i) seen.insert(pseudo_word(i));
  CHECK(seen.size() == 20000);
  for (const auto& f : filler_words()) CHECK_FALSE(seen.contains(f));
  for (const auto& w : seen) {
    CHECK(w.size() == 6);
    CHECK(tokenize(w).tokens == std::vector<std::string>{w});
  }
  CHECK(count_cue("geo", 2) == "geoset2");
  CHECK(count_cue("geo", 2, 3) == "geoset2v3");
}

TEST_CASE("vocabulary layout") {
  auto v = synth_vocabulary(SynthConfig{});
  CHECK(v.size() == 200);
  CHECK(v.categories().size() == 7);
  CHECK(v.concept_at(0).id == "c0000");
  SynthConfig wide;
  wide.n_categories = 9;
  CHECK(synth_vocabulary(wide).categories().size() == 9);
}

TEST_CASE("generation is deterministic and respects the count distribution") {
  auto cfg = small(5);
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  REQUIRE(a.size() == cfg.n_docs);
  const auto da = testing::temp_dir("synth_a");
  const auto db = testing::temp_dir("synth_b");
  write_synth(a, da);
  write_synth(b, db);
  CHECK(testing::read_text(da / "corpus.jsonl") == testing::read_text(db / "corpus.jsonl"));
  CHECK(testing::read_text(da / "vocab.tsv") == testing::read_text(db / "vocab.tsv"));
  CHECK(testing::read_text(da / "corpus.jsonl") != testing::read_text(
                                                       [&] {
                                                         const auto dc = testing::temp_dir("synth_c");
                                                         write_synth(generate(small(6)), dc);
                                                         return dc;
                                                       }() /
                                                       "corpus.jsonl"));
  // loads back
  const auto vocab = load_vocabulary(da / "vocab.tsv");
  const auto loaded = load_corpus(da / "corpus.jsonl", std::make_shared<Vocabulary>(vocab));
  CHECK(loaded.size() == a.size());

  const std::size_t max_count = cfg.count_distribution.size() - 1;
  std::vector<std::size_t> histogram(max_count + 1, 0);
  for (const auto& doc : a.documents) {
    std::vector<std::size_t> per(a.vocabulary->categories().size(), 0);
    for (auto c : doc.gold_index) ++per[a.vocabulary->category_of(c)];
    for (auto n : per) {
      REQUIRE(n <= max_count);
      ++histogram[n];
    }
    CHECK_FALSE(doc.text.empty());
  }
  const double total = static_cast<double>(a.size() * a.vocabulary->categories().size());
  for (std::size_t k = 0; k <= max_count; ++k)
    CHECK(static_cast<double>(histogram[k]) / total == doctest::Approx(cfg.count_distribution[k]).epsilon(0.15));
  CHECK_THROWS_AS(write_synth(a, da / "missing"), Error);
}

TEST_CASE("clean titles determine their labels") {
  auto cfg = small(9);
  cfg.oov_rate = cfg.truncation_rate = cfg.ambiguity_rate = 0.0;
  const auto corpus = generate(cfg);
  const auto predicted = fit_half(corpus);
  std::vector<std::vector<std::string>> gold;
  for (std::size_t d = corpus.size() / 2; d < corpus.size(); ++d) gold.push_back(corpus.documents[d].gold);
  const auto f1 = f1_scores(std::span<const std::vector<std::string>>(gold),
                            std::span<const std::vector<std::string>>(predicted));
  CHECK(f1.sample_recall > 0.95);
}

TEST_CASE("forced OOV concepts bound recall") {
  auto cfg = small(4);
  cfg.n_docs = 4000;  // enough training rows that filler words do not get fitted as cues
  cfg.oov_rate = cfg.truncation_rate = cfg.ambiguity_rate = 0.0;
  // a whole category, so no co-occurring concept gives it away
  cfg.always_oov = {"c0001", "c0008", "c0015", "c0022", "c0029", "c0036"};
  const auto corpus = generate(cfg);
  const auto predicted = fit_half(corpus);
  const std::set<std::string> forced(cfg.always_oov.begin(), cfg.always_oov.end());
  std::size_t affected = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto& gold = corpus.documents[corpus.size() / 2 + i].gold;
    if (gold.empty()) continue;
    const auto n_forced = std::count_if(gold.begin(), gold.end(), [&](auto& g) { return forced.contains(g); });
    if (n_forced == 0) continue;
    ++affected;
    const double bound = static_cast<double>(gold.size() - n_forced) / static_cast<double>(gold.size());
    CHECK(*doc_recall(gold, predicted[i]) <= bound);
  }
  CHECK(affected > 20);
  cfg.always_oov = {"nope"};
  CHECK_THROWS_AS(generate(cfg), ConfigError);
}

TEST_CASE("config validation") {
  SynthConfig c;
  c.oov_rate = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.count_distribution = {0.5, 0.4};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.n_categories = 300;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.n_docs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_NOTHROW(SynthConfig{}.validate());
}
