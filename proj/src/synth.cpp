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

#include "idxqual/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <unordered_set>

#include "idxqual/error.hpp"
#include "idxqual/random.hpp"

namespace idxqual {

namespace {

constexpr char kConsonants[] = "bdfgklmnprstvz";
constexpr char kVowels[] = "aeiou";
constexpr std::size_t kSyllables = 14 * 5;

const std::vector<std::string> kCategoryNames{"geo", "econ", "law", "health", "tech", "agri", "energy"};

std::string category_name(std::size_t k) {
  return k < kCategoryNames.size() ? kCategoryNames[k] : "cat" + std::to_string(k);
}

std::size_t sample_count(Rng& rng, const std::vector<double>& dist) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += dist[i];
    if (u < acc) return i;
  }
  return dist.size() - 1;
}

}  // namespace

void SynthConfig::validate() const {
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError(std::string("synth: ") + name + " must lie in [0, 1]");
  };
  rate(oov_rate, "oov_rate");
  rate(truncation_rate, "truncation_rate");
  rate(ambiguity_rate, "ambiguity_rate");
  if (n_docs == 0) throw ConfigError("synth: n_docs must be positive");
  if (n_categories == 0) throw ConfigError("synth: n_categories must be positive");
  if (n_categories > n_concepts) throw ConfigError("synth: n_categories exceeds n_concepts");
  if (cue_variants == 0) throw ConfigError("synth: cue_variants must be positive");
  if (terms_per_concept == 0) throw ConfigError("synth: terms_per_concept must be positive");
  if (n_concepts * terms_per_concept > kSyllables * kSyllables * kSyllables)
    throw ConfigError("synth: too many concept terms");
  if (count_distribution.empty()) throw ConfigError("synth: count_distribution is empty");
  double sum = 0.0;
  for (double p : count_distribution) {
    if (!(p >= 0.0)) throw ConfigError("synth: count_distribution has a negative entry");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-9) throw ConfigError("synth: count_distribution must sum to 1");
}

std::string pseudo_word(std::size_t index) {
  // scatter consecutive indices; 7919 is coprime with kSyllables^3
  index = (index % (kSyllables * kSyllables * kSyllables)) * 7919 % (kSyllables * kSyllables * kSyllables);
  std::string out;
  for (int s = 0; s < 3; ++s) {
    const std::size_t syl = index % kSyllables;
    index /= kSyllables;
    out += kConsonants[syl / 5];
    out += kVowels[syl % 5];
  }
  return out;
}

std::string concept_term(std::size_t concept_index, std::size_t term, std::size_t terms_per_concept) {
  return pseudo_word(concept_index * terms_per_concept + term);
}

std::string count_cue(const std::string& category, std::size_t count, std::size_t variant) {
  std::string out = category + "set" + std::to_string(count);
  if (variant > 0) out += "v" + std::to_string(variant);
  return out;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words{
      "report",  "review",   "policy",  "analysis", "study",    "results", "evidence", "effects",
      "new",     "case",     "approach", "impact",  "role",     "survey",  "trends",   "change",
      "towards", "recent",   "issues",  "critical", "framework", "notes",  "perspectives", "outlook"};
  return words;
}

Vocabulary synth_vocabulary(const SynthConfig& config) {
  Vocabulary vocab;
  for (std::size_t c = 0; c < config.n_concepts; ++c) {
    std::string label;
    for (std::size_t j = 0; j < config.terms_per_concept; ++j) {
      if (j) label += ' ';
      label += concept_term(c, j, config.terms_per_concept);
    }
    char id[16];
    std::snprintf(id, sizeof id, "c%04zu", c);
    vocab.add({id, label, category_name(c % config.n_categories)});
  }
  return vocab;
}

Corpus generate(const SynthConfig& config) {
  config.validate();
  auto vocab = std::make_shared<Vocabulary>(synth_vocabulary(config));
  std::unordered_set<std::size_t> forced;
  for (const auto& id : config.always_oov) {
    auto idx = vocab->find(id);
    if (!idx) throw ConfigError("synth: always_oov names unknown concept " + id);
    forced.insert(*idx);
  }

  // category k holds concepts k, k + K, k + 2K, ...
  std::vector<std::vector<std::size_t>> members(config.n_categories);
  for (std::size_t c = 0; c < config.n_concepts; ++c) members[c % config.n_categories].push_back(c);
  const auto& fillers = filler_words();

  Corpus corpus;
  corpus.vocabulary = vocab;
  corpus.documents.reserve(config.n_docs);
  const int width = static_cast<int>(std::to_string(config.n_docs - 1).size());
  for (std::size_t d = 0; d < config.n_docs; ++d) {
    Rng rng(derive_seed(config.seed, d));
    std::vector<std::string> labels, tokens;
    for (std::size_t k = 0; k < config.n_categories; ++k) {
      auto pool = members[k];
      const std::size_t n = std::min(sample_count(rng, config.count_distribution), pool.size());
      for (std::size_t i = 0; i < n; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
      if (n == 0) continue;
      const bool ambiguous = rng.bernoulli(config.ambiguity_rate);
      if (ambiguous) tokens.push_back(count_cue(category_name(k), n, rng.below(config.cue_variants)));
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = pool[i];
        labels.push_back(vocab->concept_at(c).id);
        const bool oov = rng.bernoulli(config.oov_rate) || forced.count(c) > 0;
        if (ambiguous) continue;
        for (std::size_t j = 0; j < config.terms_per_concept; ++j) {
          if (oov)
            tokens.push_back("zu" + std::to_string(d) + "c" + std::to_string(c) + "t" + std::to_string(j));
          else
            tokens.push_back(concept_term(c, j, config.terms_per_concept));
        }
      }
    }
    // an empty title would carry no text at all
    const std::size_t n_filler = std::max<std::size_t>(rng.below(config.max_filler + 1), tokens.empty() ? 1 : 0);
    for (std::size_t i = 0; i < n_filler; ++i) tokens.push_back(fillers[rng.below(fillers.size())]);
    rng.shuffle(std::span<std::string>(tokens));
    if (!tokens.empty() && rng.bernoulli(config.truncation_rate))
      tokens.resize(std::max<std::size_t>(1, tokens.size() / 3));

    std::string text;
    for (const auto& t : tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    char id[32];
    std::snprintf(id, sizeof id, "d%0*zu", width, d);
    corpus.documents.push_back(make_document(*vocab, id, std::move(text), labels));
  }
  return corpus;
}

void write_synth(const Corpus& corpus, const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("output directory does not exist: " + dir.string());
  save_corpus(corpus, dir / "corpus.jsonl");
  save_vocabulary(*corpus.vocabulary, dir / "vocab.tsv");
}

}  // namespace idxqual
