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
#include <filesystem>
#include <string>
#include <vector>

#include "idxqual/corpus.hpp"

namespace idxqual {

struct SynthConfig {
  std::size_t n_docs = 5000;
  std::size_t n_concepts = 200;
  std::size_t n_categories = 7;
  std::size_t terms_per_concept = 2;
  /// Probability of drawing 0, 1, 2, ... gold concepts from each category.
  std::vector<double> count_distribution{0.55, 0.25, 0.10, 0.10};
  double oov_rate = 0.15;
  double truncation_rate = 0.15;
  double ambiguity_rate = 0.15;
  /// Distinct cue tokens per (category, count) pair.
  std::size_t cue_variants = 8;
  /// Filler words per title are drawn uniformly from [0, max_filler].
  std::size_t max_filler = 6;
  /// Concept ids whose terms are always replaced by unseen synonyms.
  std::vector<std::string> always_oov;
  std::uint64_t seed = 0;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Pseudo-word for an index; distinct indices give distinct words.
std::string pseudo_word(std::size_t index);
std::string concept_term(std::size_t concept_index, std::size_t term, std::size_t terms_per_concept);
/// Token that announces `count` concepts of a category without naming them.
std::string count_cue(const std::string& category, std::size_t count, std::size_t variant = 0);
const std::vector<std::string>& filler_words();

Vocabulary synth_vocabulary(const SynthConfig& config);
Corpus generate(const SynthConfig& config);

/// Writes corpus.jsonl and vocab.tsv into an existing directory.
void write_synth(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace idxqual
