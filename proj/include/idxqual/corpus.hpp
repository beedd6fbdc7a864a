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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace idxqual {

struct Concept {
  std::string id;
  std::string label;
  std::string category;
};

/// Controlled vocabulary: concepts in file order, each mapped to one top
/// category. Categories are kept in first-appearance order.
class Vocabulary {
 public:
  /// Throws InvalidArgument on a duplicate concept id.
  void add(Concept concept_entry);

  std::size_t size() const { return concepts_.size(); }
  const std::vector<Concept>& concepts() const { return concepts_; }
  const Concept& concept_at(std::size_t index) const { return concepts_[index]; }
  const std::vector<std::string>& categories() const { return categories_; }

  std::optional<std::uint32_t> find(std::string_view id) const;
  /// Category index of the concept at `concept_index`.
  std::size_t category_of(std::size_t concept_index) const {
    return concept_category_[concept_index];
  }

 private:
  std::vector<Concept> concepts_;
  std::unordered_map<std::string, std::uint32_t> by_id_;
  std::vector<std::string> categories_;
  std::unordered_map<std::string, std::size_t> category_index_;
  std::vector<std::size_t> concept_category_;
};

struct Document {
  std::string id;
  std::string text;
  /// Gold concept ids, duplicates removed, first-appearance order kept.
  std::vector<std::string> gold;
  /// Same set as vocabulary indices, ascending.
  std::vector<std::uint32_t> gold_index;

  bool has_gold() const { return !gold.empty(); }
};

struct Corpus {
  std::vector<Document> documents;
  std::shared_ptr<const Vocabulary> vocabulary;

  std::size_t size() const { return documents.size(); }
  /// Documents without gold concepts; they are excluded from recall metrics.
  std::size_t empty_gold_count() const;
};

/// Builds a document, validating its labels against the vocabulary.
Document make_document(const Vocabulary& vocabulary, std::string id, std::string text,
                       const std::vector<std::string>& labels);

Vocabulary load_vocabulary(const std::filesystem::path& path);
void save_vocabulary(const Vocabulary& vocabulary, const std::filesystem::path& path);

Corpus load_corpus(const std::filesystem::path& path,
                   std::shared_ptr<const Vocabulary> vocabulary);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// --- cross-validation folds ---

/// Indices of [0, n) shuffled with `seed` and cut into k contiguous parts
/// whose sizes differ by at most one (larger parts first). Each part is
/// returned sorted ascending.
std::vector<std::vector<std::size_t>> partition(std::span<const std::size_t> items,
                                                std::size_t k, std::uint64_t seed);

struct FoldPlan {
  std::vector<std::vector<std::size_t>> outer;
  /// inner[o] partitions the training set of outer fold o.
  std::vector<std::vector<std::vector<std::size_t>>> inner;
  std::uint64_t seed = 0;

  /// All indices outside outer fold o, ascending.
  std::vector<std::size_t> training_set(std::size_t o) const;
  /// Training set of outer fold o minus inner fold i, ascending.
  std::vector<std::size_t> dev_train(std::size_t o, std::size_t i) const;
};

FoldPlan make_folds(std::size_t n_documents, std::size_t k_outer, std::size_t k_inner,
                    std::uint64_t seed);
inline FoldPlan make_folds(const Corpus& corpus, std::size_t k_outer, std::size_t k_inner,
                           std::uint64_t seed) {
  return make_folds(corpus.size(), k_outer, k_inner, seed);
}

}  // namespace idxqual
