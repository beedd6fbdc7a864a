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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace idxqual {

struct TokenSeq {
  std::vector<std::string> tokens;
  /// Unicode scalar values in the raw text, before tokenization.
  std::size_t char_count = 0;

  std::size_t token_count() const { return tokens.size(); }
};

/// Lowercases and splits on Unicode whitespace and punctuation.
/// Invalid UTF-8 bytes count as one character each and act as separators.
TokenSeq tokenize(std::string_view text);

struct SparseEntry {
  std::uint32_t index;
  double value;

  bool operator==(const SparseEntry&) const = default;
};

/// Sparse row with strictly increasing column indices.
using DocVector = std::vector<SparseEntry>;

/// Term -> column map learned from training documents.
class TermIndex {
 public:
  TermIndex() = default;
  /// Rebuilds an index from stored columns (terms in column order).
  TermIndex(std::vector<std::string> terms, std::vector<std::size_t> document_frequency,
            std::size_t total_docs);

  std::size_t size() const { return terms_.size(); }
  std::size_t total_docs() const { return total_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& document_frequency() const { return df_; }

  std::optional<std::uint32_t> find(const std::string& term) const;
  bool contains(const std::string& term) const { return lookup_.contains(term); }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::size_t total_docs_ = 0;
  std::unordered_map<std::string, std::uint32_t> lookup_;
};

/// Keeps terms with df >= min_df; when more qualify, the max_terms with the
/// highest df (ties by term, lexicographically). Columns follow that order.
TermIndex build_term_index(std::span<const TokenSeq> docs, std::size_t min_df, std::size_t max_terms);

/// Binary term presence over indexed terms.
DocVector vectorize(const TokenSeq& tokens, const TermIndex& index);

/// Token occurrences (not distinct types) missing from the index.
std::size_t count_oov(const TokenSeq& tokens, const TermIndex& index);

}  // namespace idxqual
