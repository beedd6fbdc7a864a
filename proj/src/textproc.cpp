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

#include "idxqual/textproc.hpp"

#include <algorithm>
#include <unordered_set>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "idxqual/error.hpp"

namespace idxqual {

namespace {

bool is_separator(UChar32 c) {
  return c < 0 || u_isUWhiteSpace(c) || u_ispunct(c) || u_iscntrl(c);
}

}  // namespace

TokenSeq tokenize(std::string_view text) {
  TokenSeq seq;
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::string current;
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    ++seq.char_count;
    if (is_separator(c)) {
      if (!current.empty()) seq.tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    const UChar32 lower = u_tolower(c);
    char buf[U8_MAX_LENGTH];
    std::int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, lower);
    current.append(buf, static_cast<std::size_t>(n));
  }
  if (!current.empty()) seq.tokens.push_back(std::move(current));
  return seq;
}

TermIndex::TermIndex(std::vector<std::string> terms, std::vector<std::size_t> document_frequency,
                     std::size_t total_docs)
    : terms_(std::move(terms)), df_(std::move(document_frequency)), total_docs_(total_docs) {
  if (terms_.size() != df_.size()) throw InvalidArgument("term index: terms and df differ in length");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (df_[i] < 1) throw InvalidArgument("term index: df must be >= 1");
    if (!lookup_.emplace(terms_[i], static_cast<std::uint32_t>(i)).second)
      throw InvalidArgument("term index: duplicate term '" + terms_[i] + "'");
  }
}

std::optional<std::uint32_t> TermIndex::find(const std::string& term) const {
  auto it = lookup_.find(term);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

TermIndex build_term_index(std::span<const TokenSeq> docs, std::size_t min_df, std::size_t max_terms) {
  if (docs.empty()) throw InvalidArgument("build_term_index: empty corpus");
  if (min_df < 1 || max_terms < 1) throw InvalidArgument("build_term_index: min_df and max_terms must be >= 1");
  std::unordered_map<std::string, std::size_t> df;
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : docs) {
    seen.clear();
    for (const auto& token : doc.tokens)
      if (seen.insert(token).second) ++df[token];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, count] : df)
    if (count >= min_df) kept.emplace_back(term, count);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (kept.size() > max_terms) kept.resize(max_terms);
  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
  terms.reserve(kept.size());
  counts.reserve(kept.size());
  for (auto& [term, count] : kept) {
    terms.push_back(std::move(term));
    counts.push_back(count);
  }
  return TermIndex(std::move(terms), std::move(counts), docs.size());
}

DocVector vectorize(const TokenSeq& tokens, const TermIndex& index) {
  DocVector out;
  for (const auto& token : tokens.tokens)
    if (auto col = index.find(token)) out.push_back({*col, 1.0});
  std::sort(out.begin(), out.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const SparseEntry& a, const SparseEntry& b) { return a.index == b.index; }),
            out.end());
  return out;
}

std::size_t count_oov(const TokenSeq& tokens, const TermIndex& index) {
  return static_cast<std::size_t>(std::count_if(tokens.tokens.begin(), tokens.tokens.end(),
                                                [&](const std::string& t) { return !index.contains(t); }));
}

}  // namespace idxqual
