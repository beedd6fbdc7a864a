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

#include "idxqual/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "idxqual/error.hpp"
#include "idxqual/random.hpp"

namespace idxqual {

namespace {

constexpr std::string_view kVocabularyHeader = "concept_id\tpreferred_label\tcategory_id";

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.emplace_back(line.substr(start));
      return cols;
    }
    cols.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void Vocabulary::add(Concept entry) {
  if (entry.id.empty()) throw InvalidArgument("empty concept id");
  if (by_id_.contains(entry.id)) throw InvalidArgument("duplicate concept id '" + entry.id + "'");
  auto [it, inserted] = category_index_.try_emplace(entry.category, categories_.size());
  if (inserted) categories_.push_back(entry.category);
  concept_category_.push_back(it->second);
  by_id_.emplace(entry.id, static_cast<std::uint32_t>(concepts_.size()));
  concepts_.push_back(std::move(entry));
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::empty_gold_count() const {
  return static_cast<std::size_t>(
      std::count_if(documents.begin(), documents.end(), [](const Document& d) { return !d.has_gold(); }));
}

Document make_document(const Vocabulary& vocabulary, std::string id, std::string text,
                       const std::vector<std::string>& labels) {
  if (id.empty()) throw InvalidArgument("empty document id");
  Document doc{std::move(id), std::move(text), {}, {}};
  for (const auto& label : labels) {
    const auto index = vocabulary.find(label);
    if (!index) throw InvalidArgument("unknown concept id '" + label + "'");
    if (std::find(doc.gold_index.begin(), doc.gold_index.end(), *index) != doc.gold_index.end()) continue;
    doc.gold.push_back(label);
    doc.gold_index.push_back(*index);
  }
  std::sort(doc.gold_index.begin(), doc.gold_index.end());
  return doc;
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  auto in = open_input(path);
  Vocabulary vocabulary;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != kVocabularyHeader)
        throw ParseError("vocabulary header must be '" + std::string(kVocabularyHeader) + "'", line_no);
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 3)
      throw ParseError("expected 3 columns, found " + std::to_string(cols.size()), line_no);
    if (cols[2].empty()) throw ParseError("empty category id", line_no);
    try {
      vocabulary.add({std::move(cols[0]), std::move(cols[1]), std::move(cols[2])});
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!header_seen) throw ParseError("vocabulary file is empty: " + path.string());
  return vocabulary;
}

void save_vocabulary(const Vocabulary& vocabulary, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << kVocabularyHeader << '\n';
  for (const auto& c : vocabulary.concepts()) out << c.id << '\t' << c.label << '\t' << c.category << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path, std::shared_ptr<const Vocabulary> vocabulary) {
  if (!vocabulary) throw InvalidArgument("load_corpus requires a vocabulary");
  auto in = open_input(path);
  Corpus corpus;
  corpus.vocabulary = std::move(vocabulary);
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!record.is_object() || !record.contains("id") || !record["id"].is_string() ||
        !record.contains("text") || !record["text"].is_string() || !record.contains("labels") ||
        !record["labels"].is_array())
      throw ParseError("record needs string 'id', string 'text' and array 'labels'", line_no);
    std::vector<std::string> labels;
    for (const auto& label : record["labels"]) {
      if (!label.is_string()) throw ParseError("labels must be strings", line_no);
      labels.push_back(label.get<std::string>());
    }
    auto id = record["id"].get<std::string>();
    if (!seen.insert(id).second) throw ParseError("duplicate document id '" + id + "'", line_no);
    try {
      corpus.documents.push_back(
          make_document(*corpus.vocabulary, std::move(id), record["text"].get<std::string>(), labels));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& doc : corpus.documents) {
    nlohmann::ordered_json record;
    record["id"] = doc.id;
    record["text"] = doc.text;
    record["labels"] = doc.gold;
    out << record.dump() << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<std::vector<std::size_t>> partition(std::span<const std::size_t> items, std::size_t k,
                                                std::uint64_t seed) {
  if (k == 0) throw InvalidArgument("partition into zero parts");
  std::vector<std::size_t> order(items.begin(), items.end());
  Rng rng(seed);
  rng.shuffle(std::span(order));
  std::vector<std::vector<std::size_t>> parts(k);
  const std::size_t base = order.size() / k;
  const std::size_t extra = order.size() % k;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < k; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    parts[p].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(parts[p].begin(), parts[p].end());
    pos += len;
  }
  return parts;
}

std::vector<std::size_t> FoldPlan::training_set(std::size_t o) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < outer.size(); ++f)
    if (f != o) out.insert(out.end(), outer[f].begin(), outer[f].end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> FoldPlan::dev_train(std::size_t o, std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < inner[o].size(); ++f)
    if (f != i) out.insert(out.end(), inner[o][f].begin(), inner[o][f].end());
  std::sort(out.begin(), out.end());
  return out;
}

FoldPlan make_folds(std::size_t n_documents, std::size_t k_outer, std::size_t k_inner, std::uint64_t seed) {
  if (k_outer < 2 || k_inner < 2) throw InvalidArgument("fold counts must be at least 2");
  if (n_documents < k_outer * k_inner)
    throw InvalidArgument("too few documents (" + std::to_string(n_documents) + ") for " +
                          std::to_string(k_outer) + "x" + std::to_string(k_inner) + " folds");
  FoldPlan plan;
  plan.seed = seed;
  std::vector<std::size_t> all(n_documents);
  for (std::size_t i = 0; i < n_documents; ++i) all[i] = i;
  plan.outer = partition(all, k_outer, derive_seed(seed, "outer"));
  for (std::size_t o = 0; o < k_outer; ++o) {
    const auto train = plan.training_set(o);
    plan.inner.push_back(partition(train, k_inner, derive_seed(derive_seed(seed, "inner"), o)));
  }
  return plan;
}

}  // namespace idxqual
