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
#include <numeric>
#include <set>

#include "doctest.h"
#include "idxqual/corpus.hpp"
#include "idxqual/error.hpp"
#include "support.hpp"

using namespace idxqual;

namespace {

const char* kVocab =
    "concept_id\tpreferred_label\tcategory_id\n"
    "A1\tTrade\teconomics\n"
    "A2\tPrices\teconomics\n"
    "G1\tEurope\tgeography\n";

std::shared_ptr<const Vocabulary> small_vocab() {
  const auto dir = testing::temp_dir("vocab_small");
  testing::write_text(dir / "v.tsv", kVocab);
  return std::make_shared<const Vocabulary>(load_vocabulary(dir / "v.tsv"));
}

}  // namespace

TEST_CASE("vocabulary keeps categories in first-appearance order") {
  auto v = small_vocab();
  CHECK(v->size() == 3);
  REQUIRE(v->categories().size() == 2);
  CHECK(v->categories()[0] == "economics");
  CHECK(v->categories()[1] == "geography");
  CHECK(v->category_of(*v->find("G1")) == 1);
  CHECK(v->concept_at(1).label == "Prices");
  CHECK_FALSE(v->find("X9").has_value());
}

TEST_CASE("vocabulary with a single row") {
  const auto dir = testing::temp_dir("vocab_single");
  testing::write_text(dir / "v.tsv", "concept_id\tpreferred_label\tcategory_id\nc\tlabel\tcat\n");
  auto v = load_vocabulary(dir / "v.tsv");
  CHECK(v.size() == 1);
  CHECK(v.categories().size() == 1);
}

TEST_CASE("vocabulary errors") {
  const auto dir = testing::temp_dir("vocab_errors");
  testing::write_text(dir / "dup.tsv", std::string(kVocab) + "A1\tAgain\teconomics\n");
  try {
    load_vocabulary(dir / "dup.tsv");
    FAIL("duplicate accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("A1") != std::string::npos);
  }
  testing::write_text(dir / "cols.tsv", "concept_id\tpreferred_label\tcategory_id\nA\tB\n");
  CHECK_THROWS_AS(load_vocabulary(dir / "cols.tsv"), ParseError);
  testing::write_text(dir / "header.tsv", "id\tlabel\tcat\nA\tB\tC\n");
  CHECK_THROWS_AS(load_vocabulary(dir / "header.tsv"), ParseError);
  CHECK_THROWS_AS(load_vocabulary(dir / "missing.tsv"), Error);
}

TEST_CASE("corpus loading") {
  auto v = small_vocab();
  const auto dir = testing::temp_dir("corpus_load");

  SUBCASE("two valid lines") {
    testing::write_text(dir / "c.jsonl",
                        "{\"id\":\"d1\",\"text\":\"Trade in Europe\",\"labels\":[\"A1\",\"G1\",\"A1\"]}\n"
                        "{\"id\":\"d2\",\"text\":\"Prices\",\"labels\":[]}\n");
    auto c = load_corpus(dir / "c.jsonl", v);
    REQUIRE(c.size() == 2);
    CHECK(c.documents[0].gold == std::vector<std::string>{"A1", "G1"});
    CHECK(c.documents[0].gold_index == std::vector<std::uint32_t>{0, 2});
    CHECK_FALSE(c.documents[1].has_gold());
    CHECK(c.empty_gold_count() == 1);
  }
  SUBCASE("empty file") {
    testing::write_text(dir / "c.jsonl", "");
    CHECK(load_corpus(dir / "c.jsonl", v).size() == 0);
  }
  SUBCASE("unknown label is named with its line") {
    testing::write_text(dir / "c.jsonl",
                        "{\"id\":\"d1\",\"text\":\"x\",\"labels\":[\"A1\"]}\n"
                        "{\"id\":\"d2\",\"text\":\"y\",\"labels\":[\"X9\"]}\n");
    try {
      load_corpus(dir / "c.jsonl", v);
      FAIL("unknown label accepted");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("X9") != std::string::npos);
    }
  }
  SUBCASE("malformed line") {
    testing::write_text(dir / "c.jsonl", "{\"id\":\"d1\",\"text\":\"x\",\"labels\":[]}\n{\"id\":\n");
    try {
      load_corpus(dir / "c.jsonl", v);
      FAIL("malformed line accepted");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("duplicate id") {
    testing::write_text(dir / "c.jsonl",
                        "{\"id\":\"d1\",\"text\":\"x\",\"labels\":[]}\n{\"id\":\"d1\",\"text\":\"y\",\"labels\":[]}\n");
    CHECK_THROWS_AS(load_corpus(dir / "c.jsonl", v), ParseError);
  }
  SUBCASE("missing field") {
    testing::write_text(dir / "c.jsonl", "{\"id\":\"d1\",\"labels\":[]}\n");
    CHECK_THROWS_AS(load_corpus(dir / "c.jsonl", v), ParseError);
  }
}

TEST_CASE("corpus round trip is byte-identical") {
  auto v = small_vocab();
  const auto dir = testing::temp_dir("corpus_roundtrip");
  Corpus c;
  c.vocabulary = v;
  c.documents.push_back(make_document(*v, "d1", "Außenhandel \"quoted\"\ttab", {"G1", "A2"}));
  c.documents.push_back(make_document(*v, "d2", "", {}));
  save_corpus(c, dir / "a.jsonl");
  auto back = load_corpus(dir / "a.jsonl", v);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.documents[i].id == c.documents[i].id);
    CHECK(back.documents[i].text == c.documents[i].text);
    CHECK(back.documents[i].gold == c.documents[i].gold);
  }
  save_corpus(back, dir / "b.jsonl");
  CHECK(testing::read_text(dir / "a.jsonl") == testing::read_text(dir / "b.jsonl"));
  save_vocabulary(*v, dir / "v.tsv");
  CHECK(testing::read_text(dir / "v.tsv") == kVocab);
}

TEST_CASE("partition sizes are balanced") {
  std::vector<std::size_t> nine(9);
  std::iota(nine.begin(), nine.end(), 0);
  auto parts = partition(nine, 5, 3);
  std::vector<std::size_t> sizes;
  for (auto& p : parts) sizes.push_back(p.size());
  CHECK(sizes == std::vector<std::size_t>{2, 2, 2, 2, 1});
  CHECK_THROWS_AS(partition(nine, 0, 3), InvalidArgument);
}

TEST_CASE("make_folds") {
  SUBCASE("10 documents, 5x2 folds") {
    auto plan = make_folds(10, 5, 2, 7);
    REQUIRE(plan.outer.size() == 5);
    for (auto& f : plan.outer) CHECK(f.size() == 2);
    for (std::size_t o = 0; o < 5; ++o) {
      CHECK(plan.training_set(o).size() == 8);
      REQUIRE(plan.inner[o].size() == 2);
      CHECK(plan.inner[o][0].size() == 4);
      CHECK(plan.inner[o][1].size() == 4);
    }
    auto again = make_folds(10, 5, 2, 7);
    CHECK(again.outer == plan.outer);
    CHECK(again.inner == plan.inner);
  }
  SUBCASE("partition invariants on many sizes") {
    for (std::size_t n : {25u, 26u, 37u, 100u}) {
      for (std::uint64_t seed : {0u, 1u, 99u}) {
        auto plan = make_folds(n, 5, 5, seed);
        std::vector<int> seen(n, 0);
        std::size_t lo = n, hi = 0;
        for (auto& f : plan.outer) {
          for (auto d : f) ++seen[d];
          lo = std::min(lo, f.size());
          hi = std::max(hi, f.size());
        }
        CHECK(hi - lo <= 1);
        CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
        for (std::size_t o = 0; o < 5; ++o) {
          std::vector<std::size_t> joined;
          for (auto& f : plan.inner[o]) joined.insert(joined.end(), f.begin(), f.end());
          std::sort(joined.begin(), joined.end());
          CHECK(joined == plan.training_set(o));
          CHECK(std::adjacent_find(joined.begin(), joined.end()) == joined.end());
          for (std::size_t i = 0; i < 5; ++i) {
            auto dt = plan.dev_train(o, i);
            CHECK(dt.size() + plan.inner[o][i].size() == joined.size());
          }
        }
      }
    }
  }
  SUBCASE("different seeds give different plans") {
    CHECK(make_folds(100, 5, 5, 1).outer != make_folds(100, 5, 5, 2).outer);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(make_folds(9, 5, 2, 0), InvalidArgument);
    CHECK_THROWS_AS(make_folds(100, 1, 5, 0), InvalidArgument);
    CHECK_THROWS_AS(make_folds(100, 5, 1, 0), InvalidArgument);
  }
}

TEST_CASE("make_document rejects unknown concepts and empty ids") {
  auto v = small_vocab();
  CHECK_THROWS_AS(make_document(*v, "d", "t", {"nope"}), InvalidArgument);
  CHECK_THROWS_AS(make_document(*v, "", "t", {}), InvalidArgument);
}
