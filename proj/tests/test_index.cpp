#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ehrkit/errors.hpp"
#include "ehrkit/index.hpp"
#include "ehrkit/snapshot.hpp"
#include "ehrkit/textseg.hpp"

using namespace ehrkit;

namespace {

NoteRecord rec(std::int64_t row, std::int64_t subject, std::string text) {
  NoteRecord r;
  r.row_id = row;
  r.subject_id = subject;
  r.text = std::move(text);
  return r;
}

// Independent oracle: scan every record, tokenize, lowercase, collect ids of
// records containing every query token.
std::vector<std::int64_t> brute_force_search(const Corpus& corpus,
                                             const std::string& query) {
  std::set<std::string> wanted;
  for (const Token& t : tokenize(query)) wanted.insert(to_lower(t.text));
  std::vector<std::int64_t> result;
  if (wanted.empty()) return result;
  for (const NoteRecord& r : corpus.records()) {
    std::set<std::string> seen;
    for (const Token& t : tokenize(r.text)) seen.insert(to_lower(t.text));
    bool all = true;
    for (const std::string& w : wanted) {
      if (!seen.count(w)) {
        all = false;
        break;
      }
    }
    if (all) result.push_back(r.row_id);
  }
  return result;
}

Corpus random_corpus(std::size_t n, std::uint32_t seed) {
  static const std::vector<std::string> vocab = {
      "chest",   "pain",    "fever",  "cough",  "stable", "acute",
      "chronic", "renal",   "cardiac", "failure", "exam",  "normal",
      "fluid",   "oxygen",  "left",   "right",  "mild",   "severe"};
  std::mt19937 gen(seed);
  std::vector<NoteRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    const std::size_t words = 3 + gen() % 30;
    for (std::size_t w = 0; w < words; ++w) {
      if (!text.empty()) text.push_back(' ');
      std::string word = vocab[gen() % vocab.size()];
      if (gen() % 4 == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
      text += word;
      if (gen() % 7 == 0) text.push_back('.');
    }
    records.push_back(rec(static_cast<std::int64_t>(i * 2 + 1),
                          static_cast<std::int64_t>(gen() % 50), text));
  }
  return Corpus::from_records(std::move(records));
}

}  // namespace

TEST_CASE("build_index on an empty corpus") {
  const InvertedIndex index = InvertedIndex::build(Corpus());
  CHECK(index.term_count() == 0);
  CHECK(index.doc_count() == 0);
  CHECK(search_keyword(index, "anything").empty());
}

TEST_CASE("a record appears once per term regardless of occurrences") {
  const Corpus corpus =
      Corpus::from_records({rec(5, 1, "Chest pain. CHEST clear.")});
  const InvertedIndex index = InvertedIndex::build(corpus);
  const auto* postings = index.postings("chest");
  REQUIRE(postings != nullptr);
  CHECK(*postings == std::vector<std::int64_t>{5});
  CHECK(index.doc_freq("chest") == 1);
  CHECK(index.doc_freq("zzzz") == 0);
}

TEST_CASE("index postings match the brute-force oracle") {
  const Corpus corpus = random_corpus(50, 7);
  const InvertedIndex index = InvertedIndex::build(corpus);

  // every posting list is sorted, unique, and ids exist in the corpus
  for (const auto& [term, list] : index.postings_map()) {
    CHECK(std::is_sorted(list.begin(), list.end()));
    CHECK(std::adjacent_find(list.begin(), list.end()) == list.end());
    CHECK(index.doc_freq(term) == list.size());
    for (std::int64_t id : list) CHECK(corpus.find(id) != nullptr);
  }
  // postings equal per-term brute force
  for (const auto& [term, list] : index.postings_map()) {
    CHECK(list == brute_force_search(corpus, term));
  }
}

TEST_CASE("search_keyword matches brute force on single and double queries") {
  const Corpus corpus = random_corpus(50, 21);
  const InvertedIndex index = InvertedIndex::build(corpus);
  const std::vector<std::string> queries = {
      "chest",        "PAIN",   "chest pain",   "fever cough", "zzzz",
      "stable. exam", "oxygen", "renal failure"};
  for (const std::string& q : queries) {
    CHECK(search_keyword(index, q) == brute_force_search(corpus, q));
  }
  CHECK(search_keyword(index, "").empty());
  CHECK(search_keyword(index, "zzzz").empty());
}

TEST_CASE("multi-token results are subsets of single-token results") {
  const Corpus corpus = random_corpus(80, 5);
  const InvertedIndex index = InvertedIndex::build(corpus);
  const auto both = search_keyword(index, "chest pain");
  const auto chest = search_keyword(index, "chest");
  CHECK(std::includes(chest.begin(), chest.end(), both.begin(), both.end()));
}

TEST_CASE("index build is deterministic") {
  const Corpus corpus = random_corpus(30, 3);
  CHECK(InvertedIndex::build(corpus) == InvertedIndex::build(corpus));
}

TEST_CASE("get_record round-trips every id and rejects unknown ids") {
  const Corpus corpus = random_corpus(40, 11);
  for (const NoteRecord& r : corpus.records()) {
    const NoteRecord& got = get_record(corpus, r.row_id);
    CHECK(got == r);
    CHECK(got.text == r.text);  // byte-identical
  }
  CHECK_THROWS_AS(get_record(corpus, 999999), NotFoundError);
  try {
    get_record(corpus, 999999);
  } catch (const NotFoundError& e) {
    CHECK(e.id() == 999999);
  }
}

TEST_CASE("index snapshot round-trips with the corpus") {
  const Corpus corpus = random_corpus(25, 13);
  const InvertedIndex index = InvertedIndex::build(corpus);
  const std::string path = "/tmp/ehrkit_index.snapshot";
  save_snapshot(path, corpus, &index);
  const Snapshot loaded = load_snapshot(path);
  CHECK(loaded.corpus == corpus);
  REQUIRE(loaded.index.has_value());
  CHECK(*loaded.index == index);
}
