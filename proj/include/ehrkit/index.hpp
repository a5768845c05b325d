#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ehrkit/corpus.hpp"

namespace ehrkit {

// Term -> sorted posting list of row_ids. Terms are tokenize() output,
// lowercased; a record appears once per term however often the term occurs.
// Immutable after build; concurrent reads are safe.
class InvertedIndex {
 public:
  InvertedIndex() = default;

  static InvertedIndex build(const Corpus& corpus);

  // nullptr when the term is not indexed.
  const std::vector<std::int64_t>* postings(std::string_view term) const;
  std::size_t doc_freq(std::string_view term) const;
  std::size_t doc_count() const { return doc_count_; }
  std::size_t term_count() const { return postings_.size(); }

  const std::unordered_map<std::string, std::vector<std::int64_t>>&
  postings_map() const {
    return postings_;
  }

  // Terms in lexicographic order (snapshot framing, diagnostics).
  std::vector<std::string> sorted_terms() const;

  bool operator==(const InvertedIndex& other) const {
    return doc_count_ == other.doc_count_ && postings_ == other.postings_;
  }

  // Used by the snapshot loader; lists must already be sorted and deduplicated.
  static InvertedIndex from_postings(
      std::unordered_map<std::string, std::vector<std::int64_t>> postings,
      std::size_t doc_count);

 private:
  std::unordered_map<std::string, std::vector<std::int64_t>> postings_;
  std::size_t doc_count_ = 0;
};

// Keyword search. The query is normalized exactly like the indexed text
// (tokenize + lowercase); multi-token queries intersect the per-token posting
// lists. Result ascending by row_id; unknown terms or an empty query give an
// empty result.
std::vector<std::int64_t> search_keyword(const InvertedIndex& index,
                                         std::string_view query);

// Record lookup by id. Throws NotFoundError carrying the id.
const NoteRecord& get_record(const Corpus& corpus, std::int64_t row_id);

}  // namespace ehrkit
