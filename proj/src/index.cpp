#include "ehrkit/index.hpp"

#include <algorithm>
#include <set>

#include "ehrkit/errors.hpp"
#include "ehrkit/textseg.hpp"

namespace ehrkit {

InvertedIndex InvertedIndex::build(const Corpus& corpus) {
  InvertedIndex index;
  index.doc_count_ = corpus.size();
  std::set<std::string> seen;  // distinct terms of the current record
  for (const NoteRecord& record : corpus.records()) {
    seen.clear();
    for (const Token& token : tokenize(record.text)) {
      seen.insert(to_lower(token.text));
    }
    for (const std::string& term : seen) {
      // records are visited in ascending row_id order, so lists stay sorted
      index.postings_[term].push_back(record.row_id);
    }
  }
  return index;
}

InvertedIndex InvertedIndex::from_postings(
    std::unordered_map<std::string, std::vector<std::int64_t>> postings,
    std::size_t doc_count) {
  InvertedIndex index;
  index.postings_ = std::move(postings);
  index.doc_count_ = doc_count;
  return index;
}

const std::vector<std::int64_t>* InvertedIndex::postings(
    std::string_view term) const {
  auto it = postings_.find(std::string(term));
  return it == postings_.end() ? nullptr : &it->second;
}

std::size_t InvertedIndex::doc_freq(std::string_view term) const {
  const auto* list = postings(term);
  return list ? list->size() : 0;
}

std::vector<std::string> InvertedIndex::sorted_terms() const {
  std::vector<std::string> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, _] : postings_) terms.push_back(term);
  std::sort(terms.begin(), terms.end());
  return terms;
}

std::vector<std::int64_t> search_keyword(const InvertedIndex& index,
                                         std::string_view query) {
  std::set<std::string> terms;
  for (const Token& token : tokenize(query)) {
    terms.insert(to_lower(token.text));
  }
  if (terms.empty()) return {};

  // intersect smallest list first
  std::vector<const std::vector<std::int64_t>*> lists;
  for (const std::string& term : terms) {
    const auto* list = index.postings(term);
    if (list == nullptr) return {};
    lists.push_back(list);
  }
  std::sort(lists.begin(), lists.end(),
            [](const auto* a, const auto* b) { return a->size() < b->size(); });
  std::vector<std::int64_t> result = *lists.front();
  std::vector<std::int64_t> next;
  for (std::size_t i = 1; i < lists.size() && !result.empty(); ++i) {
    next.clear();
    std::set_intersection(result.begin(), result.end(), lists[i]->begin(),
                          lists[i]->end(), std::back_inserter(next));
    result.swap(next);
  }
  return result;
}

const NoteRecord& get_record(const Corpus& corpus, std::int64_t row_id) {
  const NoteRecord* record = corpus.find(row_id);
  if (record == nullptr) {
    throw NotFoundError(row_id, "no record with row_id " + std::to_string(row_id));
  }
  return *record;
}

}  // namespace ehrkit
