#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ehrkit {

// One NOTEEVENTS row: identifiers plus the free clinical text.
struct NoteRecord {
  std::int64_t row_id = 0;
  std::int64_t subject_id = 0;
  std::optional<std::int64_t> hadm_id;
  std::string category;
  std::string description;
  std::string text;
  bool operator==(const NoteRecord&) const = default;
};

// Immutable, ordered collection of NoteRecords with id lookups. Records are
// kept sorted ascending by row_id; all lookup tables are built once at
// construction. Safe for unlimited concurrent readers.
class Corpus {
 public:
  Corpus() = default;

  // Sorts the records, builds the lookup tables and rejects duplicate
  // row_ids (DataError).
  static Corpus from_records(std::vector<NoteRecord> records,
                             std::size_t skipped_rows = 0);

  const std::vector<NoteRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t skipped_rows() const { return skipped_rows_; }

  // Position in records() for a row_id, or nullopt.
  std::optional<std::size_t> position_of(std::int64_t row_id) const;
  const NoteRecord* find(std::int64_t row_id) const;

  // Positions (ascending) of all records for one patient; empty if unknown.
  const std::vector<std::size_t>& positions_for_subject(
      std::int64_t subject_id) const;

  const std::map<std::int64_t, std::vector<std::size_t>>& by_subject() const {
    return by_subject_;
  }

  bool operator==(const Corpus& other) const {
    return records_ == other.records_ && skipped_rows_ == other.skipped_rows_;
  }

 private:
  std::vector<NoteRecord> records_;
  std::unordered_map<std::int64_t, std::size_t> by_row_id_;
  std::map<std::int64_t, std::vector<std::size_t>> by_subject_;
  std::size_t skipped_rows_ = 0;
};

// Column-name mapping for load_csv. Defaults follow the MIMIC-III
// NOTEEVENTS header. Header matching is exact (case-sensitive).
struct CsvSchema {
  std::string row_id = "ROW_ID";
  std::string subject_id = "SUBJECT_ID";
  std::string hadm_id = "HADM_ID";
  std::string category = "CATEGORY";
  std::string description = "DESCRIPTION";
  std::string text = "TEXT";
};

// Loads a NOTEEVENTS-style CSV (RFC-4180, UTF-8, header row required).
// Rows with an unparsable row_id/subject_id/hadm_id, too few fields, or an
// empty (or whitespace-only) TEXT field are skipped and tallied in
// skipped_rows(). Throws IoError when the file cannot be opened, SchemaError
// when a mapped column is missing from the header and DataError on duplicate
// row_ids (citing both line numbers).
Corpus load_csv(const std::string& path, const CsvSchema& schema = {});

std::size_t count_patients(const Corpus& corpus);
std::size_t count_documents(const Corpus& corpus);
// Sum of sentencize(record.text).size() over all records.
std::size_t count_sentences(const Corpus& corpus);

struct SplitResult {
  Corpus train;
  Corpus test;
  std::uint64_t seed = 0;
  double ratio = 0.0;
};

// Shuffles the records with the xorshift64* generator (see rng.hpp) seeded
// with `seed`; the first floor(ratio*N) shuffled records form the train part,
// the rest the test part. Both parts are Corpora (re-sorted by row_id).
// Throws ArgumentError unless 0 < ratio < 1.
SplitResult split(const Corpus& corpus, double ratio, std::uint64_t seed);

}  // namespace ehrkit
