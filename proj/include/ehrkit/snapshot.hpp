#pragma once

#include <optional>
#include <string>

#include "ehrkit/corpus.hpp"
#include "ehrkit/index.hpp"

namespace ehrkit {

// Compact binary snapshot for fast corpus reload, optionally carrying a
// prebuilt inverted index. Layout (all integers little-endian):
//
//   magic   "EHRTK1\n"
//   u64     record count
//   u64     skipped_rows
//   records row_id:i64, subject_id:i64, has_hadm:u8 [, hadm_id:i64],
//           category, description, text (each u64 length + bytes)
//   u8      index flag (0/1)
//   index   u64 term count, then per term: u64 length + bytes,
//           u64 posting count, row_ids:i64...
//
// The loader rejects any file whose magic is not exactly "EHRTK1\n"
// (reported as an unknown snapshot version when the "EHRTK" stem matches).
struct Snapshot {
  Corpus corpus;
  std::optional<InvertedIndex> index;
};

void save_snapshot(const std::string& path, const Corpus& corpus,
                   const InvertedIndex* index = nullptr);

Snapshot load_snapshot(const std::string& path);

// True when the file starts with the snapshot magic.
bool is_snapshot_file(const std::string& path);

}  // namespace ehrkit
