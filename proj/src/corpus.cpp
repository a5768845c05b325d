#include "ehrkit/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "ehrkit/csv.hpp"
#include "ehrkit/errors.hpp"
#include "ehrkit/rng.hpp"
#include "ehrkit/textseg.hpp"

namespace ehrkit {

namespace {

bool parse_int(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool all_whitespace(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  });
}

}  // namespace

Corpus Corpus::from_records(std::vector<NoteRecord> records,
                            std::size_t skipped_rows) {
  std::sort(records.begin(), records.end(),
            [](const NoteRecord& a, const NoteRecord& b) {
              return a.row_id < b.row_id;
            });
  Corpus corpus;
  corpus.records_ = std::move(records);
  corpus.skipped_rows_ = skipped_rows;
  corpus.by_row_id_.reserve(corpus.records_.size());
  for (std::size_t i = 0; i < corpus.records_.size(); ++i) {
    const NoteRecord& r = corpus.records_[i];
    if (!corpus.by_row_id_.emplace(r.row_id, i).second) {
      throw DataError("duplicate row_id " + std::to_string(r.row_id));
    }
    corpus.by_subject_[r.subject_id].push_back(i);
  }
  return corpus;
}

std::optional<std::size_t> Corpus::position_of(std::int64_t row_id) const {
  auto it = by_row_id_.find(row_id);
  if (it == by_row_id_.end()) return std::nullopt;
  return it->second;
}

const NoteRecord* Corpus::find(std::int64_t row_id) const {
  auto pos = position_of(row_id);
  return pos ? &records_[*pos] : nullptr;
}

const std::vector<std::size_t>& Corpus::positions_for_subject(
    std::int64_t subject_id) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = by_subject_.find(subject_id);
  return it == by_subject_.end() ? kEmpty : it->second;
}

Corpus load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV file: " + path);

  CsvReader reader(in);
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!reader.next(fields, line)) throw SchemaError("empty CSV file: " + path);

  // strip a UTF-8 BOM from the first header cell
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0)
    fields[0].erase(0, 3);

  const auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i] == name) return i;
    }
    throw SchemaError("required column '" + name + "' not found in header of " +
                      path);
  };
  const std::size_t col_row = column(schema.row_id);
  const std::size_t col_subject = column(schema.subject_id);
  const std::size_t col_hadm = column(schema.hadm_id);
  const std::size_t col_category = column(schema.category);
  const std::size_t col_description = column(schema.description);
  const std::size_t col_text = column(schema.text);
  const std::size_t max_col = std::max(
      {col_row, col_subject, col_hadm, col_category, col_description, col_text});

  std::vector<NoteRecord> records;
  std::unordered_map<std::int64_t, std::size_t> first_line;
  std::size_t skipped = 0;
  while (reader.next(fields, line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
    if (fields.size() <= max_col) {
      ++skipped;
      continue;
    }
    NoteRecord rec;
    if (!parse_int(fields[col_row], rec.row_id) ||
        !parse_int(fields[col_subject], rec.subject_id)) {
      ++skipped;
      continue;
    }
    if (!fields[col_hadm].empty()) {
      std::int64_t hadm = 0;
      if (!parse_int(fields[col_hadm], hadm)) {
        ++skipped;
        continue;
      }
      rec.hadm_id = hadm;
    }
    rec.text = std::move(fields[col_text]);
    if (rec.text.empty() || all_whitespace(rec.text)) {
      ++skipped;
      continue;
    }
    auto [it, inserted] = first_line.emplace(rec.row_id, line);
    if (!inserted) {
      throw DataError("duplicate row_id " + std::to_string(rec.row_id) +
                      " at lines " + std::to_string(it->second) + " and " +
                      std::to_string(line) + " of " + path);
    }
    rec.category = std::move(fields[col_category]);
    rec.description = std::move(fields[col_description]);
    records.push_back(std::move(rec));
  }
  return Corpus::from_records(std::move(records), skipped);
}

std::size_t count_patients(const Corpus& corpus) {
  return corpus.by_subject().size();
}

std::size_t count_documents(const Corpus& corpus) { return corpus.size(); }

std::size_t count_sentences(const Corpus& corpus) {
  std::size_t total = 0;
  for (const NoteRecord& r : corpus.records()) {
    total += sentencize(r.text).size();
  }
  return total;
}

SplitResult split(const Corpus& corpus, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ArgumentError("split ratio must be in (0, 1), got " +
                        std::to_string(ratio));
  }
  const std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const auto train_size =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  std::vector<NoteRecord> train, test;
  train.reserve(train_size);
  test.reserve(n - train_size);
  for (std::size_t i = 0; i < n; ++i) {
    const NoteRecord& rec = corpus.records()[order[i]];
    (i < train_size ? train : test).push_back(rec);
  }
  SplitResult result;
  result.train = Corpus::from_records(std::move(train));
  result.test = Corpus::from_records(std::move(test));
  result.seed = seed;
  result.ratio = ratio;
  return result;
}

}  // namespace ehrkit
