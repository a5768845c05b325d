#include "ehrkit/snapshot.hpp"

#include <cstring>
#include <fstream>

#include "ehrkit/errors.hpp"

namespace ehrkit {

namespace {

constexpr char kMagic[] = "EHRTK1\n";
constexpr std::size_t kMagicLen = 7;

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

void put_i64(std::ostream& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}

void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw DataError("truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

std::int64_t get_i64(std::istream& in) {
  return static_cast<std::int64_t>(get_u64(in));
}

std::string get_string(std::istream& in) {
  std::uint64_t len = get_u64(in);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw DataError("truncated snapshot");
  return s;
}

}  // namespace

void save_snapshot(const std::string& path, const Corpus& corpus,
                   const InvertedIndex* index) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write snapshot file: " + path);
  out.write(kMagic, kMagicLen);
  put_u64(out, corpus.size());
  put_u64(out, corpus.skipped_rows());
  for (const NoteRecord& r : corpus.records()) {
    put_i64(out, r.row_id);
    put_i64(out, r.subject_id);
    out.put(r.hadm_id ? '\1' : '\0');
    if (r.hadm_id) put_i64(out, *r.hadm_id);
    put_string(out, r.category);
    put_string(out, r.description);
    put_string(out, r.text);
  }
  out.put(index ? '\1' : '\0');
  if (index) {
    const auto terms = index->sorted_terms();
    put_u64(out, terms.size());
    for (const std::string& term : terms) {
      put_string(out, term);
      const auto* list = index->postings(term);
      put_u64(out, list->size());
      for (std::int64_t id : *list) put_i64(out, id);
    }
  }
  if (!out) throw IoError("failed while writing snapshot file: " + path);
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot file: " + path);
  char magic[kMagicLen] = {};
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0) {
    if (in && std::memcmp(magic, "EHRTK", 5) == 0) {
      throw DataError("unknown snapshot version in " + path);
    }
    throw DataError("not a snapshot file: " + path);
  }

  const std::uint64_t count = get_u64(in);
  const std::uint64_t skipped = get_u64(in);
  std::vector<NoteRecord> records;
  records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    NoteRecord r;
    r.row_id = get_i64(in);
    r.subject_id = get_i64(in);
    int flag = in.get();
    if (flag == EOF) throw DataError("truncated snapshot");
    if (flag == 1) r.hadm_id = get_i64(in);
    r.category = get_string(in);
    r.description = get_string(in);
    r.text = get_string(in);
    records.push_back(std::move(r));
  }
  Snapshot snapshot;
  snapshot.corpus = Corpus::from_records(std::move(records), skipped);

  int index_flag = in.get();
  if (index_flag == 1) {
    std::unordered_map<std::string, std::vector<std::int64_t>> postings;
    const std::uint64_t terms = get_u64(in);
    postings.reserve(terms);
    for (std::uint64_t t = 0; t < terms; ++t) {
      std::string term = get_string(in);
      const std::uint64_t len = get_u64(in);
      std::vector<std::int64_t> list;
      list.reserve(len);
      for (std::uint64_t i = 0; i < len; ++i) list.push_back(get_i64(in));
      postings.emplace(std::move(term), std::move(list));
    }
    snapshot.index =
        InvertedIndex::from_postings(std::move(postings), snapshot.corpus.size());
  }
  return snapshot;
}

bool is_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[kMagicLen] = {};
  in.read(magic, kMagicLen);
  return in && std::memcmp(magic, kMagic, kMagicLen) == 0;
}

}  // namespace ehrkit
