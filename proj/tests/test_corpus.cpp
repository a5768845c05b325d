#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "ehrkit/corpus.hpp"
#include "ehrkit/errors.hpp"
#include "ehrkit/snapshot.hpp"
#include "ehrkit/textseg.hpp"

using namespace ehrkit;

namespace {

const std::string kFixtures = EHRKIT_FIXTURE_DIR;

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/" + name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return path;
}

Corpus make_corpus(std::vector<NoteRecord> records) {
  return Corpus::from_records(std::move(records));
}

NoteRecord rec(std::int64_t row, std::int64_t subject, std::string text) {
  NoteRecord r;
  r.row_id = row;
  r.subject_id = subject;
  r.text = std::move(text);
  return r;
}

}  // namespace

TEST_CASE("load_csv parses a well-formed file") {
  const std::string path = write_temp(
      "ehrkit_3row.csv",
      "ROW_ID,SUBJECT_ID,HADM_ID,CATEGORY,DESCRIPTION,TEXT\n"
      "1,7,100,Nursing,Note,alpha\n"
      "2,7,,Radiology,Report,beta\n"
      "3,9,101,Discharge summary,Report,gamma\n");
  const Corpus corpus = load_csv(path);
  REQUIRE(corpus.size() == 3);
  CHECK(corpus.skipped_rows() == 0);
  CHECK(corpus.records()[0].row_id == 1);
  CHECK(corpus.records()[0].hadm_id == 100);
  CHECK_FALSE(corpus.records()[1].hadm_id.has_value());
  CHECK(corpus.records()[2].category == "Discharge summary");
  CHECK(count_patients(corpus) == 2);
  CHECK(count_documents(corpus) == 3);
}

TEST_CASE("load_csv preserves quoted multi-line text verbatim") {
  // byte-level hand parse of the fixture: the TEXT field of row 1 is quoted
  // and contains two embedded newlines plus a blank line
  const Corpus corpus = load_csv(kFixtures + "/notes_multiline.csv");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.records()[0].text ==
        "Line one.\nLine two: BP 120/80.\n\nPLAN: rest at home.");
  CHECK(corpus.records()[1].text == "plain single line");
}

TEST_CASE("load_csv skips empty-text rows and tallies them") {
  const Corpus corpus = load_csv(kFixtures + "/notes_empty_text.csv");
  CHECK(corpus.size() == 4);
  CHECK(corpus.skipped_rows() == 1);
  CHECK(count_documents(corpus) == 4);
}

TEST_CASE("load_csv error paths") {
  CHECK_THROWS_AS(load_csv("/nonexistent/notes.csv"), IoError);

  const std::string missing_col = write_temp(
      "ehrkit_missing_col.csv",
      "ROW_ID,SUBJECT_ID,CATEGORY,DESCRIPTION,TEXT\n1,7,a,b,c\n");
  CHECK_THROWS_WITH_AS(load_csv(missing_col),
                       doctest::Contains("HADM_ID"), SchemaError);

  try {
    load_csv(kFixtures + "/notes_dup_row.csv");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("row_id 1") != std::string::npos);
    CHECK(what.find("2") != std::string::npos);   // first occurrence line
    CHECK(what.find("4") != std::string::npos);   // second occurrence line
  }
}

TEST_CASE("load_csv skips rows with unparsable keys") {
  const std::string path = write_temp(
      "ehrkit_badkeys.csv",
      "ROW_ID,SUBJECT_ID,HADM_ID,CATEGORY,DESCRIPTION,TEXT\n"
      "1,7,100,Nursing,Note,alpha\n"
      "oops,7,100,Nursing,Note,beta\n"
      "3,xx,100,Nursing,Note,gamma\n"
      "4,8,weird,Nursing,Note,delta\n"
      "5,8,,Nursing,Note,epsilon\n");
  const Corpus corpus = load_csv(path);
  CHECK(corpus.size() == 2);
  CHECK(corpus.skipped_rows() == 3);
}

TEST_CASE("custom schema maps alternate column names") {
  const std::string path = write_temp(
      "ehrkit_schema.csv", "id,subj,adm,cat,desc,body\n9,3,,n,d,hello world\n");
  CsvSchema schema;
  schema.row_id = "id";
  schema.subject_id = "subj";
  schema.hadm_id = "adm";
  schema.category = "cat";
  schema.description = "desc";
  schema.text = "body";
  const Corpus corpus = load_csv(path, schema);
  REQUIRE(corpus.size() == 1);
  CHECK(corpus.records()[0].text == "hello world");
}

TEST_CASE("ingestion is order-insensitive up to sorting") {
  const std::string a = write_temp(
      "ehrkit_order_a.csv",
      "ROW_ID,SUBJECT_ID,HADM_ID,CATEGORY,DESCRIPTION,TEXT\n"
      "3,9,,c,d,three\n1,7,,c,d,one\n2,7,,c,d,two\n");
  const std::string b = write_temp(
      "ehrkit_order_b.csv",
      "ROW_ID,SUBJECT_ID,HADM_ID,CATEGORY,DESCRIPTION,TEXT\n"
      "1,7,,c,d,one\n2,7,,c,d,two\n3,9,,c,d,three\n");
  CHECK(load_csv(a) == load_csv(b));
}

TEST_CASE("count_patients matches a brute-force scan") {
  CHECK(count_patients(Corpus()) == 0);
  CHECK(count_patients(make_corpus({rec(1, 7, "a"), rec(2, 7, "b"),
                                    rec(3, 9, "c")})) == 2);

  std::mt19937 gen(1234);
  std::vector<NoteRecord> records;
  for (int i = 0; i < 100; ++i) {
    records.push_back(rec(i, static_cast<std::int64_t>(gen() % 17), "text"));
  }
  const Corpus corpus = make_corpus(records);
  std::set<std::int64_t> distinct;
  for (const NoteRecord& r : records) distinct.insert(r.subject_id);
  CHECK(count_patients(corpus) == distinct.size());
}

TEST_CASE("by_subject agrees with a brute-force filter") {
  std::mt19937 gen(99);
  std::vector<NoteRecord> records;
  for (int i = 0; i < 60; ++i) {
    records.push_back(rec(i, static_cast<std::int64_t>(gen() % 7), "t"));
  }
  const Corpus corpus = make_corpus(records);
  for (std::int64_t subject = 0; subject < 8; ++subject) {
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < corpus.records().size(); ++i) {
      if (corpus.records()[i].subject_id == subject) expected.push_back(i);
    }
    CHECK(corpus.positions_for_subject(subject) == expected);
  }
}

TEST_CASE("count_sentences composes per-record sentencize") {
  CHECK(count_sentences(Corpus()) == 0);
  CHECK(count_sentences(make_corpus({rec(1, 1, "Stable. Discharged home.")})) == 2);

  std::vector<NoteRecord> records;
  const std::vector<std::string> texts = {
      "One. Two. Three.", "Dr. Smith saw the pt. today.", "single",
      "list\n1. a\n2. b", "", "Para one.\n\nPara two!", "BP 120/80.",
      "First. second stays", "Ready? Go!", "x"};
  std::size_t expected = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    records.push_back(rec(static_cast<std::int64_t>(i), 1, texts[i]));
    expected += sentencize(texts[i]).size();
  }
  CHECK(count_sentences(make_corpus(records)) == expected);
}

TEST_CASE("split sizes follow the floor rule") {
  std::vector<NoteRecord> records;
  for (int i = 0; i < 100; ++i) records.push_back(rec(i, i % 10, "t"));
  const Corpus corpus = make_corpus(records);

  const SplitResult result = split(corpus, 0.85, 42);
  CHECK(result.train.size() == 85);
  CHECK(result.test.size() == 15);

  const Corpus one = make_corpus({rec(1, 1, "t")});
  const SplitResult tiny = split(one, 0.85, 42);
  CHECK(tiny.train.size() == 0);
  CHECK(tiny.test.size() == 1);
}

TEST_CASE("split partitions the corpus and is deterministic") {
  std::vector<NoteRecord> records;
  for (int i = 0; i < 37; ++i) records.push_back(rec(i * 5, i % 4, "t"));
  const Corpus corpus = make_corpus(records);

  for (double ratio : {0.3, 0.5, 0.85}) {
    for (std::uint64_t seed : {1ULL, 42ULL, 7777ULL}) {
      const SplitResult r = split(corpus, ratio, seed);
      std::set<std::int64_t> train_ids, test_ids, all_ids;
      for (const NoteRecord& rr : r.train.records()) train_ids.insert(rr.row_id);
      for (const NoteRecord& rr : r.test.records()) test_ids.insert(rr.row_id);
      for (const NoteRecord& rr : corpus.records()) all_ids.insert(rr.row_id);
      CHECK(train_ids.size() + test_ids.size() == all_ids.size());
      std::set<std::int64_t> unioned = train_ids;
      unioned.insert(test_ids.begin(), test_ids.end());
      CHECK(unioned == all_ids);

      const SplitResult again = split(corpus, ratio, seed);
      CHECK(again.train == r.train);
      CHECK(again.test == r.test);
    }
  }
  // different seeds give different partitions on a corpus this size
  CHECK(split(corpus, 0.5, 1).train != split(corpus, 0.5, 2).train);
}

TEST_CASE("split rejects out-of-range ratios") {
  const Corpus corpus = make_corpus({rec(1, 1, "t"), rec(2, 1, "t")});
  CHECK_THROWS_AS(split(corpus, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(split(corpus, 1.0, 1), ArgumentError);
  CHECK_THROWS_AS(split(corpus, -0.2, 1), ArgumentError);
  CHECK_THROWS_AS(split(corpus, 1.5, 1), ArgumentError);
}

TEST_CASE("snapshot round-trips the corpus") {
  const Corpus corpus = load_csv(kFixtures + "/notes_50.csv");
  const std::string path = "/tmp/ehrkit_test.snapshot";
  save_snapshot(path, corpus);
  const Snapshot loaded = load_snapshot(path);
  CHECK(loaded.corpus == corpus);
  CHECK_FALSE(loaded.index.has_value());
  CHECK(is_snapshot_file(path));
  CHECK_FALSE(is_snapshot_file(kFixtures + "/notes_50.csv"));
}

TEST_CASE("snapshot loader rejects unknown versions") {
  const std::string path = write_temp("ehrkit_bad.snapshot", "EHRTK9\nxxxx");
  CHECK_THROWS_WITH_AS(load_snapshot(path), doctest::Contains("version"),
                       DataError);
  const std::string garbage = write_temp("ehrkit_garbage.snapshot", "hello");
  CHECK_THROWS_AS(load_snapshot(garbage), DataError);
}
