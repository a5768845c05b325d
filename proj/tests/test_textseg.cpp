#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include "ehrkit/errors.hpp"
#include "ehrkit/textseg.hpp"

using namespace ehrkit;

namespace {

std::vector<std::string> token_texts(std::string_view text) {
  std::vector<std::string> out;
  for (const Token& t : tokenize(text)) out.push_back(t.text);
  return out;
}

std::vector<std::string> sentence_texts(std::string_view text) {
  std::vector<std::string> out;
  for (const Sentence& s : sentencize(text))
    out.push_back(std::string(span_text(text, {s.start, s.end})));
  return out;
}

void check_token_offsets(std::string_view text) {
  const auto tokens = tokenize(text);
  std::size_t last_end = 0;
  for (const Token& t : tokens) {
    REQUIRE(t.start < t.end);
    REQUIRE(t.end <= text.size());
    CHECK(t.start >= last_end);
    CHECK(text.substr(t.start, t.end - t.start) == t.text);
    last_end = t.end;
  }
}

}  // namespace

TEST_CASE("tokenize basic rules") {
  CHECK(token_texts("").empty());
  CHECK(token_texts("BP 120/80, stable.") ==
        std::vector<std::string>{"BP", "120", "/", "80", ",", "stable", "."});
  CHECK(token_texts("x-ray at 3.5 mg") ==
        std::vector<std::string>{"x-ray", "at", "3.5", "mg"});
  CHECK(token_texts("the patient's dose") ==
        std::vector<std::string>{"the", "patient's", "dose"});
  // trailing hyphen/apostrophe/dot stay separate
  CHECK(token_texts("dose- 3. a'") ==
        std::vector<std::string>{"dose", "-", "3", ".", "a", "'"});
  // letter-dot sequences split at every dot
  CHECK(token_texts("b.i.d.") ==
        std::vector<std::string>{"b", ".", "i", ".", "d", "."});
}

TEST_CASE("tokenize offsets index the source exactly") {
  for (std::string_view text :
       {"BP 120/80, stable.", "  spaced\tout\ntext ", "a-b c'd 1.2.3",
        "unicode caf\xC3\xA9 \xE2\x80\xA2 bullet", ""}) {
    check_token_offsets(text);
  }
}

TEST_CASE("tokenize reconstructs the input with its gaps") {
  const std::string text = "Vitals:  BP 120/80.\nHR 72, afebrile.";
  const auto tokens = tokenize(text);
  std::string rebuilt;
  std::size_t pos = 0;
  for (const Token& t : tokens) {
    rebuilt += text.substr(pos, t.start - pos);
    rebuilt += t.text;
    pos = t.end;
  }
  rebuilt += text.substr(pos);
  CHECK(rebuilt == text);
}

TEST_CASE("tokenize is idempotent over its own token texts") {
  const std::string text = "Pt. on 3.5mg x-ray q.d., stable \xE2\x80\xA2 done";
  for (const Token& t : tokenize(text)) {
    const auto again = tokenize(t.text);
    REQUIRE(again.size() == 1);
    CHECK(again[0].text == t.text);
  }
}

TEST_CASE("sentencize splits on terminal punctuation before capitals") {
  CHECK(sentence_texts("Stable. Discharged home.") ==
        std::vector<std::string>{"Stable.", "Discharged home."});
  CHECK(sentence_texts("").empty());
  CHECK(sentence_texts("   \n \t ").empty());
  CHECK(sentence_texts("Improved! Will discharge? Yes.") ==
        std::vector<std::string>{"Improved!", "Will discharge?", "Yes."});
  // lowercase after the period: no break
  CHECK(sentence_texts("stable. ambulating well").size() == 1);
}

TEST_CASE("sentencize suppresses clinical abbreviations and decimals") {
  CHECK(sentence_texts("Dr. Smith saw the pt. today.").size() == 1);
  CHECK(sentence_texts("Dose 3.5 Mg daily.").size() == 1);
  CHECK(sentence_texts("Took med q.d. Stable now.").size() == 1);
  // same shape without a listed abbreviation does split
  CHECK(sentence_texts("Took med q8h. Stable now.").size() == 2);
  // abbreviation must stand alone: "adopt." is not "pt."
  CHECK(sentence_texts("Plan to adopt. Next step follows.").size() == 2);
}

TEST_CASE("sentencize breaks on blank lines and list markers") {
  CHECK(sentence_texts("no terminal punctuation\n\nsecond paragraph").size() == 2);
  CHECK(sentence_texts("Medications\n1. aspirin\n2. insulin") ==
        std::vector<std::string>{"Medications", "1. aspirin", "2. insulin"});
  CHECK(sentence_texts("list\n- item one\n- item two").size() == 3);
  CHECK(sentence_texts("list\n\xE2\x80\xA2 bullet item").size() == 2);
  // plain newline without a marker does not break
  CHECK(sentence_texts("continued on\nthe next line").size() == 1);
}

TEST_CASE("sentencize counts add over blank-line joins") {
  const std::vector<std::string> parts = {
      "Stable. Discharged home.", "Dr. Smith saw the pt. today.",
      "Medications\n1. aspirin", "single line"};
  for (const std::string& a : parts) {
    for (const std::string& b : parts) {
      const std::string joined = a + "\n\n" + b;
      CHECK(sentencize(joined).size() ==
            sentencize(a).size() + sentencize(b).size());
    }
  }
}

TEST_CASE("sentence spans cover every non-whitespace byte") {
  const std::string text =
      "CHIEF COMPLAINT: chest pain.\nHPI: The pt. came in at 3.5 hrs.\n\n"
      "1. aspirin\n2. oxygen\nDischarged home. Stable.";
  const auto sentences = sentencize(text);
  std::vector<bool> covered(text.size(), false);
  std::size_t last_end = 0;
  for (const Sentence& s : sentences) {
    REQUIRE(s.start < s.end);
    REQUIRE(s.end <= text.size());
    CHECK(s.start >= last_end);
    last_end = s.end;
    for (std::size_t i = s.start; i < s.end; ++i) covered[i] = true;
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!covered[i]) {
      const char c = text[i];
      CHECK((c == ' ' || c == '\t' || c == '\n' || c == '\r'));
    }
  }
}

TEST_CASE("detect_sections finds headers and bodies") {
  const std::string text = "ALLERGIES: penicillin\nPLAN: rest";
  const auto sections = detect_sections(text, default_section_rules());
  REQUIRE(sections.size() == 2);
  CHECK(sections[0].header == "allergies");
  CHECK(span_text(text, sections[0].body_span) == "penicillin");
  CHECK(sections[1].header == "plan");
  CHECK(span_text(text, sections[1].body_span) == "rest");
  CHECK(sections[0].header_span.start <= sections[0].body_span.start);
}

TEST_CASE("detect_sections header aliases are case-insensitive") {
  const auto lower = detect_sections("Allergies: latex", default_section_rules());
  const auto upper = detect_sections("ALLERGIES: latex", default_section_rules());
  REQUIRE(lower.size() == 1);
  REQUIRE(upper.size() == 1);
  CHECK(lower[0].header == upper[0].header);
  CHECK(lower[0].header == "allergies");
}

TEST_CASE("detect_sections falls back to a preamble") {
  const std::string text = "free text with no headers at all. second line";
  const auto sections = detect_sections(text, default_section_rules());
  REQUIRE(sections.size() == 1);
  CHECK(sections[0].header == "preamble");
  CHECK(span_text(text, sections[0].body_span) == text);
  CHECK(detect_sections("", default_section_rules()).empty());
}

TEST_CASE("detect_sections whole-line header without colon") {
  const std::string text =
      "intro text\nPAST MEDICAL HISTORY\nafib and chf\nPLAN: rest";
  const auto sections = detect_sections(text, default_section_rules());
  REQUIRE(sections.size() == 3);
  CHECK(sections[0].header == "preamble");
  CHECK(sections[1].header == "past medical history");
  CHECK(span_text(text, sections[1].body_span) == "afib and chf");
  CHECK(sections[2].header == "plan");
  // prose starting with an alias word is not a header
  const auto prose =
      detect_sections("plan to discharge tomorrow", default_section_rules());
  REQUIRE(prose.size() == 1);
  CHECK(prose[0].header == "preamble");
}

TEST_CASE("sections tile the document") {
  const std::string text =
      "lead-in text\nALLERGIES: none known\nHISTORY: admitted for chest pain.\n"
      "More history lines here.\nPLAN\nrest and fluids\n";
  const auto sections = detect_sections(text, default_section_rules());
  std::vector<int> hits(text.size(), 0);
  for (const Section& s : sections) {
    for (std::size_t i = s.header_span.start; i < s.header_span.end; ++i)
      ++hits[i];
    for (std::size_t i = s.body_span.start; i < s.body_span.end; ++i) ++hits[i];
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!ws) CHECK(hits[i] == 1);
    if (ws) CHECK(hits[i] <= 1);
  }
}

TEST_CASE("section rule loader reports malformed lines") {
  const std::string good = std::string(EHRKIT_DATA_DIR) + "/section_rules.tsv";
  const SectionRuleSet loaded = load_section_rules(good);
  REQUIRE(loaded.size() == default_section_rules().size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].label == default_section_rules()[i].label);
    CHECK(loaded[i].aliases == default_section_rules()[i].aliases);
  }

  const std::string bad = "/tmp/ehrkit_bad_rules.tsv";
  {
    std::ofstream out(bad);
    out << "allergies\tallergies\n";
    out << "missing tab here\n";
  }
  CHECK_THROWS_AS(load_section_rules(bad), ConfigError);
  try {
    load_section_rules(bad);
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_section_rules("/nonexistent/rules.tsv"), IoError);
}

TEST_CASE("shipped default data files match the built-in tables") {
  const std::string dir(EHRKIT_DATA_DIR);
  CHECK(load_sentence_abbreviations(dir + "/sentence_abbreviations.txt") ==
        default_sentence_abbreviations());
  CHECK(load_stopwords(dir + "/stopwords.txt") == default_stopwords());
}
