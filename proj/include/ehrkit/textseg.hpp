#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ehrkit {

// Half-open byte range [start, end) into the source string.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
  std::size_t size() const { return end - start; }
};

inline std::string_view span_text(std::string_view source, const Span& span) {
  return source.substr(span.start, span.end - span.start);
}

struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::size_t index = 0;
  bool operator==(const Sentence&) const = default;
};

struct Section {
  std::string header;  // canonical label, lowercased ("preamble" for the lead-in)
  Span header_span;
  Span body_span;
  bool operator==(const Section&) const = default;
};

// Rule-based word tokenizer. Tokens are maximal runs of word characters
// (ASCII alphanumerics plus any code point >= U+0080 outside the general
// punctuation block U+2000..U+206F), where a '-' or '\'' between two word
// characters and a '.' between two ASCII digits stay inside the run. Every
// other non-whitespace code point becomes a single-character token. Offsets
// are byte offsets into the UTF-8 input.
std::vector<Token> tokenize(std::string_view text);

// ASCII lowercase copy; bytes >= 0x80 are left untouched.
std::string to_lower(std::string_view text);

// True when the token starts with a word character (i.e. it is not a
// punctuation/symbol token).
bool is_word_token(const Token& token);

// Abbreviations (lowercase, trailing period included) that suppress a
// sentence break, e.g. "dr.", "q.d.".
const std::vector<std::string>& default_sentence_abbreviations();

// One abbreviation per line; '#' starts a comment.
std::vector<std::string> load_sentence_abbreviations(const std::string& path);

// Clinical-aware sentence splitter. Breaks after '.', '!' or '?' followed by
// whitespace and an ASCII uppercase letter or digit, at blank lines, and at a
// newline that precedes a list marker ("1.", "- ", "*" bullet U+2022). A '.'
// inside a decimal number or ending a known abbreviation never breaks.
// Sentence spans are trimmed of surrounding ASCII whitespace.
std::vector<Sentence> sentencize(std::string_view text);
std::vector<Sentence> sentencize(std::string_view text,
                                 const std::vector<std::string>& abbreviations);

struct SectionRule {
  std::string label;                 // canonical, lowercased
  std::vector<std::string> aliases;  // matched case-insensitively at line start
};

using SectionRuleSet = std::vector<SectionRule>;

const SectionRuleSet& default_section_rules();

// UTF-8 lines "canonical_label<TAB>alias1|alias2|..."; '#' comments allowed.
// Throws ConfigError (with line number) on malformed lines.
SectionRuleSet load_section_rules(const std::string& path);

// Detects sections by header lines. A line opens a section when, after
// optional leading blanks, it starts with a rule alias followed by ':' (the
// rest of the line starts the body), or the whole line is exactly an alias
// (the body starts on the next line). Longest alias wins. Text before the
// first header becomes a "preamble" section.
std::vector<Section> detect_sections(std::string_view text,
                                     const SectionRuleSet& rules);

using StopwordSet = std::unordered_set<std::string>;

const StopwordSet& default_stopwords();

// One word per line; '#' comments allowed.
StopwordSet load_stopwords(const std::string& path);

}  // namespace ehrkit
