#include "ehrkit/textseg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "ehrkit/errors.hpp"

namespace ehrkit {

namespace {

struct CodePoint {
  char32_t value = 0;
  std::size_t offset = 0;  // byte offset of the first byte
  std::size_t width = 1;   // bytes consumed
};

// Decodes one UTF-8 code point at `pos`. An invalid or truncated sequence is
// consumed one byte at a time and classified as a symbol.
CodePoint decode_utf8(std::string_view text, std::size_t pos) {
  const auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(text[i]);
  };
  const unsigned char lead = byte(pos);
  CodePoint cp{lead, pos, 1};
  std::size_t extra = 0;
  char32_t value = 0;
  if (lead < 0x80) {
    return cp;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    value = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    value = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    value = lead & 0x07;
  } else {
    return cp;  // stray continuation or invalid lead byte
  }
  for (std::size_t i = 1; i <= extra; ++i) {
    if (pos + i >= text.size() || (byte(pos + i) & 0xC0) != 0x80) return cp;
    value = (value << 6) | (byte(pos + i) & 0x3F);
  }
  cp.value = value;
  cp.width = 1 + extra;
  return cp;
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_ascii_digit(char32_t c) { return c >= '0' && c <= '9'; }

bool is_ascii_alnum(char32_t c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

// Word characters: ASCII alphanumerics, or any non-ASCII code point outside
// the general punctuation block (which holds bullets, dashes, curly quotes).
bool is_word_cp(char32_t c) {
  if (c < 0x80) return is_ascii_alnum(c);
  return !(c >= 0x2000 && c <= 0x206F);
}

bool is_space_cp(char32_t c) { return c < 0x80 && is_ascii_space(static_cast<char>(c)); }

std::vector<CodePoint> decode_all(std::string_view text) {
  std::vector<CodePoint> cps;
  cps.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    CodePoint cp = decode_utf8(text, pos);
    cps.push_back(cp);
    pos += cp.width;
  }
  return cps;
}

std::vector<std::string> read_list_file(const std::string& path,
                                        const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + " file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    std::size_t b = 0, e = line.size();
    while (b < e && is_ascii_space(line[b])) ++b;
    while (e > b && is_ascii_space(line[e - 1])) --e;
    if (e > b) lines.push_back(to_lower(line.substr(b, e - b)));
  }
  return lines;
}

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_word_token(const Token& token) {
  if (token.text.empty()) return false;
  CodePoint cp = decode_utf8(token.text, 0);
  return is_word_cp(cp.value);
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const std::vector<CodePoint> cps = decode_all(text);
  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = cps[i].value;
    if (is_space_cp(c)) {
      ++i;
      continue;
    }
    if (!is_word_cp(c)) {
      std::size_t start = cps[i].offset;
      std::size_t end = start + cps[i].width;
      tokens.push_back({std::string(text.substr(start, end - start)), start, end});
      ++i;
      continue;
    }
    // word run; j is the index one past the last accepted code point
    std::size_t j = i + 1;
    while (j < n) {
      const char32_t cj = cps[j].value;
      if (is_word_cp(cj)) {
        ++j;
        continue;
      }
      const bool joiner = (cj == '-' || cj == '\'') && j + 1 < n &&
                          is_word_cp(cps[j + 1].value);
      const bool decimal = cj == '.' && is_ascii_digit(cps[j - 1].value) &&
                           j + 1 < n && is_ascii_digit(cps[j + 1].value);
      if (joiner || decimal) {
        j += 2;  // the joiner and the word char after it
        continue;
      }
      break;
    }
    std::size_t start = cps[i].offset;
    std::size_t end = cps[j - 1].offset + cps[j - 1].width;
    tokens.push_back({std::string(text.substr(start, end - start)), start, end});
    i = j;
  }
  return tokens;
}

const std::vector<std::string>& default_sentence_abbreviations() {
  static const std::vector<std::string> kList = {
      "dr.",    "mr.",    "mrs.",   "ms.",   "prof.", "st.",   "jr.",
      "sr.",    "vs.",    "etc.",   "e.g.",  "i.e.",  "approx.", "appt.",
      "pt.",    "pts.",   "hx.",    "dx.",   "tx.",   "rx.",   "fx.",
      "s/p.",   "wt.",    "ht.",    "no.",   "fig.",  "resp.",
      "q.d.",   "q.o.d.", "b.i.d.", "t.i.d.", "q.i.d.", "p.r.n.", "p.o.",
      "i.v.",   "i.m.",   "s.c.",   "a.m.",  "p.m.",  "q.h.",  "h.s.",
  };
  return kList;
}

std::vector<std::string> load_sentence_abbreviations(const std::string& path) {
  return read_list_file(path, "abbreviation");
}

namespace {

// True when a listed abbreviation ends exactly at the '.' at byte `dot`.
bool abbreviation_ends_at(std::string_view text, std::size_t dot,
                          const std::vector<std::string>& abbreviations) {
  for (const std::string& abbr : abbreviations) {
    const std::size_t len = abbr.size();
    if (len == 0 || dot + 1 < len) continue;
    const std::size_t begin = dot + 1 - len;
    bool match = true;
    for (std::size_t i = 0; i < len; ++i) {
      char c = text[begin + i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      if (c != abbr[i]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    // must not sit inside a longer word: char before is not alphanumeric
    if (begin > 0 && is_ascii_alnum(static_cast<unsigned char>(text[begin - 1])))
      continue;
    return true;
  }
  return false;
}

// Does a list marker start at `pos` (start of a line, blanks skipped)?
// Markers: digits followed by '.', "-" or "*" followed by a blank, or the
// bullet U+2022.
bool list_marker_at(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return false;
  const char c = text[pos];
  if (c >= '0' && c <= '9') {
    std::size_t j = pos;
    while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
    return j < text.size() && text[j] == '.';
  }
  if (c == '-' || c == '*') {
    return pos + 1 < text.size() && (text[pos + 1] == ' ' || text[pos + 1] == '\t');
  }
  // U+2022 = E2 80 A2
  return pos + 2 < text.size() && static_cast<unsigned char>(text[pos]) == 0xE2 &&
         static_cast<unsigned char>(text[pos + 1]) == 0x80 &&
         static_cast<unsigned char>(text[pos + 2]) == 0xA2;
}

}  // namespace

std::vector<Sentence> sentencize(std::string_view text) {
  return sentencize(text, default_sentence_abbreviations());
}

std::vector<Sentence> sentencize(std::string_view text,
                                 const std::vector<std::string>& abbreviations) {
  const std::size_t n = text.size();
  std::vector<std::size_t> breaks;  // positions where a new sentence starts
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      if (c == '.') {
        const bool digit_before = i > 0 && is_ascii_digit(static_cast<unsigned char>(text[i - 1]));
        const bool digit_after = i + 1 < n && is_ascii_digit(static_cast<unsigned char>(text[i + 1]));
        if (digit_before && digit_after) continue;  // decimal number
        if (abbreviation_ends_at(text, i, abbreviations)) continue;
      }
      std::size_t j = i + 1;
      if (j >= n || !is_ascii_space(text[j])) continue;
      while (j < n && is_ascii_space(text[j])) ++j;
      if (j < n && ((text[j] >= 'A' && text[j] <= 'Z') || is_ascii_digit(static_cast<unsigned char>(text[j])))) {
        breaks.push_back(i + 1);
      }
    } else if (c == '\n') {
      std::size_t j = i + 1;
      while (j < n && (text[j] == ' ' || text[j] == '\t')) ++j;
      if (j < n && text[j] == '\n') {
        breaks.push_back(i + 1);  // blank line
      } else if (list_marker_at(text, j)) {
        breaks.push_back(i + 1);  // new list item
      }
    }
  }
  breaks.push_back(n);

  std::vector<Sentence> sentences;
  std::size_t begin = 0;
  for (std::size_t brk : breaks) {
    std::size_t s = begin, e = brk;
    while (s < e && is_ascii_space(text[s])) ++s;
    while (e > s && is_ascii_space(text[e - 1])) --e;
    if (e > s) sentences.push_back({s, e, sentences.size()});
    begin = brk;
  }
  return sentences;
}

const SectionRuleSet& default_section_rules() {
  static const SectionRuleSet kRules = {
      {"allergies", {"allergies", "allergy"}},
      {"chief complaint", {"chief complaint", "cc"}},
      {"history of present illness", {"history of present illness", "hpi", "history"}},
      {"past medical history", {"past medical history", "pmh"}},
      {"social history", {"social history"}},
      {"family history", {"family history"}},
      {"medications", {"medications", "medications on admission", "discharge medications", "meds"}},
      {"physical exam", {"physical exam", "physical examination", "pe"}},
      {"review of systems", {"review of systems", "ros"}},
      {"labs", {"labs", "laboratory data", "pertinent results"}},
      {"findings", {"findings"}},
      {"impression", {"impression"}},
      {"assessment", {"assessment", "assessment and plan"}},
      {"plan", {"plan"}},
      {"hospital course", {"hospital course", "brief hospital course"}},
      {"discharge diagnosis", {"discharge diagnosis", "discharge diagnoses"}},
      {"followup", {"followup", "follow-up", "followup instructions"}},
  };
  return kRules;
}

SectionRuleSet load_section_rules(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open section rule file: " + path);
  SectionRuleSet rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = std::all_of(line.begin(), line.end(),
                             [](char c) { return is_ascii_space(c); });
    if (blank) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ConfigError(lineno, "section rule line " + std::to_string(lineno) +
                                    ": expected 'label<TAB>alias|alias|...'");
    SectionRule rule;
    rule.label = to_lower(line.substr(0, tab));
    std::string aliases = line.substr(tab + 1);
    std::size_t start = 0;
    while (start <= aliases.size()) {
      auto bar = aliases.find('|', start);
      std::string alias = aliases.substr(
          start, bar == std::string::npos ? std::string::npos : bar - start);
      std::size_t b = 0, e = alias.size();
      while (b < e && is_ascii_space(alias[b])) ++b;
      while (e > b && is_ascii_space(alias[e - 1])) --e;
      if (e > b) rule.aliases.push_back(to_lower(alias.substr(b, e - b)));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    if (rule.aliases.empty())
      throw ConfigError(lineno, "section rule line " + std::to_string(lineno) +
                                    ": no aliases given");
    rules.push_back(std::move(rule));
  }
  return rules;
}

namespace {

struct HeaderHit {
  std::size_t line_start = 0;   // byte offset of the header line
  std::size_t alias_start = 0;  // after leading blanks
  std::size_t header_end = 0;   // past the ':' when present, else alias end
  std::size_t body_start = 0;   // after ':' or after the line's '\n'
  std::string label;
};

bool iequal_at(std::string_view text, std::size_t pos, std::string_view lower_alias) {
  if (pos + lower_alias.size() > text.size()) return false;
  for (std::size_t i = 0; i < lower_alias.size(); ++i) {
    char c = text[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != lower_alias[i]) return false;
  }
  return true;
}

}  // namespace

std::vector<Section> detect_sections(std::string_view text,
                                     const SectionRuleSet& rules) {
  std::vector<Section> sections;
  if (text.empty()) return sections;

  std::vector<HeaderHit> hits;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::size_t p = line_start;
    while (p < line_end && (text[p] == ' ' || text[p] == '\t')) ++p;

    const SectionRule* best_rule = nullptr;
    std::size_t best_len = 0;
    for (const SectionRule& rule : rules) {
      for (const std::string& alias : rule.aliases) {
        if (alias.size() <= best_len) continue;
        if (!iequal_at(text, p, alias)) continue;
        std::size_t after = p + alias.size();
        bool colon = after < line_end && text[after] == ':';
        bool line_is_alias = true;
        for (std::size_t q = after; q < line_end && line_is_alias; ++q) {
          if (!is_ascii_space(text[q])) line_is_alias = false;
        }
        if (colon || line_is_alias) {
          best_rule = &rule;
          best_len = alias.size();
        }
      }
    }
    if (best_rule != nullptr) {
      HeaderHit hit;
      hit.line_start = line_start;
      hit.alias_start = p;
      std::size_t after = p + best_len;
      if (after < line_end && text[after] == ':') {
        hit.header_end = after + 1;
        hit.body_start = after + 1;
      } else {
        hit.header_end = after;
        hit.body_start = line_end < text.size() ? line_end + 1 : text.size();
      }
      hit.label = best_rule->label;
      hits.push_back(std::move(hit));
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }

  const auto trimmed = [&](std::size_t s, std::size_t e) {
    while (s < e && is_ascii_space(text[s])) ++s;
    while (e > s && is_ascii_space(text[e - 1])) --e;
    return Span{s, e};
  };

  const std::size_t first_header =
      hits.empty() ? text.size() : hits.front().line_start;
  Span preamble = trimmed(0, first_header);
  if (preamble.size() > 0 || hits.empty()) {
    if (preamble.size() > 0)
      sections.push_back({"preamble", Span{0, 0}, preamble});
  }

  for (std::size_t h = 0; h < hits.size(); ++h) {
    const HeaderHit& hit = hits[h];
    std::size_t body_end =
        h + 1 < hits.size() ? hits[h + 1].line_start : text.size();
    Span body = trimmed(hit.body_start, std::max(hit.body_start, body_end));
    if (body.size() == 0) body = Span{hit.body_start, hit.body_start};
    sections.push_back(
        {hit.label, Span{hit.alias_start, hit.header_end}, body});
  }
  return sections;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet kStopwords = {
      "a",       "about",   "above",  "after",   "again",   "all",     "also",
      "am",      "an",      "and",    "any",     "are",     "as",      "at",
      "be",      "because", "been",   "before",  "being",   "below",   "between",
      "both",    "but",     "by",     "can",     "could",   "did",     "do",
      "does",    "down",    "during", "each",    "few",     "for",     "from",
      "further", "had",     "has",    "have",    "having",  "he",      "her",
      "here",    "hers",    "him",    "his",     "how",     "i",       "if",
      "in",      "into",    "is",     "it",      "its",     "just",    "me",
      "more",    "most",    "my",     "no",      "nor",     "not",     "now",
      "of",      "off",     "on",     "once",    "only",    "or",      "other",
      "our",     "out",     "over",   "own",     "same",    "she",     "should",
      "so",      "some",    "such",   "than",    "that",    "the",     "their",
      "them",    "then",    "there",  "these",   "they",    "this",    "those",
      "through", "to",      "too",    "under",   "until",   "up",      "very",
      "was",     "we",      "were",   "what",    "when",    "where",   "which",
      "while",   "who",     "whom",   "why",     "will",    "with",    "would",
      "you",     "your",
  };
  return kStopwords;
}

StopwordSet load_stopwords(const std::string& path) {
  auto lines = read_list_file(path, "stopword");
  return StopwordSet(lines.begin(), lines.end());
}

}  // namespace ehrkit
