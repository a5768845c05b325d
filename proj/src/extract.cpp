#include "ehrkit/extract.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "ehrkit/errors.hpp"

namespace ehrkit {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

bool is_ascii_letter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::size_t count_alnum(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if (is_ascii_alnum(c)) ++n;
  return n;
}

std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool sep = is_ascii_space(c);
    if (!sep && !in_word) ++n;
    in_word = !sep;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Schwartz-Hearst abbreviation pairing
// ---------------------------------------------------------------------------

bool valid_short_form(std::string_view sf) {
  if (sf.size() < 2 || sf.size() > 10) return false;
  if (count_words(sf) > 2) return false;
  if (!is_ascii_alnum(sf.front())) return false;
  return std::any_of(sf.begin(), sf.end(),
                     [](char c) { return is_ascii_letter(c); });
}

// Right-to-left character matching; returns the local offset where the best
// long form begins, or npos when the short form cannot be aligned. The first
// short-form character must match at the start of a long-form word, and the
// result is widened left to the enclosing whitespace-delimited word.
std::size_t find_best_long_form(std::string_view sf, std::string_view lf) {
  long l = static_cast<long>(lf.size()) - 1;
  for (long s = static_cast<long>(sf.size()) - 1; s >= 0; --s) {
    const char want = ascii_lower(sf[static_cast<std::size_t>(s)]);
    if (!is_ascii_alnum(want)) continue;
    while ((l >= 0 && ascii_lower(lf[static_cast<std::size_t>(l)]) != want) ||
           (s == 0 && l > 0 &&
            is_ascii_alnum(lf[static_cast<std::size_t>(l - 1)]))) {
      --l;
    }
    if (l < 0) return std::string_view::npos;
    --l;
  }
  std::size_t pos = static_cast<std::size_t>(l + 1);
  while (pos > 0 && !is_ascii_space(lf[pos - 1])) --pos;
  return pos;
}

// Word count the way the reference procedure does it: hyphens separate words.
std::size_t long_form_word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool sep = is_ascii_space(c) || c == '-';
    if (!sep && !in_word) ++n;
    in_word = !sep;
  }
  return n;
}

}  // namespace

std::vector<AbbreviationPair> extract_abbreviations(std::string_view text) {
  std::vector<AbbreviationPair> pairs;
  for (const Sentence& sentence : sentencize(text)) {
    for (std::size_t open = sentence.start; open < sentence.end; ++open) {
      if (text[open] != '(') continue;
      const std::size_t close = text.find(')', open + 1);
      if (close == std::string_view::npos || close >= sentence.end) continue;

      std::size_t sf_begin = open + 1, sf_end = close;
      while (sf_begin < sf_end && is_ascii_space(text[sf_begin])) ++sf_begin;
      while (sf_end > sf_begin && is_ascii_space(text[sf_end - 1])) --sf_end;
      const std::string_view sf = text.substr(sf_begin, sf_end - sf_begin);
      if (sf.find('(') != std::string_view::npos) continue;
      if (!valid_short_form(sf)) continue;

      const std::size_t sf_alnum = count_alnum(sf);
      const std::size_t max_words = std::min(sf_alnum + 5, 2 * sf_alnum);

      // window: the last max_words whitespace-delimited words before '('
      std::size_t cand_end = open;
      while (cand_end > sentence.start && is_ascii_space(text[cand_end - 1]))
        --cand_end;
      if (cand_end <= sentence.start) continue;
      std::size_t cand_begin = cand_end;
      std::size_t words = 0;
      while (cand_begin > sentence.start && words < max_words) {
        std::size_t word_end = cand_begin;
        while (word_end > sentence.start && is_ascii_space(text[word_end - 1]))
          --word_end;
        if (word_end == sentence.start) break;
        std::size_t word_begin = word_end;
        while (word_begin > sentence.start &&
               !is_ascii_space(text[word_begin - 1]))
          --word_begin;
        cand_begin = word_begin;
        ++words;
      }
      const std::string_view candidate =
          text.substr(cand_begin, cand_end - cand_begin);
      if (candidate.empty()) continue;

      const std::size_t local = find_best_long_form(sf, candidate);
      if (local == std::string_view::npos) continue;
      const std::string_view best = candidate.substr(local);

      if (best.size() < sf.size()) continue;
      std::string sf_str(sf);
      if (best.find(sf_str + " ") != std::string_view::npos) continue;
      if (best.size() >= sf.size() &&
          best.substr(best.size() - sf.size()) == sf)
        continue;
      const std::size_t lf_words = long_form_word_count(best);
      if (lf_words > 2 * sf_alnum || lf_words > sf_alnum + 5) continue;

      AbbreviationPair pair;
      pair.short_form = std::move(sf_str);
      pair.short_span = {sf_begin, sf_end};
      pair.long_form = std::string(best);
      pair.long_span = {cand_begin + local, cand_end};
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

std::string expand_abbreviations(std::string_view text,
                                 const std::vector<AbbreviationPair>& pairs) {
  if (pairs.empty()) return std::string(text);

  // short form -> definitions, most recent (by definition end) first
  std::map<std::string, std::vector<const AbbreviationPair*>,
           std::greater<std::string>>
      by_sf;
  for (const AbbreviationPair& p : pairs) by_sf[p.short_form].push_back(&p);

  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const AbbreviationPair* chosen = nullptr;
    std::size_t chosen_len = 0;
    if (is_ascii_alnum(text[i]) &&
        (i == 0 || !is_ascii_alnum(text[i - 1]))) {
      for (const auto& [sf, defs] : by_sf) {
        if (sf.size() <= chosen_len) continue;
        if (text.substr(i, sf.size()) != sf) continue;
        const std::size_t after = i + sf.size();
        if (after < text.size() && is_ascii_alnum(text[after])) continue;
        const AbbreviationPair* best_def = nullptr;
        for (const AbbreviationPair* def : defs) {
          if (i == def->short_span.start) continue;  // the definition site
          if (def->short_span.end > i) continue;     // defined later on
          if (best_def == nullptr ||
              def->short_span.end > best_def->short_span.end) {
            best_def = def;
          }
        }
        if (best_def != nullptr) {
          chosen = best_def;
          chosen_len = sf.size();
        }
      }
    }
    if (chosen != nullptr) {
      out += chosen->long_form;
      i += chosen_len;
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frequent phrases
// ---------------------------------------------------------------------------

namespace {

void accumulate_phrases(std::string_view text, std::size_t max_len,
                        const StopwordSet& stopwords,
                        std::unordered_map<std::string, std::size_t>& counts) {
  for (const Sentence& sentence : sentencize(text)) {
    const auto tokens =
        tokenize(text.substr(sentence.start, sentence.end - sentence.start));
    std::vector<std::string> run;  // lowered word tokens of the current run
    const auto flush = [&](const std::vector<std::string>& words) {
      for (std::size_t n = 2; n <= max_len && n <= words.size(); ++n) {
        for (std::size_t i = 0; i + n <= words.size(); ++i) {
          if (stopwords.count(words[i]) || stopwords.count(words[i + n - 1]))
            continue;
          std::string phrase = words[i];
          for (std::size_t j = 1; j < n; ++j) {
            phrase.push_back(' ');
            phrase += words[i + j];
          }
          ++counts[phrase];
        }
      }
    };
    for (const Token& token : tokens) {
      if (is_word_token(token)) {
        run.push_back(to_lower(token.text));
      } else if (!run.empty()) {
        flush(run);
        run.clear();
      }
    }
    if (!run.empty()) flush(run);
  }
}

std::vector<PhraseCandidate> finalize_phrases(
    std::unordered_map<std::string, std::size_t>& counts,
    std::size_t min_freq) {
  std::vector<PhraseCandidate> result;
  for (auto& [phrase, freq] : counts) {
    if (freq < min_freq) continue;
    const std::size_t tokens =
        1 + static_cast<std::size_t>(
                std::count(phrase.begin(), phrase.end(), ' '));
    result.push_back(
        {phrase, freq, static_cast<double>(freq * tokens)});
  }
  std::sort(result.begin(), result.end(),
            [](const PhraseCandidate& a, const PhraseCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.phrase < b.phrase;
            });
  return result;
}

void check_phrase_args(std::size_t min_freq, std::size_t max_len) {
  if (min_freq < 1) throw ArgumentError("extract_phrases: min_freq must be >= 1");
  if (max_len < 2) throw ArgumentError("extract_phrases: max_len must be >= 2");
}

}  // namespace

std::vector<PhraseCandidate> extract_phrases(std::string_view text,
                                             std::size_t min_freq,
                                             std::size_t max_len,
                                             const StopwordSet& stopwords) {
  check_phrase_args(min_freq, max_len);
  std::unordered_map<std::string, std::size_t> counts;
  accumulate_phrases(text, max_len, stopwords, counts);
  return finalize_phrases(counts, min_freq);
}

std::vector<PhraseCandidate> extract_phrases(const Corpus& corpus,
                                             std::size_t min_freq,
                                             std::size_t max_len,
                                             const StopwordSet& stopwords) {
  check_phrase_args(min_freq, max_len);
  std::unordered_map<std::string, std::size_t> counts;
  for (const NoteRecord& record : corpus.records()) {
    accumulate_phrases(record.text, max_len, stopwords, counts);
  }
  return finalize_phrases(counts, min_freq);
}

// ---------------------------------------------------------------------------
// Hearst-pattern hyponyms
// ---------------------------------------------------------------------------

namespace {

struct TokView {
  Token token;     // offsets already absolute in the source text
  std::string low; // lowercased text
  bool word = false;
  bool stop = false;
};

std::vector<TokView> sentence_tokens(std::string_view text,
                                     const Sentence& sentence,
                                     const StopwordSet& stopwords) {
  std::vector<TokView> out;
  for (Token t : tokenize(text.substr(sentence.start, sentence.end - sentence.start))) {
    TokView v;
    v.low = to_lower(t.text);
    v.word = is_word_token(t);
    v.stop = stopwords.count(v.low) > 0;
    t.start += sentence.start;
    t.end += sentence.start;
    v.token = std::move(t);
    out.push_back(std::move(v));
  }
  return out;
}

struct NpRange {
  std::size_t begin = 0, end = 0;  // token indices, half-open
  bool empty() const { return begin >= end; }
};

bool np_token(const TokView& t) { return t.word && !t.stop; }

// Maximal run of NP tokens ending just before `idx`.
NpRange np_before(const std::vector<TokView>& toks, std::size_t idx) {
  std::size_t b = idx;
  while (b > 0 && np_token(toks[b - 1])) --b;
  return {b, idx};
}

// Maximal run of NP tokens starting at `idx`.
NpRange np_at(const std::vector<TokView>& toks, std::size_t idx) {
  std::size_t e = idx;
  while (e < toks.size() && np_token(toks[e])) ++e;
  return {idx, e};
}

// "Y (, Y)* ((and|or) Y)?" starting at `idx`.
std::vector<NpRange> np_list_from(const std::vector<TokView>& toks,
                                  std::size_t idx) {
  std::vector<NpRange> list;
  NpRange np = np_at(toks, idx);
  if (np.empty()) return list;
  list.push_back(np);
  std::size_t pos = np.end;
  while (pos < toks.size()) {
    if (toks[pos].low == ",") {
      NpRange next = np_at(toks, pos + 1);
      if (next.empty()) break;
      list.push_back(next);
      pos = next.end;
    } else if (toks[pos].low == "and" || toks[pos].low == "or") {
      NpRange next = np_at(toks, pos + 1);
      if (next.empty()) break;
      list.push_back(next);
      break;
    } else {
      break;
    }
  }
  return list;
}

// "Y (, Y)*" ending just before `idx`, in document order.
std::vector<NpRange> np_list_before(const std::vector<TokView>& toks,
                                    std::size_t idx) {
  std::vector<NpRange> reversed;
  NpRange np = np_before(toks, idx);
  if (np.empty()) return reversed;
  reversed.push_back(np);
  std::size_t pos = np.begin;
  while (pos > 0 && toks[pos - 1].low == ",") {
    NpRange prev = np_before(toks, pos - 1);
    if (prev.empty()) break;
    reversed.push_back(prev);
    pos = prev.begin;
  }
  std::reverse(reversed.begin(), reversed.end());
  return reversed;
}

std::pair<std::string, Span> np_render(std::string_view text,
                                       const std::vector<TokView>& toks,
                                       const NpRange& np) {
  const Span span{toks[np.begin].token.start, toks[np.end - 1].token.end};
  return {std::string(span_text(text, span)), span};
}

}  // namespace

std::vector<HyponymRelation> detect_hyponyms(std::string_view text,
                                             const StopwordSet& stopwords) {
  std::vector<HyponymRelation> relations;
  const auto emit = [&](std::string_view text_, const std::vector<TokView>& toks,
                        const NpRange& general,
                        const std::vector<NpRange>& specifics,
                        const char* pattern) {
    auto [gtext, gspan] = np_render(text_, toks, general);
    for (const NpRange& s : specifics) {
      auto [stext, sspan] = np_render(text_, toks, s);
      relations.push_back({gtext, gspan, stext, sspan, pattern});
    }
  };

  for (const Sentence& sentence : sentencize(text)) {
    const auto toks = sentence_tokens(text, sentence, stopwords);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const std::string& w = toks[i].low;
      if (w == "such") {
        if (i + 1 < toks.size() && toks[i + 1].low == "as") {
          // "X such as Y (, Y)* ((and|or) Y)?"
          const NpRange general = np_before(toks, i);
          const auto specifics = np_list_from(toks, i + 2);
          if (!general.empty() && !specifics.empty())
            emit(text, toks, general, specifics, "such-as");
        } else {
          // "such X as Y ..."
          const NpRange general = np_at(toks, i + 1);
          if (!general.empty() && general.end < toks.size() &&
              toks[general.end].low == "as") {
            const auto specifics = np_list_from(toks, general.end + 1);
            if (!specifics.empty())
              emit(text, toks, general, specifics, "such-X-as");
          }
        }
      } else if (w == "including" || w == "especially") {
        const NpRange general = np_before(toks, i);
        const auto specifics = np_list_from(toks, i + 1);
        if (!general.empty() && !specifics.empty())
          emit(text, toks, general, specifics,
               w == "including" ? "including" : "especially");
      } else if ((w == "and" || w == "or") && i + 1 < toks.size() &&
                 toks[i + 1].low == "other") {
        // "Y (, Y)* (and|or) other X"
        const auto specifics = np_list_before(toks, i);
        const NpRange general = np_at(toks, i + 2);
        if (!general.empty() && !specifics.empty())
          emit(text, toks, general, specifics,
               w == "and" ? "and-other" : "or-other");
      }
    }
  }
  return relations;
}

// ---------------------------------------------------------------------------
// NegEx-style negation
// ---------------------------------------------------------------------------

const NegationRuleSet& default_negation_triggers() {
  static const NegationRuleSet kTriggers = {
      {"no", TriggerClass::pre_negation},
      {"not", TriggerClass::pre_negation},
      {"without", TriggerClass::pre_negation},
      {"denies", TriggerClass::pre_negation},
      {"denied", TriggerClass::pre_negation},
      {"deny", TriggerClass::pre_negation},
      {"no evidence of", TriggerClass::pre_negation},
      {"no sign of", TriggerClass::pre_negation},
      {"no signs of", TriggerClass::pre_negation},
      {"absence of", TriggerClass::pre_negation},
      {"negative for", TriggerClass::pre_negation},
      {"free of", TriggerClass::pre_negation},
      {"never had", TriggerClass::pre_negation},
      {"never developed", TriggerClass::pre_negation},
      {"unlikely", TriggerClass::post_negation},
      {"ruled out", TriggerClass::post_negation},
      {"was ruled out", TriggerClass::post_negation},
      {"is ruled out", TriggerClass::post_negation},
      {"absent", TriggerClass::post_negation},
      {"resolved", TriggerClass::post_negation},
      {"no increase", TriggerClass::pseudo_negation},
      {"no change", TriggerClass::pseudo_negation},
      {"no significant change", TriggerClass::pseudo_negation},
      {"no further", TriggerClass::pseudo_negation},
      {"not only", TriggerClass::pseudo_negation},
      {"not necessarily", TriggerClass::pseudo_negation},
      {"not certain if", TriggerClass::pseudo_negation},
      {"not certain whether", TriggerClass::pseudo_negation},
      {"gram negative", TriggerClass::pseudo_negation},
      {"but", TriggerClass::termination},
      {"however", TriggerClass::termination},
      {"except", TriggerClass::termination},
      {"although", TriggerClass::termination},
      {"though", TriggerClass::termination},
      {"yet", TriggerClass::termination},
      {"apart from", TriggerClass::termination},
      {"aside from", TriggerClass::termination},
  };
  return kTriggers;
}

NegationRuleSet load_negation_triggers(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open negation trigger file: " + path);
  NegationRuleSet rules;
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
      throw ConfigError(lineno, "negation trigger line " +
                                    std::to_string(lineno) +
                                    ": expected 'phrase<TAB>class'");
    NegationTrigger trigger;
    trigger.phrase = to_lower(line.substr(0, tab));
    std::string cls = line.substr(tab + 1);
    while (!cls.empty() && is_ascii_space(cls.back())) cls.pop_back();
    if (cls == "PRE_NEG") {
      trigger.kind = TriggerClass::pre_negation;
    } else if (cls == "POST_NEG") {
      trigger.kind = TriggerClass::post_negation;
    } else if (cls == "PSEUDO_NEG") {
      trigger.kind = TriggerClass::pseudo_negation;
    } else if (cls == "TERMINATION") {
      trigger.kind = TriggerClass::termination;
    } else {
      throw ConfigError(lineno, "negation trigger line " +
                                    std::to_string(lineno) +
                                    ": unknown class '" + cls + "'");
    }
    rules.push_back(std::move(trigger));
  }
  return rules;
}

namespace {

constexpr std::size_t kNegationWindow = 5;

struct CompiledTrigger {
  std::vector<std::string> tokens;
  TriggerClass kind;
};

struct TriggerHit {
  std::size_t begin = 0, end = 0;  // token range
  const CompiledTrigger* trigger = nullptr;
};

int trigger_priority(TriggerClass kind) {
  switch (kind) {
    case TriggerClass::pseudo_negation: return 0;
    case TriggerClass::termination: return 1;
    case TriggerClass::pre_negation: return 2;
    case TriggerClass::post_negation: return 3;
  }
  return 4;
}

}  // namespace

std::vector<NegationResult> detect_negation(std::string_view text,
                                            const std::vector<std::string>& targets,
                                            const NegationRuleSet& triggers) {
  if (targets.empty())
    throw ArgumentError("detect_negation: targets must be non-empty");

  std::vector<CompiledTrigger> compiled;
  for (const NegationTrigger& t : triggers) {
    CompiledTrigger c;
    for (const Token& tok : tokenize(t.phrase)) c.tokens.push_back(to_lower(tok.text));
    if (c.tokens.empty()) continue;
    c.kind = t.kind;
    compiled.push_back(std::move(c));
  }
  // longest first; pseudo-negation outranks other classes of equal length
  std::sort(compiled.begin(), compiled.end(),
            [](const CompiledTrigger& a, const CompiledTrigger& b) {
              if (a.tokens.size() != b.tokens.size())
                return a.tokens.size() > b.tokens.size();
              return trigger_priority(a.kind) < trigger_priority(b.kind);
            });

  std::vector<std::vector<std::string>> target_tokens;
  for (const std::string& t : targets) {
    std::vector<std::string> toks;
    for (const Token& tok : tokenize(t)) toks.push_back(to_lower(tok.text));
    target_tokens.push_back(std::move(toks));
  }

  std::vector<NegationResult> results;
  for (const Sentence& sentence : sentencize(text)) {
    const auto toks = sentence_tokens(text, sentence, default_stopwords());
    std::vector<std::string> low(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) low[i] = toks[i].low;

    const auto matches_at = [&](const std::vector<std::string>& phrase,
                                std::size_t pos) {
      if (pos + phrase.size() > low.size()) return false;
      for (std::size_t j = 0; j < phrase.size(); ++j) {
        if (low[pos + j] != phrase[j]) return false;
      }
      return true;
    };

    // non-overlapping trigger hits, longest match first at each position
    std::vector<TriggerHit> hits;
    for (std::size_t i = 0; i < low.size();) {
      const CompiledTrigger* found = nullptr;
      for (const CompiledTrigger& c : compiled) {
        if (matches_at(c.tokens, i)) {
          found = &c;
          break;
        }
      }
      if (found != nullptr) {
        hits.push_back({i, i + found->tokens.size(), found});
        i += found->tokens.size();
      } else {
        ++i;
      }
    }

    const auto termination_between = [&](std::size_t from, std::size_t to) {
      for (const TriggerHit& h : hits) {
        if (h.trigger->kind == TriggerClass::termination && h.begin >= from &&
            h.end <= to)
          return true;
      }
      return false;
    };

    for (std::size_t ti = 0; ti < target_tokens.size(); ++ti) {
      const auto& phrase = target_tokens[ti];
      if (phrase.empty()) continue;
      for (std::size_t pos = 0; pos + phrase.size() <= low.size(); ++pos) {
        if (!matches_at(phrase, pos)) continue;
        const std::size_t tgt_begin = pos, tgt_end = pos + phrase.size();
        NegationResult result;
        result.target = targets[ti];
        result.target_span = {toks[tgt_begin].token.start,
                              toks[tgt_end - 1].token.end};

        const TriggerHit* chosen = nullptr;
        std::size_t chosen_gap = 0;
        for (const TriggerHit& h : hits) {
          std::size_t gap = 0;
          if (h.trigger->kind == TriggerClass::pre_negation) {
            if (h.end > tgt_begin) continue;
            gap = tgt_begin - h.end;
            if (gap >= kNegationWindow) continue;
            if (termination_between(h.end, tgt_begin)) continue;
          } else if (h.trigger->kind == TriggerClass::post_negation) {
            if (h.begin < tgt_end) continue;
            gap = h.begin - tgt_end;
            if (gap >= kNegationWindow) continue;
            if (termination_between(tgt_end, h.begin)) continue;
          } else {
            continue;
          }
          if (chosen == nullptr || gap < chosen_gap) {
            chosen = &h;
            chosen_gap = gap;
          }
        }
        if (chosen != nullptr) {
          result.negated = true;
          Span span{toks[chosen->begin].token.start,
                    toks[chosen->end - 1].token.end};
          result.trigger = std::string(span_text(text, span));
          result.trigger_span = span;
        }
        results.push_back(std::move(result));
      }
    }
  }
  std::sort(results.begin(), results.end(),
            [](const NegationResult& a, const NegationResult& b) {
              if (a.target_span.start != b.target_span.start)
                return a.target_span.start < b.target_span.start;
              return a.target_span.end < b.target_span.end;
            });
  return results;
}

// ---------------------------------------------------------------------------
// Dictionary concept extraction
// ---------------------------------------------------------------------------

namespace {

std::string normalized_key(std::string_view phrase) {
  std::string key;
  for (const Token& t : tokenize(phrase)) {
    if (!key.empty()) key.push_back(' ');
    key += to_lower(t.text);
  }
  return key;
}

}  // namespace

ConceptVocabulary::ConceptVocabulary(const std::vector<ConceptEntry>& entries) {
  for (const ConceptEntry& e : entries) {
    std::string key = normalized_key(e.synonym);
    if (key.empty()) continue;
    const std::size_t tokens =
        1 + static_cast<std::size_t>(std::count(key.begin(), key.end(), ' '));
    max_tokens_ = std::max(max_tokens_, tokens);
    lookup_[key].push_back({e.concept_id, e.canonical_name});
  }
  for (auto& [key, meanings] : lookup_) {
    std::sort(meanings.begin(), meanings.end(),
              [](const Meaning& a, const Meaning& b) {
                return a.concept_id < b.concept_id;
              });
    meanings.erase(std::unique(meanings.begin(), meanings.end(),
                               [](const Meaning& a, const Meaning& b) {
                                 return a.concept_id == b.concept_id &&
                                        a.canonical_name == b.canonical_name;
                               }),
                   meanings.end());
  }
}

ConceptVocabulary ConceptVocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open concept vocabulary file: " + path);
  std::vector<ConceptEntry> entries;
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
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? std::string::npos
                                          : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos || tab1 == 0)
      throw ConfigError(lineno,
                        "concept vocabulary line " + std::to_string(lineno) +
                            ": expected 'concept_id<TAB>name<TAB>synonym'");
    ConceptEntry e;
    e.concept_id = line.substr(0, tab1);
    e.canonical_name = line.substr(tab1 + 1, tab2 - tab1 - 1);
    e.synonym = line.substr(tab2 + 1);
    if (normalized_key(e.synonym).empty())
      throw ConfigError(lineno, "concept vocabulary line " +
                                    std::to_string(lineno) + ": empty synonym");
    entries.push_back(std::move(e));
  }
  return ConceptVocabulary(entries);
}

std::vector<ConceptMatch> extract_concepts(std::string_view text,
                                           const ConceptVocabulary& vocabulary) {
  if (vocabulary.empty()) return {};
  const auto tokens = tokenize(text);
  std::vector<std::string> low(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) low[i] = to_lower(tokens[i].text);

  struct Candidate {
    std::size_t begin = 0, len = 0;
    const ConceptVocabulary::Meaning* meaning = nullptr;
  };
  std::vector<Candidate> candidates;
  const std::size_t max_len = vocabulary.max_tokens();
  for (std::size_t i = 0; i < low.size(); ++i) {
    std::string key;
    for (std::size_t len = 1; len <= max_len && i + len <= low.size(); ++len) {
      if (len > 1) key.push_back(' ');
      key += low[i + len - 1];
      auto it = vocabulary.lookup().find(key);
      if (it != vocabulary.lookup().end()) {
        candidates.push_back({i, len, &it->second.front()});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.len != b.len) return a.len > b.len;
              if (a.begin != b.begin) return a.begin < b.begin;
              return a.meaning->concept_id < b.meaning->concept_id;
            });

  std::vector<bool> taken(low.size(), false);
  std::vector<Candidate> accepted;
  for (const Candidate& c : candidates) {
    bool free = true;
    for (std::size_t j = c.begin; j < c.begin + c.len && free; ++j) {
      free = !taken[j];
    }
    if (!free) continue;
    for (std::size_t j = c.begin; j < c.begin + c.len; ++j) taken[j] = true;
    accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.begin < b.begin;
            });

  std::vector<ConceptMatch> matches;
  for (const Candidate& c : accepted) {
    const Span span{tokens[c.begin].start, tokens[c.begin + c.len - 1].end};
    matches.push_back({c.meaning->concept_id, std::string(span_text(text, span)),
                       span, c.meaning->canonical_name});
  }
  return matches;
}

}  // namespace ehrkit
