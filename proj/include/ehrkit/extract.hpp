#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ehrkit/corpus.hpp"
#include "ehrkit/textseg.hpp"

namespace ehrkit {

struct AbbreviationPair {
  std::string short_form;
  Span short_span;
  std::string long_form;
  Span long_span;
  bool operator==(const AbbreviationPair&) const = default;
};

// Schwartz-Hearst abbreviation pairing. A parenthesized short form (2..10
// characters, at most two words, at least one letter, first character
// alphanumeric) is matched right-to-left against the window of at most
// min(|SF|+5, 2|SF|) words preceding the '(' within the same sentence; every
// alphanumeric short-form character must appear in order, and the first one
// must start a long-form word. Pairs are reported in document order.
std::vector<AbbreviationPair> extract_abbreviations(std::string_view text);

// Replaces standalone occurrences of each short form appearing after its
// defining parenthetical with the long form; the definition site itself is
// untouched. When several short forms could match at one position the
// longest wins; when the same short form was defined more than once the most
// recent preceding definition wins.
std::string expand_abbreviations(std::string_view text,
                                 const std::vector<AbbreviationPair>& pairs);

struct PhraseCandidate {
  std::string phrase;  // space-joined lowercased tokens
  std::size_t frequency = 0;
  double score = 0.0;  // frequency * token length
  bool operator==(const PhraseCandidate&) const = default;
};

// Frequent-phrase mining. Candidates are word-token n-grams (2..max_len)
// that stay inside one sentence, contain no punctuation token and neither
// start nor end with a stopword; candidates below min_freq are dropped.
// Sorted by score descending, ties by phrase. Throws ArgumentError unless
// min_freq >= 1 and max_len >= 2.
std::vector<PhraseCandidate> extract_phrases(
    std::string_view text, std::size_t min_freq, std::size_t max_len,
    const StopwordSet& stopwords = default_stopwords());
std::vector<PhraseCandidate> extract_phrases(
    const Corpus& corpus, std::size_t min_freq, std::size_t max_len,
    const StopwordSet& stopwords = default_stopwords());

struct HyponymRelation {
  std::string general;
  Span general_span;
  std::string specific;
  Span specific_span;
  std::string pattern;  // "such-as", "such-X-as", "including", "especially",
                        // "and-other", "or-other"
  bool operator==(const HyponymRelation&) const = default;
};

// Hearst-pattern matcher over token streams; noun phrases are approximated
// as maximal runs of non-stopword word tokens adjacent to the pattern cue.
std::vector<HyponymRelation> detect_hyponyms(
    std::string_view text, const StopwordSet& stopwords = default_stopwords());

enum class TriggerClass { pre_negation, post_negation, pseudo_negation, termination };

struct NegationTrigger {
  std::string phrase;  // lowercased
  TriggerClass kind = TriggerClass::pre_negation;
};

using NegationRuleSet = std::vector<NegationTrigger>;

const NegationRuleSet& default_negation_triggers();

// UTF-8 TSV "phrase<TAB>class", class in {PRE_NEG, POST_NEG, PSEUDO_NEG,
// TERMINATION}; '#' comments. Throws ConfigError with the line number.
NegationRuleSet load_negation_triggers(const std::string& path);

struct NegationResult {
  std::string target;
  Span target_span;
  bool negated = false;
  std::optional<std::string> trigger;
  std::optional<Span> trigger_span;
};

// NegEx-style negation detection. Within each sentence, a pre-negation
// trigger negates a target that starts within the next 5 tokens unless a
// termination cue intervenes; a post-negation trigger negates backward the
// same way; pseudo-negation phrases absorb their tokens and never negate.
// Longest trigger phrase wins at a position. Every occurrence of every
// target yields one result, in document order. Throws ArgumentError when
// targets is empty.
std::vector<NegationResult> detect_negation(
    std::string_view text, const std::vector<std::string>& targets,
    const NegationRuleSet& triggers = default_negation_triggers());

struct ConceptEntry {
  std::string concept_id;
  std::string canonical_name;
  std::string synonym;
};

// Dictionary of surface strings -> concept ids, keyed by lowercased token
// sequences. Immutable after construction.
class ConceptVocabulary {
 public:
  ConceptVocabulary() = default;
  explicit ConceptVocabulary(const std::vector<ConceptEntry>& entries);

  // UTF-8 TSV "concept_id<TAB>canonical_name<TAB>synonym", one synonym per
  // line; '#' comments. Throws ConfigError with the line number.
  static ConceptVocabulary load(const std::string& path);

  struct Meaning {
    std::string concept_id;
    std::string canonical_name;
  };

  // token-joined lowercased key -> meanings (sorted by concept_id)
  const std::unordered_map<std::string, std::vector<Meaning>>& lookup() const {
    return lookup_;
  }
  std::size_t max_tokens() const { return max_tokens_; }
  bool empty() const { return lookup_.empty(); }

 private:
  std::unordered_map<std::string, std::vector<Meaning>> lookup_;
  std::size_t max_tokens_ = 0;
};

struct ConceptMatch {
  std::string concept_id;
  std::string matched_text;
  Span span;
  std::string canonical_name;
  bool operator==(const ConceptMatch&) const = default;
};

// Case-insensitive longest-match-first dictionary matching over token
// sequences. Candidate matches are ranked by token length descending, then
// start ascending, then concept_id; a candidate overlapping an accepted
// longer (or earlier) match is suppressed. Results in document order.
std::vector<ConceptMatch> extract_concepts(std::string_view text,
                                           const ConceptVocabulary& vocabulary);

}  // namespace ehrkit
