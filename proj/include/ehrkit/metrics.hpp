#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ehrkit {

using TokenList = std::vector<std::string>;

// Default tokenization for metric inputs: tokenize() + lowercase. Metric
// values are tokenizer-sensitive, so callers may tokenize themselves and
// pass TokenLists directly.
TokenList metric_tokens(std::string_view text);

enum class BleuSmoothing { none, add_one };

struct BleuScore {
  double score = 0.0;
  std::vector<double> precisions;  // modified n-gram precision, n = 1..max_n
  double brevity_penalty = 0.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;  // closest reference length (ties to shorter)
};

// Sentence-level BLEU with per-reference clipping. score =
// bp * exp(sum_n w_n ln p_n) with uniform weights over the scored orders;
// 0 when any unsmoothed p_n is 0. Orders the hypothesis is too short to
// produce are vacuous and excluded from the mean, so an identical hypothesis
// scores 1 whatever its length. add_one smoothing adds 1 to numerator and
// denominator of p_n for n >= 2. Empty hypothesis scores 0 with
// brevity_penalty recorded as 0. Throws ArgumentError when references is
// empty or max_n < 1.
BleuScore bleu(const TokenList& hypothesis,
               const std::vector<TokenList>& references, int max_n = 4,
               BleuSmoothing smoothing = BleuSmoothing::none);

struct BleuSegment {
  TokenList hypothesis;
  std::vector<TokenList> references;
};

// Corpus-level BLEU: n-gram statistics and lengths are aggregated over all
// segments before the ratios are taken (the original corpus definition).
BleuScore bleu_corpus(const std::vector<BleuSegment>& segments, int max_n = 4,
                      BleuSmoothing smoothing = BleuSmoothing::none);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Clipped n-gram overlap; recall against the reference n-gram count,
// precision against the hypothesis n-gram count. Empty side -> all zeros.
RougeScore rouge_n(const TokenList& hypothesis, const TokenList& reference,
                   int n);

// LCS-based ROUGE at summary level (beta = 1).
RougeScore rouge_l(const TokenList& hypothesis, const TokenList& reference);

struct ImprovementInput {
  std::string label;
  double before = 0.0;
  double after = 0.0;
};

struct ImprovementEntry {
  std::string label;
  double before = 0.0;
  double after = 0.0;
  double relative_gain = 0.0;  // percent
};

struct ImprovementReport {
  std::vector<ImprovementEntry> pairs;
  double average_gain = 0.0;  // percent
};

// relative_gain = 100 * (after - before) / before per pair; average_gain is
// the arithmetic mean. Throws ArgumentError when any before <= 0, naming the
// offending pair.
ImprovementReport improvement_report(const std::vector<ImprovementInput>& pairs);

}  // namespace ehrkit
