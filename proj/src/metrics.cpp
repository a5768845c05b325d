#include "ehrkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_map>

#include "ehrkit/errors.hpp"
#include "ehrkit/textseg.hpp"

namespace ehrkit {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

// n-grams keyed by their tokens joined with \x1f (absent from tokens, which
// never contain whitespace-adjacent control bytes in practice).
NgramCounts ngram_counts(const TokenList& tokens, std::size_t n) {
  NgramCounts counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

struct NgramStats {
  std::size_t clipped = 0;  // matches after per-reference clipping
  std::size_t total = 0;    // hypothesis n-gram count
};

NgramStats bleu_ngram_stats(const TokenList& hyp,
                            const std::vector<TokenList>& refs, std::size_t n) {
  NgramStats stats;
  const NgramCounts hyp_counts = ngram_counts(hyp, n);
  std::vector<NgramCounts> ref_counts;
  ref_counts.reserve(refs.size());
  for (const TokenList& ref : refs) ref_counts.push_back(ngram_counts(ref, n));
  for (const auto& [gram, count] : hyp_counts) {
    std::size_t max_ref = 0;
    for (const NgramCounts& rc : ref_counts) {
      auto it = rc.find(gram);
      if (it != rc.end()) max_ref = std::max(max_ref, it->second);
    }
    stats.clipped += std::min(count, max_ref);
    stats.total += count;
  }
  return stats;
}

std::size_t closest_ref_length(std::size_t hyp_len,
                               const std::vector<TokenList>& refs) {
  std::size_t best = refs.front().size();
  for (const TokenList& ref : refs) {
    const std::size_t len = ref.size();
    const auto diff = [&](std::size_t l) {
      return l > hyp_len ? l - hyp_len : hyp_len - l;
    };
    if (diff(len) < diff(best) || (diff(len) == diff(best) && len < best)) {
      best = len;
    }
  }
  return best;
}

BleuScore bleu_from_stats(const std::vector<NgramStats>& stats,
                          std::size_t hyp_len, std::size_t ref_len, int max_n,
                          BleuSmoothing smoothing) {
  BleuScore score;
  score.hyp_length = hyp_len;
  score.ref_length = ref_len;
  score.precisions.assign(static_cast<std::size_t>(max_n), 0.0);
  if (hyp_len == 0) {
    score.brevity_penalty = 0.0;
    return score;
  }
  score.brevity_penalty =
      hyp_len > ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len) /
                               static_cast<double>(hyp_len));
  // orders the hypothesis is too short to produce are vacuous and excluded
  // from the geometric mean (so that an identical hypothesis always scores 1)
  int effective_n = 0;
  for (int n = 1; n <= max_n; ++n) {
    if (stats[static_cast<std::size_t>(n - 1)].total > 0) effective_n = n;
  }
  double log_sum = 0.0;
  bool zero = effective_n == 0;
  for (int n = 1; n <= max_n; ++n) {
    const NgramStats& s = stats[static_cast<std::size_t>(n - 1)];
    double num = static_cast<double>(s.clipped);
    double den = static_cast<double>(s.total);
    if (smoothing == BleuSmoothing::add_one && n >= 2) {
      num += 1.0;
      den += 1.0;
    }
    const double p = s.total > 0 ? num / den : 0.0;
    score.precisions[static_cast<std::size_t>(n - 1)] = p;
    if (n > effective_n) continue;
    if (p > 0.0) {
      log_sum += std::log(p);
    } else {
      zero = true;
    }
  }
  if (!zero) {
    score.score = score.brevity_penalty * std::exp(log_sum / effective_n);
  }
  return score;
}

}  // namespace

TokenList metric_tokens(std::string_view text) {
  TokenList tokens;
  for (const Token& t : tokenize(text)) tokens.push_back(to_lower(t.text));
  return tokens;
}

BleuScore bleu(const TokenList& hypothesis,
               const std::vector<TokenList>& references, int max_n,
               BleuSmoothing smoothing) {
  return bleu_corpus({{hypothesis, references}}, max_n, smoothing);
}

BleuScore bleu_corpus(const std::vector<BleuSegment>& segments, int max_n,
                      BleuSmoothing smoothing) {
  if (max_n < 1) throw ArgumentError("bleu max_n must be >= 1");
  for (const BleuSegment& seg : segments) {
    if (seg.references.empty())
      throw ArgumentError("bleu requires at least one reference per segment");
  }
  std::vector<NgramStats> stats(static_cast<std::size_t>(max_n));
  std::size_t hyp_len = 0, ref_len = 0;
  for (const BleuSegment& seg : segments) {
    hyp_len += seg.hypothesis.size();
    ref_len += closest_ref_length(seg.hypothesis.size(), seg.references);
    for (int n = 1; n <= max_n; ++n) {
      NgramStats s = bleu_ngram_stats(seg.hypothesis, seg.references,
                                      static_cast<std::size_t>(n));
      stats[static_cast<std::size_t>(n - 1)].clipped += s.clipped;
      stats[static_cast<std::size_t>(n - 1)].total += s.total;
    }
  }
  return bleu_from_stats(stats, hyp_len, ref_len, max_n, smoothing);
}

RougeScore rouge_n(const TokenList& hypothesis, const TokenList& reference,
                   int n) {
  if (n < 1) throw ArgumentError("rouge_n requires n >= 1");
  RougeScore score;
  const std::size_t un = static_cast<std::size_t>(n);
  if (hypothesis.size() < un || reference.size() < un) return score;
  const NgramCounts hyp = ngram_counts(hypothesis, un);
  const NgramCounts ref = ngram_counts(reference, un);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : hyp) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  const std::size_t hyp_total = hypothesis.size() - un + 1;
  const std::size_t ref_total = reference.size() - un + 1;
  score.precision = static_cast<double>(overlap) / static_cast<double>(hyp_total);
  score.recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  if (score.precision + score.recall > 0.0) {
    score.f1 = 2.0 * score.precision * score.recall /
               (score.precision + score.recall);
  }
  return score;
}

RougeScore rouge_l(const TokenList& hypothesis, const TokenList& reference) {
  RougeScore score;
  if (hypothesis.empty() || reference.empty()) return score;
  const std::size_t m = hypothesis.size(), n = reference.size();
  // single-row LCS DP
  std::vector<std::size_t> prev(n + 1, 0), curr(n + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (hypothesis[i - 1] == reference[j - 1]) {
        curr[j] = prev[j - 1] + 1;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    std::swap(prev, curr);
  }
  const std::size_t lcs = prev[n];
  score.precision = static_cast<double>(lcs) / static_cast<double>(m);
  score.recall = static_cast<double>(lcs) / static_cast<double>(n);
  if (score.precision + score.recall > 0.0) {
    score.f1 = 2.0 * score.precision * score.recall /
               (score.precision + score.recall);
  }
  return score;
}

ImprovementReport improvement_report(
    const std::vector<ImprovementInput>& pairs) {
  ImprovementReport report;
  double sum = 0.0;
  for (const ImprovementInput& in : pairs) {
    if (!(in.before > 0.0)) {
      throw ArgumentError("improvement_report: pair '" + in.label +
                          "' has non-positive before value");
    }
    ImprovementEntry entry;
    entry.label = in.label;
    entry.before = in.before;
    entry.after = in.after;
    entry.relative_gain = 100.0 * (in.after - in.before) / in.before;
    sum += entry.relative_gain;
    report.pairs.push_back(std::move(entry));
  }
  report.average_gain =
      report.pairs.empty() ? 0.0 : sum / static_cast<double>(report.pairs.size());
  return report;
}

}  // namespace ehrkit
