#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ehrkit/textseg.hpp"

namespace ehrkit {

struct ExtractiveSummary {
  // ordinals into the sentencized source (pooled ordinals for multi-doc),
  // strictly ascending
  std::vector<std::size_t> sentence_indices;
  // (document ordinal, sentence ordinal within that document), aligned with
  // sentence_indices; document 0 for single-document input
  std::vector<std::pair<std::size_t, std::size_t>> origins;
  // selected sentences joined with a single space, in document order
  std::string text;
};

struct TextRankParams {
  double damping = 0.85;
  double tol = 1e-6;
  std::size_t max_iter = 100;
  const StopwordSet* stopwords = nullptr;  // default_stopwords() when null
};

// Per-sentence TextRank scores. The sentence graph uses edge weight
// |shared content tokens| / max(log|Si| + log|Sj|, 1e-9) with content tokens
// the lowercased non-stopword word tokens and |S| the distinct content token
// count; scores iterate s_i = (1-d) + d * sum_j w_ij / strength_j * s_j from
// 1.0 until the L1 change drops below tol or max_iter is reached.
std::vector<double> textrank_scores(std::string_view text,
                                    const TextRankParams& params = {});

// Top-k sentences by TextRank score, ties to the earlier sentence; output in
// document order. k >= sentence count selects everything. Throws
// ArgumentError when k < 1.
ExtractiveSummary textrank_summary(std::string_view text, std::size_t k,
                                   const TextRankParams& params = {});

// Discrete Naive Bayes sentence classifier. Four features, each in [0,1]
// and binned uniformly into 10 bins: relative position, sentence length
// normalized by the document max, mean TF-ISF of content tokens normalized
// by the document max, and content-token overlap with the first sentence.
// ISF statistics come from the training sentences (each sentence is one
// pseudo-document) and are stored with the model.
class NbSummarizerModel {
 public:
  static constexpr std::size_t kClasses = 2;   // 0 = negative, 1 = positive
  static constexpr std::size_t kFeatures = 4;
  static constexpr std::size_t kBins = 10;

  std::array<double, kClasses> log_prior{};
  // [class][feature][bin], Laplace-smoothed (alpha = 1)
  std::array<std::array<std::array<double, kBins>, kFeatures>, kClasses>
      log_cond{};
  std::uint64_t training_sentences = 0;
  std::unordered_map<std::string, std::uint64_t> sentence_freq;

  bool operator==(const NbSummarizerModel&) const = default;
};

// Trains on paired (document, reference summary) texts. Sentences a greedy
// oracle selects (each pick strictly increases ROUGE-1 recall of the running
// selection against the reference) are the positive class. Throws
// ArgumentError on mismatched or empty inputs and TrainingError when no
// sentence is labeled positive.
NbSummarizerModel nb_train(const std::vector<std::string>& documents,
                           const std::vector<std::string>& reference_summaries);

// Per-sentence class posteriors [negative, positive]; each row sums to 1.
std::vector<std::array<double, 2>> nb_posteriors(const NbSummarizerModel& model,
                                                 std::string_view text);

// Top-k sentences by positive-class posterior, ties to the earlier sentence.
ExtractiveSummary nb_summarize(const NbSummarizerModel& model,
                               std::string_view text, std::size_t k);

// Versioned binary model file ("EHRNB1\n" magic, raw IEEE-754 tables);
// round-trips bit-exactly.
void save_nb_model(const std::string& path, const NbSummarizerModel& model);
NbSummarizerModel load_nb_model(const std::string& path);

enum class SummaryMethod { textrank, naive_bayes };

// Pools the sentences of all documents (blank-line joined, per-document
// sentence ranges recorded) and applies the chosen method to the pooled set.
// naive_bayes requires a model. origins report (document, sentence) per pick.
ExtractiveSummary multi_doc_summary(const std::vector<std::string>& texts,
                                    std::size_t k, SummaryMethod method,
                                    const NbSummarizerModel* model = nullptr,
                                    const TextRankParams& params = {});

// Extension point for plugging an external abstractive model runtime behind
// the extractive toolkit. budget is the maximum output length in tokens.
class AbstractiveBackend {
 public:
  virtual ~AbstractiveBackend() = default;
  virtual std::string summarize(const std::string& text, std::size_t budget) = 0;
};

std::string abstractive_summarize(AbstractiveBackend& backend,
                                  const std::string& text, std::size_t budget);

}  // namespace ehrkit
