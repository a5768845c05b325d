#include "ehrkit/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>

#include "ehrkit/errors.hpp"
#include "ehrkit/metrics.hpp"

namespace ehrkit {

namespace {

// lowercased non-stopword word tokens of one sentence
std::vector<std::string> content_tokens(std::string_view sentence,
                                        const StopwordSet& stopwords) {
  std::vector<std::string> out;
  for (const Token& t : tokenize(sentence)) {
    if (!is_word_token(t)) continue;
    std::string low = to_lower(t.text);
    if (stopwords.count(low)) continue;
    out.push_back(std::move(low));
  }
  return out;
}

std::vector<std::vector<std::string>> sentence_content_tokens(
    std::string_view text, const std::vector<Sentence>& sentences,
    const StopwordSet& stopwords) {
  std::vector<std::vector<std::string>> out;
  out.reserve(sentences.size());
  for (const Sentence& s : sentences) {
    out.push_back(content_tokens(span_text(text, Span{s.start, s.end}), stopwords));
  }
  return out;
}

std::vector<std::set<std::string>> to_sets(
    const std::vector<std::vector<std::string>>& token_lists) {
  std::vector<std::set<std::string>> sets;
  sets.reserve(token_lists.size());
  for (const auto& tokens : token_lists)
    sets.emplace_back(tokens.begin(), tokens.end());
  return sets;
}

std::size_t set_overlap(const std::set<std::string>& a,
                        const std::set<std::string>& b) {
  const std::set<std::string>& small = a.size() <= b.size() ? a : b;
  const std::set<std::string>& large = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  for (const std::string& t : small) n += large.count(t);
  return n;
}

// Top-k indices by score, ties to the earlier index, output ascending.
std::vector<std::size_t> select_top_k(const std::vector<double>& scores,
                                      std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

ExtractiveSummary assemble_summary(std::string_view text,
                                   const std::vector<Sentence>& sentences,
                                   std::vector<std::size_t> picked) {
  ExtractiveSummary summary;
  summary.sentence_indices = std::move(picked);
  for (std::size_t idx : summary.sentence_indices) {
    summary.origins.emplace_back(0, idx);
    if (!summary.text.empty()) summary.text.push_back(' ');
    summary.text += span_text(
        text, Span{sentences[idx].start, sentences[idx].end});
  }
  return summary;
}

}  // namespace

std::vector<double> textrank_scores(std::string_view text,
                                    const TextRankParams& params) {
  const StopwordSet& stopwords =
      params.stopwords != nullptr ? *params.stopwords : default_stopwords();
  const auto sentences = sentencize(text);
  const std::size_t n = sentences.size();
  std::vector<double> scores(n, 1.0);
  if (n == 0) return scores;

  const auto sets = to_sets(sentence_content_tokens(text, sentences, stopwords));

  // symmetric similarity matrix and node strengths
  std::vector<std::vector<double>> weight(n, std::vector<double>(n, 0.0));
  std::vector<double> strength(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t shared = set_overlap(sets[i], sets[j]);
      if (shared == 0) continue;
      const double denom =
          std::max(std::log(static_cast<double>(sets[i].size())) +
                       std::log(static_cast<double>(sets[j].size())),
                   1e-9);
      const double w = static_cast<double>(shared) / denom;
      weight[i][j] = w;
      weight[j][i] = w;
      strength[i] += w;
      strength[j] += w;
    }
  }

  std::vector<double> next(n, 0.0);
  for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (weight[j][i] > 0.0 && strength[j] > 0.0) {
          acc += weight[j][i] / strength[j] * scores[j];
        }
      }
      next[i] = (1.0 - params.damping) + params.damping * acc;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - scores[i]);
    scores.swap(next);
    if (delta < params.tol) break;
  }
  return scores;
}

ExtractiveSummary textrank_summary(std::string_view text, std::size_t k,
                                   const TextRankParams& params) {
  if (k < 1) throw ArgumentError("textrank_summary: k must be >= 1");
  const auto sentences = sentencize(text);
  if (sentences.empty()) return {};
  const auto scores = textrank_scores(text, params);
  return assemble_summary(text, sentences, select_top_k(scores, k));
}

// ---------------------------------------------------------------------------
// Naive Bayes summarizer
// ---------------------------------------------------------------------------

namespace {

std::size_t bin_of(double value) {
  const auto bin = static_cast<long>(value * 10.0);
  if (bin < 0) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(bin),
                               NbSummarizerModel::kBins - 1);
}

struct SentenceFeatures {
  std::array<std::size_t, NbSummarizerModel::kFeatures> bins{};
};

double isf_weight(const NbSummarizerModel& model, const std::string& term) {
  const auto it = model.sentence_freq.find(term);
  const double df =
      it == model.sentence_freq.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(model.training_sentences)) /
                  (1.0 + df)) +
         1.0;
}

// Features for every sentence of one document, normalized inside it.
std::vector<SentenceFeatures> document_features(
    const NbSummarizerModel& model,
    const std::vector<std::vector<std::string>>& sent_tokens) {
  const std::size_t n = sent_tokens.size();
  std::vector<SentenceFeatures> features(n);
  if (n == 0) return features;

  std::vector<double> lengths(n, 0.0), tfisf(n, 0.0), overlap(n, 0.0);
  double max_len = 0.0, max_tfisf = 0.0;
  const std::set<std::string> first_set(sent_tokens[0].begin(),
                                        sent_tokens[0].end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tokens = sent_tokens[i];
    lengths[i] = static_cast<double>(tokens.size());
    max_len = std::max(max_len, lengths[i]);
    if (!tokens.empty()) {
      std::unordered_map<std::string, std::size_t> tf;
      for (const std::string& t : tokens) ++tf[t];
      double sum = 0.0;
      for (const auto& [term, count] : tf) {
        sum += static_cast<double>(count) * isf_weight(model, term);
      }
      tfisf[i] = sum / static_cast<double>(tf.size());
      max_tfisf = std::max(max_tfisf, tfisf[i]);

      const std::set<std::string> set(tokens.begin(), tokens.end());
      overlap[i] = static_cast<double>(set_overlap(set, first_set)) /
                   static_cast<double>(set.size());
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double pos =
        n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    features[i].bins[0] = bin_of(pos);
    features[i].bins[1] = bin_of(max_len > 0.0 ? lengths[i] / max_len : 0.0);
    features[i].bins[2] = bin_of(max_tfisf > 0.0 ? tfisf[i] / max_tfisf : 0.0);
    features[i].bins[3] = bin_of(overlap[i]);
  }
  return features;
}

// Greedy oracle: repeatedly add the sentence that most increases ROUGE-1
// recall of the selection against the reference (ties to the earlier
// sentence); stop when no sentence strictly increases it.
std::vector<bool> greedy_oracle_labels(
    const std::vector<std::vector<std::string>>& sent_unigrams,
    const TokenList& reference) {
  const std::size_t n = sent_unigrams.size();
  std::vector<bool> positive(n, false);
  std::unordered_map<std::string, std::size_t> ref_counts;
  for (const std::string& t : reference) ++ref_counts[t];
  if (ref_counts.empty()) return positive;

  std::unordered_map<std::string, std::size_t> selected_counts;
  std::size_t current = 0;  // clipped unigram overlap of the selection
  const auto overlap_with = [&](std::size_t idx) {
    auto counts = selected_counts;
    for (const std::string& t : sent_unigrams[idx]) ++counts[t];
    std::size_t total = 0;
    for (const auto& [term, count] : counts) {
      auto it = ref_counts.find(term);
      if (it != ref_counts.end()) total += std::min(count, it->second);
    }
    return total;
  };

  while (true) {
    std::size_t best_idx = n;
    std::size_t best_overlap = current;
    for (std::size_t i = 0; i < n; ++i) {
      if (positive[i]) continue;
      const std::size_t o = overlap_with(i);
      if (o > best_overlap) {
        best_overlap = o;
        best_idx = i;
      }
    }
    if (best_idx == n) break;
    positive[best_idx] = true;
    current = best_overlap;
    for (const std::string& t : sent_unigrams[best_idx]) ++selected_counts[t];
  }
  return positive;
}

}  // namespace

NbSummarizerModel nb_train(const std::vector<std::string>& documents,
                           const std::vector<std::string>& reference_summaries) {
  if (documents.size() != reference_summaries.size()) {
    throw ArgumentError("nb_train: documents and references differ in length");
  }
  if (documents.empty()) {
    throw ArgumentError("nb_train: empty training set");
  }

  NbSummarizerModel model;
  const StopwordSet& stopwords = default_stopwords();

  // pass 1: sentence-frequency statistics over all training sentences
  std::vector<std::vector<std::vector<std::string>>> doc_sent_tokens;
  for (const std::string& doc : documents) {
    auto tokens = sentence_content_tokens(doc, sentencize(doc), stopwords);
    model.training_sentences += tokens.size();
    for (const auto& sent : tokens) {
      const std::set<std::string> distinct(sent.begin(), sent.end());
      for (const std::string& t : distinct) ++model.sentence_freq[t];
    }
    doc_sent_tokens.push_back(std::move(tokens));
  }

  // pass 2: features, oracle labels, counts
  std::array<std::size_t, 2> class_count{};
  std::array<std::array<std::array<std::size_t, NbSummarizerModel::kBins>,
                        NbSummarizerModel::kFeatures>,
             2>
      bin_count{};
  for (std::size_t d = 0; d < documents.size(); ++d) {
    const auto features = document_features(model, doc_sent_tokens[d]);
    // oracle works on the same unigram space as ROUGE-1 (all word tokens)
    std::vector<std::vector<std::string>> sent_unigrams;
    for (const Sentence& s : sentencize(documents[d])) {
      sent_unigrams.push_back(
          metric_tokens(span_text(documents[d], Span{s.start, s.end})));
    }
    const auto labels = greedy_oracle_labels(
        sent_unigrams, metric_tokens(reference_summaries[d]));
    for (std::size_t i = 0; i < features.size(); ++i) {
      const std::size_t cls = labels[i] ? 1 : 0;
      ++class_count[cls];
      for (std::size_t f = 0; f < NbSummarizerModel::kFeatures; ++f) {
        ++bin_count[cls][f][features[i].bins[f]];
      }
    }
  }
  if (class_count[1] == 0) {
    throw TrainingError("nb_train: oracle produced no positive sentences");
  }

  const double total = static_cast<double>(class_count[0] + class_count[1]);
  for (std::size_t c = 0; c < 2; ++c) {
    model.log_prior[c] =
        std::log((static_cast<double>(class_count[c]) + 1.0) / (total + 2.0));
    for (std::size_t f = 0; f < NbSummarizerModel::kFeatures; ++f) {
      for (std::size_t b = 0; b < NbSummarizerModel::kBins; ++b) {
        model.log_cond[c][f][b] = std::log(
            (static_cast<double>(bin_count[c][f][b]) + 1.0) /
            (static_cast<double>(class_count[c]) + NbSummarizerModel::kBins));
      }
    }
  }
  return model;
}

std::vector<std::array<double, 2>> nb_posteriors(const NbSummarizerModel& model,
                                                 std::string_view text) {
  const auto sent_tokens =
      sentence_content_tokens(text, sentencize(text), default_stopwords());
  const auto features = document_features(model, sent_tokens);
  std::vector<std::array<double, 2>> posteriors;
  posteriors.reserve(features.size());
  for (const SentenceFeatures& f : features) {
    std::array<double, 2> log_joint{};
    for (std::size_t c = 0; c < 2; ++c) {
      log_joint[c] = model.log_prior[c];
      for (std::size_t feat = 0; feat < NbSummarizerModel::kFeatures; ++feat) {
        log_joint[c] += model.log_cond[c][feat][f.bins[feat]];
      }
    }
    const double m = std::max(log_joint[0], log_joint[1]);
    const double z =
        std::exp(log_joint[0] - m) + std::exp(log_joint[1] - m);
    posteriors.push_back(
        {std::exp(log_joint[0] - m) / z, std::exp(log_joint[1] - m) / z});
  }
  return posteriors;
}

ExtractiveSummary nb_summarize(const NbSummarizerModel& model,
                               std::string_view text, std::size_t k) {
  if (k < 1) throw ArgumentError("nb_summarize: k must be >= 1");
  const auto sentences = sentencize(text);
  if (sentences.empty()) return {};
  const auto posteriors = nb_posteriors(model, text);
  std::vector<double> scores(posteriors.size());
  for (std::size_t i = 0; i < posteriors.size(); ++i) scores[i] = posteriors[i][1];
  return assemble_summary(text, sentences, select_top_k(scores, k));
}

// ---------------------------------------------------------------------------
// Model serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kModelMagic[] = "EHRNB1\n";
constexpr std::size_t kModelMagicLen = 7;

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw DataError("truncated model file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

void put_double(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(out, bits);
}

double get_double(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double d;
  std::memcpy(&d, &bits, sizeof(d));
  return d;
}

}  // namespace

void save_nb_model(const std::string& path, const NbSummarizerModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model file: " + path);
  out.write(kModelMagic, kModelMagicLen);
  put_u64(out, NbSummarizerModel::kClasses);
  put_u64(out, NbSummarizerModel::kFeatures);
  put_u64(out, NbSummarizerModel::kBins);
  for (double p : model.log_prior) put_double(out, p);
  for (const auto& per_class : model.log_cond) {
    for (const auto& per_feature : per_class) {
      for (double p : per_feature) put_double(out, p);
    }
  }
  put_u64(out, model.training_sentences);
  // deterministic term order
  std::vector<const std::string*> terms;
  terms.reserve(model.sentence_freq.size());
  for (const auto& [term, _] : model.sentence_freq) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  put_u64(out, terms.size());
  for (const std::string* term : terms) {
    put_u64(out, term->size());
    out.write(term->data(), static_cast<std::streamsize>(term->size()));
    put_u64(out, model.sentence_freq.at(*term));
  }
  if (!out) throw IoError("failed while writing model file: " + path);
}

NbSummarizerModel load_nb_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  char magic[kModelMagicLen] = {};
  in.read(magic, kModelMagicLen);
  if (!in || std::memcmp(magic, kModelMagic, kModelMagicLen) != 0) {
    throw DataError("not an EHRNB1 model file: " + path);
  }
  if (get_u64(in) != NbSummarizerModel::kClasses ||
      get_u64(in) != NbSummarizerModel::kFeatures ||
      get_u64(in) != NbSummarizerModel::kBins) {
    throw DataError("model table shape mismatch in " + path);
  }
  NbSummarizerModel model;
  for (double& p : model.log_prior) p = get_double(in);
  for (auto& per_class : model.log_cond) {
    for (auto& per_feature : per_class) {
      for (double& p : per_feature) p = get_double(in);
    }
  }
  model.training_sentences = get_u64(in);
  const std::uint64_t terms = get_u64(in);
  model.sentence_freq.reserve(terms);
  for (std::uint64_t i = 0; i < terms; ++i) {
    const std::uint64_t len = get_u64(in);
    std::string term(len, '\0');
    in.read(term.data(), static_cast<std::streamsize>(len));
    if (!in) throw DataError("truncated model file");
    model.sentence_freq[std::move(term)] = get_u64(in);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Multi-document entry point
// ---------------------------------------------------------------------------

ExtractiveSummary multi_doc_summary(const std::vector<std::string>& texts,
                                    std::size_t k, SummaryMethod method,
                                    const NbSummarizerModel* model,
                                    const TextRankParams& params) {
  if (k < 1) throw ArgumentError("multi_doc_summary: k must be >= 1");
  if (method == SummaryMethod::naive_bayes && model == nullptr) {
    throw ArgumentError("multi_doc_summary: naive_bayes requires a model");
  }
  if (texts.empty()) return {};

  // blank-line joining keeps every per-document sentence boundary intact
  std::string pooled;
  std::vector<std::size_t> doc_sentence_counts;
  std::size_t total_sentences = 0;
  for (const std::string& text : texts) {
    doc_sentence_counts.push_back(sentencize(text).size());
    total_sentences += doc_sentence_counts.back();
    if (!pooled.empty()) pooled += "\n\n";
    pooled += text;
  }
  if (sentencize(pooled).size() != total_sentences) {
    throw std::logic_error("multi_doc_summary: pooled sentence count mismatch");
  }

  ExtractiveSummary summary =
      method == SummaryMethod::textrank
          ? textrank_summary(pooled, k, params)
          : nb_summarize(*model, pooled, k);

  // map pooled ordinals back to (document, sentence) pairs
  summary.origins.clear();
  for (std::size_t pooled_idx : summary.sentence_indices) {
    std::size_t doc = 0, offset = 0;
    while (doc < doc_sentence_counts.size() &&
           pooled_idx >= offset + doc_sentence_counts[doc]) {
      offset += doc_sentence_counts[doc];
      ++doc;
    }
    summary.origins.emplace_back(doc, pooled_idx - offset);
  }
  return summary;
}

std::string abstractive_summarize(AbstractiveBackend& backend,
                                  const std::string& text, std::size_t budget) {
  return backend.summarize(text, budget);
}

}  // namespace ehrkit
