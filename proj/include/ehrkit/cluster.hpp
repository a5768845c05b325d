#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ehrkit/corpus.hpp"

namespace ehrkit {

// L2-normalized sparse document vector; dimension->weight pairs sorted by
// dimension. `norm` caches the L2 norm of the raw (pre-normalization)
// weights; zero for an empty document.
struct DocVector {
  std::vector<std::pair<std::size_t, double>> weights;
  double norm = 0.0;
};

// TF-IDF vectorizer state. idf(t) = ln((1+N)/(1+df(t))) + 1 with N the
// fitted document count; dimensions are contiguous from 0 in lexicographic
// term order.
struct TfIdfModel {
  std::unordered_map<std::string, std::size_t> vocabulary;
  std::vector<double> idf;
  std::size_t doc_count = 0;
};

// Fits on the given texts (terms are tokenize() output lowercased; tf is the
// raw count; weight tf*idf, then L2-normalized per document). Throws
// ArgumentError when the list is empty or no document yields any term.
std::pair<TfIdfModel, std::vector<DocVector>> tfidf_fit_transform(
    const std::vector<std::string>& texts);

// Vectorizes one text under a fitted model; unseen terms are dropped.
DocVector tfidf_transform(const TfIdfModel& model, const std::string& text);

// Dot product of two normalized sparse vectors (cosine similarity; 0 when
// either vector is empty).
double cosine_similarity(const DocVector& a, const DocVector& b);

struct ClusterResult {
  std::vector<std::size_t> assignments;       // per input vector
  std::vector<std::vector<double>> centroids; // k dense vectors
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> inertia_history;  // one entry per assignment pass
};

// Lloyd K-Means with k-means++ initialization driven by the xorshift64*
// generator. Assignment ties go to the lowest centroid id; an empty cluster
// is reseeded with the point farthest from its assigned centroid. Iterates
// until the largest centroid movement drops below tol or max_iter is
// reached, then performs a final assignment pass so assignments always match
// the returned centroids. Deterministic given (vectors, k, seed). Throws
// ArgumentError unless 1 <= k <= |vectors|.
ClusterResult kmeans(const std::vector<DocVector>& vectors, std::size_t k,
                     std::uint64_t seed, std::size_t max_iter = 100,
                     double tol = 1e-9);

// Extension point: any document-embedding backend (the shipped default is
// TF-IDF) may drive similarity and clustering.
class DocumentEmbedder {
 public:
  virtual ~DocumentEmbedder() = default;
  virtual std::vector<DocVector> embed(const std::vector<std::string>& texts) const = 0;
};

class TfidfEmbedder final : public DocumentEmbedder {
 public:
  std::vector<DocVector> embed(const std::vector<std::string>& texts) const override;
};

struct SimilarDocument {
  std::int64_t row_id = 0;
  double similarity = 0.0;
};

// Cosine similarity of the query record against every other record under an
// embedding fitted on the whole corpus; top-k descending, ties by ascending
// row_id, the query itself excluded. With subject_only, candidates are
// restricted to records sharing the query's subject_id. Throws NotFoundError
// for an unknown row_id and ArgumentError when k < 1.
std::vector<SimilarDocument> top_k_similar(const Corpus& corpus,
                                           std::int64_t query_row_id,
                                           std::size_t k,
                                           bool subject_only = false,
                                           const DocumentEmbedder& embedder =
                                               TfidfEmbedder());

}  // namespace ehrkit
