#include "ehrkit/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ehrkit/errors.hpp"
#include "ehrkit/rng.hpp"
#include "ehrkit/textseg.hpp"

namespace ehrkit {

std::pair<TfIdfModel, std::vector<DocVector>> tfidf_fit_transform(
    const std::vector<std::string>& texts) {
  if (texts.empty()) {
    throw ArgumentError("tfidf_fit_transform: empty document list");
  }

  std::vector<std::map<std::string, std::size_t>> term_counts(texts.size());
  std::map<std::string, std::size_t> doc_freq;
  for (std::size_t d = 0; d < texts.size(); ++d) {
    for (const Token& t : tokenize(texts[d])) {
      ++term_counts[d][to_lower(t.text)];
    }
    for (const auto& [term, _] : term_counts[d]) ++doc_freq[term];
  }
  if (doc_freq.empty()) {
    throw ArgumentError("tfidf_fit_transform: all documents are empty");
  }

  TfIdfModel model;
  model.doc_count = texts.size();
  model.idf.reserve(doc_freq.size());
  for (const auto& [term, df] : doc_freq) {  // lexicographic dimension order
    model.vocabulary.emplace(term, model.idf.size());
    model.idf.push_back(
        std::log((1.0 + static_cast<double>(model.doc_count)) /
                 (1.0 + static_cast<double>(df))) +
        1.0);
  }

  std::vector<DocVector> vectors;
  vectors.reserve(texts.size());
  for (const auto& counts : term_counts) {
    DocVector vec;
    vec.weights.reserve(counts.size());
    double sq = 0.0;
    for (const auto& [term, tf] : counts) {  // map order == dimension order
      const std::size_t dim = model.vocabulary.at(term);
      const double w = static_cast<double>(tf) * model.idf[dim];
      vec.weights.emplace_back(dim, w);
      sq += w * w;
    }
    vec.norm = std::sqrt(sq);
    if (vec.norm > 0.0) {
      for (auto& [dim, w] : vec.weights) w /= vec.norm;
    }
    vectors.push_back(std::move(vec));
  }
  return {std::move(model), std::move(vectors)};
}

DocVector tfidf_transform(const TfIdfModel& model, const std::string& text) {
  std::map<std::string, std::size_t> counts;
  for (const Token& t : tokenize(text)) ++counts[to_lower(t.text)];
  DocVector vec;
  double sq = 0.0;
  std::map<std::size_t, double> by_dim;
  for (const auto& [term, tf] : counts) {
    auto it = model.vocabulary.find(term);
    if (it == model.vocabulary.end()) continue;
    const double w = static_cast<double>(tf) * model.idf[it->second];
    by_dim[it->second] = w;
    sq += w * w;
  }
  vec.norm = std::sqrt(sq);
  for (const auto& [dim, w] : by_dim) {
    vec.weights.emplace_back(dim, vec.norm > 0.0 ? w / vec.norm : w);
  }
  return vec;
}

double cosine_similarity(const DocVector& a, const DocVector& b) {
  double dot = 0.0;
  auto ia = a.weights.begin();
  auto ib = b.weights.begin();
  while (ia != a.weights.end() && ib != b.weights.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return dot;
}

namespace {

std::size_t vector_dimension(const std::vector<DocVector>& vectors) {
  std::size_t dim = 0;
  for (const DocVector& v : vectors) {
    if (!v.weights.empty()) dim = std::max(dim, v.weights.back().first + 1);
  }
  return dim;
}

double sq_dist_to_centroid(const DocVector& v,
                           const std::vector<double>& centroid,
                           double centroid_sq) {
  // |v|^2 - 2 v.c + |c|^2 with |v|^2 = 1 for normalized non-empty vectors
  double vsq = 0.0, dot = 0.0;
  for (const auto& [dim, w] : v.weights) {
    vsq += w * w;
    dot += w * centroid[dim];
  }
  const double d2 = vsq - 2.0 * dot + centroid_sq;
  return d2 > 0.0 ? d2 : 0.0;
}

}  // namespace

ClusterResult kmeans(const std::vector<DocVector>& vectors, std::size_t k,
                     std::uint64_t seed, std::size_t max_iter, double tol) {
  const std::size_t n = vectors.size();
  if (k < 1 || k > n) {
    throw ArgumentError("kmeans: k must satisfy 1 <= k <= number of vectors");
  }
  const std::size_t dim = vector_dimension(vectors);
  Rng rng(seed);

  const auto densify = [&](const DocVector& v) {
    std::vector<double> dense(dim, 0.0);
    for (const auto& [d, w] : v.weights) dense[d] = w;
    return dense;
  };
  const auto squared_norm = [](const std::vector<double>& c) {
    double sq = 0.0;
    for (double x : c) sq += x * x;
    return sq;
  };

  // k-means++ seeding
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  centroids.push_back(densify(vectors[rng.next_below(n)]));
  std::vector<double> d2(n, 0.0);
  while (centroids.size() < k) {
    const double csq = squared_norm(centroids.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = sq_dist_to_centroid(vectors[i], centroids.back(), csq);
      if (centroids.size() == 1 || d < d2[i]) d2[i] = d;
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double u = rng.next_double() * total;
      double cum = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.next_below(n));
    }
    centroids.push_back(densify(vectors[pick]));
  }

  ClusterResult result;
  result.assignments.assign(n, 0);

  const auto assign_all = [&]() {
    std::vector<double> csq(k);
    for (std::size_t c = 0; c < k; ++c) csq[c] = squared_norm(centroids[c]);
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = sq_dist_to_centroid(vectors[i], centroids[0], csq[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = sq_dist_to_centroid(vectors[i], centroids[c], csq[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      result.assignments[i] = best;
      inertia += best_d;
    }
    return inertia;
  };

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    result.inertia_history.push_back(assign_all());
    result.iterations = iter + 1;

    // recompute centroids as cluster means
    std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = result.assignments[i];
      ++sizes[c];
      for (const auto& [d, w] : vectors[i].weights) next[c][d] += w;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        for (double& x : next[c]) x /= static_cast<double>(sizes[c]);
      }
    }
    // reseed empty clusters with the points farthest from their centroids
    std::vector<bool> used(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::vector<double> csq(k);
      for (std::size_t cc = 0; cc < k; ++cc) csq[cc] = squared_norm(centroids[cc]);
      std::size_t farthest = 0;
      double farthest_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const std::size_t a = result.assignments[i];
        const double d = sq_dist_to_centroid(vectors[i], centroids[a], csq[a]);
        if (d > farthest_d) {
          farthest_d = d;
          farthest = i;
        }
      }
      used[farthest] = true;
      next[c] = densify(vectors[farthest]);
    }

    double moved = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double sq = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = next[c][d] - centroids[c][d];
        sq += diff * diff;
      }
      moved = std::max(moved, std::sqrt(sq));
    }
    centroids.swap(next);
    if (moved < tol) break;
  }

  // final pass so assignments and inertia match the returned centroids
  result.inertia = assign_all();
  result.inertia_history.push_back(result.inertia);
  result.centroids = std::move(centroids);
  return result;
}

std::vector<DocVector> TfidfEmbedder::embed(
    const std::vector<std::string>& texts) const {
  return tfidf_fit_transform(texts).second;
}

std::vector<SimilarDocument> top_k_similar(const Corpus& corpus,
                                           std::int64_t query_row_id,
                                           std::size_t k, bool subject_only,
                                           const DocumentEmbedder& embedder) {
  if (k < 1) throw ArgumentError("top_k_similar: k must be >= 1");
  const auto query_pos = corpus.position_of(query_row_id);
  if (!query_pos) {
    throw NotFoundError(query_row_id,
                        "no record with row_id " + std::to_string(query_row_id));
  }
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const NoteRecord& r : corpus.records()) texts.push_back(r.text);
  const auto vectors = embedder.embed(texts);

  const std::int64_t subject = corpus.records()[*query_pos].subject_id;
  std::vector<SimilarDocument> scored;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (i == *query_pos) continue;
    if (subject_only && corpus.records()[i].subject_id != subject) continue;
    scored.push_back({corpus.records()[i].row_id,
                      cosine_similarity(vectors[*query_pos], vectors[i])});
  }
  std::sort(scored.begin(), scored.end(),
            [](const SimilarDocument& a, const SimilarDocument& b) {
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              return a.row_id < b.row_id;
            });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

}  // namespace ehrkit
