#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qurate::textfeat {

// Unicode-aware split on whitespace/punctuation; cased letters lowercased.
// Arabic (and any uncased script) passes through unchanged; no stemming.
std::vector<std::string> tokenize(std::string_view text);

struct Vocabulary {
  std::map<std::string, size_t> index;     // token -> column
  std::vector<std::string> tokens;         // column -> token
  std::vector<size_t> doc_frequency;       // column -> df
  std::vector<double> idf;                 // column -> ln((1+N)/(1+df)) + 1
  size_t doc_count = 0;

  size_t size() const { return tokens.size(); }
};

struct SparseVector {
  std::vector<std::pair<size_t, double>> entries;  // strictly increasing index
  size_t dimension = 0;

  double norm() const;
  double dot(const SparseVector& other) const;
};

// Symmetric cosine matrix over one frame's candidates, stored dense.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(size_t n) : n_(n), data_(n * n, 0.0) {}

  size_t size() const { return n_; }
  double at(size_t i, size_t j) const { return data_[i * n_ + j]; }
  void set(size_t i, size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }

 private:
  size_t n_ = 0;
  std::vector<double> data_;
};

// Vocabulary over tokens with document frequency >= min_df, truncated to the
// max_features highest-df tokens (ties broken lexicographically). Column
// order is lexicographic.
Vocabulary fit_tfidf(const std::vector<std::vector<std::string>>& corpus,
                     size_t min_df = 1, size_t max_features = 20000);

// Raw term count x idf, L2-normalized. OOV tokens are dropped; an all-OOV
// document is the zero vector.
SparseVector transform(const Vocabulary& vocab,
                       const std::vector<std::string>& tokens);

// Raw term counts on vocabulary columns, unnormalized.
SparseVector bow_features(const Vocabulary& vocab,
                          const std::vector<std::string>& tokens);

// Pairwise dot products of L2-normalized vectors. A zero vector has
// similarity 0 with everything, including its own diagonal.
SimilarityMatrix cosine_matrix(const std::vector<SparseVector>& vectors);

// Mean of S_ij over unordered pairs within the subset; 0 when |subset| < 2.
// Throws std::out_of_range for indices outside the matrix.
double mean_pairwise_similarity(const SimilarityMatrix& matrix,
                                const std::vector<size_t>& subset);

// Vocabulary export, one "token\tidf" line per column.
std::string export_vocabulary(const Vocabulary& vocab);

// Dense text dump of a similarity matrix, for debugging small frames.
std::string dump_matrix(const SimilarityMatrix& matrix);

}  // namespace qurate::textfeat
