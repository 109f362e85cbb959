#include "qurate/textfeat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "qurate/text_norm.hpp"
#include "qurate/util.hpp"

namespace qurate::textfeat {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : utf8_decode(text)) {
    if (is_token_break(cp)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      continue;
    }
    utf8_append(current, to_lower(cp));
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double SparseVector::norm() const {
  double s = 0.0;
  for (const auto& [i, w] : entries) s += w * w;
  return std::sqrt(s);
}

double SparseVector::dot(const SparseVector& other) const {
  if (dimension != other.dimension)
    throw std::invalid_argument("sparse vector dimension mismatch");
  double s = 0.0;
  size_t a = 0, b = 0;
  while (a < entries.size() && b < other.entries.size()) {
    size_t ia = entries[a].first;
    size_t ib = other.entries[b].first;
    if (ia == ib) {
      s += entries[a].second * other.entries[b].second;
      ++a;
      ++b;
    } else if (ia < ib) {
      ++a;
    } else {
      ++b;
    }
  }
  return s;
}

Vocabulary fit_tfidf(const std::vector<std::vector<std::string>>& corpus,
                     size_t min_df, size_t max_features) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  std::unordered_map<std::string, size_t> df;
  for (const auto& doc : corpus) {
    std::unordered_map<std::string, bool> seen;
    for (const auto& tok : doc) {
      if (!seen.emplace(tok, true).second) continue;
      ++df[tok];
    }
  }
  std::vector<std::pair<std::string, size_t>> kept;
  kept.reserve(df.size());
  for (auto& [tok, count] : df) {
    if (count >= min_df) kept.emplace_back(tok, count);
  }
  if (kept.size() > max_features) {
    // highest df first, lexicographic among equals, then cut
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    kept.resize(max_features);
  }
  std::sort(kept.begin(), kept.end());

  Vocabulary vocab;
  vocab.doc_count = corpus.size();
  vocab.tokens.reserve(kept.size());
  vocab.doc_frequency.reserve(kept.size());
  vocab.idf.reserve(kept.size());
  const double n = static_cast<double>(corpus.size());
  for (auto& [tok, count] : kept) {
    vocab.index.emplace(tok, vocab.tokens.size());
    vocab.tokens.push_back(tok);
    vocab.doc_frequency.push_back(count);
    vocab.idf.push_back(std::log((1.0 + n) / (1.0 + double(count))) + 1.0);
  }
  return vocab;
}

namespace {

std::vector<std::pair<size_t, double>> term_counts(
    const Vocabulary& vocab, const std::vector<std::string>& tokens) {
  std::unordered_map<size_t, double> counts;
  for (const auto& tok : tokens) {
    auto it = vocab.index.find(tok);
    if (it == vocab.index.end()) continue;
    counts[it->second] += 1.0;
  }
  std::vector<std::pair<size_t, double>> entries(counts.begin(), counts.end());
  std::sort(entries.begin(), entries.end());
  return entries;
}

}  // namespace

SparseVector transform(const Vocabulary& vocab,
                       const std::vector<std::string>& tokens) {
  SparseVector v;
  v.dimension = vocab.size();
  v.entries = term_counts(vocab, tokens);
  for (auto& [i, w] : v.entries) w *= vocab.idf[i];
  double norm = v.norm();
  if (norm > 0.0) {
    for (auto& [i, w] : v.entries) w /= norm;
  }
  return v;
}

SparseVector bow_features(const Vocabulary& vocab,
                          const std::vector<std::string>& tokens) {
  SparseVector v;
  v.dimension = vocab.size();
  v.entries = term_counts(vocab, tokens);
  return v;
}

SimilarityMatrix cosine_matrix(const std::vector<SparseVector>& vectors) {
  const size_t n = vectors.size();
  SimilarityMatrix m(n);
  for (size_t i = 0; i < n; ++i) {
    if (i > 0 && vectors[i].dimension != vectors[0].dimension)
      throw std::invalid_argument("cosine_matrix: dimension mismatch");
    bool zero_i = vectors[i].entries.empty();
    m.set(i, i, zero_i ? 0.0 : 1.0);
    for (size_t j = i + 1; j < n; ++j) {
      m.set(i, j, vectors[i].dot(vectors[j]));
    }
  }
  return m;
}

double mean_pairwise_similarity(const SimilarityMatrix& matrix,
                                const std::vector<size_t>& subset) {
  if (subset.size() < 2) return 0.0;
  double total = 0.0;
  for (size_t a = 0; a < subset.size(); ++a) {
    if (subset[a] >= matrix.size())
      throw std::out_of_range("subset id outside similarity matrix");
    for (size_t b = a + 1; b < subset.size(); ++b) {
      total += matrix.at(subset[a], subset[b]);
    }
  }
  const double pairs = 0.5 * double(subset.size()) * double(subset.size() - 1);
  return total / pairs;
}

std::string export_vocabulary(const Vocabulary& vocab) {
  std::string out;
  for (size_t i = 0; i < vocab.size(); ++i) {
    out += vocab.tokens[i];
    out += '\t';
    out += fmt_double(vocab.idf[i]);
    out += '\n';
  }
  return out;
}

std::string dump_matrix(const SimilarityMatrix& matrix) {
  std::string out;
  for (size_t i = 0; i < matrix.size(); ++i) {
    for (size_t j = 0; j < matrix.size(); ++j) {
      if (j) out += '\t';
      out += fmt_double(matrix.at(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace qurate::textfeat
