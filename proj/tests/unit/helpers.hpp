#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qurate/qubo.hpp"
#include "qurate/rng.hpp"
#include "qurate/textfeat.hpp"

namespace test_helpers {

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("qurate_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }

  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Random frame whose similarity matrix comes from random sparse nonnegative
// vectors, cosine-normalized, like TF-IDF rows.
inline qurate::qubo::FrameCandidates random_frame(size_t n, uint64_t seed,
                                                  size_t dim = 24,
                                                  size_t nnz = 6) {
  qurate::Rng rng(seed);
  qurate::qubo::FrameCandidates frame;
  frame.frame = "random";
  std::vector<qurate::textfeat::SparseVector> vectors;
  for (size_t i = 0; i < n; ++i) {
    frame.ids.push_back("c" + std::to_string(i));
    frame.reliabilities.push_back(rng.uniform());
    qurate::textfeat::SparseVector v;
    v.dimension = dim;
    auto support = rng.sample_indices(dim, nnz);
    std::sort(support.begin(), support.end());
    for (size_t j : support) v.entries.emplace_back(j, 0.05 + rng.uniform());
    double norm = v.norm();
    for (auto& [idx, w] : v.entries) w /= norm;
    vectors.push_back(std::move(v));
  }
  frame.similarity = qurate::textfeat::cosine_matrix(vectors);
  return frame;
}

// Frame built from duplicate clusters: `clusters` groups of `per_cluster`
// near-identical vectors plus `singletons` well-separated ones.
inline qurate::qubo::FrameCandidates clustered_frame(size_t clusters,
                                                     size_t per_cluster,
                                                     size_t singletons,
                                                     uint64_t seed) {
  qurate::Rng rng(seed);
  const size_t dim = 4 * (clusters + singletons);
  std::vector<qurate::textfeat::SparseVector> vectors;
  qurate::qubo::FrameCandidates frame;
  frame.frame = "clustered";
  auto add = [&](const std::vector<std::pair<size_t, double>>& entries) {
    qurate::textfeat::SparseVector v;
    v.dimension = dim;
    v.entries = entries;
    double norm = v.norm();
    for (auto& [idx, w] : v.entries) w /= norm;
    frame.ids.push_back("c" + std::to_string(vectors.size()));
    frame.reliabilities.push_back(rng.uniform());
    vectors.push_back(std::move(v));
  };
  for (size_t c = 0; c < clusters; ++c) {
    const size_t base = 4 * c;
    for (size_t m = 0; m < per_cluster; ++m) {
      // shared cluster core plus a tiny member-specific component
      add({{base, 1.0}, {base + 1, 0.9}, {base + 2 + (m % 2), 0.15}});
    }
  }
  for (size_t s = 0; s < singletons; ++s) {
    const size_t base = 4 * (clusters + s);
    add({{base, 1.0}, {base + 1, 0.7}});
  }
  frame.similarity = qurate::textfeat::cosine_matrix(vectors);
  return frame;
}

}  // namespace test_helpers
