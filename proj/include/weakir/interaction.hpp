#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "weakir/embedding.hpp"
#include "weakir/tokenize.hpp"

namespace weakir {

/// Row-major |q| x |d| matrix of query-term/document-term similarities.
struct SimilarityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cells;

  double at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
  double& at(std::size_t i, std::size_t j) { return cells[i * cols + j]; }
};

/// Fixed-length mock interaction embedding. `values` always has the padded
/// length; entries past active_length are exactly 0.0.
struct InteractionVector {
  std::vector<double> values;
  std::size_t active_length = 0;
  bool operator==(const InteractionVector&) const = default;
};

/// cell[i][j] = cosine of the word embeddings of q[i] and d[j]. Equal token
/// strings score 1.0 regardless of the vocabulary; otherwise a pair with an
/// out-of-vocabulary side scores 0.0. Cells are clamped to [-1, 1].
inline SimilarityMatrix similarity_matrix(const Tokens& q, const Tokens& d,
                                          const EmbeddingTable& emb) {
  if (q.empty() || d.empty())
    throw std::invalid_argument("similarity_matrix requires non-empty token lists");
  SimilarityMatrix sim;
  sim.rows = q.size();
  sim.cols = d.size();
  sim.cells.resize(sim.rows * sim.cols, 0.0);
  std::vector<const std::vector<double>*> doc_vectors(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) doc_vectors[j] = emb.find(d[j]);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const std::vector<double>* query_vector = emb.find(q[i]);
    for (std::size_t j = 0; j < d.size(); ++j) {
      double cell = 0.0;
      if (q[i] == d[j]) {
        cell = 1.0;
      } else if (query_vector != nullptr && doc_vectors[j] != nullptr) {
        cell = std::clamp(cosine(*query_vector, *doc_vectors[j]), -1.0, 1.0);
      }
      sim.at(i, j) = cell;
    }
  }
  return sim;
}

/// Keeps only the maximum similarity per query term (the max-pooling step),
/// zero-padded to `pad` entries; rows beyond `pad` are truncated.
inline InteractionVector pool_row_maxima(const SimilarityMatrix& sim, std::size_t pad) {
  if (pad < 1) throw std::invalid_argument("pad length must be >= 1");
  InteractionVector ivec;
  ivec.values.assign(pad, 0.0);
  ivec.active_length = std::min(sim.rows, pad);
  for (std::size_t i = 0; i < ivec.active_length; ++i) {
    double best = sim.at(i, 0);
    for (std::size_t j = 1; j < sim.cols; ++j) best = std::max(best, sim.at(i, j));
    ivec.values[i] = best;
  }
  return ivec;
}

/// Mock interaction embedding for a query-document pair: the per-query-term
/// maxima of the similarity matrix, padded to a fixed length so pairs of any
/// size are comparable.
inline InteractionVector mock_embedding(const Tokens& q, const Tokens& d,
                                        const EmbeddingTable& emb, std::size_t pad) {
  return pool_row_maxima(similarity_matrix(q, d, emb), pad);
}

/// Circular rotation: element i of the input lands at position (i + s) mod l,
/// so shift([1,2,3], 1) = [3,1,2]. s must lie in [0, length).
inline std::vector<double> shift(std::span<const double> vec, std::size_t s) {
  if (s >= vec.size()) throw std::out_of_range("shift amount out of range");
  const std::size_t l = vec.size();
  std::vector<double> rotated(l);
  for (std::size_t i = 0; i < l; ++i) rotated[i] = vec[(i + l - s) % l];
  return rotated;
}

inline double mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("mse: length mismatch");
  if (a.empty()) throw std::invalid_argument("mse: vectors must be non-empty");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum / static_cast<double>(a.size());
}

/// Aligned mean squared error: the minimum MSE over all circular rotations
/// of b, making the distance independent of where interaction mass sits.
inline double amse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("amse: length mismatch");
  if (a.empty()) throw std::invalid_argument("amse: vectors must be non-empty");
  const std::size_t l = a.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < l; ++s) {
    double sum = 0.0;
    for (std::size_t k = 0; k < l; ++k) {
      const double diff = a[k] - b[(k + l - s) % l];
      sum += diff * diff;
    }
    best = std::min(best, sum / static_cast<double>(l));
  }
  return best;
}

inline double amse(const InteractionVector& a, const InteractionVector& b) {
  return amse(std::span<const double>(a.values), std::span<const double>(b.values));
}

}  // namespace weakir
