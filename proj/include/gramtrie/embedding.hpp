// Copyright 2026 The Gramtrie Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gramtrie {

/* Knobs of the merge rule. */
struct SimilarityConfig {
  /* Merge when similarity is strictly above tau. */
  double tau = 0.999;
  /* Weight of the frequency penalty; 0 disables it and weighted similarity
   * reduces to plain cosine. */
  double freq_lambda = 0.0;
  /* Frequency at which the penalty saturates. */
  std::uint64_t freq_cap = 1000000;

  /* Raises InvalidInputError unless 0 < tau <= 1, 0 <= freq_lambda <= 1,
   * and freq_cap >= 1. */
  void validate() const;
};

/* Dense row-major matrix of 32-bit float embeddings. Row norms are cached
 * lazily and kept coherent across row moves; any other mutation drops the
 * cache. Not thread-safe for concurrent mutation. */
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /* Zero-initialized rows x dim matrix. dim must be >= 1. */
  EmbeddingMatrix(std::size_t rows, std::size_t dim);
  /* Adopts row-major data; data.size() must equal rows * dim. */
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::span<const float> row(std::size_t i) const;
  void set_row(std::size_t i, std::span<const float> values);

  std::span<const float> raw() const { return data_; }

  /* L2 norm of row i, accumulated in double precision. */
  double norm(std::size_t i) const;

  /* Cosine similarity, accumulated in double precision and clamped to
   * [-1, 1]. Raises DegenerateVectorError when either row has zero norm. */
  double cosine(std::size_t i, std::size_t j) const;

  /* Scales every row to unit norm. Raises DegenerateVectorError naming the
   * first zero row; the matrix is unchanged in that case. */
  void normalize_rows();

  /* cosine(i, j) * (1 - penalty) with
   *   penalty = freq_lambda * min(1, log(1 + min(fi, fj)) / log(1 + freq_cap)).
   * Never exceeds the plain cosine for non-negative cosine. */
  double weighted_similarity(std::size_t i, std::size_t j, std::uint64_t freq_i,
                             std::uint64_t freq_j,
                             const SimilarityConfig& cfg) const;

  /* Upper bound on the error introduced by replacing one row with the
   * other: (1 - cosine(i, j)) * max(norm(i), norm(j)). */
  double merge_loss_bound(std::size_t i, std::size_t j) const;

  /* Copies row src over row dst (norm cache follows). */
  void move_row(std::size_t dst, std::size_t src);

  /* Drops every row at index >= new_rows. */
  void truncate(std::size_t new_rows);

 private:
  void ensure_norms() const;

  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
  mutable std::vector<double> norms_;
  mutable bool norms_valid_ = false;
};

}  // namespace gramtrie
