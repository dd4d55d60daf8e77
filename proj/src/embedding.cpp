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

#include "gramtrie/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "gramtrie/errors.hpp"

namespace gramtrie {

void SimilarityConfig::validate() const {
  if (!(tau > 0.0) || !(tau <= 1.0)) {
    throw InvalidInputError("similarity config: tau must be in (0, 1]");
  }
  if (!(freq_lambda >= 0.0) || !(freq_lambda <= 1.0)) {
    throw InvalidInputError(
        "similarity config: freq_lambda must be in [0, 1]");
  }
  if (freq_cap < 1) {
    throw InvalidInputError("similarity config: freq_cap must be >= 1");
  }
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), data_(rows * dim, 0.0f) {
  if (dim == 0) {
    throw InvalidInputError("embedding matrix: dim must be >= 1");
  }
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim,
                                 std::vector<float> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
  if (dim == 0) {
    throw InvalidInputError("embedding matrix: dim must be >= 1");
  }
  if (data_.size() != rows * dim) {
    throw DimensionMismatchError(
        "embedding matrix: data size does not equal rows * dim");
  }
}

std::span<const float> EmbeddingMatrix::row(std::size_t i) const {
  if (i >= rows_) {
    throw InvalidInputError("embedding matrix: row index out of range");
  }
  return {data_.data() + i * dim_, dim_};
}

void EmbeddingMatrix::set_row(std::size_t i, std::span<const float> values) {
  if (i >= rows_) {
    throw InvalidInputError("embedding matrix: row index out of range");
  }
  if (values.size() != dim_) {
    throw DimensionMismatchError("embedding matrix: row width mismatch");
  }
  std::copy(values.begin(), values.end(), data_.begin() + i * dim_);
  norms_valid_ = false;
}

void EmbeddingMatrix::ensure_norms() const {
  if (norms_valid_) return;
  norms_.assign(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const float* r = data_.data() + i * dim_;
    double acc = 0.0;
    for (std::size_t t = 0; t < dim_; ++t) {
      acc += static_cast<double>(r[t]) * static_cast<double>(r[t]);
    }
    norms_[i] = std::sqrt(acc);
  }
  norms_valid_ = true;
}

double EmbeddingMatrix::norm(std::size_t i) const {
  if (i >= rows_) {
    throw InvalidInputError("embedding matrix: row index out of range");
  }
  ensure_norms();
  return norms_[i];
}

double EmbeddingMatrix::cosine(std::size_t i, std::size_t j) const {
  double ni = norm(i);
  double nj = norm(j);
  if (ni == 0.0 || nj == 0.0) {
    throw DegenerateVectorError("cosine: row " +
                                std::to_string(ni == 0.0 ? i : j) +
                                " has zero norm");
  }
  const float* a = data_.data() + i * dim_;
  const float* b = data_.data() + j * dim_;
  double dot = 0.0;
  for (std::size_t t = 0; t < dim_; ++t) {
    dot += static_cast<double>(a[t]) * static_cast<double>(b[t]);
  }
  double value = dot / (ni * nj);
  return std::clamp(value, -1.0, 1.0);
}

void EmbeddingMatrix::normalize_rows() {
  ensure_norms();
  for (std::size_t i = 0; i < rows_; ++i) {
    if (norms_[i] == 0.0) {
      throw DegenerateVectorError("normalize_rows: row " + std::to_string(i) +
                                  " has zero norm");
    }
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    float* r = data_.data() + i * dim_;
    double inv = 1.0 / norms_[i];
    for (std::size_t t = 0; t < dim_; ++t) {
      r[t] = static_cast<float>(static_cast<double>(r[t]) * inv);
    }
  }
  norms_valid_ = false;
}

double EmbeddingMatrix::weighted_similarity(std::size_t i, std::size_t j,
                                            std::uint64_t freq_i,
                                            std::uint64_t freq_j,
                                            const SimilarityConfig& cfg) const {
  double sim = cosine(i, j);
  if (cfg.freq_lambda == 0.0) return sim;
  double f = static_cast<double>(std::min(freq_i, freq_j));
  double saturation =
      std::log1p(f) / std::log1p(static_cast<double>(cfg.freq_cap));
  double penalty = cfg.freq_lambda * std::min(1.0, saturation);
  return sim * (1.0 - penalty);
}

double EmbeddingMatrix::merge_loss_bound(std::size_t i, std::size_t j) const {
  double sim = cosine(i, j);
  return (1.0 - sim) * std::max(norm(i), norm(j));
}

void EmbeddingMatrix::move_row(std::size_t dst, std::size_t src) {
  if (dst >= rows_ || src >= rows_) {
    throw InvalidInputError("embedding matrix: row index out of range");
  }
  if (dst == src) return;
  std::memcpy(data_.data() + dst * dim_, data_.data() + src * dim_,
              dim_ * sizeof(float));
  if (norms_valid_) norms_[dst] = norms_[src];
}

void EmbeddingMatrix::truncate(std::size_t new_rows) {
  if (new_rows > rows_) {
    throw InvalidInputError("embedding matrix: cannot truncate upward");
  }
  rows_ = new_rows;
  data_.resize(rows_ * dim_);
  if (norms_valid_) norms_.resize(rows_);
}

}  // namespace gramtrie
