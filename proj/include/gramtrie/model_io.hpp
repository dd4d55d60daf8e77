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
#include <string>
#include <vector>

#include "gramtrie/datrie.hpp"
#include "gramtrie/embedding.hpp"
#include "gramtrie/ngram.hpp"

namespace gramtrie {

struct ModelMeta {
  std::uint8_t format_version = 1;
  std::uint32_t dim = 0;
  std::uint64_t gram_count = 0;    /* keys in the trie */
  std::uint64_t unique_count = 0;  /* rows in the matrix */
  float tau = 0.999f;
  std::uint8_t n_min = 2;
  std::uint8_t n_max = 6;
};

/* A compressed gram table: the trie maps gram bytes to row ids in [0, k),
 * several grams may share a row, and meta records how the model was built. */
struct CompressedModel {
  DoubleArrayTrie trie;
  EmbeddingMatrix matrix;
  ModelMeta meta;
};

/* Structural invariants: counts match the trie and matrix, every terminal
 * id is < unique_count, unique_count <= gram_count, both >= 1. Raises
 * ModelFormatError on the first violation. */
void validate_model(const CompressedModel& model);

/* Reads word2vec-style text vectors: a "count dim" header line, then one
 * line per gram with the token followed by dim floats. Tokens are returned
 * sorted ascending by byte order with rows permuted to match. Malformed
 * headers or rows, wrong float counts, and duplicate tokens raise
 * ParseError with the line number; unreadable files raise IoError. */
struct TextVectors {
  std::vector<std::string> tokens;
  EmbeddingMatrix matrix;
};
TextVectors load_text_vectors(const std::string& path);

/* Writes the same format with %.6f components, one row per gram. */
void save_text_vectors(const std::string& path,
                       const std::vector<std::string>& tokens,
                       const EmbeddingMatrix& matrix);

/* Binary model format ("GTRI", little-endian):
 *   magic "GTRI" | u8 version | u8 flags | u32 dim | u64 gram_count |
 *   u64 unique_count | f32 tau | u8 n_min | u8 n_max |
 *   u64 base_len | base_len x i64 base | base_len x i64 check |
 *   u64 terminal_count | terminal_count x (u64 state, u64 id) |
 *   unique_count x dim x f32 row data | u32 crc32 of all prior bytes.
 * Arrays are trimmed to the highest live slot and terminals are sorted by
 * state, so identical models serialize to identical bytes. */
void save_model(const CompressedModel& model, const std::string& path);

/* Validates magic, version, checksum, and structure before returning.
 * Raises ModelFormatError (kind distinguishes bad magic, unsupported
 * version, checksum mismatch, truncation, invalid fields) or IoError. */
CompressedModel load_model(const std::string& path);

}  // namespace gramtrie
