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
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gramtrie/compressor.hpp"
#include "gramtrie/embedding.hpp"
#include "gramtrie/model_io.hpp"
#include "gramtrie/ngram.hpp"

namespace gramtrie {

/* Synthetic corpus knobs. Words draw uniform lengths from word_len_range
 * and uniform characters from alphabet; duplicates are redrawn. Every gram
 * vector is its longest-proper-prefix gram's vector plus per-component
 * Gaussian(0, noise_sigma) noise; grams without a prefix ancestor get a
 * random unit vector. All randomness, including the Gaussian transform, is
 * derived from `seed` alone, so equal configs give bit-equal outputs. */
struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t vocab_size = 100;
  std::vector<char32_t> alphabet = {U'a', U'b', U'c', U'd', U'e', U'f',
                                    U'g', U'h', U'i', U'j', U'k', U'l'};
  std::pair<int, int> word_len_range = {3, 8};
  std::size_t dim = 32;
  double noise_sigma = 0.0;
  int n_min = 2;
  int n_max = 6;
};

struct SynthData {
  Vocabulary vocab;
  GramSet grams;
  EmbeddingMatrix matrix;
};

SynthData gen_synthetic(const SynthConfig& cfg);

struct MemoryEstimate {
  std::uint64_t original_bytes = 0;
  std::uint64_t compressed_bytes = 0;
  double ratio = 1.0;
};

/* Arithmetic memory model:
 *   original   = gram_count * dim * 4  +  gram_count * 8 (id index)
 *   compressed = unique_count * dim * 4  +  trie bytes,
 * where trie bytes are modeled as gram_count * avg_key_len * 16 when no
 * built trie is at hand. */
MemoryEstimate estimate_memory(std::uint64_t gram_count,
                               std::uint64_t unique_count, std::uint64_t dim,
                               double avg_key_len = 3.0);

/* Same, with the trie term measured from a built trie: 16 bytes per slot
 * pair plus 16 per terminal entry. */
MemoryEstimate estimate_memory(std::uint64_t gram_count,
                               std::uint64_t unique_count, std::uint64_t dim,
                               const DoubleArrayTrie& trie);

struct EvalReport {
  double ratio = 1.0;
  std::uint64_t grams_total = 0;
  std::uint64_t unique_after_prefix = 0;
  std::uint64_t unique_after_suffix = 0;
  std::uint64_t unique_final = 0;
  std::uint64_t prefix_merges = 0;
  std::uint64_t suffix_merges = 0;
  /* Over MergeRecord similarities; 0 when nothing merged. */
  double merged_sim_mean = 0.0;
  double merged_sim_std = 0.0;
  /* Per-word cosine between the two models' word vectors. */
  double reconstruction_mean_cosine = 1.0;
  double reconstruction_min_cosine = 1.0;
  MemoryEstimate memory;
};

/* Summarizes a finished run: ratio and phase counts from the report,
 * merged-similarity moments from the records, reconstruction cosines over
 * the vocabulary words, and a memory estimate using the compressed model's
 * measured trie. */
EvalReport analyze(const CompressedModel& before, const CompressedModel& after,
                   const PipelineReport& report, const Vocabulary& vocab);

/* "key: value" lines, UTF-8. */
void write_report(const EvalReport& report, std::ostream& out);

struct SweepRow {
  double tau = 0.0;
  double ratio = 1.0;
  double reconstruction_mean_cosine = 1.0;
};

/* Runs the full pipeline once per tau on identical inputs (ascending tau
 * order in the result). base_cfg supplies the penalty knobs; its tau is
 * ignored. */
std::vector<SweepRow> threshold_sweep(const GramSet& grams,
                                      const EmbeddingMatrix& embeddings,
                                      const Vocabulary& vocab,
                                      const SimilarityConfig& base_cfg,
                                      std::vector<double> taus, int n_min,
                                      int n_max);

/* CSV with a "tau,ratio,reconstruction_mean_cosine" header. */
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

struct HashBaselineReport {
  /* Fraction of grams sharing their bucket with at least one other gram. */
  double collision_rate = 0.0;
  std::uint64_t max_bucket_load = 0;
};

/* Distributes every gram over bucket_count FNV-1a buckets. */
HashBaselineReport hash_baseline_report(const GramSet& grams,
                                        std::uint64_t bucket_count);

}  // namespace gramtrie
