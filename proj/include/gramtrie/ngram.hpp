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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gramtrie {

/* One character n-gram. `text` is UTF-8; boundary markers '<' and '>' are
 * ordinary characters inside it. `is_word_token` marks the whole-word token
 * "<word>", which is always emitted regardless of the length range. */
struct NGram {
  std::string text;
  bool is_word_token = false;
};

struct VocabEntry {
  std::string word;
  std::uint64_t frequency = 1;
};

/* An ordered list of distinct words with positive frequencies. */
struct Vocabulary {
  std::vector<VocabEntry> entries;
};

/* The deduplicated union of all grams of a vocabulary, sorted ascending by
 * the byte order of `text`. `frequencies` is parallel to `grams`: entry i
 * is the sum of frequencies of the words containing gram i (a word counts
 * once no matter how often the gram occurs inside it). A gram that is the
 * whole-word token of at least one word keeps is_word_token = true even
 * when it also occurs as a plain substring elsewhere. */
struct GramSet {
  std::vector<NGram> grams;
  std::vector<std::uint64_t> frequencies;

  std::size_t size() const { return grams.size(); }

  /* Binary search by text bytes; index into grams/frequencies. */
  std::optional<std::size_t> find(std::string_view text) const;
};

/* Enumerates the grams of one word: every contiguous code-point substring of
 * "<word>" with length in [n_min, n_max], enumerated shortest length first
 * and by position within each length, followed by the whole-word token.
 * Repeated substrings appear once per occurrence. Throws InvalidInputError
 * for an empty word, malformed UTF-8, or n_min < 1 or n_min > n_max. */
std::vector<NGram> extract_ngrams(std::string_view word, int n_min, int n_max);

/* Unions extract_ngrams over the vocabulary and accumulates frequencies. */
GramSet build_gram_set(const Vocabulary& vocab, int n_min, int n_max);

/* Loads a vocabulary file: UTF-8 text, one "word<TAB>frequency" entry per
 * line. A line without a tab gets frequency 1; lines starting with '#' and
 * blank lines are skipped. Duplicate words, frequency 0, or unparsable
 * frequencies raise ParseError with the line number. */
Vocabulary load_vocabulary(const std::string& path);

/* 32-bit FNV-1a over the UTF-8 bytes of `text`. */
std::uint32_t fnv1a32(std::string_view text);

/* Baseline bucket assignment: fnv1a32(gram text) mod bucket_count.
 * bucket_count must be positive. */
std::uint64_t hash_bucket(const NGram& gram, std::uint64_t bucket_count);

}  // namespace gramtrie
