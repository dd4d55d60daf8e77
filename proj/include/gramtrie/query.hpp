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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gramtrie/model_io.hpp"

namespace gramtrie {

/* A composed word vector. values is all zeros iff gram_hits = 0. */
struct WordVector {
  std::vector<float> values;
  std::size_t gram_hits = 0;   /* grams found in the model */
  std::size_t gram_total = 0;  /* grams extracted from the word */
};

/* Row of the gram's representative, or nullopt for unknown grams. The span
 * aliases the model's matrix. */
std::optional<std::span<const float>> gram_vector(const CompressedModel& model,
                                                  std::string_view gram_text);

/* Extracts the word's grams with the model's length range and averages the
 * rows of those found (arithmetic mean over gram_hits; occurrences count
 * separately, exactly as extracted). Unknown grams are skipped. */
WordVector word_vector(const CompressedModel& model, std::string_view word);

/* Ranks candidates by cosine between their word vectors and the probe's,
 * descending, ties kept in candidate order; returns at most top_k pairs.
 * Candidates with no known grams have no direction and are left out of the
 * ranking. A probe with no known grams raises DegenerateQueryError. */
std::vector<std::pair<std::string, double>> nearest_words(
    const CompressedModel& model, std::string_view probe,
    const std::vector<std::string>& candidates, std::size_t top_k);

}  // namespace gramtrie
