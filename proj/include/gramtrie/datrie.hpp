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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gramtrie {

using EmbeddingId = std::uint64_t;
using TrieState = std::int64_t;

/* Byte-keyed double-array trie.
 *
 * Layout invariants:
 *   - State 0 is the root: check[0] = 0, base[0] >= 1.
 *   - The transition from state s on byte c targets t = base[s] + c + 1 and
 *     is valid iff check[t] = s. The +1 keeps every target above slot 1, so
 *     check = 0 can mean "unused".
 *   - Every live state has base >= 1; free slots keep base = 0 and
 *     check = 0. Children of the root also have check = 0, so base is the
 *     field that separates them from free slots.
 *   - Terminal payloads live in a sparse map keyed by state index; no byte
 *     is reserved as a terminator, so any byte string is a valid key.
 *
 * Both arrays grow geometrically (x1.5) when an insert needs a slot beyond
 * the current capacity. Construction is single-threaded; concurrent reads
 * of a quiescent trie are safe.
 */
class DoubleArrayTrie {
 public:
  static constexpr TrieState kRoot = 0;

  /* visit(state, parent, key, value): pre-order, children in ascending byte
   * order, terminals in lexicographic key order. `key` is the accumulated
   * byte path and is only valid during the call. parent is -1 for the root. */
  using Visitor = std::function<void(
      TrieState state, TrieState parent, std::string_view key,
      const std::optional<EmbeddingId>& value)>;

  DoubleArrayTrie();

  /* Inserts key -> value. Re-inserting an existing key with the same value
   * is a no-op; a different value raises DuplicateKeyError. Empty keys
   * raise InvalidInputError. */
  void insert(std::string_view key, EmbeddingId value);

  /* Walks the key; nullopt when the path or terminal payload is missing. */
  std::optional<EmbeddingId> lookup(std::string_view key) const;

  bool is_terminal(TrieState state) const;
  std::optional<EmbeddingId> terminal_value(TrieState state) const;

  /* Overwrites the payload of an existing terminal; raises
   * InvalidStateError when `state` is not terminal. */
  void set_terminal_value(TrieState state, EmbeddingId value);

  /* Smallest candidate base b >= 1 (scanning from a moving low-water mark)
   * such that slot b + c + 1 is free for every byte c in child_bytes.
   * child_bytes must be non-empty. The low-water mark only moves forward,
   * so slots freed by relocation below it are not revisited; any returned
   * base is still collision-free. */
  TrieState find_free_base(const std::vector<std::uint8_t>& child_bytes);

  /* Moves the children of `state` to a fresh base with room for one more
   * child on `extra_byte`. Grandchild back-references and terminal payloads
   * follow. Every existing key still resolves afterwards. */
  void relocate(TrieState state, std::uint8_t extra_byte);

  void traverse_preorder(const Visitor& visit) const;

  std::size_t key_count() const { return terminal_.size(); }

  /* Number of array slots in use (highest live slot + 1). */
  std::size_t slot_count() const;

  /* Total child relocations performed during construction. */
  std::uint64_t relocation_count() const { return relocations_; }

  std::span<const std::int64_t> base_array() const { return base_; }
  std::span<const std::int64_t> check_array() const { return check_; }

  /* Terminal (state, value) pairs sorted by state index. */
  std::vector<std::pair<TrieState, EmbeddingId>> sorted_terminals() const;

  /* Rebuilds a trie from serialized arrays. Validates the root sentinel and
   * that every terminal state is live; raises ModelFormatError otherwise. */
  static DoubleArrayTrie from_arrays(
      std::vector<std::int64_t> base, std::vector<std::int64_t> check,
      const std::vector<std::pair<TrieState, EmbeddingId>>& terminals);

 private:
  bool occupied(TrieState t) const {
    return t >= 0 && t < static_cast<TrieState>(base_.size()) &&
           (t == kRoot || base_[t] != 0);
  }
  bool valid_child(TrieState s, TrieState t) const {
    return t > 0 && t < static_cast<TrieState>(base_.size()) &&
           base_[t] != 0 && check_[t] == s;
  }
  TrieState target(TrieState s, std::uint8_t c) const {
    return base_[s] + static_cast<TrieState>(c) + 1;
  }

  void ensure_slot(TrieState index);
  std::vector<std::uint8_t> children_of(TrieState state) const;
  /* Moves state's children so that slots for required_bytes are all free
   * under the new base. Returns (old_base, new_base). */
  std::pair<TrieState, TrieState> move_children(
      TrieState state, const std::vector<std::uint8_t>& required_bytes);

  std::vector<std::int64_t> base_;
  std::vector<std::int64_t> check_;
  std::unordered_map<TrieState, EmbeddingId> terminal_;
  TrieState free_scan_start_ = 2;
  std::uint64_t relocations_ = 0;
};

}  // namespace gramtrie
