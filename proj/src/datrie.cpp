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

#include "gramtrie/datrie.hpp"

#include <algorithm>

#include "gramtrie/errors.hpp"

namespace gramtrie {

namespace {
constexpr std::size_t kInitialSlots = 1024;
}

DoubleArrayTrie::DoubleArrayTrie()
    : base_(kInitialSlots, 0), check_(kInitialSlots, 0) {
  base_[kRoot] = 1;
}

void DoubleArrayTrie::ensure_slot(TrieState index) {
  if (index < static_cast<TrieState>(base_.size())) return;
  std::size_t wanted = static_cast<std::size_t>(index) + 1;
  std::size_t grown = base_.size() + base_.size() / 2;
  std::size_t next = std::max(wanted, grown);
  base_.resize(next, 0);
  check_.resize(next, 0);
}

std::vector<std::uint8_t> DoubleArrayTrie::children_of(TrieState state) const {
  std::vector<std::uint8_t> kids;
  for (int c = 0; c < 256; ++c) {
    if (valid_child(state, target(state, static_cast<std::uint8_t>(c)))) {
      kids.push_back(static_cast<std::uint8_t>(c));
    }
  }
  return kids;
}

TrieState DoubleArrayTrie::find_free_base(
    const std::vector<std::uint8_t>& child_bytes) {
  if (child_bytes.empty()) {
    throw InvalidInputError("find_free_base: empty child set");
  }
  while (occupied(free_scan_start_)) ++free_scan_start_;

  std::uint8_t min_byte =
      *std::min_element(child_bytes.begin(), child_bytes.end());
  TrieState b = free_scan_start_ - static_cast<TrieState>(min_byte) - 1;
  if (b < 1) b = 1;
  for (;; ++b) {
    bool fits = true;
    for (std::uint8_t c : child_bytes) {
      if (occupied(b + static_cast<TrieState>(c) + 1)) {
        fits = false;
        break;
      }
    }
    if (fits) return b;
  }
}

std::pair<TrieState, TrieState> DoubleArrayTrie::move_children(
    TrieState state, const std::vector<std::uint8_t>& required_bytes) {
  TrieState old_base = base_[static_cast<std::size_t>(state)];
  TrieState new_base = find_free_base(required_bytes);
  ensure_slot(new_base + 256 + 1);

  std::vector<std::uint8_t> kids = children_of(state);
  for (std::uint8_t b : kids) {
    TrieState old_t = old_base + static_cast<TrieState>(b) + 1;
    TrieState new_t = new_base + static_cast<TrieState>(b) + 1;
    base_[static_cast<std::size_t>(new_t)] =
        base_[static_cast<std::size_t>(old_t)];
    check_[static_cast<std::size_t>(new_t)] = state;

    /* Repoint the moved child's own children before the old slot clears. */
    TrieState child_base = base_[static_cast<std::size_t>(old_t)];
    for (int g = 0; g < 256; ++g) {
      TrieState q = child_base + static_cast<TrieState>(g) + 1;
      if (q > 0 && q < static_cast<TrieState>(base_.size()) &&
          base_[static_cast<std::size_t>(q)] != 0 &&
          check_[static_cast<std::size_t>(q)] == old_t) {
        check_[static_cast<std::size_t>(q)] = new_t;
      }
    }

    auto it = terminal_.find(old_t);
    if (it != terminal_.end()) {
      terminal_.emplace(new_t, it->second);
      terminal_.erase(it);
    }

    base_[static_cast<std::size_t>(old_t)] = 0;
    check_[static_cast<std::size_t>(old_t)] = 0;
  }

  base_[static_cast<std::size_t>(state)] = new_base;
  relocations_ += 1;
  return {old_base, new_base};
}

void DoubleArrayTrie::relocate(TrieState state, std::uint8_t extra_byte) {
  if (!occupied(state)) {
    throw InvalidStateError("relocate: state is not live");
  }
  std::vector<std::uint8_t> required = children_of(state);
  if (std::find(required.begin(), required.end(), extra_byte) ==
      required.end()) {
    required.push_back(extra_byte);
  }
  move_children(state, required);
}

void DoubleArrayTrie::insert(std::string_view key, EmbeddingId value) {
  if (key.empty()) {
    throw InvalidInputError("insert: empty key");
  }
  TrieState s = kRoot;
  for (char raw : key) {
    std::uint8_t c = static_cast<std::uint8_t>(raw);
    for (;;) {
      TrieState t = target(s, c);
      ensure_slot(t);
      if (valid_child(s, t)) {
        s = t;
        break;
      }
      if (!occupied(t)) {
        /* Claim the free slot. New states start with base 1: any base >= 1
         * works while the state has no children, and a nonzero base keeps
         * the slot distinguishable from free ones. */
        base_[static_cast<std::size_t>(t)] = 1;
        check_[static_cast<std::size_t>(t)] = s;
        s = t;
        break;
      }

      /* Slot t belongs to another family. Move whichever side has fewer
       * children: this state's (making room for c elsewhere) or the
       * incumbent parent's (freeing t in place). */
      TrieState owner = check_[static_cast<std::size_t>(t)];
      std::vector<std::uint8_t> mine = children_of(s);
      std::vector<std::uint8_t> theirs = children_of(owner);
      if (mine.size() <= theirs.size()) {
        std::vector<std::uint8_t> required = mine;
        required.push_back(c);
        move_children(s, required);
      } else {
        bool s_is_child_of_owner = s != kRoot &&
                                   check_[static_cast<std::size_t>(s)] == owner;
        auto [from, to] = move_children(owner, theirs);
        if (s_is_child_of_owner) {
          s += to - from;
        }
      }
    }
  }

  auto it = terminal_.find(s);
  if (it != terminal_.end()) {
    if (it->second != value) {
      throw DuplicateKeyError("insert: key already present with value " +
                              std::to_string(it->second));
    }
    return;
  }
  terminal_.emplace(s, value);
}

std::optional<EmbeddingId> DoubleArrayTrie::lookup(std::string_view key) const {
  TrieState s = kRoot;
  for (char raw : key) {
    TrieState t = target(s, static_cast<std::uint8_t>(raw));
    if (!valid_child(s, t)) return std::nullopt;
    s = t;
  }
  auto it = terminal_.find(s);
  if (it == terminal_.end()) return std::nullopt;
  return it->second;
}

bool DoubleArrayTrie::is_terminal(TrieState state) const {
  return terminal_.count(state) > 0;
}

std::optional<EmbeddingId> DoubleArrayTrie::terminal_value(
    TrieState state) const {
  auto it = terminal_.find(state);
  if (it == terminal_.end()) return std::nullopt;
  return it->second;
}

void DoubleArrayTrie::set_terminal_value(TrieState state, EmbeddingId value) {
  auto it = terminal_.find(state);
  if (it == terminal_.end()) {
    throw InvalidStateError("set_terminal_value: state is not terminal");
  }
  it->second = value;
}

void DoubleArrayTrie::traverse_preorder(const Visitor& visit) const {
  struct Frame {
    TrieState state;
    TrieState parent;
    std::uint8_t byte;
    std::size_t depth;
  };
  std::string key;
  std::vector<Frame> stack;
  stack.push_back({kRoot, -1, 0, 0});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    /* Siblings share the first depth-1 bytes already in the buffer. */
    key.resize(f.depth > 0 ? f.depth - 1 : 0);
    if (f.depth > 0) key.push_back(static_cast<char>(f.byte));

    visit(f.state, f.parent, key, terminal_value(f.state));

    std::vector<std::uint8_t> kids = children_of(f.state);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      stack.push_back({target(f.state, *it), f.state, *it, f.depth + 1});
    }
  }
}

std::size_t DoubleArrayTrie::slot_count() const {
  std::size_t n = base_.size();
  while (n > 1 && base_[n - 1] == 0) --n;
  return n;
}

std::vector<std::pair<TrieState, EmbeddingId>>
DoubleArrayTrie::sorted_terminals() const {
  std::vector<std::pair<TrieState, EmbeddingId>> out(terminal_.begin(),
                                                     terminal_.end());
  std::sort(out.begin(), out.end());
  return out;
}

DoubleArrayTrie DoubleArrayTrie::from_arrays(
    std::vector<std::int64_t> base, std::vector<std::int64_t> check,
    const std::vector<std::pair<TrieState, EmbeddingId>>& terminals) {
  if (base.size() != check.size() || base.empty()) {
    throw ModelFormatError("trie arrays must be non-empty and equal length",
                           ModelFormatError::Kind::invalid_field);
  }
  if (base[0] < 1 || check[0] != 0) {
    throw ModelFormatError("trie root sentinel is invalid",
                           ModelFormatError::Kind::invalid_field);
  }
  DoubleArrayTrie trie;
  trie.base_ = std::move(base);
  trie.check_ = std::move(check);
  trie.terminal_.clear();
  trie.free_scan_start_ = static_cast<TrieState>(trie.base_.size());
  for (const auto& [state, id] : terminals) {
    if (!trie.occupied(state) || state == kRoot) {
      throw ModelFormatError("terminal state is not live",
                             ModelFormatError::Kind::invalid_field);
    }
    if (!trie.terminal_.emplace(state, id).second) {
      throw ModelFormatError("duplicate terminal state",
                             ModelFormatError::Kind::invalid_field);
    }
  }
  return trie;
}

}  // namespace gramtrie
