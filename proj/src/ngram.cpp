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

#include "gramtrie/ngram.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "gramtrie/errors.hpp"
#include "gramtrie/utf8.hpp"

namespace gramtrie {

namespace utf8 {

std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char lead = static_cast<unsigned char>(text[i]);
    int len;
    char32_t cp;
    char32_t min_cp;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
      min_cp = 0;
    } else if ((lead & 0xe0) == 0xc0) {
      len = 2;
      cp = lead & 0x1f;
      min_cp = 0x80;
    } else if ((lead & 0xf0) == 0xe0) {
      len = 3;
      cp = lead & 0x0f;
      min_cp = 0x800;
    } else if ((lead & 0xf8) == 0xf0) {
      len = 4;
      cp = lead & 0x07;
      min_cp = 0x10000;
    } else {
      throw InvalidInputError("malformed UTF-8: bad lead byte at offset " +
                              std::to_string(i));
    }
    if (i + len > text.size()) {
      throw InvalidInputError("malformed UTF-8: truncated sequence at offset " +
                              std::to_string(i));
    }
    for (int k = 1; k < len; ++k) {
      unsigned char cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xc0) != 0x80) {
        throw InvalidInputError(
            "malformed UTF-8: bad continuation byte at offset " +
            std::to_string(i + k));
      }
      cp = (cp << 6) | (cont & 0x3f);
    }
    if (cp < min_cp || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
      throw InvalidInputError("malformed UTF-8: invalid scalar at offset " +
                              std::to_string(i));
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

std::string encode(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t cp : cps) append(cp, out);
  return out;
}

}  // namespace utf8

std::optional<std::size_t> GramSet::find(std::string_view text) const {
  auto it = std::lower_bound(
      grams.begin(), grams.end(), text,
      [](const NGram& g, std::string_view t) { return g.text < t; });
  if (it == grams.end() || it->text != text) return std::nullopt;
  return static_cast<std::size_t>(it - grams.begin());
}

std::vector<NGram> extract_ngrams(std::string_view word, int n_min, int n_max) {
  if (word.empty()) {
    throw InvalidInputError("extract_ngrams: empty word");
  }
  if (n_min < 1 || n_min > n_max) {
    throw InvalidInputError("extract_ngrams: need 1 <= n_min <= n_max");
  }
  std::string marked = "<";
  marked.append(word);
  marked.push_back('>');
  std::vector<char32_t> cps = utf8::decode(marked);
  int len = static_cast<int>(cps.size());

  std::vector<NGram> out;
  for (int n = n_min; n <= n_max; ++n) {
    for (int start = 0; start + n <= len; ++start) {
      std::string text;
      for (int k = start; k < start + n; ++k) utf8::append(cps[k], text);
      out.push_back({std::move(text), false});
    }
  }
  out.push_back({std::move(marked), true});
  return out;
}

GramSet build_gram_set(const Vocabulary& vocab, int n_min, int n_max) {
  struct Acc {
    std::uint64_t freq = 0;
    bool word_token = false;
  };
  std::map<std::string, Acc> acc;
  for (const auto& entry : vocab.entries) {
    std::vector<NGram> grams = extract_ngrams(entry.word, n_min, n_max);
    /* A word contributes its frequency once per distinct gram. */
    std::unordered_map<std::string, bool> uniq;
    for (auto& g : grams) {
      auto [it, fresh] = uniq.try_emplace(std::move(g.text), g.is_word_token);
      if (!fresh && g.is_word_token) it->second = true;
    }
    for (auto& [text, token] : uniq) {
      Acc& a = acc[text];
      a.freq += entry.frequency;
      a.word_token = a.word_token || token;
    }
  }

  GramSet gs;
  gs.grams.reserve(acc.size());
  gs.frequencies.reserve(acc.size());
  for (auto& [text, a] : acc) {
    gs.grams.push_back({text, a.word_token});
    gs.frequencies.push_back(a.freq);
  }
  return gs;
}

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open vocabulary file: " + path);
  }
  Vocabulary vocab;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::string word;
    std::uint64_t freq = 1;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      word = line;
    } else {
      word = line.substr(0, tab);
      std::string freq_text = line.substr(tab + 1);
      std::size_t used = 0;
      try {
        freq = std::stoull(freq_text, &used);
      } catch (const std::exception&) {
        throw ParseError("unparsable frequency '" + freq_text + "'", line_no);
      }
      if (used != freq_text.size()) {
        throw ParseError("unparsable frequency '" + freq_text + "'", line_no);
      }
      if (freq == 0) {
        throw ParseError("frequency must be >= 1", line_no);
      }
    }
    if (word.empty()) {
      throw ParseError("empty word", line_no);
    }
    if (!seen.insert(word).second) {
      throw ParseError("duplicate word '" + word + "'", line_no);
    }
    vocab.entries.push_back({std::move(word), freq});
  }
  if (in.bad()) {
    throw IoError("read failure on vocabulary file: " + path);
  }
  return vocab;
}

std::uint32_t fnv1a32(std::string_view text) {
  std::uint32_t h = 2166136261u;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 16777619u;
  }
  return h;
}

std::uint64_t hash_bucket(const NGram& gram, std::uint64_t bucket_count) {
  if (bucket_count == 0) {
    throw InvalidInputError("hash_bucket: bucket_count must be positive");
  }
  return fnv1a32(gram.text) % bucket_count;
}

}  // namespace gramtrie
