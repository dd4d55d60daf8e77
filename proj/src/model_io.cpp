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

#include "gramtrie/model_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "gramtrie/errors.hpp"

namespace gramtrie {

namespace {

constexpr char kMagic[4] = {'G', 'T', 'R', 'I'};

/* Little-endian writers into a growing byte buffer. */
void put_u8(std::string& buf, std::uint8_t v) {
  buf.push_back(static_cast<char>(v));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void put_i64(std::string& buf, std::int64_t v) {
  put_u64(buf, static_cast<std::uint64_t>(v));
}

void put_f32(std::string& buf, float v) {
  put_u32(buf, std::bit_cast<std::uint32_t>(v));
}

/* Bounds-checked little-endian reader. */
class Cursor {
 public:
  Cursor(const std::string& data, std::size_t limit)
      : data_(data), limit_(limit) {}

  std::size_t pos() const { return pos_; }

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }

  float f32() { return std::bit_cast<float>(u32()); }

  void need(std::size_t n) const {
    if (pos_ + n > limit_) {
      throw ModelFormatError("model file is truncated",
                             ModelFormatError::Kind::truncated);
    }
  }

 private:
  const std::string& data_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const char* data, std::size_t len) {
  return static_cast<std::uint32_t>(
      crc32_z(crc32_z(0UL, nullptr, 0),
              reinterpret_cast<const unsigned char*>(data), len));
}

std::string format_float(float v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(v));
  return buf;
}

}  // namespace

void validate_model(const CompressedModel& model) {
  auto fail = [](const std::string& msg) {
    throw ModelFormatError(msg, ModelFormatError::Kind::invalid_field);
  };
  const ModelMeta& m = model.meta;
  if (m.format_version != 1) fail("model: unknown format version");
  if (m.dim == 0) fail("model: dim must be >= 1");
  if (m.unique_count == 0) fail("model: unique_count must be >= 1");
  if (m.gram_count < m.unique_count) {
    fail("model: gram_count must be >= unique_count");
  }
  if (m.n_min < 1 || m.n_min > m.n_max) fail("model: bad n-gram range");
  if (!(m.tau > 0.0f) || !(m.tau <= 1.0f)) fail("model: tau out of range");
  if (model.matrix.dim() != m.dim) fail("model: matrix dim mismatch");
  if (model.matrix.rows() != m.unique_count) {
    fail("model: matrix row count mismatch");
  }
  if (model.trie.key_count() != m.gram_count) {
    fail("model: trie key count mismatch");
  }
  for (const auto& [state, id] : model.trie.sorted_terminals()) {
    if (id >= m.unique_count) fail("model: terminal id out of range");
  }
}

TextVectors load_text_vectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open vectors file: " + path);
  }

  auto parse_floats = [](const std::string& line, std::size_t line_no,
                         std::string& token, std::vector<float>& out,
                         std::size_t expect) {
    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    };
    skip_ws();
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    token = line.substr(start, i - start);
    if (token.empty()) {
      throw ParseError("missing token", line_no);
    }
    out.clear();
    while (true) {
      skip_ws();
      if (i >= line.size()) break;
      std::size_t fstart = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      float v = 0.0f;
      auto [ptr, ec] =
          std::from_chars(line.data() + fstart, line.data() + i, v);
      if (ec != std::errc() || ptr != line.data() + i) {
        throw ParseError("unparsable float component", line_no);
      }
      out.push_back(v);
    }
    if (out.size() != expect) {
      throw ParseError("expected " + std::to_string(expect) +
                           " components, found " + std::to_string(out.size()),
                       line_no);
    }
  };

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("missing header line", 1);
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::uint64_t count = 0;
  std::uint64_t dim = 0;
  {
    std::size_t space = line.find(' ');
    if (space == std::string::npos) {
      throw ParseError("header must be 'count dim'", 1);
    }
    auto parse_u64 = [&](std::string_view text, std::uint64_t& out) {
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                       out);
      return ec == std::errc() && ptr == text.data() + text.size();
    };
    std::string_view head = line;
    if (!parse_u64(head.substr(0, space), count) ||
        !parse_u64(head.substr(space + 1), dim) || dim == 0) {
      throw ParseError("header must be 'count dim'", 1);
    }
  }

  std::vector<std::string> tokens;
  std::vector<float> data;
  tokens.reserve(count);
  data.reserve(count * dim);
  std::unordered_set<std::string> seen;
  std::vector<float> row;
  std::string token;
  for (std::uint64_t r = 0; r < count; ++r) {
    if (!std::getline(in, line)) {
      throw ParseError("expected " + std::to_string(count) +
                           " rows, file ended early",
                       line_no + 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    parse_floats(line, line_no, token, row, dim);
    if (!seen.insert(token).second) {
      throw ParseError("duplicate token '" + token + "'", line_no);
    }
    tokens.push_back(token);
    data.insert(data.end(), row.begin(), row.end());
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      throw ParseError("unexpected content after declared rows", line_no);
    }
  }
  if (in.bad()) {
    throw IoError("read failure on vectors file: " + path);
  }

  /* Re-sort tokens into byte order and permute rows to match. */
  std::vector<std::size_t> order(tokens.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tokens[a] < tokens[b];
  });

  TextVectors out;
  out.tokens.reserve(tokens.size());
  std::vector<float> sorted_data(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.tokens.push_back(std::move(tokens[order[i]]));
    std::memcpy(sorted_data.data() + i * dim, data.data() + order[i] * dim,
                dim * sizeof(float));
  }
  out.matrix = EmbeddingMatrix(out.tokens.size(), dim, std::move(sorted_data));
  return out;
}

void save_text_vectors(const std::string& path,
                       const std::vector<std::string>& tokens,
                       const EmbeddingMatrix& matrix) {
  if (tokens.size() != matrix.rows()) {
    throw DimensionMismatchError("save_text_vectors: token/row count mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open vectors file for writing: " + path);
  }
  out << tokens.size() << ' ' << matrix.dim() << '\n';
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out << tokens[i];
    for (float v : matrix.row(i)) {
      out << ' ' << format_float(v);
    }
    out << '\n';
  }
  out.flush();
  if (!out) {
    throw IoError("write failure on vectors file: " + path);
  }
}

void save_model(const CompressedModel& model, const std::string& path) {
  validate_model(model);

  std::string buf;
  buf.append(kMagic, 4);
  put_u8(buf, model.meta.format_version);
  put_u8(buf, 0); /* flags, reserved */
  put_u32(buf, model.meta.dim);
  put_u64(buf, model.meta.gram_count);
  put_u64(buf, model.meta.unique_count);
  put_f32(buf, model.meta.tau);
  put_u8(buf, model.meta.n_min);
  put_u8(buf, model.meta.n_max);

  std::size_t slots = model.trie.slot_count();
  auto base = model.trie.base_array();
  auto check = model.trie.check_array();
  put_u64(buf, slots);
  for (std::size_t i = 0; i < slots; ++i) put_i64(buf, base[i]);
  for (std::size_t i = 0; i < slots; ++i) put_i64(buf, check[i]);

  auto terminals = model.trie.sorted_terminals();
  put_u64(buf, terminals.size());
  for (const auto& [state, id] : terminals) {
    put_u64(buf, static_cast<std::uint64_t>(state));
    put_u64(buf, id);
  }

  for (float v : model.matrix.raw()) put_f32(buf, v);

  put_u32(buf, crc_of(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open model file for writing: " + path);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) {
    throw IoError("write failure on model file: " + path);
  }
}

CompressedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open model file: " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failure on model file: " + path);
  }

  if (bytes.size() < 4) {
    throw ModelFormatError("model file is truncated",
                           ModelFormatError::Kind::truncated);
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ModelFormatError("not a GTRI model file",
                           ModelFormatError::Kind::bad_magic);
  }

  Cursor cur(bytes, bytes.size());
  cur.u32(); /* magic, already checked */

  ModelMeta meta;
  meta.format_version = cur.u8();
  if (meta.format_version != 1) {
    throw ModelFormatError(
        "unsupported model version " + std::to_string(meta.format_version),
        ModelFormatError::Kind::unsupported_version);
  }
  cur.u8(); /* flags, reserved */
  meta.dim = cur.u32();
  meta.gram_count = cur.u64();
  meta.unique_count = cur.u64();
  meta.tau = cur.f32();
  meta.n_min = cur.u8();
  meta.n_max = cur.u8();

  std::uint64_t slots = cur.u64();
  cur.need(slots * 16); /* both arrays, before allocating */
  std::vector<std::int64_t> base(slots);
  std::vector<std::int64_t> check(slots);
  for (std::uint64_t i = 0; i < slots; ++i) base[i] = cur.i64();
  for (std::uint64_t i = 0; i < slots; ++i) check[i] = cur.i64();

  std::uint64_t terminal_count = cur.u64();
  cur.need(terminal_count * 16);
  std::vector<std::pair<TrieState, EmbeddingId>> terminals;
  terminals.reserve(terminal_count);
  for (std::uint64_t i = 0; i < terminal_count; ++i) {
    TrieState state = cur.i64();
    EmbeddingId id = cur.u64();
    terminals.emplace_back(state, id);
  }

  std::uint64_t floats = meta.unique_count * meta.dim;
  cur.need(floats * 4);
  std::vector<float> data(floats);
  for (std::uint64_t i = 0; i < floats; ++i) data[i] = cur.f32();

  /* Whole payload parsed; exactly the checksum must remain. */
  std::size_t payload = cur.pos();
  if (bytes.size() < payload + 4) {
    throw ModelFormatError("model file is truncated",
                           ModelFormatError::Kind::truncated);
  }
  if (bytes.size() > payload + 4) {
    throw ModelFormatError("trailing bytes after checksum",
                           ModelFormatError::Kind::invalid_field);
  }
  std::uint32_t stored = cur.u32();
  std::uint32_t actual = crc_of(bytes.data(), payload);
  if (stored != actual) {
    throw ModelFormatError("model checksum mismatch",
                           ModelFormatError::Kind::checksum_mismatch);
  }

  CompressedModel model;
  model.trie =
      DoubleArrayTrie::from_arrays(std::move(base), std::move(check),
                                   terminals);
  model.matrix =
      EmbeddingMatrix(meta.unique_count, meta.dim, std::move(data));
  model.meta = meta;
  validate_model(model);
  return model;
}

}  // namespace gramtrie
