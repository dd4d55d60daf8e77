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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gramtrie/compressor.hpp"
#include "gramtrie/errors.hpp"
#include "gramtrie/evalkit.hpp"
#include "gramtrie/ngram.hpp"
#include "gramtrie/query.hpp"

using namespace gramtrie;

namespace {

bool same_bits(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

/* Longest proper byte-prefix of grams[i] that is itself a gram. */
std::optional<std::size_t> prefix_parent(const GramSet& gs, std::size_t i) {
  const std::string& text = gs.grams[i].text;
  for (std::size_t len = text.size() - 1; len >= 1; --len) {
    auto hit = gs.find(std::string_view(text).substr(0, len));
    if (hit) return hit;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("gen_synthetic is bit-deterministic per seed") {
  SynthConfig cfg;
  cfg.seed = 77;
  cfg.vocab_size = 40;
  cfg.dim = 12;
  cfg.noise_sigma = 0.01;

  SynthData a = gen_synthetic(cfg);
  SynthData b = gen_synthetic(cfg);

  REQUIRE(a.vocab.entries.size() == b.vocab.entries.size());
  for (std::size_t i = 0; i < a.vocab.entries.size(); ++i) {
    CHECK(a.vocab.entries[i].word == b.vocab.entries[i].word);
    CHECK(a.vocab.entries[i].frequency == b.vocab.entries[i].frequency);
  }
  REQUIRE(a.matrix.raw().size() == b.matrix.raw().size());
  CHECK(std::memcmp(a.matrix.raw().data(), b.matrix.raw().data(),
                    a.matrix.raw().size() * sizeof(float)) == 0);

  cfg.seed = 78;
  SynthData c = gen_synthetic(cfg);
  bool differs = a.vocab.entries[0].word != c.vocab.entries[0].word ||
                 std::memcmp(a.matrix.raw().data(), c.matrix.raw().data(),
                             std::min(a.matrix.raw().size(),
                                      c.matrix.raw().size()) *
                                 sizeof(float)) != 0;
  CHECK(differs);
}

TEST_CASE("synthetic vocabulary respects the config") {
  SynthConfig cfg;
  cfg.seed = 3;
  cfg.vocab_size = 60;
  cfg.word_len_range = {3, 8};

  SynthData data = gen_synthetic(cfg);
  CHECK(data.vocab.entries.size() == 60);

  std::unordered_set<std::string> seen;
  std::unordered_set<char> allowed;
  for (char32_t c : cfg.alphabet) allowed.insert(static_cast<char>(c));
  for (const auto& e : data.vocab.entries) {
    CHECK(seen.insert(e.word).second); /* distinct */
    CHECK(e.word.size() >= 3);         /* ASCII alphabet: bytes = points */
    CHECK(e.word.size() <= 8);
    for (char ch : e.word) CHECK(allowed.count(ch) == 1);
    CHECK(e.frequency >= 1);
    CHECK(e.frequency <= 1000);
  }
}

TEST_CASE("zero noise copies the prefix parent's bits") {
  SynthConfig cfg;
  cfg.seed = 9;
  cfg.vocab_size = 50;
  cfg.dim = 16;
  cfg.noise_sigma = 0.0;

  SynthData data = gen_synthetic(cfg);
  std::size_t parented = 0;
  for (std::size_t i = 0; i < data.grams.size(); ++i) {
    auto parent = prefix_parent(data.grams, i);
    if (parent) {
      ++parented;
      CHECK(same_bits(data.matrix.row(i), data.matrix.row(*parent)));
    } else {
      /* Root grams are unit vectors. */
      CHECK(data.matrix.norm(i) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  CHECK(parented > 0);
}

TEST_CASE("noise perturbs children by roughly sigma per component") {
  SynthConfig cfg;
  cfg.seed = 10;
  cfg.vocab_size = 50;
  cfg.dim = 32;
  cfg.noise_sigma = 0.05;

  SynthData data = gen_synthetic(cfg);
  double cos_sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < data.grams.size(); ++i) {
    auto parent = prefix_parent(data.grams, i);
    if (!parent) continue;
    CHECK_FALSE(same_bits(data.matrix.row(i), data.matrix.row(*parent)));
    cos_sum += data.matrix.cosine(i, *parent);
    ++pairs;
  }
  REQUIRE(pairs > 20);
  double mean = cos_sum / static_cast<double>(pairs);
  /* dim 32, sigma 0.05: expected parent-child cosine well below 1 but far
   * from orthogonal. */
  CHECK(mean > 0.8);
  CHECK(mean < 0.9999);
}

TEST_CASE("gen_synthetic validates its config") {
  SynthConfig cfg;
  cfg.vocab_size = 0;
  CHECK_THROWS_AS(gen_synthetic(cfg), InvalidInputError);

  cfg = SynthConfig{};
  cfg.dim = 0;
  CHECK_THROWS_AS(gen_synthetic(cfg), InvalidInputError);

  cfg = SynthConfig{};
  cfg.alphabet.clear();
  CHECK_THROWS_AS(gen_synthetic(cfg), InvalidInputError);

  cfg = SynthConfig{};
  cfg.word_len_range = {0, 4};
  CHECK_THROWS_AS(gen_synthetic(cfg), InvalidInputError);
  cfg.word_len_range = {5, 4};
  CHECK_THROWS_AS(gen_synthetic(cfg), InvalidInputError);

  cfg = SynthConfig{};
  cfg.noise_sigma = -0.1;
  CHECK_THROWS_AS(gen_synthetic(cfg), InvalidInputError);

  cfg = SynthConfig{};
  cfg.alphabet = {U'a', U'<'};
  CHECK_THROWS_AS(gen_synthetic(cfg), InvalidInputError);

  /* One letter, fixed length two: only one word exists. */
  cfg = SynthConfig{};
  cfg.alphabet = {U'a'};
  cfg.word_len_range = {2, 2};
  cfg.vocab_size = 2;
  CHECK_THROWS_AS(gen_synthetic(cfg), InvalidInputError);
}

TEST_CASE("estimate_memory arithmetic is exact") {
  MemoryEstimate est = estimate_memory(1000, 100, 8, 2.0);
  /* original: 1000*8*4 + 1000*8 = 40000 */
  CHECK(est.original_bytes == 40000);
  /* compressed: 100*8*4 + 1000*2*16 = 3200 + 32000 = 35200 */
  CHECK(est.compressed_bytes == 35200);
  CHECK(est.ratio == doctest::Approx(40000.0 / 35200.0).epsilon(1e-15));

  CHECK_THROWS_AS(estimate_memory(10, 5, 4, 0.0), InvalidInputError);
  CHECK_THROWS_AS(estimate_memory(10, 5, 4, -1.0), InvalidInputError);
}

TEST_CASE("estimate_memory reproduces the production-scale matrix size") {
  /* 287,439,218 grams at dim 128: the raw table alone tops 100 GB. */
  MemoryEstimate est = estimate_memory(287439218ULL, 57487843ULL, 128);
  CHECK(est.original_bytes ==
        287439218ULL * 128 * 4 + 287439218ULL * 8);
  CHECK(est.original_bytes >= 100000000000ULL);
  CHECK(est.ratio > 1.0);
}

TEST_CASE("compression around five-fold shows up in the memory model") {
  /* dim 300 embeddings, 6 grams per surviving row, short keys. */
  MemoryEstimate est = estimate_memory(1000000, 1000000 / 6, 300, 3.0);
  CHECK(est.ratio > 4.0);
  CHECK(est.ratio < 6.0);
}

TEST_CASE("measured trie overload counts slots and terminals") {
  DoubleArrayTrie trie;
  trie.insert("ab", 0);
  trie.insert("ac", 1);
  MemoryEstimate est = estimate_memory(2, 2, 4, trie);
  std::uint64_t expected_trie =
      static_cast<std::uint64_t>(trie.slot_count()) * 16 + 2 * 16;
  CHECK(est.compressed_bytes == 2 * 4 * 4 + expected_trie);
  CHECK(est.original_bytes == 2 * 4 * 4 + 2 * 8);
}

TEST_CASE("analyze recomputes to the same numbers") {
  SynthConfig scfg;
  scfg.seed = 55;
  scfg.vocab_size = 80;
  scfg.dim = 16;
  scfg.noise_sigma = 0.01;
  SynthData data = gen_synthetic(scfg);
  SimilarityConfig cfg;

  CompressedModel before =
      make_uncompressed_model(data.grams, data.matrix, cfg, 2, 6);
  PipelineResult res = run_pipeline(data.grams, data.matrix, cfg, 2, 6);
  EvalReport rep = analyze(before, res.model, res.report, data.vocab);

  CHECK(rep.ratio == res.report.stats.ratio());
  CHECK(rep.grams_total == res.report.stats.grams_total);
  CHECK(rep.unique_final == res.report.stats.unique_final);
  CHECK(rep.prefix_merges == res.report.stats.prefix_merges);
  CHECK(rep.suffix_merges == res.report.stats.suffix_merges);

  if (!res.report.merges.empty()) {
    double sum = 0.0;
    for (const auto& m : res.report.merges) sum += m.similarity;
    double mean = sum / static_cast<double>(res.report.merges.size());
    double var = 0.0;
    for (const auto& m : res.report.merges) {
      var += (m.similarity - mean) * (m.similarity - mean);
    }
    double stdev =
        std::sqrt(var / static_cast<double>(res.report.merges.size()));
    CHECK(rep.merged_sim_mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(rep.merged_sim_std == doctest::Approx(stdev).epsilon(1e-12));
  }

  /* Reconstruction recomputed through the query module. */
  double sum = 0.0;
  double lowest = 1.0;
  for (const auto& e : data.vocab.entries) {
    WordVector wb = word_vector(before, e.word);
    WordVector wa = word_vector(res.model, e.word);
    double dot = 0.0;
    double nb = 0.0;
    double na = 0.0;
    for (std::size_t d = 0; d < wb.values.size(); ++d) {
      dot += static_cast<double>(wb.values[d]) * wa.values[d];
      nb += static_cast<double>(wb.values[d]) * wb.values[d];
      na += static_cast<double>(wa.values[d]) * wa.values[d];
    }
    double cos = std::clamp(dot / (std::sqrt(nb) * std::sqrt(na)), -1.0, 1.0);
    sum += cos;
    lowest = std::min(lowest, cos);
  }
  double mean_cos = sum / static_cast<double>(data.vocab.entries.size());
  CHECK(rep.reconstruction_mean_cosine ==
        doctest::Approx(mean_cos).epsilon(1e-9));
  CHECK(rep.reconstruction_min_cosine ==
        doctest::Approx(lowest).epsilon(1e-9));

  MemoryEstimate mem =
      estimate_memory(data.grams.size(), res.model.meta.unique_count,
                      res.model.meta.dim, res.model.trie);
  CHECK(rep.memory.original_bytes == mem.original_bytes);
  CHECK(rep.memory.compressed_bytes == mem.compressed_bytes);
}

TEST_CASE("write_report emits one key per line") {
  EvalReport rep;
  rep.ratio = 2.5;
  rep.grams_total = 10;
  rep.unique_final = 4;
  std::ostringstream out;
  write_report(rep, out);
  std::string text = out.str();

  CHECK(text.find("ratio: 2.500000\n") != std::string::npos);
  CHECK(text.find("grams_total: 10\n") != std::string::npos);
  CHECK(text.find("unique_final: 4\n") != std::string::npos);
  CHECK(text.find("reconstruction_mean_cosine: ") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 14);
}

TEST_CASE("threshold_sweep runs one pipeline per tau, ascending") {
  SynthConfig scfg;
  scfg.seed = 17;
  scfg.vocab_size = 60;
  scfg.dim = 16;
  scfg.noise_sigma = 0.008;
  SynthData data = gen_synthetic(scfg);
  SimilarityConfig base;

  std::vector<double> taus = {0.9995, 0.995, 0.999}; /* deliberately unsorted */
  auto rows = threshold_sweep(data.grams, data.matrix, data.vocab, base, taus,
                              2, 6);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].tau == 0.995);
  CHECK(rows[1].tau == 0.999);
  CHECK(rows[2].tau == 0.9995);

  /* Each row equals its own direct pipeline run. */
  for (const SweepRow& row : rows) {
    SimilarityConfig cfg;
    cfg.tau = row.tau;
    PipelineResult res = run_pipeline(data.grams, data.matrix, cfg, 2, 6);
    CHECK(row.ratio == res.report.stats.ratio());
  }

  /* Looser thresholds merge at least as much. */
  CHECK(rows[0].ratio >= rows[1].ratio);
  CHECK(rows[1].ratio >= rows[2].ratio);

  CHECK_THROWS_AS(
      threshold_sweep(data.grams, data.matrix, data.vocab, base, {}, 2, 6),
      InvalidInputError);
}

TEST_CASE("write_sweep_csv formats six decimal places") {
  std::vector<SweepRow> rows = {{0.995, 3.25, 0.9975},
                                {0.999, 1.5, 0.99995}};
  std::ostringstream out;
  write_sweep_csv(rows, out);
  CHECK(out.str() ==
        "tau,ratio,reconstruction_mean_cosine\n"
        "0.995000,3.250000,0.997500\n"
        "0.999000,1.500000,0.999950\n");
}

TEST_CASE("hash baseline counts collisions") {
  SynthConfig scfg;
  scfg.seed = 23;
  scfg.vocab_size = 40;
  SynthData data = gen_synthetic(scfg);

  SUBCASE("single bucket") {
    HashBaselineReport rep = hash_baseline_report(data.grams, 1);
    CHECK(rep.collision_rate == 1.0);
    CHECK(rep.max_bucket_load == data.grams.size());
  }
  SUBCASE("matches a direct recount") {
    std::uint64_t buckets = 512;
    HashBaselineReport rep = hash_baseline_report(data.grams, buckets);

    std::unordered_map<std::uint64_t, std::uint64_t> load;
    for (const auto& g : data.grams.grams) {
      ++load[fnv1a32(g.text) % buckets];
    }
    std::uint64_t colliding = 0;
    std::uint64_t max_load = 0;
    for (const auto& [b, n] : load) {
      max_load = std::max(max_load, n);
      if (n >= 2) colliding += n;
    }
    CHECK(rep.max_bucket_load == max_load);
    CHECK(rep.collision_rate ==
          doctest::Approx(static_cast<double>(colliding) /
                          static_cast<double>(data.grams.size()))
              .epsilon(1e-15));
  }
  SUBCASE("zero buckets rejected") {
    CHECK_THROWS_AS(hash_baseline_report(data.grams, 0), InvalidInputError);
  }
  SUBCASE("empty gram set") {
    GramSet empty;
    HashBaselineReport rep = hash_baseline_report(empty, 16);
    CHECK(rep.collision_rate == 0.0);
    CHECK(rep.max_bucket_load == 0);
  }
}
