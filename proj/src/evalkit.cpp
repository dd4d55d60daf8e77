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

#include "gramtrie/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "gramtrie/errors.hpp"
#include "gramtrie/query.hpp"
#include "gramtrie/utf8.hpp"

namespace gramtrie {

namespace {

/* Deterministic randomness: every draw reduces a std::mt19937_64 output,
 * whose sequence the standard fixes, so equal seeds give equal bits on any
 * platform. The Gaussian transform is spelled out here for the same reason;
 * std::normal_distribution's algorithm is implementation-defined. */
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

  /* Uniform in (0, 1): 53 random bits offset by half a step. */
  double unit() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /* Box-Muller; the paired value is kept for the next call. */
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = unit();
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

/* Cosine between two float vectors in double; both-zero pairs count as
 * identical, one-zero pairs as orthogonal. */
double cosine_values(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

void reconstruction_cosines(const CompressedModel& before,
                            const CompressedModel& after,
                            const Vocabulary& vocab, double& mean_out,
                            double& min_out) {
  mean_out = 1.0;
  min_out = 1.0;
  if (vocab.entries.empty()) return;
  std::vector<double> cosines;
  cosines.reserve(vocab.entries.size());
  for (const VocabEntry& e : vocab.entries) {
    WordVector wb = word_vector(before, e.word);
    WordVector wa = word_vector(after, e.word);
    cosines.push_back(cosine_values(wb.values, wa.values));
  }
  mean_out = mean_of(cosines);
  min_out = *std::min_element(cosines.begin(), cosines.end());
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

SynthData gen_synthetic(const SynthConfig& cfg) {
  if (cfg.vocab_size == 0) {
    throw InvalidInputError("gen_synthetic: vocab_size must be >= 1");
  }
  if (cfg.dim == 0) {
    throw InvalidInputError("gen_synthetic: dim must be >= 1");
  }
  if (cfg.alphabet.empty()) {
    throw InvalidInputError("gen_synthetic: alphabet must not be empty");
  }
  if (cfg.word_len_range.first < 1 ||
      cfg.word_len_range.first > cfg.word_len_range.second) {
    throw InvalidInputError("gen_synthetic: bad word length range");
  }
  if (cfg.noise_sigma < 0.0) {
    throw InvalidInputError("gen_synthetic: noise_sigma must be >= 0");
  }
  for (char32_t c : cfg.alphabet) {
    if (c == U'<' || c == U'>') {
      throw InvalidInputError(
          "gen_synthetic: alphabet must not contain boundary markers");
    }
  }

  SynthRng rng(cfg.seed);

  SynthData out;
  std::unordered_set<std::string> seen;
  const int len_span = cfg.word_len_range.second - cfg.word_len_range.first + 1;
  for (std::size_t i = 0; i < cfg.vocab_size; ++i) {
    std::string word;
    bool accepted = false;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      int len = cfg.word_len_range.first +
                static_cast<int>(rng.below(static_cast<std::uint64_t>(len_span)));
      word.clear();
      for (int k = 0; k < len; ++k) {
        utf8::append(cfg.alphabet[rng.below(cfg.alphabet.size())], word);
      }
      if (seen.insert(word).second) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw InvalidInputError(
          "gen_synthetic: alphabet and length range cannot supply " +
          std::to_string(cfg.vocab_size) + " distinct words");
    }
    std::uint64_t freq = 1 + rng.below(1000);
    out.vocab.entries.push_back(VocabEntry{std::move(word), freq});
  }

  out.grams = build_gram_set(out.vocab, cfg.n_min, cfg.n_max);

  /* Vectors in sorted-gram order. A proper byte prefix sorts strictly
   * earlier, so every ancestor row is already final when its child needs
   * it. */
  out.matrix = EmbeddingMatrix(out.grams.size(), cfg.dim);
  std::vector<float> row(cfg.dim);
  for (std::size_t i = 0; i < out.grams.size(); ++i) {
    const std::string& text = out.grams.grams[i].text;
    std::optional<std::size_t> parent;
    for (std::size_t len = text.size() - 1; len >= 1; --len) {
      parent = out.grams.find(std::string_view(text).substr(0, len));
      if (parent) break;
    }
    if (parent) {
      auto prow = out.matrix.row(*parent);
      if (cfg.noise_sigma > 0.0) {
        for (std::size_t d = 0; d < cfg.dim; ++d) {
          row[d] = static_cast<float>(
              static_cast<double>(prow[d]) + cfg.noise_sigma * rng.gaussian());
        }
      } else {
        std::copy(prow.begin(), prow.end(), row.begin());
      }
    } else {
      double norm = 0.0;
      std::vector<double> draw(cfg.dim);
      do {
        norm = 0.0;
        for (std::size_t d = 0; d < cfg.dim; ++d) {
          draw[d] = rng.gaussian();
          norm += draw[d] * draw[d];
        }
        norm = std::sqrt(norm);
      } while (norm == 0.0);
      for (std::size_t d = 0; d < cfg.dim; ++d) {
        row[d] = static_cast<float>(draw[d] / norm);
      }
    }
    out.matrix.set_row(i, row);
  }
  return out;
}

MemoryEstimate estimate_memory(std::uint64_t gram_count,
                               std::uint64_t unique_count, std::uint64_t dim,
                               double avg_key_len) {
  if (avg_key_len <= 0.0) {
    throw InvalidInputError("estimate_memory: avg_key_len must be positive");
  }
  MemoryEstimate est;
  est.original_bytes = gram_count * dim * 4 + gram_count * 8;
  std::uint64_t trie_bytes = static_cast<std::uint64_t>(
      avg_key_len * 16.0 * static_cast<double>(gram_count));
  est.compressed_bytes = unique_count * dim * 4 + trie_bytes;
  est.ratio = est.compressed_bytes == 0
                  ? 1.0
                  : static_cast<double>(est.original_bytes) /
                        static_cast<double>(est.compressed_bytes);
  return est;
}

MemoryEstimate estimate_memory(std::uint64_t gram_count,
                               std::uint64_t unique_count, std::uint64_t dim,
                               const DoubleArrayTrie& trie) {
  MemoryEstimate est;
  est.original_bytes = gram_count * dim * 4 + gram_count * 8;
  std::uint64_t trie_bytes =
      static_cast<std::uint64_t>(trie.slot_count()) * 16 +
      static_cast<std::uint64_t>(trie.key_count()) * 16;
  est.compressed_bytes = unique_count * dim * 4 + trie_bytes;
  est.ratio = est.compressed_bytes == 0
                  ? 1.0
                  : static_cast<double>(est.original_bytes) /
                        static_cast<double>(est.compressed_bytes);
  return est;
}

EvalReport analyze(const CompressedModel& before, const CompressedModel& after,
                   const PipelineReport& report, const Vocabulary& vocab) {
  EvalReport rep;
  rep.ratio = report.stats.ratio();
  rep.grams_total = report.stats.grams_total;
  rep.unique_after_prefix = report.stats.unique_after_prefix;
  rep.unique_after_suffix = report.stats.unique_after_suffix;
  rep.unique_final = report.stats.unique_final;
  rep.prefix_merges = report.stats.prefix_merges;
  rep.suffix_merges = report.stats.suffix_merges;

  if (!report.merges.empty()) {
    double sum = 0.0;
    for (const MergeRecord& m : report.merges) sum += m.similarity;
    rep.merged_sim_mean = sum / static_cast<double>(report.merges.size());
    double var = 0.0;
    for (const MergeRecord& m : report.merges) {
      double d = m.similarity - rep.merged_sim_mean;
      var += d * d;
    }
    rep.merged_sim_std =
        std::sqrt(var / static_cast<double>(report.merges.size()));
  }

  reconstruction_cosines(before, after, vocab, rep.reconstruction_mean_cosine,
                         rep.reconstruction_min_cosine);

  rep.memory = estimate_memory(report.stats.grams_total,
                               after.meta.unique_count, after.meta.dim,
                               after.trie);
  return rep;
}

void write_report(const EvalReport& report, std::ostream& out) {
  out << "ratio: " << fixed6(report.ratio) << '\n';
  out << "grams_total: " << report.grams_total << '\n';
  out << "unique_after_prefix: " << report.unique_after_prefix << '\n';
  out << "unique_after_suffix: " << report.unique_after_suffix << '\n';
  out << "unique_final: " << report.unique_final << '\n';
  out << "prefix_merges: " << report.prefix_merges << '\n';
  out << "suffix_merges: " << report.suffix_merges << '\n';
  out << "merged_sim_mean: " << fixed6(report.merged_sim_mean) << '\n';
  out << "merged_sim_std: " << fixed6(report.merged_sim_std) << '\n';
  out << "reconstruction_mean_cosine: "
      << fixed6(report.reconstruction_mean_cosine) << '\n';
  out << "reconstruction_min_cosine: "
      << fixed6(report.reconstruction_min_cosine) << '\n';
  out << "original_bytes: " << report.memory.original_bytes << '\n';
  out << "compressed_bytes: " << report.memory.compressed_bytes << '\n';
  out << "memory_ratio: " << fixed6(report.memory.ratio) << '\n';
}

std::vector<SweepRow> threshold_sweep(const GramSet& grams,
                                      const EmbeddingMatrix& embeddings,
                                      const Vocabulary& vocab,
                                      const SimilarityConfig& base_cfg,
                                      std::vector<double> taus, int n_min,
                                      int n_max) {
  if (taus.empty()) {
    throw InvalidInputError("threshold_sweep: no thresholds given");
  }
  std::sort(taus.begin(), taus.end());

  CompressedModel before =
      make_uncompressed_model(grams, embeddings, base_cfg, n_min, n_max);

  std::vector<SweepRow> rows;
  rows.reserve(taus.size());
  for (double tau : taus) {
    SimilarityConfig cfg = base_cfg;
    cfg.tau = tau;
    PipelineResult res = run_pipeline(grams, embeddings, cfg, n_min, n_max);
    EvalReport rep = analyze(before, res.model, res.report, vocab);
    rows.push_back(SweepRow{tau, rep.ratio, rep.reconstruction_mean_cosine});
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "tau,ratio,reconstruction_mean_cosine\n";
  for (const SweepRow& r : rows) {
    out << fixed6(r.tau) << ',' << fixed6(r.ratio) << ','
        << fixed6(r.reconstruction_mean_cosine) << '\n';
  }
}

HashBaselineReport hash_baseline_report(const GramSet& grams,
                                        std::uint64_t bucket_count) {
  if (bucket_count == 0) {
    throw InvalidInputError("hash_baseline_report: bucket_count must be >= 1");
  }
  HashBaselineReport rep;
  if (grams.size() == 0) return rep;

  std::unordered_map<std::uint64_t, std::uint64_t> load;
  for (const NGram& g : grams.grams) {
    ++load[hash_bucket(g, bucket_count)];
  }
  std::uint64_t colliding = 0;
  for (const auto& [bucket, n] : load) {
    rep.max_bucket_load = std::max(rep.max_bucket_load, n);
    if (n >= 2) colliding += n;
  }
  rep.collision_rate =
      static_cast<double>(colliding) / static_cast<double>(grams.size());
  return rep;
}

}  // namespace gramtrie
