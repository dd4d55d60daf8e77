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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gramtrie/compressor.hpp"
#include "gramtrie/errors.hpp"
#include "gramtrie/evalkit.hpp"
#include "gramtrie/model_io.hpp"
#include "gramtrie/ngram.hpp"
#include "gramtrie/query.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

bool g_verbose = false;

void note(const std::string& msg) {
  if (g_verbose) std::cerr << msg << '\n';
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

/* The vectors file must carry exactly the vocabulary's gram set, already in
 * the same (byte-sorted) order, so row i belongs to gram i. */
void require_token_match(const gramtrie::GramSet& grams,
                         const std::vector<std::string>& tokens) {
  if (tokens.size() != grams.size()) {
    throw gramtrie::InvalidInputError(
        "vectors file has " + std::to_string(tokens.size()) +
        " tokens but the vocabulary yields " + std::to_string(grams.size()) +
        " grams");
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] != grams.grams[i].text) {
      throw gramtrie::InvalidInputError(
          "vectors token '" + tokens[i] + "' does not match gram '" +
          grams.grams[i].text + "' at index " + std::to_string(i));
    }
  }
}

struct CompressArgs {
  std::string vocab_path;
  std::string vectors_path;
  std::string out_path;
  double tau = 0.999;
  int n_min = 2;
  int n_max = 6;
  double freq_lambda = 0.0;
  std::string report_path;
};

int cmd_compress(const CompressArgs& a) {
  gramtrie::SimilarityConfig cfg;
  cfg.tau = a.tau;
  cfg.freq_lambda = a.freq_lambda;
  cfg.validate();

  gramtrie::Vocabulary vocab = gramtrie::load_vocabulary(a.vocab_path);
  gramtrie::TextVectors tv = gramtrie::load_text_vectors(a.vectors_path);
  gramtrie::GramSet grams = gramtrie::build_gram_set(vocab, a.n_min, a.n_max);
  require_token_match(grams, tv.tokens);
  note("loaded " + std::to_string(vocab.entries.size()) + " words, " +
       std::to_string(grams.size()) + " grams");

  gramtrie::PipelineResult res =
      gramtrie::run_pipeline(grams, tv.matrix, cfg, a.n_min, a.n_max);
  gramtrie::save_model(res.model, a.out_path);
  note("model written to " + a.out_path);

  if (!a.report_path.empty()) {
    gramtrie::CompressedModel before = gramtrie::make_uncompressed_model(
        grams, tv.matrix, cfg, a.n_min, a.n_max);
    gramtrie::EvalReport rep =
        gramtrie::analyze(before, res.model, res.report, vocab);
    std::ofstream out(a.report_path, std::ios::binary);
    if (!out) {
      throw gramtrie::IoError("cannot open report file for writing: " +
                              a.report_path);
    }
    gramtrie::write_report(rep, out);
    out.flush();
    if (!out) {
      throw gramtrie::IoError("write failure on report file: " +
                              a.report_path);
    }
  }

  std::cout << "compressed " << res.report.stats.grams_total << " grams into "
            << res.report.stats.unique_final << " rows (ratio "
            << fixed6(res.report.stats.ratio()) << ")\n";
  return kExitOk;
}

struct QueryArgs {
  std::string model_path;
  std::string word;
  int top_k = 0;
  std::string candidates_path;
};

int cmd_query(const QueryArgs& a) {
  gramtrie::CompressedModel model = gramtrie::load_model(a.model_path);

  if (a.top_k > 0) {
    if (a.candidates_path.empty()) {
      throw gramtrie::InvalidInputError("--topk requires --candidates");
    }
    gramtrie::Vocabulary cand = gramtrie::load_vocabulary(a.candidates_path);
    std::vector<std::string> words;
    words.reserve(cand.entries.size());
    for (const auto& e : cand.entries) words.push_back(e.word);
    auto ranked = gramtrie::nearest_words(model, a.word, words,
                                          static_cast<std::size_t>(a.top_k));
    for (const auto& [word, score] : ranked) {
      std::cout << word << ' ' << fixed6(score) << '\n';
    }
    return kExitOk;
  }

  gramtrie::WordVector wv = gramtrie::word_vector(model, a.word);
  note("grams found: " + std::to_string(wv.gram_hits) + "/" +
       std::to_string(wv.gram_total));
  for (std::size_t d = 0; d < wv.values.size(); ++d) {
    if (d > 0) std::cout << ' ';
    std::cout << fixed6(wv.values[d]);
  }
  std::cout << '\n';
  return kExitOk;
}

int cmd_inspect(const std::string& model_path) {
  gramtrie::CompressedModel model = gramtrie::load_model(model_path);
  const gramtrie::ModelMeta& m = model.meta;
  std::cout << "format_version: " << static_cast<int>(m.format_version) << '\n'
            << "dim: " << m.dim << '\n'
            << "gram_count: " << m.gram_count << '\n'
            << "unique_count: " << m.unique_count << '\n'
            << "ratio: "
            << fixed6(static_cast<double>(m.gram_count) /
                      static_cast<double>(m.unique_count))
            << '\n'
            << "tau: " << fixed6(m.tau) << '\n'
            << "n_min: " << static_cast<int>(m.n_min) << '\n'
            << "n_max: " << static_cast<int>(m.n_max) << '\n'
            << "trie_slots: " << model.trie.slot_count() << '\n'
            << "trie_terminals: " << model.trie.key_count() << '\n'
            << "checksum: ok\n";
  return kExitOk;
}

struct SynthArgs {
  std::uint64_t seed = 1;
  std::size_t vocab_size = 100;
  std::size_t dim = 32;
  double noise = 0.0;
  std::string out_prefix;
};

int cmd_synth(const SynthArgs& a) {
  gramtrie::SynthConfig cfg;
  cfg.seed = a.seed;
  cfg.vocab_size = a.vocab_size;
  cfg.dim = a.dim;
  cfg.noise_sigma = a.noise;
  gramtrie::SynthData data = gramtrie::gen_synthetic(cfg);

  std::string vocab_path = a.out_prefix + ".vocab";
  std::string vec_path = a.out_prefix + ".vec";

  std::ofstream vout(vocab_path, std::ios::binary);
  if (!vout) {
    throw gramtrie::IoError("cannot open vocabulary file for writing: " +
                            vocab_path);
  }
  for (const auto& e : data.vocab.entries) {
    vout << e.word << '\t' << e.frequency << '\n';
  }
  vout.flush();
  if (!vout) {
    throw gramtrie::IoError("write failure on vocabulary file: " + vocab_path);
  }

  std::vector<std::string> tokens;
  tokens.reserve(data.grams.size());
  for (const auto& g : data.grams.grams) tokens.push_back(g.text);
  gramtrie::save_text_vectors(vec_path, tokens, data.matrix);

  std::cout << "words: " << data.vocab.entries.size() << '\n'
            << "grams: " << data.grams.size() << '\n'
            << "vocab: " << vocab_path << '\n'
            << "vectors: " << vec_path << '\n';
  return kExitOk;
}

struct SweepArgs {
  std::string vocab_path;
  std::string vectors_path;
  std::string taus_text;
  std::string out_path;
  int n_min = 2;
  int n_max = 6;
};

int cmd_sweep(const SweepArgs& a) {
  std::vector<double> taus;
  {
    std::size_t pos = 0;
    while (pos <= a.taus_text.size()) {
      std::size_t comma = a.taus_text.find(',', pos);
      if (comma == std::string::npos) comma = a.taus_text.size();
      std::string piece = a.taus_text.substr(pos, comma - pos);
      try {
        std::size_t used = 0;
        double tau = std::stod(piece, &used);
        if (used != piece.size()) throw std::invalid_argument(piece);
        taus.push_back(tau);
      } catch (const std::exception&) {
        throw gramtrie::InvalidInputError("unparsable tau value '" + piece +
                                          "' in --taus");
      }
      pos = comma + 1;
    }
  }
  for (double tau : taus) {
    gramtrie::SimilarityConfig probe;
    probe.tau = tau;
    probe.validate();
  }

  gramtrie::Vocabulary vocab = gramtrie::load_vocabulary(a.vocab_path);
  gramtrie::TextVectors tv = gramtrie::load_text_vectors(a.vectors_path);
  gramtrie::GramSet grams = gramtrie::build_gram_set(vocab, a.n_min, a.n_max);
  require_token_match(grams, tv.tokens);

  gramtrie::SimilarityConfig base;
  auto rows = gramtrie::threshold_sweep(grams, tv.matrix, vocab, base, taus,
                                        a.n_min, a.n_max);

  std::ofstream out(a.out_path, std::ios::binary);
  if (!out) {
    throw gramtrie::IoError("cannot open sweep file for writing: " +
                            a.out_path);
  }
  gramtrie::write_sweep_csv(rows, out);
  out.flush();
  if (!out) {
    throw gramtrie::IoError("write failure on sweep file: " + a.out_path);
  }
  std::cout << "wrote " << rows.size() << " sweep rows to " << a.out_path
            << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gramtrie: n-gram embedding table compressor"};
  app.require_subcommand(1);
  app.add_flag("--verbose", g_verbose, "progress notes on standard error");
  std::uint64_t global_seed = 1;
  CLI::Option* global_seed_opt = app.add_option(
      "--seed", global_seed, "seed for commands that draw randomness");

  CompressArgs ca;
  CLI::App* compress =
      app.add_subcommand("compress", "compress a vocabulary's gram table");
  compress->add_option("--vocab", ca.vocab_path, "vocabulary file")
      ->required();
  compress->add_option("--vectors", ca.vectors_path, "text vectors file")
      ->required();
  compress->add_option("--out", ca.out_path, "output model path")->required();
  compress->add_option("--tau", ca.tau, "merge threshold, in (0, 1]");
  compress->add_option("--nmin", ca.n_min, "shortest gram length");
  compress->add_option("--nmax", ca.n_max, "longest gram length");
  compress->add_option("--freq-lambda", ca.freq_lambda,
                       "frequency penalty weight, in [0, 1]");
  compress->add_option("--report", ca.report_path, "evaluation report path");

  QueryArgs qa;
  CLI::App* query = app.add_subcommand("query", "compose word vectors");
  query->add_option("--model", qa.model_path, "model file")->required();
  query->add_option("--word", qa.word, "word to look up")->required();
  query->add_option("--topk", qa.top_k, "rank this many nearest candidates");
  query->add_option("--candidates", qa.candidates_path,
                    "candidate word list (one per line)");

  std::string inspect_model;
  CLI::App* inspect = app.add_subcommand("inspect", "print model facts");
  inspect->add_option("--model", inspect_model, "model file")->required();

  SynthArgs sa;
  CLI::App* synth =
      app.add_subcommand("synth", "write a synthetic fixture corpus");
  CLI::Option* synth_seed_opt = synth->add_option("--seed", sa.seed,
                                                  "random seed");
  synth->add_option("--vocab-size", sa.vocab_size, "number of words");
  synth->add_option("--dim", sa.dim, "vector dimensionality");
  synth->add_option("--noise", sa.noise, "parent-child noise sigma");
  synth->add_option("--out-prefix", sa.out_prefix,
                    "writes <prefix>.vocab and <prefix>.vec")
      ->required();

  SweepArgs wa;
  CLI::App* sweep =
      app.add_subcommand("sweep", "one pipeline run per threshold");
  sweep->add_option("--vocab", wa.vocab_path, "vocabulary file")->required();
  sweep->add_option("--vectors", wa.vectors_path, "text vectors file")
      ->required();
  sweep->add_option("--taus", wa.taus_text, "comma-separated thresholds")
      ->required();
  sweep->add_option("--out", wa.out_path, "output CSV path")->required();
  sweep->add_option("--nmin", wa.n_min, "shortest gram length");
  sweep->add_option("--nmax", wa.n_max, "longest gram length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }
  if (global_seed_opt->count() > 0 && synth_seed_opt->count() == 0) {
    sa.seed = global_seed;
  }

  try {
    if (compress->parsed()) return cmd_compress(ca);
    if (query->parsed()) return cmd_query(qa);
    if (inspect->parsed()) return cmd_inspect(inspect_model);
    if (synth->parsed()) return cmd_synth(sa);
    if (sweep->parsed()) return cmd_sweep(wa);
  } catch (const gramtrie::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const gramtrie::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
