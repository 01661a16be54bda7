// Copyright 2026 The extractbench Authors.
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

#ifndef EXTRACTBENCH_CORPUS_HPP_
#define EXTRACTBENCH_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "extractbench/types.hpp"

namespace extractbench {

// Token strings are the decimal ids, so "space-joined token strings" and
// "space-joined token ids" coincide.
class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(std::vector<std::string> tokens);
  static Vocab numeric(std::size_t size);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  TokenId lookup(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

struct CorpusSpec {
  std::size_t vocab_size = 256;
  std::size_t n_background_docs = 2000;
  std::size_t doc_len = 200;
  std::size_t n_canaries = 400;
  std::size_t canary_len = 100;
  std::vector<int> dup_counts;  // one entry per canary
  std::uint64_t seed = 0;
  // Background order-2 Markov chain: every (a, b) state gets `markov_branching`
  // successors with Dirichlet(`markov_concentration`) weights.
  std::size_t markov_branching = 4;
  double markov_concentration = 1.0;
  // Successors are drawn with Zipf(`markov_zipf`) preference over a random
  // token ranking; 0 draws them uniformly.
  double markov_zipf = 1.0;

  // Throws ConfigError on the first violated invariant.
  void validate() const;
};

// The desk-scale default benchmark: 256 tokens, 2000 x 200 background,
// 400 canaries cycling through dup counts {1, 2, 5, 10, 25}.
CorpusSpec default_corpus_spec(std::uint64_t seed);
std::vector<int> cycled_dup_counts(std::size_t n, const std::vector<int>& levels);

struct Canary {
  TokenSeq tokens;
  int dup_count = 0;
  friend bool operator==(const Canary&, const Canary&) = default;
};

struct Corpus {
  Vocab vocab;
  std::vector<TokenSeq> docs;
  std::map<std::int64_t, Canary> canary_index;
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct ExtractionSample {
  std::int64_t sample_id = 0;
  TokenSeq prefix;
  TokenSeq suffix;
  int dup_count = 0;
  friend bool operator==(const ExtractionSample&, const ExtractionSample&) = default;
};

// Background documents and canary sequences before injection.
struct World {
  Vocab vocab;
  std::vector<TokenSeq> background;
  std::map<std::int64_t, Canary> canaries;
};

World synth_world(const CorpusSpec& spec);

// Inserts each listed canary dup_count times at random positions between
// background tokens. Unlisted canaries are absent from the result.
Corpus inject_canaries(const World& world, const std::vector<std::int64_t>& canary_ids, std::uint64_t seed);

// synth_world followed by injection of every canary.
Corpus synth_corpus(const CorpusSpec& spec);

// One sample per canary; canaries whose prefix is followed elsewhere in the
// corpus by a different continuation are dropped.
std::vector<ExtractionSample> extract_samples(const Corpus& corpus, std::size_t prefix_len,
                                              std::size_t suffix_len);

struct SampleSplit {
  std::vector<ExtractionSample> train;
  std::vector<ExtractionSample> test;
};

// Order-preserving split at floor(train_frac * N).
SampleSplit split_samples(const std::vector<ExtractionSample>& samples, double train_frac);

// Total number of contiguous occurrences of `needle` across all documents.
std::size_t count_occurrences(const Corpus& corpus, TokenSpan needle);

// corpus.txt (one document per line) + corpus.meta.json (vocab, canaries).
void write_corpus(const Corpus& corpus, const std::filesystem::path& text_path,
                  const std::filesystem::path& meta_path);
Corpus read_corpus(const std::filesystem::path& text_path, const std::filesystem::path& meta_path);

// JSON Lines: {"sample_id", "prefix", "suffix", "dup_count"}.
void write_samples(const std::vector<ExtractionSample>& samples, const std::filesystem::path& path);
std::vector<ExtractionSample> read_samples(const std::filesystem::path& path);

}  // namespace extractbench

#endif  // EXTRACTBENCH_CORPUS_HPP_
