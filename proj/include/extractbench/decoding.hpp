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

#ifndef EXTRACTBENCH_DECODING_HPP_
#define EXTRACTBENCH_DECODING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "extractbench/language_model.hpp"

namespace extractbench {

enum class Strategy { kGreedy, kTopKSample, kBeam, kContrastive };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

struct DecodeParams {
  Strategy strategy = Strategy::kContrastive;
  std::size_t suffix_len = 50;
  std::size_t num_generations = 100;
  double alpha = 0.6;
  std::size_t k = 4;
  std::size_t beam_width = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Generation {
  TokenSeq suffix;
  // Total log-probability of the suffix under the model.
  double score = 0.0;
  friend bool operator==(const Generation&, const Generation&) = default;
};

// Token ids of the k most probable entries, most probable first; equal
// probabilities are ordered by lower id.
std::vector<TokenId> top_k_tokens(std::span<const double> dist, std::size_t k);

Generation greedy_decode(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len);

// m independent samples from the k-truncated, renormalized distribution.
// Generation g draws from the stream derive_seed(seed, {g}).
std::vector<Generation> topk_sample(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len,
                                    std::size_t k, std::size_t m, std::uint64_t seed);

// Length-synchronous beam search on summed log-probability. Returns the best
// m beams, best first; equal scores are ordered lexicographically.
std::vector<Generation> beam_search(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len,
                                    std::size_t beam_width, std::size_t m);

// Pairwise cosine similarity of token representations, |V| x |V|.
Eigen::MatrixXd token_similarity(const LanguageModel& model);

// At every step the pool is the top-k tokens of next_dist, and the pick maximizes
//   (1 - alpha) P(v | ctx) - alpha max_j cos(repr(v), repr(ctx_j))
// over the whole context (prefix and generated tokens).
Generation contrastive_search(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len,
                              double alpha, std::size_t k);

// Generation 0 is contrastive_search. Generation g >= 1 samples its first
// token from the top-k renormalized distribution (stream derive_seed(seed, {g}))
// and continues with contrastive scoring. Duplicates are kept.
std::vector<Generation> contrastive_multi(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len,
                                          double alpha, std::size_t k, std::size_t m, std::uint64_t seed);

// Dispatch on params.strategy; `seed` is the per-prefix stream seed.
std::vector<Generation> decode(const LanguageModel& model, TokenSpan prefix, const DecodeParams& params,
                               std::uint64_t seed);

}  // namespace extractbench

#endif  // EXTRACTBENCH_DECODING_HPP_
