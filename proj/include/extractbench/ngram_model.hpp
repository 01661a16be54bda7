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

#ifndef EXTRACTBENCH_NGRAM_MODEL_HPP_
#define EXTRACTBENCH_NGRAM_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "extractbench/corpus.hpp"
#include "extractbench/language_model.hpp"

namespace extractbench {

struct NGramOptions {
  int order = 5;
  double add_k = 0.01;
  // Interpolation weight per order, lowest order first. Empty means
  // weights proportional to 1, 2, 4, ... normalized to sum to one.
  std::vector<double> lambdas;
  int embed_dim = 32;
  int cooccurrence_window = 2;
  // Mean of the Gaussian projection entries. A positive mean keeps part of
  // the (non-negative) PPMI mass as a shared direction, which sets how
  // similar unrelated tokens look to contrastive search.
  double projection_mean = 0.16;
  std::uint64_t seed = 0;
};

std::vector<double> default_lambdas(int order);

// Interpolated add-k n-gram model:
//   P(v | ctx) = sum_i lambda_i (c_i(ctx_i, v) + k) / (c_i(ctx_i) + k |V|)
// where ctx_i is the last i - 1 tokens of the context. Contexts shorter than
// i - 1 tokens, or never observed, contribute the uniform 1 / |V|.
class NGramModel final : public LanguageModel {
 public:
  std::size_t vocab_size() const override { return vocab_size_; }
  void next_dist(TokenSpan context, std::span<double> out) const override;
  double prob(TokenSpan context, TokenId token) const override;
  const RowMatrixXd& embeddings() const override { return embeddings_; }
  using LanguageModel::next_dist;

  int order() const { return static_cast<int>(tables_.size()); }
  double add_k() const { return add_k_; }
  const std::vector<double>& lambdas() const { return lambdas_; }

  // Raw count of `token` after `context` at the order given by context.size() + 1.
  std::uint64_t count(TokenSpan context, TokenId token) const;
  // Total successor count of `context` (same order convention).
  std::uint64_t context_total(TokenSpan context) const;

  void save(const std::filesystem::path& path) const;
  static NGramModel load(const std::filesystem::path& path);

  friend NGramModel train_ngram(std::span<const TokenSeq> docs, std::size_t vocab_size,
                                const NGramOptions& options);

 private:
  // Count table for one order. Contexts are packed `bits_` per token.
  struct Table {
    std::unordered_map<std::uint64_t, std::uint32_t> index;  // context key -> slot
    std::vector<std::uint64_t> keys;      // sorted context keys
    std::vector<std::uint64_t> totals;    // per slot
    std::vector<std::uint32_t> offsets;   // slot -> [offsets[s], offsets[s + 1])
    std::vector<TokenId> next_tokens;     // ascending within a slot
    std::vector<std::uint32_t> next_counts;

    void rebuild_index();
  };

  // Slot for the last `len` tokens of `context`, or -1.
  std::int64_t find_slot(const Table& table, TokenSpan context, std::size_t len) const;

  std::size_t vocab_size_ = 0;
  unsigned bits_ = 1;
  double add_k_ = 0.01;
  std::vector<double> lambdas_;
  std::vector<Table> tables_;  // tables_[i] holds contexts of length i
  RowMatrixXd embeddings_;
};

NGramModel train_ngram(std::span<const TokenSeq> docs, std::size_t vocab_size,
                       const NGramOptions& options);
NGramModel train_ngram(const Corpus& corpus, const NGramOptions& options);

// Positive pointwise mutual information of token co-occurrences within
// +-window positions, |V| x |V|.
Eigen::MatrixXd ppmi_matrix(std::span<const TokenSeq> docs, std::size_t vocab_size, int window);

}  // namespace extractbench

#endif  // EXTRACTBENCH_NGRAM_MODEL_HPP_
