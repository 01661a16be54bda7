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

#ifndef EXTRACTBENCH_LANGUAGE_MODEL_HPP_
#define EXTRACTBENCH_LANGUAGE_MODEL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "extractbench/types.hpp"

namespace extractbench {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// The queryable model of the attack. Implementations are immutable after
// construction, so every method may be called concurrently.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::size_t vocab_size() const = 0;

  // Writes P(. | context) into `out`, which must hold vocab_size() entries.
  virtual void next_dist(TokenSpan context, std::span<double> out) const = 0;

  // P(token | context). The default goes through next_dist.
  virtual double prob(TokenSpan context, TokenId token) const;

  // |V| x d matrix of token representations, one row per token.
  virtual const RowMatrixXd& embeddings() const = 0;

  std::vector<double> next_dist(TokenSpan context) const;
  Eigen::VectorXd token_repr(TokenId id) const;
};

// Mean per-token negative log-likelihood of `continuation` given `prefix`.
// Throws ArgumentError on an empty continuation.
double sequence_loss(const LanguageModel& model, TokenSpan prefix, TokenSpan continuation);

// Untrained stand-in: every distribution is uniform. Representations are
// seeded random unit vectors.
class UniformModel final : public LanguageModel {
 public:
  UniformModel(std::size_t vocab_size, std::size_t embed_dim, std::uint64_t seed);

  std::size_t vocab_size() const override { return vocab_size_; }
  void next_dist(TokenSpan context, std::span<double> out) const override;
  double prob(TokenSpan context, TokenId token) const override;
  const RowMatrixXd& embeddings() const override { return embeddings_; }
  using LanguageModel::next_dist;

 private:
  std::size_t vocab_size_;
  RowMatrixXd embeddings_;
};

// Rows scaled to unit L2 norm; all-zero rows are left untouched.
template <typename Derived>
void normalize_rows(Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto norm = m.row(r).norm();
    if (norm > 0) m.row(r) /= norm;
  }
}

}  // namespace extractbench

#endif  // EXTRACTBENCH_LANGUAGE_MODEL_HPP_
