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

#include "extractbench/language_model.hpp"

#include <cmath>
#include <string>

#include "extractbench/random.hpp"

namespace extractbench {

double LanguageModel::prob(TokenSpan context, TokenId token) const {
  if (token < 0 || static_cast<std::size_t>(token) >= vocab_size())
    throw ArgumentError("token id out of range: " + std::to_string(token));
  std::vector<double> dist(vocab_size());
  next_dist(context, dist);
  return dist[static_cast<std::size_t>(token)];
}

std::vector<double> LanguageModel::next_dist(TokenSpan context) const {
  std::vector<double> dist(vocab_size());
  next_dist(context, dist);
  return dist;
}

Eigen::VectorXd LanguageModel::token_repr(TokenId id) const {
  const auto& e = embeddings();
  if (id < 0 || id >= e.rows()) throw ArgumentError("token id out of range: " + std::to_string(id));
  return e.row(id).transpose();
}

double sequence_loss(const LanguageModel& model, TokenSpan prefix, TokenSpan continuation) {
  if (continuation.empty()) throw ArgumentError("sequence_loss needs a non-empty continuation");
  TokenSeq context(prefix.begin(), prefix.end());
  context.reserve(prefix.size() + continuation.size());
  double nll = 0.0;
  for (TokenId t : continuation) {
    nll -= std::log(model.prob(context, t));
    context.push_back(t);
  }
  // -log(1) can come out as -0.0.
  return std::max(0.0, nll / static_cast<double>(continuation.size()));
}

UniformModel::UniformModel(std::size_t vocab_size, std::size_t embed_dim, std::uint64_t seed)
    : vocab_size_(vocab_size), embeddings_(vocab_size, embed_dim) {
  if (vocab_size == 0 || embed_dim == 0) throw ArgumentError("UniformModel needs non-zero sizes");
  Rng rng(seed);
  for (Eigen::Index r = 0; r < embeddings_.rows(); ++r)
    for (Eigen::Index c = 0; c < embeddings_.cols(); ++c) embeddings_(r, c) = rng.normal();
  normalize_rows(embeddings_);
}

void UniformModel::next_dist(TokenSpan, std::span<double> out) const {
  const double p = 1.0 / static_cast<double>(vocab_size_);
  for (double& x : out) x = p;
}

double UniformModel::prob(TokenSpan, TokenId token) const {
  if (token < 0 || static_cast<std::size_t>(token) >= vocab_size_)
    throw ArgumentError("token id out of range: " + std::to_string(token));
  return 1.0 / static_cast<double>(vocab_size_);
}

}  // namespace extractbench
