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

#include "extractbench/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "extractbench/random.hpp"

namespace extractbench {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kGreedy: return "greedy";
    case Strategy::kTopKSample: return "topk_sample";
    case Strategy::kBeam: return "beam";
    case Strategy::kContrastive: return "contrastive";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "greedy") return Strategy::kGreedy;
  if (name == "topk_sample") return Strategy::kTopKSample;
  if (name == "beam") return Strategy::kBeam;
  if (name == "contrastive") return Strategy::kContrastive;
  throw ConfigError("unknown decoding strategy '" + name + "'");
}

void DecodeParams::validate() const {
  if (suffix_len < 1) throw ConfigError("suffix_len must be >= 1");
  if (num_generations < 1) throw ConfigError("num_generations must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (beam_width < 1) throw ConfigError("beam_width must be >= 1");
  if (strategy == Strategy::kBeam && beam_width < num_generations)
    throw ConfigError("beam search needs beam_width >= num_generations");
}

std::vector<TokenId> top_k_tokens(std::span<const double> dist, std::size_t k) {
  std::vector<TokenId> ids(dist.size());
  std::iota(ids.begin(), ids.end(), 0);
  k = std::min(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), [&](TokenId a, TokenId b) {
    const double pa = dist[static_cast<std::size_t>(a)], pb = dist[static_cast<std::size_t>(b)];
    return pa != pb ? pa > pb : a < b;
  });
  ids.resize(k);
  return ids;
}

Generation greedy_decode(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len) {
  TokenSeq context(prefix.begin(), prefix.end());
  std::vector<double> dist(model.vocab_size());
  Generation g;
  g.suffix.reserve(suffix_len);
  for (std::size_t t = 0; t < suffix_len; ++t) {
    model.next_dist(context, dist);
    // max_element returns the first maximum, i.e. the lowest id on ties.
    const auto best = static_cast<TokenId>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    g.score += std::log(dist[static_cast<std::size_t>(best)]);
    g.suffix.push_back(best);
    context.push_back(best);
  }
  return g;
}

namespace {

TokenId sample_top_k(std::span<const double> dist, std::size_t k, Rng& rng) {
  const std::vector<TokenId> pool = top_k_tokens(dist, k);
  std::vector<double> w(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) w[i] = dist[static_cast<std::size_t>(pool[i])];
  return pool[rng.categorical(w)];
}

}  // namespace

std::vector<Generation> topk_sample(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len,
                                    std::size_t k, std::size_t m, std::uint64_t seed) {
  if (k < 1 || k > model.vocab_size()) throw ArgumentError("topk_sample needs 1 <= k <= |V|");
  std::vector<Generation> out;
  out.reserve(m);
  std::vector<double> dist(model.vocab_size());
  for (std::size_t g = 0; g < m; ++g) {
    Rng rng(derive_seed(seed, {g}));
    TokenSeq context(prefix.begin(), prefix.end());
    Generation gen;
    for (std::size_t t = 0; t < suffix_len; ++t) {
      model.next_dist(context, dist);
      const TokenId tok = sample_top_k(dist, k, rng);
      gen.score += std::log(dist[static_cast<std::size_t>(tok)]);
      gen.suffix.push_back(tok);
      context.push_back(tok);
    }
    out.push_back(std::move(gen));
  }
  return out;
}

std::vector<Generation> beam_search(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len,
                                    std::size_t beam_width, std::size_t m) {
  if (beam_width < 1) throw ArgumentError("beam_width must be >= 1");
  if (beam_width < m) throw ArgumentError("beam_width must be >= number of returned beams");
  const std::size_t v = model.vocab_size();

  struct Expansion {
    std::size_t parent;
    TokenId token;
    double score;
  };
  std::vector<Generation> beams(1);
  std::vector<double> dist(v);
  std::vector<Expansion> pool;
  TokenSeq context;
  for (std::size_t t = 0; t < suffix_len; ++t) {
    pool.clear();
    pool.reserve(beams.size() * v);
    for (std::size_t b = 0; b < beams.size(); ++b) {
      context.assign(prefix.begin(), prefix.end());
      context.insert(context.end(), beams[b].suffix.begin(), beams[b].suffix.end());
      model.next_dist(context, dist);
      for (std::size_t tok = 0; tok < v; ++tok)
        pool.push_back({b, static_cast<TokenId>(tok), beams[b].score + std::log(dist[tok])});
    }
    // Equal scores fall back to lexicographic order of the extended sequence.
    auto better = [&](const Expansion& a, const Expansion& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.parent != b.parent) return beams[a.parent].suffix < beams[b.parent].suffix;
      return a.token < b.token;
    };
    const std::size_t keep = std::min(beam_width, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end(), better);
    std::vector<Generation> next(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      next[i].suffix = beams[pool[i].parent].suffix;
      next[i].suffix.push_back(pool[i].token);
      next[i].score = pool[i].score;
    }
    beams = std::move(next);
  }
  std::stable_sort(beams.begin(), beams.end(), [](const Generation& a, const Generation& b) {
    return a.score != b.score ? a.score > b.score : a.suffix < b.suffix;
  });
  beams.resize(std::min(m, beams.size()));
  return beams;
}

Eigen::MatrixXd token_similarity(const LanguageModel& model) {
  RowMatrixXd e = model.embeddings();
  normalize_rows(e);
  return e * e.transpose();
}

namespace {

// Running max similarity of every vocabulary token to the context.
class ContrastiveState {
 public:
  ContrastiveState(const Eigen::MatrixXd& sim, TokenSpan prefix)
      : sim_(sim), max_sim_(static_cast<std::size_t>(sim.rows()), -std::numeric_limits<double>::infinity()) {
    for (TokenId t : prefix) absorb(t);
  }

  void absorb(TokenId t) {
    has_context_ = true;
    const auto col = sim_.col(t);
    for (std::size_t v = 0; v < max_sim_.size(); ++v) max_sim_[v] = std::max(max_sim_[v], col(static_cast<Eigen::Index>(v)));
  }

  double penalty(TokenId v) const { return has_context_ ? max_sim_[static_cast<std::size_t>(v)] : 0.0; }

 private:
  const Eigen::MatrixXd& sim_;
  std::vector<double> max_sim_;
  bool has_context_ = false;
};

TokenId contrastive_pick(std::span<const double> dist, const ContrastiveState& state, double alpha, std::size_t k) {
  TokenId best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (TokenId v : top_k_tokens(dist, k)) {
    const double s = (1.0 - alpha) * dist[static_cast<std::size_t>(v)] - alpha * state.penalty(v);
    if (best < 0 || s > best_score || (s == best_score && v < best)) {
      best = v;
      best_score = s;
    }
  }
  return best;
}

// Continues contrastive decoding from `context` (which already holds the
// prefix and any forced tokens) until `gen` has suffix_len tokens.
void contrastive_continue(const LanguageModel& model, TokenSeq context,
                          ContrastiveState state, Generation& gen, std::size_t suffix_len, double alpha,
                          std::size_t k) {
  std::vector<double> dist(model.vocab_size());
  while (gen.suffix.size() < suffix_len) {
    model.next_dist(context, dist);
    const TokenId tok = contrastive_pick(dist, state, alpha, k);
    gen.score += std::log(dist[static_cast<std::size_t>(tok)]);
    gen.suffix.push_back(tok);
    context.push_back(tok);
    state.absorb(tok);
  }
}

void check_contrastive(double alpha, std::size_t k) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must be in [0, 1]");
  if (k < 1) throw ArgumentError("k must be >= 1");
}

}  // namespace

Generation contrastive_search(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len, double alpha,
                              std::size_t k) {
  check_contrastive(alpha, k);
  const Eigen::MatrixXd sim = token_similarity(model);
  Generation gen;
  contrastive_continue(model, TokenSeq(prefix.begin(), prefix.end()), ContrastiveState(sim, prefix), gen,
                       suffix_len, alpha, k);
  return gen;
}

std::vector<Generation> contrastive_multi(const LanguageModel& model, TokenSpan prefix, std::size_t suffix_len,
                                          double alpha, std::size_t k, std::size_t m, std::uint64_t seed) {
  check_contrastive(alpha, k);
  if (m < 1) throw ArgumentError("contrastive_multi needs m >= 1");
  std::vector<Generation> out;
  out.reserve(m);
  const Eigen::MatrixXd sim = token_similarity(model);
  const ContrastiveState prefix_state(sim, prefix);
  const TokenSeq prefix_seq(prefix.begin(), prefix.end());

  Generation first;
  contrastive_continue(model, prefix_seq, prefix_state, first, suffix_len, alpha, k);
  out.push_back(first);
  if (m == 1 || suffix_len == 0) {
    out.resize(m, first);
    return out;
  }

  // Everything after the branching token is deterministic, so each distinct
  // first token is decoded once.
  const std::vector<double> dist = model.next_dist(prefix);
  std::map<TokenId, Generation> by_first;
  for (std::size_t g = 1; g < m; ++g) {
    Rng rng(derive_seed(seed, {g}));
    const TokenId tok = sample_top_k(dist, k, rng);
    auto it = by_first.find(tok);
    if (it == by_first.end()) {
      Generation gen;
      gen.suffix.push_back(tok);
      gen.score = std::log(dist[static_cast<std::size_t>(tok)]);
      TokenSeq context = prefix_seq;
      context.push_back(tok);
      ContrastiveState state = prefix_state;
      state.absorb(tok);
      contrastive_continue(model, std::move(context), std::move(state), gen, suffix_len, alpha, k);
      it = by_first.emplace(tok, std::move(gen)).first;
    }
    out.push_back(it->second);
  }
  return out;
}

std::vector<Generation> decode(const LanguageModel& model, TokenSpan prefix, const DecodeParams& params,
                               std::uint64_t seed) {
  params.validate();
  const std::size_t m = params.num_generations;
  switch (params.strategy) {
    case Strategy::kGreedy:
      return std::vector<Generation>(m, greedy_decode(model, prefix, params.suffix_len));
    case Strategy::kTopKSample:
      return topk_sample(model, prefix, params.suffix_len, params.k, m, seed);
    case Strategy::kBeam:
      return beam_search(model, prefix, params.suffix_len, params.beam_width, m);
    case Strategy::kContrastive:
      return contrastive_multi(model, prefix, params.suffix_len, params.alpha, params.k, m, seed);
  }
  throw ConfigError("unknown decoding strategy");
}

}  // namespace extractbench
