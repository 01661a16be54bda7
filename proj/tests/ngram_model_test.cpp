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


#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "extractbench/corpus.hpp"
#include "extractbench/ngram_model.hpp"
#include "extractbench/random.hpp"
#include "test_util.hpp"

namespace extractbench {
namespace {

NGramOptions bigram_opts() {
  NGramOptions o;
  o.order = 2;
  o.add_k = 1.0;
  o.lambdas = {0.0, 1.0};
  o.embed_dim = 4;
  return o;
}

const std::vector<TokenSeq> kAbab = {{0, 1, 0, 1, 0}};

TEST(NGramModel, BigramCountsByHand) {
  const NGramModel m = train_ngram(kAbab, 2, bigram_opts());
  const TokenSeq a{0}, b{1};
  EXPECT_EQ(m.count(a, 1), 2u);
  EXPECT_EQ(m.count(b, 0), 2u);
  EXPECT_EQ(m.count(a, 0), 0u);
  EXPECT_EQ(m.context_total(a), 2u);
  EXPECT_EQ(m.count({}, 0), 3u);
}

TEST(NGramModel, BigramProbability) {
  const NGramModel m = train_ngram(kAbab, 2, bigram_opts());
  const TokenSeq a{0};
  EXPECT_NEAR(m.prob(a, 1), 0.75, 1e-12);
  EXPECT_NEAR(m.prob(a, 0), 0.25, 1e-12);
  const TokenSeq cont{1};
  EXPECT_NEAR(sequence_loss(m, a, cont), -std::log(0.75), 1e-12);
  EXPECT_NEAR(sequence_loss(m, a, cont), 0.2877, 1e-4);
}

TEST(NGramModel, SingleSymbolCorpus) {
  NGramOptions o;
  o.embed_dim = 4;
  const NGramModel m = train_ngram(std::vector<TokenSeq>{{0, 0, 0, 0}}, 3, o);
  const auto d = m.next_dist(TokenSeq{0});
  EXPECT_EQ(std::max_element(d.begin(), d.end()) - d.begin(), 0);
}

TEST(NGramModel, UniformLoss) {
  const UniformModel u(256, 8, 3);
  EXPECT_NEAR(sequence_loss(u, TokenSeq{1, 2}, TokenSeq{5, 9, 200}), std::log(256.0), 1e-12);
  for (double p : u.next_dist(TokenSeq{})) EXPECT_DOUBLE_EQ(p, 1.0 / 256);
  EXPECT_NEAR(std::log(256.0), 5.545, 1e-3);
}

TEST(NGramModel, CertainModelHasZeroLoss) {
  testing::FunctionModel m(
      3, [](TokenSpan ctx) {
        std::vector<double> d(3, 0.0);
        d[static_cast<std::size_t>((ctx.back() + 1) % 3)] = 1.0;
        return d;
      },
      testing::random_unit_rows(3, 2, 1));
  EXPECT_DOUBLE_EQ(sequence_loss(m, TokenSeq{0}, TokenSeq{1, 2, 0, 1}), 0.0);
}

TEST(NGramModel, EmptyContinuationThrows) {
  const UniformModel u(4, 2, 0);
  EXPECT_THROW(sequence_loss(u, TokenSeq{1}, TokenSeq{}), ArgumentError);
}

TEST(NGramModel, TrainErrors) {
  NGramOptions o;
  EXPECT_THROW(train_ngram(std::vector<TokenSeq>{}, 4, o), FitError);
  EXPECT_THROW(train_ngram(std::vector<TokenSeq>{{}}, 4, o), FitError);
  EXPECT_THROW(train_ngram(std::vector<TokenSeq>{{0, 7}}, 4, o), FitError);
  o.order = 0;
  EXPECT_THROW(train_ngram(kAbab, 2, o), ConfigError);
  o = {};
  o.add_k = 0;
  EXPECT_THROW(train_ngram(kAbab, 2, o), ConfigError);
  o = {};
  o.lambdas = {0.5, 0.5};
  EXPECT_THROW(train_ngram(kAbab, 2, o), ConfigError);
  o.order = 2;
  o.lambdas = {0.7, 0.7};
  EXPECT_THROW(train_ngram(kAbab, 2, o), ConfigError);
  o.lambdas = {1.5, -0.5};
  EXPECT_THROW(train_ngram(kAbab, 2, o), ConfigError);
}

TEST(NGramModel, DefaultLambdas) {
  const auto l = default_lambdas(5);
  ASSERT_EQ(l.size(), 5u);
  EXPECT_NEAR(std::accumulate(l.begin(), l.end(), 0.0), 1.0, 1e-15);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(l[i], std::pow(2.0, static_cast<double>(i)) / 31.0, 1e-15);
}

CorpusSpec small_spec(std::uint64_t seed) {
  CorpusSpec s;
  s.vocab_size = 40;
  s.n_background_docs = 30;
  s.doc_len = 80;
  s.n_canaries = 10;
  s.canary_len = 20;
  s.dup_counts = cycled_dup_counts(10, {1, 3});
  s.seed = seed;
  return s;
}

TEST(NGramModel, DistributionsNormalized) {
  const Corpus c = synth_corpus(small_spec(4));
  const NGramModel m = train_ngram(c, NGramOptions{});
  Rng rng(99);
  std::vector<double> d(m.vocab_size());
  for (int trial = 0; trial < 200; ++trial) {
    TokenSeq ctx(rng.below(7));
    for (auto& t : ctx) t = static_cast<TokenId>(rng.below(40));
    m.next_dist(ctx, d);
    double s = 0;
    for (double p : d) {
      ASSERT_GT(p, 0.0);
      s += p;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
    const TokenId v = static_cast<TokenId>(rng.below(40));
    EXPECT_NEAR(m.prob(ctx, v), d[static_cast<std::size_t>(v)], 1e-15);
  }
}

TEST(NGramModel, MatchesInterpolationFormula) {
  const Corpus c = synth_corpus(small_spec(5));
  NGramOptions o;
  o.order = 3;
  o.add_k = 0.5;
  const NGramModel m = train_ngram(c, o);
  const auto lam = default_lambdas(3);
  const double v = 40;
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto& doc = c.docs[rng.below(c.docs.size())];
    const std::size_t pos = 2 + rng.below(doc.size() - 2);
    const TokenSeq ctx(doc.begin() + static_cast<std::ptrdiff_t>(pos - 2), doc.begin() + static_cast<std::ptrdiff_t>(pos));
    const TokenId tok = doc[pos];
    // Brute-force counts straight from the documents.
    double expected = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      double num = 0, den = 0;
      for (const auto& d : c.docs) {
        for (std::size_t j = i; j < d.size(); ++j) {
          if (!std::equal(ctx.end() - static_cast<std::ptrdiff_t>(i), ctx.end(), d.begin() + static_cast<std::ptrdiff_t>(j - i)))
            continue;
          den += 1;
          if (d[j] == tok) num += 1;
        }
      }
      expected += lam[i] * (num + 0.5) / (den + 0.5 * v);
    }
    EXPECT_NEAR(m.prob(ctx, tok), expected, 1e-12);
  }
}

TEST(NGramModel, UnigramWeightsIgnoreContext) {
  const Corpus c = synth_corpus(small_spec(6));
  NGramOptions o;
  o.order = 3;
  o.lambdas = {1.0, 0.0, 0.0};
  const NGramModel m = train_ngram(c, o);
  const auto base = m.next_dist(TokenSeq{});
  EXPECT_EQ(m.next_dist(TokenSeq{3}), base);
  EXPECT_EQ(m.next_dist(TokenSeq{7, 1, 9}), base);
}

TEST(NGramModel, Deterministic) {
  const Corpus c = synth_corpus(small_spec(7));
  NGramOptions o;
  o.seed = 11;
  const NGramModel a = train_ngram(c, o), b = train_ngram(c, o);
  EXPECT_EQ(a.embeddings(), b.embeddings());
  EXPECT_EQ(a.next_dist(TokenSeq{1, 2, 3}), b.next_dist(TokenSeq{1, 2, 3}));
}

TEST(NGramModel, SaveLoadRoundTrip) {
  const Corpus c = synth_corpus(small_spec(8));
  const NGramModel m = train_ngram(c, NGramOptions{});
  const auto dir = testing::temp_dir("ngram_rt");
  m.save(dir / "m.bin");
  const NGramModel r = NGramModel::load(dir / "m.bin");
  EXPECT_EQ(r.order(), m.order());
  EXPECT_EQ(r.lambdas(), m.lambdas());
  EXPECT_EQ(r.add_k(), m.add_k());
  EXPECT_EQ(r.embeddings(), m.embeddings());
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    TokenSeq ctx(rng.below(6));
    for (auto& t : ctx) t = static_cast<TokenId>(rng.below(40));
    ASSERT_EQ(r.next_dist(ctx), m.next_dist(ctx));
  }
  r.save(dir / "m2.bin");
  EXPECT_EQ(testing::slurp(dir / "m.bin"), testing::slurp(dir / "m2.bin"));
}

TEST(NGramModel, LoadRejectsGarbage) {
  const auto dir = testing::temp_dir("ngram_bad");
  {
    std::ofstream(dir / "bad.bin") << "not a model";
  }
  EXPECT_THROW(NGramModel::load(dir / "bad.bin"), FormatError);
  EXPECT_THROW(NGramModel::load(dir / "missing.bin"), FormatError);
}

TEST(NGramModel, ReprIsUnitNorm) {
  const Corpus c = synth_corpus(small_spec(9));
  const NGramModel m = train_ngram(c, NGramOptions{});
  for (TokenId t = 0; t < 40; ++t) {
    const auto v = m.token_repr(t);
    EXPECT_EQ(v.size(), 32);
    EXPECT_NEAR(v.norm(), 1.0, 1e-6);
    EXPECT_NEAR(v.dot(v), 1.0, 1e-6);
    EXPECT_TRUE(v.allFinite());
  }
  EXPECT_THROW(m.token_repr(40), ArgumentError);
  EXPECT_THROW(m.token_repr(-1), ArgumentError);
}

// Two disjoint alternating documents over 4 tokens.
const std::vector<TokenSeq> kTwoPairs = {{0, 1, 0, 1, 0, 1}, {2, 3, 2, 3, 2, 3}};

TEST(NGramModel, PpmiByHand) {
  // Window 2: 5 adjacent (0,1) pairs each way, 4 same-token pairs at distance
  // 2; the other document mirrors this. Total 36, every marginal 9.
  const Eigen::MatrixXd p = ppmi_matrix(kTwoPairs, 4, 2);
  EXPECT_NEAR(p(0, 1), std::log(5.0 * 36 / 81), 1e-12);
  EXPECT_NEAR(p(0, 0), std::log(4.0 * 36 / 81), 1e-12);
  EXPECT_NEAR(p(3, 2), std::log(5.0 * 36 / 81), 1e-12);
  EXPECT_EQ(p(0, 2), 0.0);
  EXPECT_EQ(p(1, 3), 0.0);
}

TEST(NGramModel, CooccurringTokensAreMoreSimilar) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    NGramOptions o;
    o.seed = seed;
    const NGramModel m = train_ngram(kTwoPairs, 4, o);
    const double together = m.token_repr(0).dot(m.token_repr(1));
    const double apart = m.token_repr(0).dot(m.token_repr(2));
    EXPECT_LE(apart, together) << "seed " << seed;
    EXPECT_NEAR(m.token_repr(2).dot(m.token_repr(2)), 1.0, 1e-12);
  }
}

TEST(NGramModel, MemorizesDuplicatedCanaries) {
  const Corpus c = synth_corpus(default_corpus_spec(1));
  const NGramModel m = train_ngram(c, NGramOptions{});
  Rng rng(5);
  std::size_t n = 0, wins = 0;
  for (const auto& [id, canary] : c.canary_index) {
    if (canary.dup_count < 10) continue;
    const TokenSpan prefix(canary.tokens.data(), 50);
    const TokenSpan truth(canary.tokens.data() + 50, 50);
    double mean = 0;
    for (int r = 0; r < 20; ++r) {
      TokenSeq random(50);
      for (auto& t : random) t = static_cast<TokenId>(rng.below(m.vocab_size()));
      mean += sequence_loss(m, prefix, random) / 20;
    }
    ++n;
    wins += sequence_loss(m, prefix, truth) < mean ? 1 : 0;
  }
  ASSERT_GT(n, 0u);
  EXPECT_GE(static_cast<double>(wins), 0.95 * static_cast<double>(n));
}

}  // namespace
}  // namespace extractbench
