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

#include <set>

#include "extractbench/attack.hpp"
#include "extractbench/ngram_model.hpp"
#include "test_util.hpp"

namespace extractbench {
namespace {

struct Bench {
  Corpus corpus;
  NGramModel model;
  std::vector<ExtractionSample> samples;
};

Bench small_bench(std::vector<int> levels, std::uint64_t seed) {
  CorpusSpec spec;
  spec.vocab_size = 64;
  spec.n_background_docs = 60;
  spec.doc_len = 100;
  spec.n_canaries = 60;
  spec.canary_len = 24;
  spec.dup_counts = cycled_dup_counts(spec.n_canaries, levels);
  spec.markov_branching = 3;
  spec.markov_concentration = 1.0;
  spec.seed = seed;
  Corpus c = synth_corpus(spec);
  NGramOptions o;
  o.seed = seed;
  NGramModel m = train_ngram(c, o);
  auto samples = extract_samples(c, 12, 12);
  return {std::move(c), std::move(m), std::move(samples)};
}

DecodeParams small_decode(std::size_t m) {
  DecodeParams d;
  d.suffix_len = 12;
  d.num_generations = m;
  d.seed = 5;
  return d;
}

TEST(ExactMatch, Cases) {
  EXPECT_TRUE(exact_match(TokenSeq{1, 2, 3}, TokenSeq{1, 2, 3}));
  EXPECT_FALSE(exact_match(TokenSeq{1, 2, 3}, TokenSeq{1, 2, 4}));
  EXPECT_TRUE(exact_match(TokenSeq{}, TokenSeq{}));
  EXPECT_THROW(exact_match(TokenSeq{1}, TokenSeq{1, 2}), ArgumentError);
}

TEST(Candidates, DedupSemantics) {
  const UniformModel u(8, 2, 0);
  ExtractionSample s;
  s.sample_id = 7;
  s.prefix = {1, 2};
  s.suffix = {3, 4};
  GenerationMap gens;
  gens[7] = {{{5, 5}, 0.0}, {{5, 5}, 0.0}, {{3, 4}, 0.0}};
  const CandidateMap cm = build_candidates(u, {s}, gens);
  ASSERT_EQ(cm.at(7).size(), 2u);
  for (const auto& c : cm.at(7)) {
    EXPECT_EQ(c.count, 2);
    EXPECT_NEAR(c.loss, std::log(8.0), 1e-12);
    EXPECT_EQ(c.prefix, s.prefix);
  }
  EXPECT_EQ(cm.at(7)[0].suffix, (TokenSeq{5, 5}));
  EXPECT_FALSE(cm.at(7)[0].is_correct);
  EXPECT_TRUE(cm.at(7)[1].is_correct);
  EXPECT_DOUBLE_EQ(stage1_recall(cm, 1), 1.0);
}

TEST(Candidates, GreedySingleGeneration) {
  const Bench b = small_bench({1, 3}, 1);
  DecodeParams d = small_decode(1);
  d.strategy = Strategy::kGreedy;
  const CandidateMap cm = generate_candidates(b.model, b.samples, d);
  ASSERT_EQ(cm.size(), b.samples.size());
  for (const auto& [id, list] : cm) {
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0].count, 1);
    EXPECT_GE(list[0].loss, 0.0);
  }
}

TEST(Filter, LowestLoss) {
  CandidateMap cm;
  Candidate a, b2, c;
  a.sample_id = b2.sample_id = c.sample_id = 1;
  a.suffix = {1};
  a.loss = 0.5;
  b2.suffix = {2};
  b2.loss = 0.2;
  c.suffix = {3};
  c.loss = 0.9;
  cm[1] = {a, b2, c};
  Candidate only;
  only.sample_id = 2;
  only.suffix = {4};
  cm[2] = {only};
  const auto f = filter_lowest_loss(cm);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].suffix, TokenSeq{2});
  EXPECT_EQ(f[1], only);
  // Equal losses go to the lexicographically smaller suffix.
  c.loss = 0.2;
  cm[1] = {c, b2};
  EXPECT_EQ(filter_lowest_loss(cm)[0].suffix, TokenSeq{2});
}

TEST(Candidates, RecallGrowsWithGenerations) {
  const Bench b = small_bench({1, 2, 4}, 2);
  const double r1 = stage1_recall(generate_candidates(b.model, b.samples, small_decode(1)), b.samples.size());
  const double r10 = stage1_recall(generate_candidates(b.model, b.samples, small_decode(10)), b.samples.size());
  const auto cm100 = generate_candidates(b.model, b.samples, small_decode(100));
  const double r100 = stage1_recall(cm100, b.samples.size());
  EXPECT_LE(r1, r10);
  EXPECT_LE(r10, r100);
  EXPECT_LE(stage1_recall(filter_lowest_loss(cm100), b.samples.size()), r100);
}

TEST(Generate, IndependentOfThreads) {
  const Bench b = small_bench({1, 3}, 3);
  EXPECT_EQ(generate(b.model, b.samples, small_decode(8), 1), generate(b.model, b.samples, small_decode(8), 3));
}

TEST(RunAttack, MemorizedWorldIsPerfect) {
  const Bench b = small_bench({40}, 4);
  const auto split = split_samples(b.samples, 0.7);
  AttackConfig cfg;
  cfg.decode = small_decode(4);
  for (ClassifierChoice choice : {ClassifierChoice::kNone, ClassifierChoice::kGBoost}) {
    cfg.classifier = choice;
    const AttackReport r = run_attack(b.model, split.train, split.test, cfg);
    EXPECT_DOUBLE_EQ(r.metrics.stage1_recall, 1.0);
    EXPECT_DOUBLE_EQ(r.metrics.recall_at_fpr, 1.0) << to_string(choice);
  }
}

TEST(RunAttack, UniformModelFindsNothing) {
  const Bench b = small_bench({1, 3}, 5);
  const UniformModel u(64, 8, 1);
  const auto split = split_samples(b.samples, 0.7);
  AttackConfig cfg;
  cfg.decode = small_decode(4);
  cfg.classifier = ClassifierChoice::kNone;
  const AttackReport r = run_attack(u, split.train, split.test, cfg);
  EXPECT_DOUBLE_EQ(r.metrics.stage1_recall, 0.0);
  EXPECT_DOUBLE_EQ(r.metrics.recall_at_fpr, 0.0);
  EXPECT_TRUE(r.rank_histogram.empty());
}

TEST(RunAttack, PairedRunsShareCandidatesAndAreDeterministic) {
  const Bench b = small_bench({1, 2, 5, 10}, 6);
  const auto split = split_samples(b.samples, 0.7);
  AttackConfig cfg;
  cfg.decode = small_decode(20);
  const auto tg = generate(b.model, split.train, cfg.decode);
  const auto sg = generate(b.model, split.test, cfg.decode);
  AttackArtifacts base_art, auto_art;
  cfg.classifier = ClassifierChoice::kNone;
  const AttackReport base = run_attack_on(b.model, split.train, split.test, tg, sg, cfg, 1, &base_art);
  cfg.classifier = ClassifierChoice::kAuto;
  const AttackReport a1 = run_attack_on(b.model, split.train, split.test, tg, sg, cfg, 1, &auto_art);
  const AttackReport a2 = run_attack_on(b.model, split.train, split.test, tg, sg, cfg, 3);
  EXPECT_EQ(base_art.test_filtered, auto_art.test_filtered);
  EXPECT_EQ(base.metrics.stage1_recall, a1.metrics.stage1_recall);
  EXPECT_EQ(a1.ranked, a2.ranked);
  EXPECT_EQ(a1.classifier_artifact, a2.classifier_artifact);
  EXPECT_TRUE(a1.importance.has_value());
  EXPECT_FALSE(base.importance.has_value());
  // Stage-1 recall bounds the final recall.
  EXPECT_LE(a1.metrics.recall_at_fpr, a1.metrics.stage1_recall);
  EXPECT_LE(base.metrics.recall_at_fpr, base.metrics.stage1_recall_post_filter);
  EXPECT_LE(a1.metrics.stage1_recall_post_filter, a1.metrics.stage1_recall);
  for (std::size_t i = 1; i < a1.ranked.size(); ++i) EXPECT_GE(a1.ranked[i - 1].confidence, a1.ranked[i].confidence);
}

TEST(RunAttack, RejectsOverlap) {
  const Bench b = small_bench({2}, 7);
  AttackConfig cfg;
  cfg.decode = small_decode(2);
  cfg.classifier = ClassifierChoice::kNone;
  EXPECT_THROW(run_attack(b.model, b.samples, {b.samples[0]}, cfg), ArgumentError);
}

TEST(AttackConfig, Validation) {
  AttackConfig c;
  EXPECT_NO_THROW(c.validate());
  c.fpr = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.fpr = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.validation_frac = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  for (auto ch : {ClassifierChoice::kAuto, ClassifierChoice::kLogReg, ClassifierChoice::kGnb, ClassifierChoice::kGBoost,
                  ClassifierChoice::kPerceptron, ClassifierChoice::kNone})
    EXPECT_EQ(parse_classifier_choice(to_string(ch)), ch);
  EXPECT_THROW(parse_classifier_choice("svm"), ConfigError);
}

}  // namespace
}  // namespace extractbench
