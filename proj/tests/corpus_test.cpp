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

#include <algorithm>
#include <set>

#include "extractbench/corpus.hpp"
#include "extractbench/random.hpp"
#include "test_util.hpp"

namespace extractbench {
namespace {

// Brute-force oracle: number of positions where `needle` starts.
std::size_t scan_count(const Corpus& c, const TokenSeq& needle) {
  std::size_t n = 0;
  for (const auto& doc : c.docs)
    for (std::size_t i = 0; i + needle.size() <= doc.size(); ++i)
      if (std::equal(needle.begin(), needle.end(), doc.begin() + static_cast<std::ptrdiff_t>(i))) ++n;
  return n;
}

// Brute-force oracle for sample exclusion.
std::set<std::int64_t> scan_kept(const Corpus& c, std::size_t p, std::size_t s) {
  std::set<std::int64_t> kept;
  for (const auto& [id, canary] : c.canary_index) {
    bool ok = true;
    for (const auto& doc : c.docs) {
      for (std::size_t i = 0; i + p <= doc.size(); ++i) {
        if (!std::equal(canary.tokens.begin(), canary.tokens.begin() + static_cast<std::ptrdiff_t>(p),
                        doc.begin() + static_cast<std::ptrdiff_t>(i)))
          continue;
        for (std::size_t j = 0; j < s && i + p + j < doc.size(); ++j)
          if (doc[i + p + j] != canary.tokens[p + j]) ok = false;
      }
    }
    if (ok) kept.insert(id);
  }
  return kept;
}

CorpusSpec small_spec(std::uint64_t seed) {
  CorpusSpec spec;
  spec.vocab_size = 32;
  spec.n_background_docs = 40;
  spec.doc_len = 60;
  spec.n_canaries = 20;
  spec.canary_len = 20;
  spec.dup_counts = cycled_dup_counts(20, {1, 2, 3});
  spec.seed = seed;
  return spec;
}

TEST(SynthCorpus, NoCanaryCase) {
  CorpusSpec spec;
  spec.n_canaries = 0;
  spec.n_background_docs = 1;
  spec.doc_len = 10;
  spec.seed = 4;
  const Corpus c = synth_corpus(spec);
  ASSERT_EQ(c.docs.size(), 1u);
  EXPECT_EQ(c.docs[0].size(), 10u);
  EXPECT_TRUE(c.canary_index.empty());
}

TEST(SynthCorpus, SingleCanaryOccursDupCountTimes) {
  CorpusSpec spec;
  spec.n_canaries = 1;
  spec.dup_counts = {3};
  spec.n_background_docs = 50;
  spec.seed = 17;
  const Corpus c = synth_corpus(spec);
  ASSERT_EQ(c.canary_index.size(), 1u);
  const auto& canary = c.canary_index.begin()->second;
  EXPECT_EQ(scan_count(c, canary.tokens), 3u);
  EXPECT_EQ(count_occurrences(c, canary.tokens), 3u);
}

TEST(SynthCorpus, OccurrenceProperty) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Corpus c = synth_corpus(small_spec(seed));
    for (const auto& [id, canary] : c.canary_index)
      EXPECT_EQ(scan_count(c, canary.tokens), static_cast<std::size_t>(canary.dup_count)) << "canary " << id;
  }
}

TEST(SynthCorpus, DeterministicPerSeed) {
  EXPECT_EQ(synth_corpus(small_spec(5)), synth_corpus(small_spec(5)));
  EXPECT_NE(synth_corpus(small_spec(5)).docs, synth_corpus(small_spec(6)).docs);
}

TEST(SynthCorpus, TokensInVocabAndLengthsAddUp) {
  const CorpusSpec spec = small_spec(9);
  const Corpus c = synth_corpus(spec);
  std::size_t total = 0;
  for (const auto& d : c.docs) {
    total += d.size();
    for (TokenId t : d) {
      ASSERT_GE(t, 0);
      ASSERT_LT(static_cast<std::size_t>(t), spec.vocab_size);
    }
  }
  std::size_t injected = 0;
  for (int d : spec.dup_counts) injected += static_cast<std::size_t>(d) * spec.canary_len;
  EXPECT_EQ(total, spec.n_background_docs * spec.doc_len + injected);
}

TEST(SynthCorpus, BackgroundFollowsSparseTransitions) {
  CorpusSpec spec = small_spec(3);
  spec.n_canaries = 0;
  spec.dup_counts.clear();
  spec.markov_branching = 2;
  const Corpus c = synth_corpus(spec);
  std::map<std::pair<TokenId, TokenId>, std::set<TokenId>> succ;
  for (const auto& d : c.docs)
    for (std::size_t i = 2; i < d.size(); ++i) succ[{d[i - 2], d[i - 1]}].insert(d[i]);
  for (const auto& [state, next] : succ) EXPECT_LE(next.size(), 2u);
}

TEST(CorpusSpec, ValidateRejectsBadSpecs) {
  CorpusSpec spec = small_spec(1);
  spec.dup_counts.pop_back();
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = small_spec(1);
  spec.dup_counts[0] = 0;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = small_spec(1);
  spec.markov_branching = 0;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = small_spec(1);
  spec.canary_len = spec.doc_len + 1;
  EXPECT_THROW(spec.validate(), ConfigError);
  EXPECT_NO_THROW(small_spec(1).validate());
}

TEST(DefaultSpec, CyclesDupLevels) {
  const CorpusSpec spec = default_corpus_spec(1);
  ASSERT_EQ(spec.dup_counts.size(), 400u);
  for (int level : {1, 2, 5, 10, 25})
    EXPECT_EQ(std::count(spec.dup_counts.begin(), spec.dup_counts.end(), level), 80);
}

Corpus hand_corpus() {
  Corpus c;
  c.vocab = Vocab::numeric(10);
  c.canary_index[0] = Canary{{1, 2, 3, 4, 5, 6}, 1};
  c.canary_index[1] = Canary{{7, 8, 9, 1, 2, 3}, 1};
  c.docs = {{0, 1, 2, 3, 4, 5, 6, 0}, {7, 8, 9, 1, 2, 3, 0}, {0, 0, 1, 2, 3, 9, 9}};
  return c;
}

TEST(ExtractSamples, PrefixFollowedElsewhereByOtherTokensIsExcluded) {
  const Corpus c = hand_corpus();
  // Canary 0's prefix [1,2,3] reappears in doc 1 (truncated after it) and in
  // doc 2 followed by 9, so canary 0 is ambiguous; canary 1 is unique.
  const auto samples = extract_samples(c, 3, 3);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].sample_id, 1);
  EXPECT_EQ(samples[0].prefix, (TokenSeq{7, 8, 9}));
  EXPECT_EQ(samples[0].suffix, (TokenSeq{1, 2, 3}));
  EXPECT_EQ(scan_kept(c, 3, 3), (std::set<std::int64_t>{1}));
}

TEST(ExtractSamples, MatchesBruteForceUniquenessScan) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    CorpusSpec spec = small_spec(seed);
    spec.vocab_size = 16;  // tiny vocabulary forces prefix collisions
    spec.markov_branching = 1;
    const Corpus c = synth_corpus(spec);
    for (std::size_t p : {2u, 3u, 4u}) {
      std::set<std::int64_t> got;
      for (const auto& s : extract_samples(c, p, 5)) got.insert(s.sample_id);
      EXPECT_EQ(got, scan_kept(c, p, 5)) << "seed " << seed << " prefix " << p;
    }
  }
}

TEST(ExtractSamples, SamplesCopyCanaryFields) {
  const Corpus c = synth_corpus(small_spec(2));
  for (const auto& s : extract_samples(c, 8, 8)) {
    const Canary& canary = c.canary_index.at(s.sample_id);
    EXPECT_EQ(s.dup_count, canary.dup_count);
    EXPECT_TRUE(std::equal(s.prefix.begin(), s.prefix.end(), canary.tokens.begin()));
    EXPECT_TRUE(std::equal(s.suffix.begin(), s.suffix.end(), canary.tokens.begin() + 8));
  }
  EXPECT_THROW(extract_samples(c, 15, 15), ArgumentError);
}

TEST(SplitSamples, OrderPreservingFloorSplit) {
  std::vector<ExtractionSample> s(15000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i].sample_id = static_cast<std::int64_t>(i);
  const auto split = split_samples(s, 14.0 / 15.0);
  EXPECT_EQ(split.train.size(), 14000u);
  EXPECT_EQ(split.test.size(), 1000u);
  EXPECT_EQ(split.test.front().sample_id, 14000);
  const auto small = split_samples(std::vector<ExtractionSample>(s.begin(), s.begin() + 7), 0.5);
  EXPECT_EQ(small.train.size(), 3u);
  EXPECT_THROW(split_samples(s, 1.0), ArgumentError);
}

TEST(CorpusIo, RoundTrip) {
  const auto dir = testing::temp_dir("corpus_io");
  const Corpus c = synth_corpus(small_spec(8));
  write_corpus(c, dir / "corpus.txt", dir / "corpus.meta.json");
  EXPECT_EQ(read_corpus(dir / "corpus.txt", dir / "corpus.meta.json"), c);
  const auto samples = extract_samples(c, 5, 5);
  write_samples(samples, dir / "samples.jsonl");
  EXPECT_EQ(read_samples(dir / "samples.jsonl"), samples);
  EXPECT_THROW(read_corpus(dir / "missing.txt", dir / "corpus.meta.json"), FormatError);
}

TEST(Vocab, LookupAndRange) {
  const Vocab v = Vocab::numeric(5);
  EXPECT_EQ(v.lookup("3"), 3);
  EXPECT_EQ(v.token(4), "4");
  EXPECT_THROW(v.token(5), ArgumentError);
  EXPECT_THROW(v.lookup("x"), ArgumentError);
  EXPECT_EQ(join_tokens(TokenSeq{12, 7, 255}), "12 7 255");
}

}  // namespace
}  // namespace extractbench
