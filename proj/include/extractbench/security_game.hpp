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

#ifndef EXTRACTBENCH_SECURITY_GAME_HPP_
#define EXTRACTBENCH_SECURITY_GAME_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "extractbench/corpus.hpp"
#include "extractbench/language_model.hpp"
#include "extractbench/ngram_model.hpp"

namespace extractbench {

// Black-box view of the challenger's model: loss and next-token
// distributions only.
class ModelOracle {
 public:
  explicit ModelOracle(const LanguageModel& model) : model_(model) {}
  double loss(TokenSpan prefix, TokenSpan continuation) const { return sequence_loss(model_, prefix, continuation); }
  std::vector<double> next_dist(TokenSpan context) const { return model_.next_dist(context); }
  std::size_t vocab_size() const { return model_.vocab_size(); }

 private:
  const LanguageModel& model_;
};

// Membership adversary. Guess 0 means "member", 1 means "non-member".
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  // Labeled points disjoint from the challenge pool.
  virtual void calibrate(const ModelOracle& oracle, const std::vector<ExtractionSample>& members,
                         const std::vector<ExtractionSample>& non_members) = 0;
  virtual int guess(const ModelOracle& oracle, const ExtractionSample& x) const = 0;
};

class ConstantAdversary final : public Adversary {
 public:
  explicit ConstantAdversary(int bit = 0) : bit_(bit) {}
  std::string name() const override { return "constant"; }
  void calibrate(const ModelOracle&, const std::vector<ExtractionSample>&,
                 const std::vector<ExtractionSample>&) override {}
  int guess(const ModelOracle&, const ExtractionSample&) const override { return bit_; }

 private:
  int bit_;
};

// Guesses member iff loss(suffix | prefix) < tau, with tau the calibration
// threshold of highest accuracy (midpoints between sorted losses).
class LossThresholdAdversary final : public Adversary {
 public:
  std::string name() const override { return "loss_threshold"; }
  void calibrate(const ModelOracle& oracle, const std::vector<ExtractionSample>& members,
                 const std::vector<ExtractionSample>& non_members) override;
  int guess(const ModelOracle& oracle, const ExtractionSample& x) const override;
  double threshold() const { return tau_; }

 private:
  double tau_ = 0.0;
};

std::unique_ptr<Adversary> make_adversary(const std::string& name);

struct GameConfig {
  CorpusSpec world;  // canaries form the universe the dataset is drawn from
  NGramOptions lm;
  std::size_t prefix_len = 50;
  std::size_t suffix_len = 50;
  // Fraction of members and of non-members handed to the adversary for
  // calibration; the rest form the challenge pools.
  double calibration_frac = 0.5;
  // Challenger skips training and answers from a uniform model.
  bool untrained = false;
  std::uint64_t seed = 0;
};

// A small world with `n_canaries` canaries all duplicated `dup_count` times.
GameConfig default_game_config(std::uint64_t seed);

struct GameTranscript {
  int b = 0;
  std::int64_t x = 0;  // challenged sample id
  int b_hat = 0;
  bool win = false;
};

struct GameResult {
  std::string adversary;
  std::vector<GameTranscript> transcripts;
  std::size_t wins() const;
  double win_rate() const;
  // Wilson score interval at the given z.
  std::pair<double, double> confidence_interval(double z = 1.96) const;
};

// `make` builds a fresh adversary for every trial. Trial t uses
// derive_seed(config.seed, {t}) for the dataset split, training and bit.
GameResult security_game(const GameConfig& config, const std::function<std::unique_ptr<Adversary>()>& make,
                         std::size_t trials, std::size_t threads = 1);

}  // namespace extractbench

#endif  // EXTRACTBENCH_SECURITY_GAME_HPP_
