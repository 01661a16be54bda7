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

#ifndef EXTRACTBENCH_ATTACK_HPP_
#define EXTRACTBENCH_ATTACK_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "extractbench/corpus.hpp"
#include "extractbench/decoding.hpp"
#include "extractbench/language_model.hpp"
#include "extractbench/metrics.hpp"
#include "extractbench/mia.hpp"

namespace extractbench {

// Token-wise equality; throws ArgumentError on a length mismatch.
bool exact_match(TokenSpan a, TokenSpan b);

using GenerationMap = std::map<std::int64_t, std::vector<Generation>>;
using CandidateMap = std::map<std::int64_t, std::vector<Candidate>>;

// Raw decoder output per sample. Sample s uses the stream
// derive_seed(decode.seed, {s.sample_id}), so results do not depend on threads.
GenerationMap generate(const LanguageModel& model, const std::vector<ExtractionSample>& samples,
                       const DecodeParams& decode, std::size_t threads = 1);

// Deduplicated candidates (first-occurrence order) with loss, count and label.
CandidateMap build_candidates(const LanguageModel& model, const std::vector<ExtractionSample>& samples,
                              const GenerationMap& generations, std::size_t threads = 1);

CandidateMap generate_candidates(const LanguageModel& model, const std::vector<ExtractionSample>& samples,
                                 const DecodeParams& decode, std::size_t threads = 1);

// Minimum-loss candidate per sample; equal losses go to the smaller suffix.
std::vector<Candidate> filter_lowest_loss(const CandidateMap& candidates);

// Fraction of samples with at least one correct candidate.
double stage1_recall(const CandidateMap& candidates, std::size_t n_samples);
double stage1_recall(const std::vector<Candidate>& filtered, std::size_t n_samples);

enum class ClassifierChoice { kAuto, kLogReg, kGnb, kGBoost, kPerceptron, kNone };
std::string to_string(ClassifierChoice c);
ClassifierChoice parse_classifier_choice(const std::string& name);

struct AttackConfig {
  DecodeParams decode;
  ClassifierChoice classifier = ClassifierChoice::kAuto;
  double fpr = 0.10;
  ErrorBudget budget = ErrorBudget::kTotalSamples;
  // Tail of the training split held out for auto_select.
  double validation_frac = 0.2;
  int importance_repeats = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AttackMetrics {
  double recall_at_fpr = 0.0;
  double fpr = 0.10;
  double precision = 0.0;
  double recall = 0.0;
  ConfusionMatrix confusion;
  double stage1_recall = 0.0;
  double stage1_recall_post_filter = 0.0;
};

struct AttackReport {
  AttackConfig config;
  std::string classifier_name;  // "none" for the loss-ordered baseline
  std::size_t n_test = 0;
  std::vector<RankedEntry> ranked;               // emitted guesses, best first
  std::vector<RankedPrediction> predictions;     // same order as `ranked`
  AttackMetrics metrics;
  std::map<std::size_t, std::size_t> rank_histogram;
  std::optional<FeatureImportance> importance;
  nlohmann::json classifier_artifact;            // null for the baseline
};

// Everything run_attack consumed, kept for artifact export.
struct AttackArtifacts {
  GenerationMap train_generations;
  GenerationMap test_generations;
  std::vector<Candidate> train_filtered;
  std::vector<Candidate> test_filtered;
  Eigen::MatrixXd train_features;
  Eigen::MatrixXd test_features;
};

// Candidates are produced from pre-computed generations so paired runs
// (baseline vs classifier) consume identical candidate sets.
AttackReport run_attack_on(const LanguageModel& model, const std::vector<ExtractionSample>& train,
                           const std::vector<ExtractionSample>& test, const GenerationMap& train_generations,
                           const GenerationMap& test_generations, const AttackConfig& config, std::size_t threads = 1,
                           AttackArtifacts* artifacts = nullptr);

AttackReport run_attack(const LanguageModel& model, const std::vector<ExtractionSample>& train,
                        const std::vector<ExtractionSample>& test, const AttackConfig& config, std::size_t threads = 1,
                        AttackArtifacts* artifacts = nullptr);

}  // namespace extractbench

#endif  // EXTRACTBENCH_ATTACK_HPP_
