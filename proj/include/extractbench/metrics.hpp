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

#ifndef EXTRACTBENCH_METRICS_HPP_
#define EXTRACTBENCH_METRICS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "extractbench/types.hpp"

namespace extractbench {

struct RankedEntry {
  std::int64_t sample_id = 0;
  bool correct = false;
  double confidence = 0.0;
  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

// Denominator of the error budget in recall_at_fpr.
enum class ErrorBudget {
  kTotalSamples,   // floor(fpr * n_total)
  kEmittedGuesses  // floor(fpr * |ranked|)
};

std::string to_string(ErrorBudget b);
ErrorBudget parse_error_budget(const std::string& name);

// Walks the ranked list counting correct entries, stopping right before the
// error budget would be exceeded. Abstentions (n_total - |ranked|) count in the
// denominator only. Returns correct / n_total.
double recall_at_fpr(std::span<const RankedEntry> ranked, std::size_t n_total, double fpr,
                     ErrorBudget budget = ErrorBudget::kTotalSamples);

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(const std::vector<bool>& predicted, const std::vector<bool>& labels);

// tp / (tp + fp); 0 when nothing was predicted positive.
double precision(const ConfusionMatrix& cm);
// Every ranked entry is an emitted (positive) guess.
double precision(std::span<const RankedEntry> ranked);

// 1-based rank of the true suffix inside each candidate list (lists sorted by
// ascending loss); prefixes without the true suffix are omitted. Maps rank ->
// number of prefixes.
std::map<std::size_t, std::size_t> rank_histogram(std::span<const std::vector<TokenSeq>> ranked_suffixes,
                                                  std::span<const TokenSeq> truth);

}  // namespace extractbench

#endif  // EXTRACTBENCH_METRICS_HPP_
