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

#include "extractbench/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace extractbench {

std::string to_string(ErrorBudget b) {
  return b == ErrorBudget::kTotalSamples ? "total" : "emitted";
}

ErrorBudget parse_error_budget(const std::string& name) {
  if (name == "total") return ErrorBudget::kTotalSamples;
  if (name == "emitted") return ErrorBudget::kEmittedGuesses;
  throw ConfigError("unknown error budget '" + name + "' (expected total or emitted)");
}

double recall_at_fpr(std::span<const RankedEntry> ranked, std::size_t n_total, double fpr, ErrorBudget budget) {
  if (!(fpr > 0.0 && fpr < 1.0)) throw ArgumentError("fpr must be in (0, 1)");
  if (n_total < ranked.size()) throw ArgumentError("n_total is smaller than the ranked list");
  if (ranked.empty() || n_total == 0) return 0.0;
  const std::size_t base = budget == ErrorBudget::kTotalSamples ? n_total : ranked.size();
  const auto allowed = static_cast<std::size_t>(std::floor(fpr * static_cast<double>(base)));
  std::size_t correct = 0, errors = 0;
  for (const RankedEntry& e : ranked) {
    if (e.correct) {
      ++correct;
    } else if (++errors > allowed) {
      break;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n_total);
}

ConfusionMatrix confusion(const std::vector<bool>& predicted, const std::vector<bool>& labels) {
  if (predicted.size() != labels.size()) throw ArgumentError("confusion: size mismatch");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i]) {
      ++(labels[i] ? cm.tp : cm.fp);
    } else {
      ++(labels[i] ? cm.fn : cm.tn);
    }
  }
  return cm;
}

double precision(const ConfusionMatrix& cm) {
  const std::size_t pos = cm.tp + cm.fp;
  return pos == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(pos);
}

double precision(std::span<const RankedEntry> ranked) {
  if (ranked.empty()) return 0.0;
  const auto tp = std::count_if(ranked.begin(), ranked.end(), [](const RankedEntry& e) { return e.correct; });
  return static_cast<double>(tp) / static_cast<double>(ranked.size());
}

std::map<std::size_t, std::size_t> rank_histogram(std::span<const std::vector<TokenSeq>> ranked_suffixes,
                                                  std::span<const TokenSeq> truth) {
  if (ranked_suffixes.size() != truth.size()) throw ArgumentError("rank_histogram: size mismatch");
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& list = ranked_suffixes[i];
    const auto it = std::find(list.begin(), list.end(), truth[i]);
    if (it != list.end()) ++hist[static_cast<std::size_t>(it - list.begin()) + 1];
  }
  return hist;
}

}  // namespace extractbench
