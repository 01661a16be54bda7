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

#ifndef EXTRACTBENCH_REPORT_HPP_
#define EXTRACTBENCH_REPORT_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "extractbench/attack.hpp"

namespace extractbench {

nlohmann::json metrics_json(const AttackMetrics& m);
nlohmann::json attack_config_json(const AttackConfig& c);

// Full report: config echo, ordered predictions, metric block, histogram,
// importances and the fitted classifier.
nlohmann::json report_json(const AttackReport& report);
AttackReport report_from_json(const nlohmann::json& j);

// Writes metrics.json, predictions.csv, report.json and plot-ready
// CSV/SVG pairs for the rank histogram, feature importance and confusion matrix.
void write_report(const AttackReport& report, const std::filesystem::path& dir);

// predictions.csv: rank,sample_id,confidence,correct
void write_predictions_csv(const std::vector<RankedEntry>& ranked, const std::filesystem::path& path);
std::vector<RankedEntry> read_predictions_csv(const std::filesystem::path& path);

// Generations file, JSON Lines {"sample_id", "gen_index", "suffix", "score"}.
void write_generations(const GenerationMap& generations, const std::filesystem::path& path);
GenerationMap read_generations(const std::filesystem::path& path);

// Minimal bar chart.
std::string bar_chart_svg(const std::string& title, const std::vector<std::pair<std::string, double>>& bars);

// Fixed-precision decimal rendering used in every text artifact.
std::string format_double(double v);

}  // namespace extractbench

#endif  // EXTRACTBENCH_REPORT_HPP_
